#pragma once

#include <span>
#include <string>
#include <vector>

#include "isingtrack/marketdata.hpp"

namespace isingtrack::selector {

struct SectorConstraints {
  double max_per_sector_frac = 0.25;
  std::size_t min_sectors = 6;

  void validate() const;
  /// ceil(max_per_sector_frac * k)
  std::size_t cap(std::size_t k) const;
};

enum class Weighting { Equal, Frequency };

struct Selection {
  std::vector<std::string> tickers;
  std::vector<double> weights;  // positive, sum to 1
  bool phase3_used = false;     // the sector cap was relaxed to fill the portfolio
  std::vector<std::string> warnings;
};

/// Tickers by descending score; ties by ascending ticker.
std::vector<std::size_t> rank_by_frequency(std::span<const double> freq, std::span<const std::string> tickers);
std::vector<std::string> ranked_tickers(std::span<const double> freq, std::span<const std::string> tickers);

/// Three-phase sector-balanced top-K:
///  1. seed one asset (the best) from each sector, sectors visited by their
///     best asset's rank, until min(min_sectors, sectors present) are covered;
///  2. walk the ranking, skipping assets whose sector already holds cap(K);
///  3. if slots remain, walk the ranking again ignoring the cap.
/// Throws Infeasible when K exceeds the universe or is zero.
Selection sector_balanced_select(std::span<const double> freq, std::span<const std::string> tickers,
                                 const marketdata::SectorMap& sectors, std::size_t k,
                                 const SectorConstraints& constraints,
                                 Weighting weighting = Weighting::Equal);

/// Equal weights 1/K.
std::vector<double> equal_weights(std::size_t k);

/// Build a selection from an index set (in the given order).
Selection make_selection(std::span<const std::size_t> picks, std::span<const std::string> tickers,
                         std::span<const double> freq, Weighting weighting);

}  // namespace isingtrack::selector
