#include "isingtrack/selector.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "isingtrack/errors.hpp"

namespace isingtrack::selector {

void SectorConstraints::validate() const {
  if (!(max_per_sector_frac > 0.0 && max_per_sector_frac <= 1.0))
    fail(ErrorCode::Config, "selector.max_per_sector_frac must lie in (0, 1]");
  if (min_sectors < 1) fail(ErrorCode::Config, "selector.min_sectors must be >= 1");
}

std::size_t SectorConstraints::cap(std::size_t k) const {
  // Guard against 0.25 * 8 = 2.0000000000000004 style products.
  const double raw = max_per_sector_frac * static_cast<double>(k);
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) < 1e-9) return static_cast<std::size_t>(rounded);
  return static_cast<std::size_t>(std::ceil(raw));
}

std::vector<std::size_t> rank_by_frequency(std::span<const double> freq, std::span<const std::string> tickers) {
  if (freq.size() != tickers.size()) fail(ErrorCode::Dimension, "frequencies and tickers differ in length");
  std::vector<std::size_t> order(freq.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (freq[a] != freq[b]) return freq[a] > freq[b];
    return tickers[a] < tickers[b];
  });
  return order;
}

std::vector<std::string> ranked_tickers(std::span<const double> freq, std::span<const std::string> tickers) {
  std::vector<std::string> out;
  for (std::size_t i : rank_by_frequency(freq, tickers)) out.push_back(tickers[i]);
  return out;
}

std::vector<double> equal_weights(std::size_t k) {
  return std::vector<double>(k, 1.0 / static_cast<double>(k));
}

Selection make_selection(std::span<const std::size_t> picks, std::span<const std::string> tickers,
                         std::span<const double> freq, Weighting weighting) {
  Selection sel;
  for (std::size_t i : picks) sel.tickers.push_back(tickers[i]);
  sel.weights = equal_weights(picks.size());
  if (weighting == Weighting::Frequency) {
    double total = 0.0;
    for (std::size_t i : picks) total += freq[i];
    bool positive = total > 0.0;
    for (std::size_t i : picks) positive = positive && freq[i] > 0.0;
    if (positive) {
      for (std::size_t p = 0; p < picks.size(); ++p) sel.weights[p] = freq[picks[p]] / total;
    } else {
      sel.warnings.emplace_back("frequency weighting needs positive frequencies; using equal weights");
    }
  }
  return sel;
}

Selection sector_balanced_select(std::span<const double> freq, std::span<const std::string> tickers,
                                 const marketdata::SectorMap& sectors, std::size_t k,
                                 const SectorConstraints& constraints, Weighting weighting) {
  constraints.validate();
  const std::size_t n = tickers.size();
  if (k == 0) fail(ErrorCode::Infeasible, "portfolio cardinality must be >= 1");
  if (k > n)
    fail(ErrorCode::Infeasible, "cannot select " + std::to_string(k) + " assets from a universe of " +
                                    std::to_string(n));
  sectors.require_coverage(tickers);

  const auto ranking = rank_by_frequency(freq, tickers);
  std::vector<marketdata::Sector> sector_of(n);
  for (std::size_t i = 0; i < n; ++i) sector_of[i] = sectors.at(tickers[i]);

  std::vector<std::size_t> picks;
  std::vector<char> taken(n, 0);
  std::map<marketdata::Sector, std::size_t> held;
  auto take = [&](std::size_t i) {
    picks.push_back(i);
    taken[i] = 1;
    ++held[sector_of[i]];
  };

  // The first asset of each sector met along the ranking is that sector's
  // best, and the order of first meetings is the sector visiting order.
  std::vector<std::size_t> sector_leaders;
  {
    std::map<marketdata::Sector, bool> seen;
    for (std::size_t i : ranking)
      if (!seen[sector_of[i]]) {
        seen[sector_of[i]] = true;
        sector_leaders.push_back(i);
      }
  }

  Selection sel;
  const std::size_t present = sector_leaders.size();
  if (present < constraints.min_sectors)
    sel.warnings.push_back("universe has " + std::to_string(present) + " sectors, fewer than min_sectors=" +
                           std::to_string(constraints.min_sectors) + "; using all available sectors");
  const std::size_t seed_count = std::min({constraints.min_sectors, present, k});
  for (std::size_t s = 0; s < seed_count; ++s) take(sector_leaders[s]);

  const std::size_t cap = constraints.cap(k);
  for (std::size_t i : ranking) {
    if (picks.size() == k) break;
    if (taken[i] || held[sector_of[i]] >= cap) continue;
    take(i);
  }

  bool relaxed = false;
  for (std::size_t i : ranking) {
    if (picks.size() == k) break;
    if (taken[i]) continue;
    take(i);
    relaxed = true;
  }

  Selection built = make_selection(picks, tickers, freq, weighting);
  built.phase3_used = relaxed;
  built.warnings.insert(built.warnings.begin(), sel.warnings.begin(), sel.warnings.end());
  if (relaxed)
    built.warnings.push_back("sector cap of " + std::to_string(cap) + " relaxed to fill " +
                             std::to_string(k) + " slots");
  return built;
}

}  // namespace isingtrack::selector
