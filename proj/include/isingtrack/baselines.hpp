#pragma once

#include <span>
#include <vector>

#include "isingtrack/ising.hpp"
#include "isingtrack/marketdata.hpp"
#include "isingtrack/selector.hpp"

namespace isingtrack::baselines {

/// Ledoit-Wolf shrinkage towards the constant-correlation target. All
/// matrices are row-major N x N; moments use the 1/T normalisation.
struct ShrunkCovariance {
  std::size_t n = 0;
  std::vector<double> matrix;  // delta * target + (1 - delta) * sample
  std::vector<double> sample;
  std::vector<double> target;
  double shrinkage_intensity = 0.0;  // delta in [0, 1]

  double operator()(std::size_t i, std::size_t j) const { return matrix[i * n + j]; }
};

/// Top-K by correlation with the index, equal weights, ties alphabetical.
selector::Selection greedy_correlation_select(const marketdata::ReturnsPanel& train, std::size_t k);

ShrunkCovariance ledoit_wolf_shrink(std::span<const std::vector<double>> returns);

/// Top-K by mean return / sqrt(shrunk variance). Zero-variance assets are
/// excluded with a warning.
selector::Selection robust_mvo_select(const marketdata::ReturnsPanel& train, std::size_t k);

/// Single-linkage clustering on d_ij = sqrt((1 - rho_ij) / 2) cut at K
/// clusters, keeping each cluster's minimum-variance member. Equal merge
/// distances are resolved by merging the pair whose more volatile member is
/// more volatile first, so low-variance assets stay in separate clusters.
selector::Selection hrp_select(const marketdata::ReturnsPanel& train, std::size_t k);

struct OracleResult {
  ising::SpinState state;
  std::vector<std::size_t> selected;  // ascending node indices
  double energy = 0.0;
};

inline constexpr std::size_t kOracleMaxNodes = 25;

/// Minimum-energy state with exactly K spins on, found by enumerating all
/// C(n, K) subsets; equal energies resolve to the lexicographically smallest
/// index set.
OracleResult exhaustive_oracle(const ising::IsingModel& model, std::size_t k);

}  // namespace isingtrack::baselines
