#pragma once

#include <span>
#include <vector>

#include "isingtrack/marketdata.hpp"

namespace isingtrack::factors {

struct FactorScores {
  std::vector<double> correlation;
  std::vector<double> beta;
  std::vector<double> tracking_quality;
  std::vector<double> momentum;   // [0, 1]
  std::vector<double> liquidity;  // [0, 1]

  std::size_t size() const { return correlation.size(); }
};

struct BiasWeights {
  double w_tracking = 3.0;
  double w_momentum = 1.0;
  double w_liquidity = 1.5;
  double alpha = 4.0;
};

struct CouplingConfig {
  double gamma0 = 0.5;
  double v0 = 20.0;
  double gamma_min = 0.1;
  double gamma_max = 0.8;
  double tau = 0.5;
  double edge_scale = 4.0;

  /// Throws Config on any violated bound.
  void validate() const;
};

/// Dense symmetric Pearson correlation matrix, row-major.
class CorrMatrix {
 public:
  explicit CorrMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {
    for (std::size_t i = 0; i < n; ++i) values_[i * n + i] = 1.0;
  }

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

struct Edge {
  std::size_t i;
  std::size_t j;
  double weight;
};

using CouplingGraph = std::vector<Edge>;

struct AssetIndexStats {
  double correlation;
  double beta;
};

/// Pearson correlation and regression beta against the index. A zero-variance
/// asset yields {0, 0}; a zero-variance index throws DegenerateData.
AssetIndexStats asset_index_stats(std::span<const double> asset, std::span<const double> index);

double tracking_quality(double correlation, double beta);

/// Momentum window: mean daily return over [T-252, T-21), min-max normalized
/// across assets (all equal -> 0.5).
inline constexpr std::size_t kMomentumLookback = 252;
inline constexpr std::size_t kMomentumSkip = 21;

std::vector<double> momentum_scores(const marketdata::ReturnsPanel& panel);
std::vector<double> min_max_normalize(std::span<const double> raw);

/// Average volume relative to the most traded asset.
std::vector<double> liquidity_scores(std::span<const std::vector<double>> volumes);

FactorScores compute_factor_scores(const marketdata::ReturnsPanel& panel);

/// Bias magnitudes m_i = alpha * (w_T TQ_i + w_M Mom_i + w_L Liq_i). The
/// energy uses -m_i s_i, so a larger magnitude favours selection.
std::vector<double> compute_biases(const FactorScores& scores, const BiasWeights& weights);

/// gamma(V) = clamp(gamma0 * exp(-(V / V0 - 1) / 2), gamma_min, gamma_max).
double dynamic_coupling_strength(double vix, const CouplingConfig& config);

CorrMatrix correlation_matrix(std::span<const std::vector<double>> columns);

/// Edges i < j with |rho_ij| > tau and weight gamma * rho_ij * edge_scale.
CouplingGraph build_couplings(const CorrMatrix& corr, double gamma, const CouplingConfig& config);

}  // namespace isingtrack::factors
