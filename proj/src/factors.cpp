#include "isingtrack/factors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isingtrack/errors.hpp"
#include "isingtrack/kernels.hpp"

namespace isingtrack::factors {

void CouplingConfig::validate() const {
  std::string problems;
  auto add = [&](const char* msg) { problems += (problems.empty() ? "" : "; ") + std::string(msg); };
  if (!(gamma_min > 0.0)) add("gamma_min must be > 0");
  if (!(gamma_min <= gamma0)) add("gamma_min must be <= gamma0");
  if (!(gamma0 <= gamma_max)) add("gamma0 must be <= gamma_max");
  if (!(tau >= 0.0 && tau < 1.0)) add("tau must lie in [0, 1)");
  if (!(edge_scale > 0.0)) add("edge_scale must be > 0");
  if (!(v0 > 0.0)) add("v0 must be > 0");
  if (!problems.empty()) fail(ErrorCode::Config, "coupling config: " + problems);
}

AssetIndexStats asset_index_stats(std::span<const double> asset, std::span<const double> index) {
  if (asset.size() != index.size())
    fail(ErrorCode::Dimension, "asset and index series differ in length");
  if (asset.size() < 2) fail(ErrorCode::InsufficientData, "need at least 2 observations");
  const double mean_a = simd::mean(asset);
  const double mean_x = simd::mean(index);
  const double var_x = simd::centered_dot(index, mean_x, index, mean_x);
  if (!(var_x > 0.0)) fail(ErrorCode::DegenerateData, "benchmark returns have zero variance");
  const double var_a = simd::centered_dot(asset, mean_a, asset, mean_a);
  if (!(var_a > 0.0)) return {0.0, 0.0};
  const double cov = simd::centered_dot(asset, mean_a, index, mean_x);
  const double rho = std::clamp(cov / std::sqrt(var_a * var_x), -1.0, 1.0);
  return {rho, cov / var_x};
}

double tracking_quality(double correlation, double beta) {
  return correlation * std::exp(-std::abs(beta - 1.0));
}

std::vector<double> min_max_normalize(std::span<const double> raw) {
  std::vector<double> out(raw.size(), 0.5);
  if (raw.empty()) return out;
  auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - *lo) / range;
  return out;
}

std::vector<double> momentum_scores(const marketdata::ReturnsPanel& panel) {
  const std::size_t t = panel.num_days();
  if (t < kMomentumLookback)
    fail(ErrorCode::InsufficientData, "momentum needs " + std::to_string(kMomentumLookback) +
                                          " days of history, got " + std::to_string(t));
  const std::size_t begin = t - kMomentumLookback;
  const std::size_t len = kMomentumLookback - kMomentumSkip;
  std::vector<double> raw;
  raw.reserve(panel.num_assets());
  for (const auto& col : panel.returns)
    raw.push_back(simd::mean(std::span<const double>(col).subspan(begin, len)));
  return min_max_normalize(raw);
}

std::vector<double> liquidity_scores(std::span<const std::vector<double>> volumes) {
  std::vector<double> avg;
  avg.reserve(volumes.size());
  for (const auto& col : volumes) {
    if (col.empty()) fail(ErrorCode::InsufficientData, "liquidity needs at least one day of volume");
    avg.push_back(simd::mean(col));
  }
  const double top = avg.empty() ? 0.0 : *std::max_element(avg.begin(), avg.end());
  if (!(top > 0.0)) fail(ErrorCode::DegenerateData, "all average volumes are zero");
  for (double& v : avg) v /= top;
  return avg;
}

FactorScores compute_factor_scores(const marketdata::ReturnsPanel& panel) {
  FactorScores scores;
  for (const auto& col : panel.returns) {
    auto stats = asset_index_stats(col, panel.index_returns);
    scores.correlation.push_back(stats.correlation);
    scores.beta.push_back(stats.beta);
    scores.tracking_quality.push_back(tracking_quality(stats.correlation, stats.beta));
  }
  scores.momentum = momentum_scores(panel);
  if (panel.volumes.empty()) fail(ErrorCode::InsufficientData, "returns panel carries no volumes");
  scores.liquidity = liquidity_scores(panel.volumes);
  return scores;
}

std::vector<double> compute_biases(const FactorScores& scores, const BiasWeights& weights) {
  const std::size_t n = scores.size();
  if (scores.tracking_quality.size() != n || scores.momentum.size() != n || scores.liquidity.size() != n)
    fail(ErrorCode::Dimension, "factor score vectors differ in length");
  std::vector<double> biases(n);
  for (std::size_t i = 0; i < n; ++i) {
    biases[i] = weights.alpha * (weights.w_tracking * scores.tracking_quality[i] +
                                 weights.w_momentum * scores.momentum[i] +
                                 weights.w_liquidity * scores.liquidity[i]);
  }
  return biases;
}

double dynamic_coupling_strength(double vix, const CouplingConfig& config) {
  if (!(vix > 0.0)) fail(ErrorCode::Domain, "VIX level must be positive");
  const double raw = config.gamma0 * std::exp(-0.5 * (vix / config.v0 - 1.0));
  return std::clamp(raw, config.gamma_min, config.gamma_max);
}

CorrMatrix correlation_matrix(std::span<const std::vector<double>> columns) {
  const std::size_t n = columns.size();
  CorrMatrix corr(n);
  if (n == 0) return corr;
  const std::size_t t = columns[0].size();
  for (const auto& col : columns)
    if (col.size() != t) fail(ErrorCode::Dimension, "return columns differ in length");
  if (t < 2) fail(ErrorCode::InsufficientData, "correlation needs at least 2 observations");

  std::vector<double> means(n), ss(n);
  for (std::size_t i = 0; i < n; ++i) {
    means[i] = simd::mean(columns[i]);
    ss[i] = simd::centered_dot(columns[i], means[i], columns[i], means[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double rho = 0.0;
      if (ss[i] > 0.0 && ss[j] > 0.0) {
        const double cross = simd::centered_dot(columns[i], means[i], columns[j], means[j]);
        rho = std::clamp(cross / std::sqrt(ss[i] * ss[j]), -1.0, 1.0);
      }
      corr(i, j) = rho;
      corr(j, i) = rho;
    }
  }
  return corr;
}

CouplingGraph build_couplings(const CorrMatrix& corr, double gamma, const CouplingConfig& config) {
  CouplingGraph edges;
  const std::size_t n = corr.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double rho = corr(i, j);
      if (std::abs(rho) > config.tau) edges.push_back({i, j, gamma * rho * config.edge_scale});
    }
  }
  return edges;
}

}  // namespace isingtrack::factors
