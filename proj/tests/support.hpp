#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "isingtrack/date.hpp"
#include "isingtrack/ising.hpp"
#include "isingtrack/marketdata.hpp"

namespace testing {

using namespace isingtrack;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Biases in [bias_lo, bias_hi]; each pair gets an edge with probability
/// `density`, weight uniform in [-coupling, coupling].
inline ising::IsingModel random_model(std::mt19937_64& rng, std::size_t n, double density = 0.4,
                                      double bias_lo = 0.0, double bias_hi = 3.0, double coupling = 2.0) {
  std::vector<double> m(n);
  for (auto& x : m) x = uniform(rng, bias_lo, bias_hi);
  std::vector<ising::Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform(rng, 0, 1) < density) edges.push_back({i, j, uniform(rng, -coupling, coupling)});
  return ising::IsingModel(std::move(m), std::move(edges));
}

/// Exact Boltzmann probabilities over all 2^n states, state index = bit pattern.
inline std::vector<double> boltzmann(const ising::IsingModel& model, double beta) {
  const std::size_t n = model.size();
  std::vector<double> e(std::size_t{1} << n);
  double lowest = INFINITY;
  for (std::uint64_t b = 0; b < e.size(); ++b) {
    e[b] = ising::energy(model, ising::SpinState::from_bits(b, n));
    lowest = std::min(lowest, e[b]);
  }
  double z = 0.0;
  for (auto& x : e) z += (x = std::exp(-beta * (x - lowest)));
  for (auto& x : e) x /= z;
  return e;
}

inline std::vector<Date> business_days(Date start, std::size_t count) {
  std::vector<Date> out;
  for (Date d = start; out.size() < count; d = d.plus_days(1))
    if (!d.is_weekend()) out.push_back(d);
  return out;
}

/// One-factor market with `groups` correlated blocks. Index return is the
/// cross-sectional mean.
inline marketdata::ReturnsPanel synthetic_panel(std::size_t n_assets, std::size_t n_days, std::uint64_t seed,
                                                std::size_t groups = 4, Date start = Date{2020, 1, 2}) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  marketdata::ReturnsPanel p;
  p.dates = business_days(start, n_days);
  for (std::size_t a = 0; a < n_assets; ++a) p.tickers.push_back("A" + std::to_string(1000 + a));
  p.returns.assign(n_assets, std::vector<double>(n_days));
  p.volumes.assign(n_assets, std::vector<double>(n_days));
  p.index_returns.assign(n_days, 0.0);
  p.vix.assign(n_days, 0.0);
  std::vector<double> beta(n_assets), load(n_assets), idio(n_assets), vol(n_assets);
  for (std::size_t a = 0; a < n_assets; ++a) {
    beta[a] = uniform(rng, 0.5, 1.5);
    load[a] = uniform(rng, 0.3, 1.2);
    idio[a] = uniform(rng, 0.004, 0.015);
    vol[a] = uniform(rng, 1e5, 1e7);
  }
  double level = 20.0;
  for (std::size_t t = 0; t < n_days; ++t) {
    level = std::clamp(level + 0.1 * (20.0 - level) + z(rng), 10.0, 60.0);
    p.vix[t] = level;
    const double market = 0.0003 + 0.01 * z(rng);
    std::vector<double> shock(groups);
    for (auto& s : shock) s = 0.008 * z(rng);
    for (std::size_t a = 0; a < n_assets; ++a) {
      const double r = beta[a] * market + load[a] * shock[a % groups] + idio[a] * z(rng);
      p.returns[a][t] = r;
      p.index_returns[t] += r / static_cast<double>(n_assets);
      p.volumes[a][t] = vol[a] * std::exp(0.2 * z(rng));
    }
  }
  return p;
}

}  // namespace testing
