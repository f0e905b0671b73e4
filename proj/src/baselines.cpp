#include "isingtrack/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "isingtrack/errors.hpp"
#include "isingtrack/factors.hpp"
#include "isingtrack/kernels.hpp"

namespace isingtrack::baselines {

namespace {

void require_feasible(std::size_t k, std::size_t n) {
  if (k == 0) fail(ErrorCode::Infeasible, "portfolio cardinality must be >= 1");
  if (k > n)
    fail(ErrorCode::Infeasible, "cannot select " + std::to_string(k) + " assets from a universe of " +
                                    std::to_string(n));
}

selector::Selection top_k(std::span<const double> scores, std::span<const std::string> tickers, std::size_t k) {
  auto order = selector::rank_by_frequency(scores, tickers);
  order.resize(k);
  return selector::make_selection(order, tickers, scores, selector::Weighting::Equal);
}

std::vector<double> population_variances(std::span<const std::vector<double>> columns) {
  std::vector<double> var;
  for (const auto& col : columns) {
    const double mu = simd::mean(col);
    var.push_back(simd::centered_dot(col, mu, col, mu) / static_cast<double>(col.size()));
  }
  return var;
}

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
  std::vector<std::size_t> parent;
};

}  // namespace

selector::Selection greedy_correlation_select(const marketdata::ReturnsPanel& train, std::size_t k) {
  require_feasible(k, train.num_assets());
  std::vector<double> rho;
  for (const auto& col : train.returns) rho.push_back(factors::asset_index_stats(col, train.index_returns).correlation);
  return top_k(rho, train.tickers, k);
}

ShrunkCovariance ledoit_wolf_shrink(std::span<const std::vector<double>> returns) {
  const std::size_t n = returns.size();
  if (n == 0) fail(ErrorCode::InsufficientData, "no return columns");
  const std::size_t t = returns[0].size();
  if (t < 2) fail(ErrorCode::InsufficientData, "shrinkage needs at least 2 observations");
  for (const auto& col : returns)
    if (col.size() != t) fail(ErrorCode::Dimension, "return columns differ in length");
  const double tt = static_cast<double>(t);

  // Demeaned columns and their elementwise square and cube.
  std::vector<std::vector<double>> x(n), x2(n), x3(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mu = simd::mean(returns[i]);
    x[i].resize(t);
    x2[i].resize(t);
    x3[i].resize(t);
    for (std::size_t s = 0; s < t; ++s) {
      x[i][s] = returns[i][s] - mu;
      x2[i][s] = x[i][s] * x[i][s];
      x3[i][s] = x2[i][s] * x[i][s];
    }
  }

  ShrunkCovariance out;
  out.n = n;
  out.sample.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double s = simd::dot(x[i], x[j]) / tt;
      out.sample[i * n + j] = s;
      out.sample[j * n + i] = s;
    }
  auto S = [&](std::size_t i, std::size_t j) { return out.sample[i * n + j]; };

  double rbar = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (S(i, i) > 0.0 && S(j, j) > 0.0) {
        rbar += S(i, j) / std::sqrt(S(i, i) * S(j, j));
        ++pairs;
      }
  if (pairs) rbar /= static_cast<double>(pairs);

  out.target.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.target[i * n + j] = i == j ? S(i, i) : rbar * std::sqrt(S(i, i) * S(j, j));

  // pi_ij = mean_t (x_i x_j - s_ij)^2, theta_ii,ij = mean_t (x_i^2 - s_ii)(x_i x_j - s_ij)
  double pi = 0.0, rho = 0.0, gamma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double pij = simd::dot(x2[i], x2[j]) / tt - S(i, j) * S(i, j);
      pi += pij;
      const double diff = out.target[i * n + j] - S(i, j);
      gamma += diff * diff;
      if (i == j) {
        rho += pij;
      } else if (S(i, i) > 0.0 && S(j, j) > 0.0) {
        const double theta_i = simd::dot(x3[i], x[j]) / tt - S(i, i) * S(i, j);
        const double theta_j = simd::dot(x3[j], x[i]) / tt - S(j, j) * S(i, j);
        rho += 0.5 * rbar *
               (std::sqrt(S(j, j) / S(i, i)) * theta_i + std::sqrt(S(i, i) / S(j, j)) * theta_j);
      }
    }
  }
  // gamma -> 0 means the sample already sits on the target; the kappa / T
  // ratio then diverges and clamps to 1, which leaves the matrix unchanged.
  double delta = 1.0;
  if (gamma > 0.0) delta = std::clamp((pi - rho) / gamma / tt, 0.0, 1.0);
  out.shrinkage_intensity = delta;
  out.matrix.resize(n * n);
  for (std::size_t e = 0; e < n * n; ++e) out.matrix[e] = delta * out.target[e] + (1.0 - delta) * out.sample[e];
  return out;
}

selector::Selection robust_mvo_select(const marketdata::ReturnsPanel& train, std::size_t k) {
  const std::size_t n = train.num_assets();
  require_feasible(k, n);
  const auto shrunk = ledoit_wolf_shrink(train.returns);
  std::vector<std::size_t> eligible;
  std::vector<std::string> warnings;
  std::vector<double> score(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double var = shrunk(i, i);
    if (!(var > 0.0)) {
      warnings.push_back("robust_mvo: excluding " + train.tickers[i] + " (zero shrunk variance)");
      continue;
    }
    score[i] = simd::mean(train.returns[i]) / std::sqrt(var);
    eligible.push_back(i);
  }
  if (eligible.size() < k)
    fail(ErrorCode::Infeasible, "robust_mvo: only " + std::to_string(eligible.size()) +
                                    " assets with positive variance for K=" + std::to_string(k));
  std::sort(eligible.begin(), eligible.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return train.tickers[a] < train.tickers[b];
  });
  eligible.resize(k);
  auto sel = selector::make_selection(eligible, train.tickers, score, selector::Weighting::Equal);
  sel.warnings = std::move(warnings);
  return sel;
}

selector::Selection hrp_select(const marketdata::ReturnsPanel& train, std::size_t k) {
  const std::size_t n = train.num_assets();
  require_feasible(k, n);
  const auto corr = factors::correlation_matrix(train.returns);
  const auto var = population_variances(train.returns);

  struct Link {
    double distance;
    double hi_var;
    double lo_var;
    std::size_t i, j;
  };
  std::vector<Link> links;
  links.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::sqrt(std::max(0.0, (1.0 - corr(i, j)) / 2.0));
      links.push_back({d, std::max(var[i], var[j]), std::min(var[i], var[j]), i, j});
    }
  std::sort(links.begin(), links.end(), [](const Link& a, const Link& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.hi_var != b.hi_var) return a.hi_var > b.hi_var;
    if (a.lo_var != b.lo_var) return a.lo_var > b.lo_var;
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });

  DisjointSets sets(n);
  std::size_t clusters = n;
  for (const auto& link : links) {
    if (clusters == k) break;
    if (sets.unite(link.i, link.j)) --clusters;
  }

  // Representative: lowest variance, then alphabetical.
  std::vector<std::size_t> best(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t root = sets.find(i);
    std::size_t& cur = best[root];
    if (cur == n || var[i] < var[cur] || (var[i] == var[cur] && train.tickers[i] < train.tickers[cur])) cur = i;
  }
  std::vector<std::size_t> picks;
  for (std::size_t r = 0; r < n; ++r)
    if (best[r] != n) picks.push_back(best[r]);
  std::sort(picks.begin(), picks.end(), [&](std::size_t a, std::size_t b) {
    if (var[a] != var[b]) return var[a] < var[b];
    return train.tickers[a] < train.tickers[b];
  });
  return selector::make_selection(picks, train.tickers, var, selector::Weighting::Equal);
}

OracleResult exhaustive_oracle(const ising::IsingModel& model, std::size_t k) {
  const std::size_t n = model.size();
  if (n > kOracleMaxNodes)
    fail(ErrorCode::Size, "exhaustive oracle refuses n=" + std::to_string(n) + " > " +
                              std::to_string(kOracleMaxNodes));
  if (k > n) fail(ErrorCode::Infeasible, "K exceeds node count");

  const auto biases = model.biases();
  std::vector<std::size_t> combo(k);
  std::iota(combo.begin(), combo.end(), 0);
  auto combo_energy = [&] {
    double e = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      e -= biases[combo[a]];
      const auto row = model.coupling_row(combo[a]);
      for (std::size_t b = a + 1; b < k; ++b) e += row[combo[b]];
    }
    return e;
  };

  OracleResult best;
  best.selected = combo;
  best.energy = combo_energy();
  while (true) {
    // Advance to the next combination in lexicographic order.
    std::size_t pos = k;
    while (pos > 0 && combo[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++combo[pos - 1];
    for (std::size_t q = pos; q < k; ++q) combo[q] = combo[q - 1] + 1;
    const double e = combo_energy();
    if (e < best.energy - 1e-12 * std::max(1.0, std::abs(best.energy))) {
      best.energy = e;
      best.selected = combo;
    }
  }
  best.state = ising::SpinState(n);
  for (std::size_t i : best.selected) best.state.set(i, true);
  best.energy = ising::energy(model, best.state);
  return best;
}

}  // namespace isingtrack::baselines
