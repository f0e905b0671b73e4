#pragma once

// Straight-line reimplementations used as oracles. Deliberately naive: plain
// loops, no shared helpers with the library.

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace reference {

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double sample_std(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

inline std::vector<double> minus(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d;
  for (std::size_t t = 0; t < a.size(); ++t) d.push_back(a[t] - b[t]);
  return d;
}

struct Metrics {
  double te, sharpe, sortino, mdd, ir, total_return, correlation;
};

inline Metrics metrics(const std::vector<double>& rp, const std::vector<double>& ri, double rf = 0.02,
                       double days = 252.0) {
  Metrics m{};
  const double rfd = rf / days;
  const auto d = minus(rp, ri);
  m.te = std::sqrt(days) * sample_std(d);
  m.ir = mean(d) / sample_std(d) * std::sqrt(days);
  m.sharpe = (mean(rp) - rfd) / sample_std(rp) * std::sqrt(days);
  std::vector<double> down;
  for (double r : rp) down.push_back(r - rfd < 0.0 ? r - rfd : 0.0);
  m.sortino = (mean(rp) - rfd) / sample_std(down) * std::sqrt(days);
  double equity = 1.0, peak = 1.0, worst = 0.0;
  for (double r : rp) {
    equity = equity * (1.0 + r);
    if (equity > peak) peak = equity;
    if (equity / peak - 1.0 < worst) worst = equity / peak - 1.0;
  }
  m.mdd = worst;
  m.total_return = equity - 1.0;
  const double mp = mean(rp), mi = mean(ri);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t t = 0; t < rp.size(); ++t) {
    sxy += (rp[t] - mp) * (ri[t] - mi);
    sxx += (rp[t] - mp) * (rp[t] - mp);
    syy += (ri[t] - mi) * (ri[t] - mi);
  }
  m.correlation = sxy / std::sqrt(sxx * syy);
  return m;
}

struct SelectorOutcome {
  std::vector<std::size_t> picks;
  bool phase3 = false;
};

// `better(a, b)`: a ranks ahead of b (higher frequency, then smaller ticker).
inline bool better(std::size_t a, std::size_t b, const std::vector<double>& f, const std::vector<std::string>& t) {
  return f[a] > f[b] || (f[a] == f[b] && t[a] < t[b]);
}

/// Three-phase sector-balanced rule, by repeated best-candidate scans.
inline SelectorOutcome select(const std::vector<double>& f, const std::vector<std::string>& tickers,
                              const std::vector<int>& sector, std::size_t k, double frac, std::size_t min_sectors) {
  const std::size_t n = f.size();
  std::size_t cap = 0;
  while (static_cast<double>(cap) < frac * static_cast<double>(k) - 1e-9) ++cap;
  std::vector<bool> chosen(n, false);
  std::map<int, std::size_t> count;
  SelectorOutcome out;
  auto pick = [&](std::size_t i) {
    chosen[i] = true;
    ++count[sector[i]];
    out.picks.push_back(i);
  };

  std::map<int, bool> sectors_present;
  for (int s : sector) sectors_present[s] = true;
  std::size_t want = std::min({min_sectors, sectors_present.size(), k});
  // Phase 1: repeatedly take the best asset among sectors not yet represented.
  while (want-- > 0) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < n; ++i)
      if (count[sector[i]] == 0 && (!best || better(i, *best, f, tickers))) best = i;
    pick(*best);
  }
  // Phase 2: best remaining asset whose sector is under the cap.
  while (out.picks.size() < k) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < n; ++i)
      if (!chosen[i] && count[sector[i]] < cap && (!best || better(i, *best, f, tickers))) best = i;
    if (!best) break;
    pick(*best);
  }
  // Phase 3: best remaining asset.
  while (out.picks.size() < k) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < n; ++i)
      if (!chosen[i] && (!best || better(i, *best, f, tickers))) best = i;
    pick(*best);
    out.phase3 = true;
  }
  return out;
}

}  // namespace reference
