#include <cmath>
#include <random>

#include "doctest.h"
#include "isingtrack/backtest.hpp"
#include "isingtrack/errors.hpp"
#include "reference.hpp"
#include "support.hpp"

using namespace isingtrack;
using namespace isingtrack::backtest;

namespace {

marketdata::SplitDataset split_of(const marketdata::ReturnsPanel& p, std::size_t cut) {
  return {p.slice(0, cut), p.slice(cut, p.num_days()), p.dates[cut]};
}

SelectorPipeline fixed(std::vector<std::string> tickers) {
  return [tickers](const HistoryWindow&) {
    selector::Selection s;
    s.tickers = tickers;
    s.weights = selector::equal_weights(tickers.size());
    return s;
  };
}

// Top-2 by trailing 20-day mean; reads through the window accessors.
selector::Selection momentum_pick(const HistoryWindow& h) {
  std::vector<double> score(h.tickers().size(), 0.0);
  for (std::size_t a = 0; a < score.size(); ++a)
    for (std::size_t r = h.num_days() - 20; r < h.num_days(); ++r) score[a] += h.asset_return(a, r);
  auto order = selector::rank_by_frequency(score, h.tickers());
  order.resize(2);
  return selector::make_selection(order, h.tickers(), score, selector::Weighting::Equal);
}

BacktestConfig zero_cost() {
  BacktestConfig c;
  c.cost_bps = 0.0;
  return c;
}

}  // namespace

TEST_CASE("rebalance dates examples") {
  const auto year = testing::business_days(Date{2023, 1, 3}, 260);
  std::vector<Date> in_2023;
  for (auto d : year)
    if (d <= Date{2023, 12, 29}) in_2023.push_back(d);
  const auto r = rebalance_dates(in_2023);
  CHECK(r == std::vector<Date>{Date{2023, 1, 3}, Date{2023, 4, 3}, Date{2023, 7, 3}, Date{2023, 10, 2}});
  const auto inside = testing::business_days(Date{2023, 5, 10}, 20);
  CHECK(rebalance_dates(inside) == std::vector<Date>{inside.front()});
  CHECK(rebalance_dates(std::vector<Date>{}).empty());
}

TEST_CASE("perfect replication of the index") {
  auto p = testing::synthetic_panel(3, 400, 1);
  p.returns[1] = p.index_returns;
  const auto curve = run_backtest(fixed({p.tickers[1]}), split_of(p, 300), zero_cost());
  CHECK(curve.portfolio_returns == curve.index_returns);
  CHECK(tracking_error(curve.portfolio_returns, curve.index_returns, zero_cost()) == 0.0);
  const auto m = compute_metrics(curve.portfolio_returns, curve.index_returns, zero_cost());
  CHECK(*m.tracking_error == 0.0);
  CHECK(*m.correlation == 1.0);
  CHECK_FALSE(m.information_ratio.has_value());
}

TEST_CASE("initial purchase from cash costs the full notional") {
  const auto p = testing::synthetic_panel(4, 300, 2);
  BacktestConfig cfg;
  const auto curve = run_backtest(fixed({p.tickers[0], p.tickers[2]}), split_of(p, 260), cfg);
  const double gross = 0.5 * (p.returns[0][260] + p.returns[2][260]);
  CHECK(curve.portfolio_returns[0] == doctest::Approx(gross - 10e-4).epsilon(1e-14));
  CHECK(curve.holdings_log[0].turnover == doctest::Approx(1.0));
  CHECK(curve.holdings_log[0].cost == doctest::Approx(1e-3));
}

TEST_CASE("weights drift between rebalances") {
  marketdata::ReturnsPanel p;
  p.tickers = {"A", "B"};
  p.dates = {Date{2024, 1, 2}, Date{2024, 1, 3}, Date{2024, 1, 4}, Date{2024, 1, 5}};
  p.returns = {{0.0, 0.10, 0.05, -0.02}, {0.0, -0.10, 0.02, 0.03}};
  p.index_returns = {0, 0, 0, 0};
  p.vix = {20, 20, 20, 20};
  const marketdata::SplitDataset split{p.slice(0, 1), p.slice(1, 4), p.dates[1]};
  const auto curve = run_backtest(fixed({"A", "B"}), split, zero_cost());
  // Day 1: 0.5/0.5 -> 0.0. Weights become 0.55/0.45; day 2: 0.55*0.05 + 0.45*0.02.
  CHECK(curve.portfolio_returns[0] == doctest::Approx(0.0));
  double wa = 0.55, wb = 0.45;
  CHECK(curve.portfolio_returns[1] == doctest::Approx(wa * 0.05 + wb * 0.02).epsilon(1e-14));
  const double ta = wa * 1.05, tb = wb * 1.02;
  wa = ta / (ta + tb);
  wb = tb / (ta + tb);
  CHECK(curve.portfolio_returns[2] == doctest::Approx(wa * -0.02 + wb * 0.03).epsilon(1e-14));

  BacktestConfig daily = zero_cost();
  daily.drift = Drift::DailyRebalance;
  const auto reset = run_backtest(fixed({"A", "B"}), split, daily);
  CHECK(reset.portfolio_returns[1] == doctest::Approx(0.5 * 0.05 + 0.5 * 0.02).epsilon(1e-14));
  CHECK(reset.portfolio_returns[2] == doctest::Approx(0.5 * -0.02 + 0.5 * 0.03).epsilon(1e-14));
}

TEST_CASE("reading data at or after the rebalance date is a hard error") {
  const auto p = testing::synthetic_panel(3, 300, 3);
  AccessLog log;
  const SelectorPipeline cheat = [](const HistoryWindow& h) {
    h.asset_return(0, h.num_days());
    return selector::Selection{};
  };
  try {
    run_backtest(cheat, split_of(p, 260), BacktestConfig{}, &log);
    FAIL("expected look-ahead error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LookAhead);
  }
  CHECK(log.future_reads() == 1);
}

TEST_CASE("access log sees only pre-rebalance rows") {
  const auto p = testing::synthetic_panel(5, 500, 4);
  AccessLog log;
  const auto split = split_of(p, 300);
  const auto curve = run_backtest(momentum_pick, split, BacktestConfig{}, &log);
  CHECK(log.future_reads() == 0);
  REQUIRE(log.records().size() == curve.holdings_log.size());
  for (const auto& rec : log.records()) {
    CHECK(rec.any_read);
    CHECK(rec.max_row_read < rec.cutoff);
    CHECK(p.dates[rec.max_row_read] < rec.rebalance_date);
  }
}

TEST_CASE("selections are invariant to mutating data from each rebalance date onward") {
  const auto p = testing::synthetic_panel(6, 520, 5);
  const auto split = split_of(p, 300);
  const auto base = run_backtest(momentum_pick, split, BacktestConfig{});
  std::mt19937_64 rng(1);
  for (std::size_t r = 0; r < base.holdings_log.size(); ++r) {
    const std::size_t from = 300 + rebalance_indices(split.test.dates)[r];
    auto mutated = p;
    for (auto& col : mutated.returns)
      for (std::size_t t = from; t < col.size(); ++t) col[t] = testing::uniform(rng, -0.5, 0.5);
    for (std::size_t t = from; t < mutated.num_days(); ++t) mutated.vix[t] = 99.0;
    const auto again = run_backtest(momentum_pick, split_of(mutated, 300), BacktestConfig{});
    for (std::size_t q = 0; q <= r; ++q)
      CHECK(again.holdings_log[q].selection.tickers == base.holdings_log[q].selection.tickers);
    for (std::size_t t = 0; t + 300 < from; ++t) CHECK(again.portfolio_returns[t] == base.portfolio_returns[t]);
  }
}

TEST_CASE("costs never raise total return") {
  const auto p = testing::synthetic_panel(6, 520, 6);
  const auto split = split_of(p, 300);
  const auto free = run_backtest(momentum_pick, split, zero_cost());
  const auto paid = run_backtest(momentum_pick, split, BacktestConfig{});
  const auto mf = compute_metrics(free.portfolio_returns, free.index_returns, zero_cost());
  const auto mp = compute_metrics(paid.portfolio_returns, paid.index_returns, zero_cost());
  CHECK(*mp.total_return <= *mf.total_return);
}

TEST_CASE("tracking error examples") {
  const BacktestConfig c;
  const std::vector<double> x{0.01, 0.02, -0.01, 0.0};
  CHECK(tracking_error(x, x, c) == 0.0);
  const std::vector<double> shifted{0.03, 0.04, 0.01, 0.02};
  CHECK(tracking_error(shifted, x, c) < 1e-15);
  const std::vector<double> alt{0.01, -0.01, 0.01, -0.01}, zero(4, 0.0);
  CHECK(tracking_error(alt, zero, c) == doctest::Approx(0.1833).epsilon(1e-3));
  CHECK(tracking_error(alt, zero, c) == doctest::Approx(std::sqrt(252.0) * std::sqrt(4e-4 / 3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(tracking_error(alt, std::vector<double>(3, 0.0), c), Error);
  CHECK_THROWS_AS(tracking_error(std::vector<double>{0.1}, std::vector<double>{0.1}, c), Error);
}

TEST_CASE("metric examples") {
  const BacktestConfig c;
  std::vector<double> up{0.01, 0.02, 0.005, 0.03}, idx{0.0, 0.01, 0.0, 0.01};
  CHECK(*compute_metrics(up, idx, c).max_drawdown == 0.0);
  const auto self = compute_metrics(up, up, c);
  CHECK_FALSE(self.information_ratio.has_value());
  CHECK(*self.correlation == 1.0);
  const std::vector<double> steady(252, 0.001);
  const auto s = compute_metrics(steady, std::vector<double>(252, 0.0005), c);
  CHECK(*s.total_return == doctest::Approx(std::pow(1.001, 252) - 1).epsilon(1e-12));
  CHECK(*s.total_return == doctest::Approx(0.2863).epsilon(1e-3));
  CHECK_FALSE(s.sharpe.has_value());
  std::vector<double> dd{0.1, -0.5, 0.2};
  CHECK(*compute_metrics(dd, std::vector<double>(3, 0.0), c).max_drawdown == doctest::Approx(-0.5));
}

TEST_CASE("metrics match the straight-line oracle") {
  std::mt19937_64 rng(31);
  const BacktestConfig c;
  auto rel = [](double a, double b) { return std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)); };
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t t = 20 + rng() % 500;
    std::vector<double> rp(t), ri(t);
    for (std::size_t s = 0; s < t; ++s) {
      ri[s] = testing::uniform(rng, -0.03, 0.03);
      rp[s] = ri[s] + testing::uniform(rng, -0.01, 0.012);
    }
    const auto got = compute_metrics(rp, ri, c);
    const auto want = reference::metrics(rp, ri);
    CHECK(rel(*got.tracking_error, want.te));
    CHECK(rel(*got.sharpe, want.sharpe));
    CHECK(rel(*got.sortino, want.sortino));
    CHECK(rel(*got.max_drawdown, want.mdd));
    CHECK(rel(*got.information_ratio, want.ir));
    CHECK(rel(*got.total_return, want.total_return));
    CHECK(rel(*got.correlation, want.correlation));
    CHECK((*got.information_ratio > 0) == (reference::mean(reference::minus(rp, ri)) > 0));
  }
}

TEST_CASE("diebold-mariano examples") {
  std::mt19937_64 rng(2);
  std::vector<double> idx(250), a(250), b(250);
  for (std::size_t t = 0; t < 250; ++t) {
    idx[t] = testing::uniform(rng, -0.02, 0.02);
    a[t] = idx[t] + testing::uniform(rng, -0.01, 0.01);
    b[t] = idx[t] + testing::uniform(rng, -0.01, 0.01);
  }
  const auto same = diebold_mariano(a, a, idx);
  CHECK_FALSE(same.statistic.has_value());
  CHECK_FALSE(same.p_value.has_value());

  const auto worse = diebold_mariano(a, idx, idx);
  REQUIRE(worse.statistic.has_value());
  CHECK(*worse.statistic > 0.0);
  CHECK(*worse.p_value < 1e-6);

  const auto ab = diebold_mariano(a, b, idx), ba = diebold_mariano(b, a, idx);
  CHECK(*ab.statistic == -*ba.statistic);
  CHECK(*ab.p_value == *ba.p_value);

  const auto lagged = diebold_mariano(a, b, idx, 5);
  CHECK(lagged.statistic.has_value());
  CHECK(*lagged.statistic != *ab.statistic);
  CHECK_THROWS_AS(diebold_mariano(std::vector<double>(5, 0.0), std::vector<double>(5, 0.0), std::vector<double>(5, 0.0)),
                  Error);
}

TEST_CASE("diebold-mariano statistic from first principles") {
  const std::vector<double> idx(12, 0.0);
  std::vector<double> p(12), q(12, 0.0);
  for (int t = 0; t < 12; ++t) p[t] = 0.01 * (1 + t % 3);
  std::vector<double> d;
  for (double x : p) d.push_back(x * x);
  const double m = reference::mean(d);
  double v = 0;
  for (double x : d) v += (x - m) * (x - m) / 12.0;
  const auto r = diebold_mariano(p, q, idx);
  CHECK(*r.statistic == doctest::Approx(m / std::sqrt(v / 12.0)).epsilon(1e-12));
  CHECK(*r.p_value == doctest::Approx(std::erfc(*r.statistic / std::sqrt(2.0))).epsilon(1e-12));
}
