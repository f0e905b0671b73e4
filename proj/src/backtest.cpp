#include "isingtrack/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "isingtrack/errors.hpp"
#include "isingtrack/kernels.hpp"

namespace isingtrack::backtest {

void BacktestConfig::validate() const {
  if (!(cost_bps >= 0.0)) fail(ErrorCode::Config, "backtest.cost_bps must be >= 0");
  if (!(trading_days_per_year > 0.0)) fail(ErrorCode::Config, "backtest.trading_days_per_year must be > 0");
}

void AccessLog::begin(Date rebalance_date, std::size_t cutoff) {
  records_.push_back(Record{rebalance_date, cutoff, 0, 0, false});
}

void AccessLog::note_read(std::size_t row) {
  if (records_.empty()) return;
  auto& rec = records_.back();
  ++rec.reads;
  rec.max_row_read = rec.any_read ? std::max(rec.max_row_read, row) : row;
  rec.any_read = true;
}

HistoryWindow::HistoryWindow(const marketdata::ReturnsPanel& full, std::size_t cutoff, AccessLog* log)
    : full_(&full), cutoff_(cutoff), log_(log) {
  if (cutoff > full.num_days()) fail(ErrorCode::Dimension, "history cutoff beyond panel");
  decision_date_ = cutoff < full.num_days() ? full.dates[cutoff] : full.dates.back().plus_days(1);
}

void HistoryWindow::check(std::size_t row) const {
  if (row >= cutoff_) {
    if (log_) log_->note_future_read();
    fail(ErrorCode::LookAhead, "selector read row " + std::to_string(row) + " at or after rebalance date " +
                                   decision_date_.to_string());
  }
  if (log_) log_->note_read(row);
}

Date HistoryWindow::date(std::size_t row) const {
  check(row);
  return full_->dates[row];
}

double HistoryWindow::asset_return(std::size_t asset, std::size_t row) const {
  check(row);
  return full_->returns.at(asset)[row];
}

double HistoryWindow::index_return(std::size_t row) const {
  check(row);
  return full_->index_returns[row];
}

double HistoryWindow::vix(std::size_t row) const {
  check(row);
  return full_->vix[row];
}

double HistoryWindow::volume(std::size_t asset, std::size_t row) const {
  check(row);
  return full_->volumes.at(asset)[row];
}

marketdata::ReturnsPanel HistoryWindow::materialize(std::size_t lookback) const {
  const std::size_t begin = lookback >= cutoff_ ? 0 : cutoff_ - lookback;
  if (log_ && begin < cutoff_) {
    log_->note_read(begin);
    log_->note_read(cutoff_ - 1);
  }
  return full_->slice(begin, cutoff_);
}

std::vector<std::size_t> rebalance_indices(std::span<const Date> test_dates) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < test_dates.size(); ++t)
    if (t == 0 || test_dates[t].quarter_key() != test_dates[t - 1].quarter_key()) out.push_back(t);
  return out;
}

std::vector<Date> rebalance_dates(std::span<const Date> test_dates) {
  std::vector<Date> out;
  for (std::size_t t : rebalance_indices(test_dates)) out.push_back(test_dates[t]);
  return out;
}

marketdata::ReturnsPanel join(const marketdata::SplitDataset& data) {
  const auto& a = data.train;
  const auto& b = data.test;
  if (a.tickers != b.tickers) fail(ErrorCode::Schema, "train and test panels have different tickers");
  marketdata::ReturnsPanel full = a;
  full.dates.insert(full.dates.end(), b.dates.begin(), b.dates.end());
  full.index_returns.insert(full.index_returns.end(), b.index_returns.begin(), b.index_returns.end());
  full.vix.insert(full.vix.end(), b.vix.begin(), b.vix.end());
  for (std::size_t i = 0; i < full.returns.size(); ++i)
    full.returns[i].insert(full.returns[i].end(), b.returns[i].begin(), b.returns[i].end());
  if (full.volumes.size() == b.volumes.size())
    for (std::size_t i = 0; i < full.volumes.size(); ++i)
      full.volumes[i].insert(full.volumes[i].end(), b.volumes[i].begin(), b.volumes[i].end());
  else
    full.volumes.clear();
  return full;
}

EquityCurve run_backtest(const SelectorPipeline& pipeline, const marketdata::SplitDataset& data,
                         const BacktestConfig& config, AccessLog* log) {
  config.validate();
  const auto full = join(data);
  full.validate();
  const std::size_t n = full.num_assets();
  const std::size_t offset = data.train.num_days();
  const std::size_t days = data.test.num_days();

  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < n; ++i) column[full.tickers[i]] = i;

  const auto rebalances = rebalance_indices(data.test.dates);
  std::size_t next_rebalance = 0;

  EquityCurve curve;
  curve.dates = data.test.dates;
  curve.index_returns = data.test.index_returns;
  curve.portfolio_returns.resize(days);

  std::vector<double> weights(n, 0.0);  // starts in cash
  std::vector<double> target(n, 0.0);
  std::vector<double> row(n);
  for (std::size_t t = 0; t < days; ++t) {
    double cost = 0.0;
    if (next_rebalance < rebalances.size() && rebalances[next_rebalance] == t) {
      ++next_rebalance;
      const std::size_t cutoff = offset + t;
      if (log) log->begin(full.dates[cutoff], cutoff);
      HistoryWindow history(full, cutoff, log);
      HoldingRecord record{full.dates[cutoff], pipeline(history), 0.0, 0.0};
      const auto& sel = record.selection;
      if (sel.tickers.empty() || sel.tickers.size() != sel.weights.size())
        fail(ErrorCode::Dimension, "selector returned an empty or malformed selection");
      std::fill(target.begin(), target.end(), 0.0);
      for (std::size_t p = 0; p < sel.tickers.size(); ++p) {
        auto it = column.find(sel.tickers[p]);
        if (it == column.end()) fail(ErrorCode::Schema, "selector chose unknown ticker " + sel.tickers[p]);
        target[it->second] += sel.weights[p];
      }
      double turnover = 0.0;
      for (std::size_t i = 0; i < n; ++i) turnover += std::abs(target[i] - weights[i]);
      cost = config.cost_bps * 1e-4 * turnover;
      record.turnover = turnover;
      record.cost = cost;
      weights = target;
      curve.holdings_log.push_back(std::move(record));
    } else if (config.drift == Drift::DailyRebalance && !curve.holdings_log.empty()) {
      weights = target;
    }

    for (std::size_t i = 0; i < n; ++i) row[i] = full.returns[i][offset + t];
    const double gross = simd::dot(weights, row);
    curve.portfolio_returns[t] = gross - cost;

    if (config.drift == Drift::Hold) {
      simd::grow(weights, row);
      const double total = simd::sum(weights);
      if (total > 0.0)
        for (double& w : weights) w /= total;
    }
  }
  return curve;
}

namespace {

void require_pair(std::span<const double> a, std::span<const double> b, std::size_t min_len) {
  if (a.size() != b.size()) fail(ErrorCode::Dimension, "return series differ in length");
  if (a.size() < min_len)
    fail(ErrorCode::InsufficientData, "need at least " + std::to_string(min_len) + " observations");
}

double sample_std(std::span<const double> x) {
  const double mu = simd::mean(x);
  return std::sqrt(simd::centered_dot(x, mu, x, mu) / static_cast<double>(x.size() - 1));
}

std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t t = 0; t < a.size(); ++t) d[t] = a[t] - b[t];
  return d;
}

std::optional<double> ratio(double num, double den) {
  if (!(den > 0.0) || !std::isfinite(den)) return std::nullopt;
  return num / den;
}

}  // namespace

double tracking_error(std::span<const double> r_p, std::span<const double> r_idx, const BacktestConfig& config) {
  require_pair(r_p, r_idx, 2);
  return std::sqrt(config.trading_days_per_year) * sample_std(difference(r_p, r_idx));
}

MetricsReport compute_metrics(std::span<const double> r_p, std::span<const double> r_idx,
                              const BacktestConfig& config) {
  require_pair(r_p, r_idx, 2);
  const double annual = std::sqrt(config.trading_days_per_year);
  const double rf_daily = config.risk_free_rate / config.trading_days_per_year;
  const double tt = static_cast<double>(r_p.size());
  MetricsReport m;

  const auto active = difference(r_p, r_idx);
  const double te_daily = sample_std(active);
  m.tracking_error = annual * te_daily;
  if (auto ir = ratio(simd::mean(active), te_daily)) m.information_ratio = *ir * annual;

  const double mean_p = simd::mean(r_p);
  const double mean_x = simd::mean(r_idx);
  const double ss_p = simd::centered_dot(r_p, mean_p, r_p, mean_p);
  const double ss_x = simd::centered_dot(r_idx, mean_x, r_idx, mean_x);
  if (ss_p > 0.0 && ss_x > 0.0)
    m.correlation = std::clamp(simd::centered_dot(r_p, mean_p, r_idx, mean_x) / std::sqrt(ss_p * ss_x), -1.0, 1.0);

  double equity = 1.0, peak = 1.0, mdd = 0.0;
  std::vector<double> shortfall;
  shortfall.reserve(r_p.size());
  for (double r : r_p) {
    equity *= 1.0 + r;
    peak = std::max(peak, equity);
    mdd = std::min(mdd, equity / peak - 1.0);
    shortfall.push_back(std::min(r - rf_daily, 0.0));
  }
  m.total_return = equity - 1.0;
  m.max_drawdown = mdd;

  const double std_p = std::sqrt(ss_p / (tt - 1.0));
  if (auto s = ratio(mean_p - rf_daily, std_p)) m.sharpe = *s * annual;
  if (auto s = ratio(mean_p - rf_daily, sample_std(shortfall))) m.sortino = *s * annual;
  return m;
}

DMTestResult diebold_mariano(std::span<const double> r_p, std::span<const double> r_b,
                             std::span<const double> r_idx, std::size_t nw_lags) {
  require_pair(r_p, r_b, kDieboldMarianoMinLength);
  require_pair(r_p, r_idx, kDieboldMarianoMinLength);
  const std::size_t t = r_p.size();
  std::vector<double> d(t);
  for (std::size_t s = 0; s < t; ++s) {
    const double ep = r_p[s] - r_idx[s];
    const double eb = r_b[s] - r_idx[s];
    d[s] = ep * ep - eb * eb;
  }
  DMTestResult result;
  const double mean = simd::mean(d);
  result.loss_differential_mean = mean;
  if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) return result;

  const double tt = static_cast<double>(t);
  double lrv = simd::centered_dot(d, mean, d, mean) / tt;
  const std::size_t lags = std::min(nw_lags, t - 1);
  for (std::size_t k = 1; k <= lags; ++k) {
    const std::span<const double> lead(d.data() + k, t - k);
    const std::span<const double> lag(d.data(), t - k);
    const double gamma_k = simd::centered_dot(lead, mean, lag, mean) / tt;
    lrv += 2.0 * (1.0 - static_cast<double>(k) / static_cast<double>(lags + 1)) * gamma_k;
  }
  if (!(lrv > 0.0)) return result;
  const double stat = mean / std::sqrt(lrv / tt);
  result.statistic = stat;
  result.p_value = std::erfc(std::abs(stat) / std::sqrt(2.0));
  return result;
}

}  // namespace isingtrack::backtest
