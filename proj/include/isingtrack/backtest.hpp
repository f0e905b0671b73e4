#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isingtrack/date.hpp"
#include "isingtrack/marketdata.hpp"
#include "isingtrack/selector.hpp"

namespace isingtrack::backtest {

enum class Drift { Hold, DailyRebalance };

struct BacktestConfig {
  double cost_bps = 10.0;  // one-way, per unit of turnover
  double risk_free_rate = 0.02;
  double trading_days_per_year = 252.0;
  Drift drift = Drift::Hold;
  std::size_t dm_nw_lags = 0;

  void validate() const;
};

/// Reads made by a selector while a backtest runs, one record per rebalance.
class AccessLog {
 public:
  struct Record {
    Date rebalance_date;
    std::size_t cutoff = 0;     // first row not visible
    std::size_t reads = 0;
    std::size_t max_row_read = 0;
    bool any_read = false;
  };

  void begin(Date rebalance_date, std::size_t cutoff);
  void note_read(std::size_t row);
  void note_future_read() { ++future_reads_; }

  const std::vector<Record>& records() const { return records_; }
  std::size_t future_reads() const { return future_reads_; }

 private:
  std::vector<Record> records_;
  std::size_t future_reads_ = 0;
};

/// The history a selector may see at a rebalance: every row strictly before
/// the rebalance date. Any access at or after it throws LookAhead.
class HistoryWindow {
 public:
  HistoryWindow(const marketdata::ReturnsPanel& full, std::size_t cutoff, AccessLog* log = nullptr);

  std::size_t num_days() const { return cutoff_; }
  const std::vector<std::string>& tickers() const { return full_->tickers; }
  /// The rebalance date itself; no data attached to it is visible.
  Date decision_date() const { return decision_date_; }

  Date date(std::size_t row) const;
  double asset_return(std::size_t asset, std::size_t row) const;
  double index_return(std::size_t row) const;
  double vix(std::size_t row) const;
  double volume(std::size_t asset, std::size_t row) const;

  /// Copy of the trailing `lookback` visible rows (all of them by default).
  marketdata::ReturnsPanel materialize(std::size_t lookback = static_cast<std::size_t>(-1)) const;

 private:
  void check(std::size_t row) const;

  const marketdata::ReturnsPanel* full_;
  std::size_t cutoff_;
  Date decision_date_;
  AccessLog* log_;
};

using SelectorPipeline = std::function<selector::Selection(const HistoryWindow&)>;

struct HoldingRecord {
  Date date;
  selector::Selection selection;
  double turnover = 0.0;
  double cost = 0.0;
};

struct EquityCurve {
  std::vector<Date> dates;
  std::vector<double> portfolio_returns;  // net of costs
  std::vector<double> index_returns;
  std::vector<HoldingRecord> holdings_log;
};

/// First trading day of every calendar quarter; the first date is always included.
std::vector<std::size_t> rebalance_indices(std::span<const Date> test_dates);
std::vector<Date> rebalance_dates(std::span<const Date> test_dates);

/// Walk-forward simulation over the test window. At each rebalance the
/// pipeline sees train plus the test rows before that date; weights then
/// drift with prices (or are reset daily under Drift::DailyRebalance). The
/// rebalance day's return is reduced by cost_bps * 1e-4 * sum |w_new - w_old|.
EquityCurve run_backtest(const SelectorPipeline& pipeline, const marketdata::SplitDataset& data,
                         const BacktestConfig& config, AccessLog* log = nullptr);

/// Concatenation of the train and test panels.
marketdata::ReturnsPanel join(const marketdata::SplitDataset& data);

/// Ratios with a zero denominator are reported as std::nullopt.
struct MetricsReport {
  std::optional<double> tracking_error;
  std::optional<double> correlation;
  std::optional<double> total_return;
  std::optional<double> sharpe;
  std::optional<double> sortino;
  std::optional<double> max_drawdown;
  std::optional<double> information_ratio;
};

/// sqrt(days per year) * sample std (T - 1) of r_p - r_idx.
double tracking_error(std::span<const double> r_p, std::span<const double> r_idx, const BacktestConfig& config);

MetricsReport compute_metrics(std::span<const double> r_p, std::span<const double> r_idx,
                              const BacktestConfig& config);

struct DMTestResult {
  std::optional<double> statistic;
  std::optional<double> p_value;  // two-sided, standard normal
  double loss_differential_mean = 0.0;
};

/// Diebold-Mariano on d_t = (r_p - r_idx)^2 - (r_b - r_idx)^2 with a
/// Bartlett-weighted long-run variance (`nw_lags` = 0 gives the plain
/// variance). Autocovariances use the 1/T normalisation. Identically zero
/// or zero-variance loss differentials leave statistic and p-value unset.
DMTestResult diebold_mariano(std::span<const double> r_p, std::span<const double> r_b,
                             std::span<const double> r_idx, std::size_t nw_lags = 0);

inline constexpr std::size_t kDieboldMarianoMinLength = 10;

}  // namespace isingtrack::backtest
