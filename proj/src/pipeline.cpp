#include "isingtrack/pipeline.hpp"

#include <chrono>

#include "isingtrack/baselines.hpp"
#include "isingtrack/errors.hpp"
#include "isingtrack/kernels.hpp"

namespace isingtrack::pipeline {

ising::IsingModel build_model(const marketdata::ReturnsPanel& history, const config::RunConfig& cfg,
                              factors::FactorScores* scores_out, double* gamma_out, double* vix_out) {
  auto scores = factors::compute_factor_scores(history);
  auto biases = factors::compute_biases(scores, cfg.bias);
  const double mean_vix = simd::mean(history.vix);
  const double gamma = factors::dynamic_coupling_strength(mean_vix, cfg.coupling);
  const auto corr = factors::correlation_matrix(history.returns);
  auto edges = factors::build_couplings(corr, gamma, cfg.coupling);
  if (scores_out) *scores_out = std::move(scores);
  if (gamma_out) *gamma_out = gamma;
  if (vix_out) *vix_out = mean_vix;
  return ising::IsingModel(std::move(biases), std::move(edges));
}

IsingRun run_ising_selection(const marketdata::ReturnsPanel& history, const marketdata::SectorMap& sectors,
                             const config::RunConfig& cfg) {
  IsingRun run;
  run.model = build_model(history, cfg, &run.scores, &run.gamma, &run.mean_vix);
  run.biases.assign(run.model.biases().begin(), run.model.biases().end());
  const auto schedule =
      sampler::build_annealing_schedule(cfg.sampler.n_temperatures, cfg.log10_beta_min, cfg.log10_beta_max);
  run.frequencies = sampler::run_chains(run.model, schedule, cfg.sampler);
  run.selection = selector::sector_balanced_select(run.frequencies.freq, history.tickers, sectors, cfg.k,
                                                   cfg.sectors, cfg.weighting);
  run.selection.warnings.insert(run.selection.warnings.end(), run.frequencies.warnings.begin(),
                                run.frequencies.warnings.end());
  return run;
}

backtest::SelectorPipeline make_selector(const std::string& method, const marketdata::SectorMap& sectors,
                                         const config::RunConfig& cfg, IsingObserver observer) {
  if (method == "ising")
    return [&sectors, cfg, observer](const backtest::HistoryWindow& window) {
      auto run = run_ising_selection(window.materialize(), sectors, cfg);
      if (observer) observer(window.decision_date(), run);
      return run.selection;
    };
  if (method == "greedy")
    return [k = cfg.k](const backtest::HistoryWindow& window) {
      return baselines::greedy_correlation_select(window.materialize(), k);
    };
  if (method == "robust_mvo")
    return [k = cfg.k](const backtest::HistoryWindow& window) {
      return baselines::robust_mvo_select(window.materialize(), k);
    };
  if (method == "hrp")
    return [k = cfg.k](const backtest::HistoryWindow& window) {
      return baselines::hrp_select(window.materialize(), k);
    };
  fail(ErrorCode::Config, "unknown method '" + method + "'");
}

Dataset load_dataset(const config::RunConfig& cfg) {
  const auto& d = cfg.data;
  std::string missing;
  auto need = [&](const std::filesystem::path& p, const char* key) {
    if (p.empty()) missing += (missing.empty() ? "" : ", ") + std::string(key);
  };
  need(d.prices, "data.prices");
  need(d.volumes, "data.volumes");
  need(d.index, "data.index");
  need(d.vix, "data.vix");
  need(d.sectors, "data.sectors");
  if (!missing.empty()) fail(ErrorCode::Config, "missing required keys: " + missing);

  Dataset ds;
  const auto prices = marketdata::load_price_panel(d.prices, d.volumes);
  const auto index = marketdata::load_dated_series(d.index);
  const auto vix = marketdata::load_dated_series(d.vix);
  ds.panel = marketdata::compute_returns(prices, index, vix);
  ds.sectors = marketdata::load_sector_map(d.sectors, ds.panel.tickers);
  ds.split = marketdata::split_train_test(ds.panel, d.split_date);
  return ds;
}

std::vector<CouplingPoint> emit_coupling_curve(const factors::CouplingConfig& coupling) {
  coupling.validate();
  std::vector<CouplingPoint> curve;
  for (int step = 0; step <= 80; ++step) {
    const double v = 10.0 + 0.5 * step;
    curve.push_back({v, factors::dynamic_coupling_strength(v, coupling)});
  }
  return curve;
}

namespace {

class StageTimer {
 public:
  explicit StageTimer(std::vector<std::pair<std::string, double>>& sink) : sink_(sink) {}
  void mark(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_.emplace_back(stage, std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }

 private:
  std::vector<std::pair<std::string, double>>& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Runs `fn`, re-throwing errors with the stage name prefixed.
template <typename Fn>
auto in_stage(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), stage + ": " + e.what());
  }
}

}  // namespace

ReportBundle run_pipeline(const config::RunConfig& cfg, backtest::AccessLog* access_log,
                          const std::function<void(const std::string&)>& log) {
  auto say = [&](const std::string& msg) {
    if (log) log(msg);
  };
  ReportBundle bundle;
  StageTimer timer(bundle.timings);

  Dataset ds = in_stage("ingest", [&] { return load_dataset(cfg); });
  timer.mark("ingest");
  say("loaded " + std::to_string(ds.panel.num_assets()) + " assets, " + std::to_string(ds.split.train.num_days()) +
      " training days, " + std::to_string(ds.split.test.num_days()) + " test days");
  if (cfg.k > ds.panel.num_assets())
    fail(ErrorCode::Infeasible, "selector.k=" + std::to_string(cfg.k) + " exceeds the universe of " +
                                    std::to_string(ds.panel.num_assets()) + " assets");

  bundle.tickers = ds.panel.tickers;
  bundle.sectors = ds.sectors;
  bundle.coupling_curve = emit_coupling_curve(cfg.coupling);

  for (const auto& method : cfg.methods) {
    say("backtesting " + method);
    IsingObserver observer;
    if (method == "ising")
      observer = [&bundle](Date, const IsingRun& run) {
        if (!bundle.has_frequencies) {
          bundle.has_frequencies = true;
          bundle.frequencies = run.frequencies;
        }
      };
    const auto selector = make_selector(method, ds.sectors, cfg, observer);
    MethodResult result;
    result.name = method;
    result.curve = in_stage(method, [&] { return backtest::run_backtest(selector, ds.split, cfg.backtest, access_log); });
    result.metrics = backtest::compute_metrics(result.curve.portfolio_returns, result.curve.index_returns, cfg.backtest);
    for (const auto& rec : result.curve.holdings_log)
      for (const auto& w : rec.selection.warnings)
        bundle.warnings.push_back(method + " @ " + rec.date.to_string() + ": " + w);
    bundle.methods.push_back(std::move(result));
    timer.mark("backtest." + method);
  }

  const auto& index_returns = ds.split.test.index_returns;
  bundle.index_metrics = backtest::compute_metrics(index_returns, index_returns, cfg.backtest);

  if (index_returns.size() >= backtest::kDieboldMarianoMinLength) {
    for (std::size_t a = 0; a < bundle.methods.size(); ++a)
      for (std::size_t b = a + 1; b < bundle.methods.size(); ++b)
        bundle.dm.push_back({bundle.methods[a].name, bundle.methods[b].name,
                             backtest::diebold_mariano(bundle.methods[a].curve.portfolio_returns,
                                                       bundle.methods[b].curve.portfolio_returns, index_returns,
                                                       cfg.backtest.dm_nw_lags)});
  } else {
    bundle.warnings.push_back("test window shorter than " + std::to_string(backtest::kDieboldMarianoMinLength) +
                              " days; Diebold-Mariano tests skipped");
  }
  timer.mark("report");
  return bundle;
}

}  // namespace isingtrack::pipeline
