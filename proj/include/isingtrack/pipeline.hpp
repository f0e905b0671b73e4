#pragma once

#include <functional>
#include <string>
#include <vector>

#include "isingtrack/backtest.hpp"
#include "isingtrack/config.hpp"
#include "isingtrack/factors.hpp"
#include "isingtrack/ising.hpp"
#include "isingtrack/marketdata.hpp"
#include "isingtrack/sampler.hpp"
#include "isingtrack/selector.hpp"

namespace isingtrack::pipeline {

/// Everything estimated and sampled for one Ising selection.
struct IsingRun {
  factors::FactorScores scores;
  std::vector<double> biases;
  double mean_vix = 0.0;
  double gamma = 0.0;
  ising::IsingModel model;
  sampler::SelectionFrequencies frequencies;
  selector::Selection selection;
};

/// Factors, couplings, annealed sampling and sector-balanced selection on
/// one estimation window. The VIX input to the coupling strength is the
/// window's mean level.
IsingRun run_ising_selection(const marketdata::ReturnsPanel& history, const marketdata::SectorMap& sectors,
                             const config::RunConfig& cfg);

ising::IsingModel build_model(const marketdata::ReturnsPanel& history, const config::RunConfig& cfg,
                              factors::FactorScores* scores_out = nullptr, double* gamma_out = nullptr,
                              double* vix_out = nullptr);

using IsingObserver = std::function<void(Date rebalance_date, const IsingRun&)>;

backtest::SelectorPipeline make_selector(const std::string& method, const marketdata::SectorMap& sectors,
                                         const config::RunConfig& cfg, IsingObserver observer = {});

struct Dataset {
  marketdata::ReturnsPanel panel;
  marketdata::SectorMap sectors;
  marketdata::SplitDataset split;
};

/// Reads the CSV inputs named in the config and splits at data.split_date.
Dataset load_dataset(const config::RunConfig& cfg);

struct CouplingPoint {
  double vix;
  double gamma;
};

/// gamma(V) for V = 10, 10.5, ..., 50.
std::vector<CouplingPoint> emit_coupling_curve(const factors::CouplingConfig& coupling);

struct MethodResult {
  std::string name;
  backtest::EquityCurve curve;
  backtest::MetricsReport metrics;
};

struct DMEntry {
  std::string a;
  std::string b;
  backtest::DMTestResult result;
};

struct ReportBundle {
  std::vector<std::string> tickers;
  marketdata::SectorMap sectors;
  std::vector<MethodResult> methods;
  backtest::MetricsReport index_metrics;
  std::vector<DMEntry> dm;  // every unordered pair, in method order
  bool has_frequencies = false;
  sampler::SelectionFrequencies frequencies;  // Ising run at the first rebalance
  std::vector<CouplingPoint> coupling_curve;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, double>> timings;  // seconds per stage
};

/// Walk-forward evaluation of every configured method on the same data.
/// `log` receives per-stage progress messages.
ReportBundle run_pipeline(const config::RunConfig& cfg, backtest::AccessLog* access_log = nullptr,
                          const std::function<void(const std::string&)>& log = {});

}  // namespace isingtrack::pipeline
