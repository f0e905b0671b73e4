#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isingtrack/backtest.hpp"
#include "isingtrack/date.hpp"
#include "isingtrack/factors.hpp"
#include "isingtrack/sampler.hpp"
#include "isingtrack/selector.hpp"

namespace isingtrack::config {

/// Every tunable of one pipeline run. Defaults mirror the reference
/// experimental setup (K = 30, weights 3 / 1 / 1.5, gamma0 = 0.5, V0 = 20, ...).
struct RunConfig {
  struct Data {
    std::filesystem::path prices, volumes, index, vix, sectors;
    Date split_date{2023, 1, 1};
  } data;

  std::vector<std::string> methods{"ising", "greedy", "robust_mvo", "hrp"};
  std::filesystem::path out_dir{"out"};

  factors::BiasWeights bias;
  factors::CouplingConfig coupling;
  sampler::SamplerConfig sampler;
  double log10_beta_min = 0.3;
  double log10_beta_max = 1.8;

  std::size_t k = 30;
  selector::SectorConstraints sectors;
  selector::Weighting weighting = selector::Weighting::Equal;

  backtest::BacktestConfig backtest;

  /// Effective value of every key, in schema order (`key`, `value`).
  std::vector<std::pair<std::string, std::string>> resolved() const;
};

/// Names accepted in `run.methods`.
const std::vector<std::string>& known_methods();

/// Parses the flat `key = value` format. Lines starting with `#` and blank
/// lines are ignored. Relative data paths are resolved against `base_dir`.
/// Every unknown key, malformed value and range violation is collected into a
/// single Config error, one per line.
RunConfig validate_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Throws Config listing unknown entries.
std::vector<std::string> parse_method_list(std::string_view csv);

std::string format_number(double value);

}  // namespace isingtrack::config
