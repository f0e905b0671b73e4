#include "isingtrack/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

#include "csv.hpp"
#include "isingtrack/errors.hpp"

namespace isingtrack::config {

namespace {

using Problems = std::vector<std::string>;

struct Entry {
  std::string_view key;
  std::function<void(RunConfig&, std::string_view, const std::filesystem::path&, Problems&)> parse;
  std::function<std::string(const RunConfig&)> show;
};

std::optional<double> parse_double(std::string_view v) {
  auto d = csv::to_double(v);
  if (!d || !std::isfinite(*d)) return std::nullopt;
  return d;
}

std::optional<std::uint64_t> parse_u64(std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) return std::nullopt;
  return out;
}

Entry real(std::string_view key, double RunConfig::*field) {
  return {key,
          [key, field](RunConfig& c, std::string_view v, const auto&, Problems& p) {
            if (auto d = parse_double(v)) c.*field = *d;
            else p.push_back(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
          },
          [field](const RunConfig& c) { return format_number(c.*field); }};
}

template <typename Struct>
Entry real(std::string_view key, Struct RunConfig::*group, double Struct::*field) {
  return {key,
          [key, group, field](RunConfig& c, std::string_view v, const auto&, Problems& p) {
            if (auto d = parse_double(v)) c.*group.*field = *d;
            else p.push_back(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
          },
          [group, field](const RunConfig& c) { return format_number(c.*group.*field); }};
}

template <typename Struct, typename Int>
Entry count(std::string_view key, Struct RunConfig::*group, Int Struct::*field) {
  return {key,
          [key, group, field](RunConfig& c, std::string_view v, const auto&, Problems& p) {
            if (auto u = parse_u64(v)) c.*group.*field = static_cast<Int>(*u);
            else p.push_back(std::string(key) + ": expected a non-negative integer, got '" + std::string(v) + "'");
          },
          [group, field](const RunConfig& c) { return std::to_string(c.*group.*field); }};
}

Entry path(std::string_view key, std::filesystem::path RunConfig::Data::*field) {
  return {key,
          [field](RunConfig& c, std::string_view v, const std::filesystem::path& base, Problems&) {
            std::filesystem::path p{std::string(v)};
            c.data.*field = (p.is_relative() && !base.empty()) ? base / p : p;
          },
          [field](const RunConfig& c) { return (c.data.*field).string(); }};
}

template <typename Enum>
Entry choice(std::string_view key, std::function<Enum&(RunConfig&)> ref,
             std::vector<std::pair<std::string_view, Enum>> options) {
  return {key,
          [key, ref, options](RunConfig& c, std::string_view v, const auto&, Problems& p) {
            for (const auto& [name, value] : options)
              if (name == v) {
                ref(c) = value;
                return;
              }
            std::string allowed;
            for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : ", ") + std::string(name);
            p.push_back(std::string(key) + ": '" + std::string(v) + "' is not one of {" + allowed + "}");
          },
          [ref, options](const RunConfig& c) {
            RunConfig copy = c;
            for (const auto& [name, value] : options)
              if (ref(copy) == value) return std::string(name);
            return std::string("?");
          }};
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

const std::vector<Entry>& schema() {
  using RC = RunConfig;
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    e.push_back(path("data.prices", &RC::Data::prices));
    e.push_back(path("data.volumes", &RC::Data::volumes));
    e.push_back(path("data.index", &RC::Data::index));
    e.push_back(path("data.vix", &RC::Data::vix));
    e.push_back(path("data.sectors", &RC::Data::sectors));
    e.push_back({"data.split_date",
                 [](RC& c, std::string_view v, const auto&, Problems& p) {
                   if (auto d = Date::try_parse(v)) c.data.split_date = *d;
                   else p.push_back("data.split_date: expected YYYY-MM-DD, got '" + std::string(v) + "'");
                 },
                 [](const RC& c) { return c.data.split_date.to_string(); }});
    e.push_back({"run.methods",
                 [](RC& c, std::string_view v, const auto&, Problems& p) {
                   try {
                     c.methods = parse_method_list(v);
                   } catch (const Error& err) {
                     p.push_back(std::string("run.methods: ") + err.what());
                   }
                 },
                 [](const RC& c) { return join(c.methods); }});
    e.push_back({"run.out_dir",
                 [](RC& c, std::string_view v, const std::filesystem::path& base, Problems&) {
                   std::filesystem::path p{std::string(v)};
                   c.out_dir = (p.is_relative() && !base.empty()) ? base / p : p;
                 },
                 [](const RC& c) { return c.out_dir.string(); }});

    e.push_back(real("bias.w_tracking", &RC::bias, &factors::BiasWeights::w_tracking));
    e.push_back(real("bias.w_momentum", &RC::bias, &factors::BiasWeights::w_momentum));
    e.push_back(real("bias.w_liquidity", &RC::bias, &factors::BiasWeights::w_liquidity));
    e.push_back(real("bias.alpha", &RC::bias, &factors::BiasWeights::alpha));

    e.push_back(real("coupling.gamma0", &RC::coupling, &factors::CouplingConfig::gamma0));
    e.push_back(real("coupling.v0", &RC::coupling, &factors::CouplingConfig::v0));
    e.push_back(real("coupling.gamma_min", &RC::coupling, &factors::CouplingConfig::gamma_min));
    e.push_back(real("coupling.gamma_max", &RC::coupling, &factors::CouplingConfig::gamma_max));
    e.push_back(real("coupling.tau", &RC::coupling, &factors::CouplingConfig::tau));
    e.push_back(real("coupling.edge_scale", &RC::coupling, &factors::CouplingConfig::edge_scale));

    e.push_back(count("sampler.n_chains", &RC::sampler, &sampler::SamplerConfig::n_chains));
    e.push_back(count("sampler.n_temperatures", &RC::sampler, &sampler::SamplerConfig::n_temperatures));
    e.push_back(count("sampler.warmup_iters", &RC::sampler, &sampler::SamplerConfig::warmup_iters));
    e.push_back(count("sampler.samples_per_temp", &RC::sampler, &sampler::SamplerConfig::samples_per_temp));
    e.push_back(count("sampler.steps_per_sample", &RC::sampler, &sampler::SamplerConfig::steps_per_sample));
    e.push_back(count("sampler.seed", &RC::sampler, &sampler::SamplerConfig::seed));
    e.push_back(count("sampler.threads", &RC::sampler, &sampler::SamplerConfig::max_threads));
    e.push_back(choice<sampler::Blocking>(
        "sampler.blocking", [](RC& c) -> sampler::Blocking& { return c.sampler.blocking; },
        {{"coloring", sampler::Blocking::Coloring}, {"even_odd", sampler::Blocking::EvenOdd}}));
    e.push_back(real("sampler.log10_beta_min", &RC::log10_beta_min));
    e.push_back(real("sampler.log10_beta_max", &RC::log10_beta_max));

    e.push_back({"selector.k",
                 [](RC& c, std::string_view v, const auto&, Problems& p) {
                   if (auto u = parse_u64(v)) c.k = static_cast<std::size_t>(*u);
                   else p.push_back("selector.k: expected a positive integer, got '" + std::string(v) + "'");
                 },
                 [](const RC& c) { return std::to_string(c.k); }});
    e.push_back(real("selector.max_per_sector_frac", &RC::sectors, &selector::SectorConstraints::max_per_sector_frac));
    e.push_back(count("selector.min_sectors", &RC::sectors, &selector::SectorConstraints::min_sectors));
    e.push_back(choice<selector::Weighting>(
        "selector.weighting", [](RC& c) -> selector::Weighting& { return c.weighting; },
        {{"equal", selector::Weighting::Equal}, {"frequency", selector::Weighting::Frequency}}));

    e.push_back({"backtest.rebalance",
                 [](RC&, std::string_view v, const auto&, Problems& p) {
                   if (v != "quarterly") p.push_back("backtest.rebalance: only 'quarterly' is supported");
                 },
                 [](const RC&) { return std::string("quarterly"); }});
    e.push_back(real("backtest.cost_bps", &RC::backtest, &backtest::BacktestConfig::cost_bps));
    e.push_back(real("backtest.risk_free_rate", &RC::backtest, &backtest::BacktestConfig::risk_free_rate));
    e.push_back(real("backtest.trading_days_per_year", &RC::backtest, &backtest::BacktestConfig::trading_days_per_year));
    e.push_back(choice<backtest::Drift>(
        "backtest.drift", [](RC& c) -> backtest::Drift& { return c.backtest.drift; },
        {{"hold", backtest::Drift::Hold}, {"daily_rebalance", backtest::Drift::DailyRebalance}}));
    e.push_back(count("dm.nw_lags", &RC::backtest, &backtest::BacktestConfig::dm_nw_lags));
    return e;
  }();
  return entries;
}

void check_ranges(const RunConfig& c, Problems& p) {
  const auto& b = c.bias;
  if (b.w_tracking < 0) p.push_back("bias.w_tracking: must be >= 0");
  if (b.w_momentum < 0) p.push_back("bias.w_momentum: must be >= 0");
  if (b.w_liquidity < 0) p.push_back("bias.w_liquidity: must be >= 0");
  if (!(b.alpha > 0)) p.push_back("bias.alpha: must be > 0");

  const auto& g = c.coupling;
  if (!(g.gamma_min > 0)) p.push_back("coupling.gamma_min: must be > 0");
  if (g.gamma_min > g.gamma_max)
    p.push_back("coupling.gamma_min: " + format_number(g.gamma_min) + " exceeds coupling.gamma_max " +
                format_number(g.gamma_max));
  else if (g.gamma0 < g.gamma_min || g.gamma0 > g.gamma_max)
    p.push_back("coupling.gamma0: must lie in [gamma_min, gamma_max]");
  if (!(g.v0 > 0)) p.push_back("coupling.v0: must be > 0");
  if (!(g.tau >= 0 && g.tau < 1)) p.push_back("coupling.tau: must lie in [0, 1)");
  if (!(g.edge_scale > 0)) p.push_back("coupling.edge_scale: must be > 0");

  const auto& s = c.sampler;
  if (s.n_chains < 1) p.push_back("sampler.n_chains: must be >= 1");
  if (s.n_temperatures < 2) p.push_back("sampler.n_temperatures: must be >= 2");
  if (s.warmup_iters < 1) p.push_back("sampler.warmup_iters: must be >= 1");
  if (s.samples_per_temp < 1) p.push_back("sampler.samples_per_temp: must be >= 1");
  if (s.steps_per_sample < 1) p.push_back("sampler.steps_per_sample: must be >= 1");
  if (!(c.log10_beta_max > c.log10_beta_min))
    p.push_back("sampler.log10_beta_max: must exceed sampler.log10_beta_min");

  if (c.k < 1) p.push_back("selector.k: must be >= 1");
  if (!(c.sectors.max_per_sector_frac > 0 && c.sectors.max_per_sector_frac <= 1))
    p.push_back("selector.max_per_sector_frac: must lie in (0, 1]");
  if (c.sectors.min_sectors < 1) p.push_back("selector.min_sectors: must be >= 1");

  if (c.backtest.cost_bps < 0) p.push_back("backtest.cost_bps: must be >= 0");
  if (!(c.backtest.trading_days_per_year > 0)) p.push_back("backtest.trading_days_per_year: must be > 0");
  if (c.methods.empty()) p.push_back("run.methods: at least one method is required");
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> names{"ising", "greedy", "robust_mvo", "hrp"};
  return names;
}

std::vector<std::string> parse_method_list(std::string_view text) {
  std::vector<std::string> out;
  std::string bad;
  while (true) {
    std::size_t comma = text.find(',');
    std::string name(csv::trim(text.substr(0, comma)));
    if (!name.empty()) {
      const auto& known = known_methods();
      if (std::find(known.begin(), known.end(), name) == known.end())
        bad += (bad.empty() ? "" : ", ") + name;
      else if (std::find(out.begin(), out.end(), name) == out.end())
        out.push_back(name);
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (!bad.empty()) fail(ErrorCode::Config, "unknown method(s): " + bad);
  return out;
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : schema()) out.emplace_back(std::string(e.key), e.show(*this));
  return out;
}

RunConfig validate_config(std::string_view text, const std::filesystem::path& base_dir) {
  std::map<std::string_view, const Entry*> by_key;
  for (const auto& e : schema()) by_key[e.key] = &e;

  RunConfig cfg;
  Problems problems;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    std::size_t eol = text.find('\n');
    std::string_view line = csv::trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back(where + "expected 'key = value'");
      continue;
    }
    std::string key(csv::trim(line.substr(0, eq)));
    std::string_view value = csv::trim(line.substr(eq + 1));
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      problems.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    if (!seen.insert(key).second) {
      problems.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    Problems local;
    it->second->parse(cfg, value, base_dir, local);
    for (auto& msg : local) problems.push_back(where + msg);
  }
  check_ranges(cfg, problems);
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    fail(ErrorCode::Config, msg);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = csv::read_file(path);
  } catch (const Error& e) {
    fail(ErrorCode::Config, e.what());
  }
  return validate_config(text, path.parent_path());
}

}  // namespace isingtrack::config
