#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "isingtrack/config.hpp"
#include "isingtrack/errors.hpp"
#include "isingtrack/kernels.hpp"
#include "isingtrack/pipeline.hpp"
#include "isingtrack/report.hpp"

namespace {

using namespace isingtrack;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string methods;
  std::string baselines;
  std::string log_level = "info";
};

void add_common(CLI::App& cmd, Options& o) {
  cmd.add_option("--config", o.config_path, "Run configuration (key = value)")->required();
  cmd.add_option("--out", o.out_dir, "Output directory (overrides run.out_dir)");
  cmd.add_option("--seed", o.seed, "Sampler seed (overrides sampler.seed)");
  cmd.add_option("--methods", o.methods, "Comma-separated methods (overrides run.methods)");
  cmd.add_option("--baselines", o.baselines, "Comma-separated baselines to run alongside ising");
  cmd.add_option("--log-level", o.log_level, "error, warn, info or debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));
}

config::RunConfig resolve(const Options& o) {
  auto cfg = config::load_config(o.config_path);
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.seed) cfg.sampler.seed = *o.seed;
  if (!o.methods.empty()) cfg.methods = config::parse_method_list(o.methods);
  if (!o.baselines.empty()) {
    auto baselines = config::parse_method_list(o.baselines);
    std::vector<std::string> methods;
    for (const auto& m : cfg.methods)
      if (m == "ising") methods.push_back(m);
    for (const auto& b : baselines) {
      if (b == "ising") fail(ErrorCode::Config, "--baselines: ising is not a baseline");
      methods.push_back(b);
    }
    cfg.methods = std::move(methods);
  }
  return cfg;
}

void log_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) spdlog::warn("{}", w);
}

std::string render(auto&& writer) {
  std::ostringstream s;
  writer(s);
  return s.str();
}

int cmd_validate(const Options& o) {
  const auto cfg = resolve(o);
  for (const auto& [k, v] : cfg.resolved()) std::cout << k << " = " << v << '\n';
  return 0;
}

int cmd_coupling_curve(const Options& o) {
  const auto cfg = resolve(o);
  const auto curve = pipeline::emit_coupling_curve(cfg.coupling);
  if (o.out_dir.empty()) {
    report::write_coupling_curve(std::cout, curve);
    return 0;
  }
  report::write_directory(cfg.out_dir,
                          {{"coupling_curve.csv", render([&](auto& s) { report::write_coupling_curve(s, curve); })}});
  spdlog::info("wrote {}", (cfg.out_dir / "coupling_curve.csv").string());
  return 0;
}

// Sampling and selection on the training window only.
int cmd_sample_or_select(const Options& o, bool select) {
  const auto cfg = resolve(o);
  const auto ds = pipeline::load_dataset(cfg);
  spdlog::info("training window: {} assets x {} days", ds.split.train.num_assets(), ds.split.train.num_days());
  std::vector<std::pair<std::string, std::string>> files;
  if (select) {
    if (cfg.k > ds.panel.num_assets())
      fail(ErrorCode::Infeasible, "selector.k=" + std::to_string(cfg.k) + " exceeds the universe of " +
                                      std::to_string(ds.panel.num_assets()) + " assets");
    const auto run = pipeline::run_ising_selection(ds.split.train, ds.sectors, cfg);
    log_warnings(run.selection.warnings);
    spdlog::info("gamma = {:.4f} at mean VIX {:.2f}; {} edges", run.gamma, run.mean_vix, run.model.edges().size());
    files.emplace_back("frequencies.csv", render([&](auto& s) {
                         report::write_frequencies(s, ds.split.train.tickers, run.frequencies);
                       }));
    files.emplace_back("selection.csv",
                       render([&](auto& s) { report::write_selection(s, run.selection, ds.sectors); }));
  } else {
    const auto model = pipeline::build_model(ds.split.train, cfg);
    const auto schedule =
        sampler::build_annealing_schedule(cfg.sampler.n_temperatures, cfg.log10_beta_min, cfg.log10_beta_max);
    const auto freq = sampler::run_chains(model, schedule, cfg.sampler);
    log_warnings(freq.warnings);
    files.emplace_back("frequencies.csv", render([&](auto& s) {
                         report::write_frequencies(s, ds.split.train.tickers, freq);
                       }));
  }
  report::write_directory(cfg.out_dir, files);
  spdlog::info("wrote {}", cfg.out_dir.string());
  return 0;
}

int cmd_run(const Options& o, report::FileSet set) {
  const auto cfg = resolve(o);
  spdlog::debug("simd kernels: {}", simd::active().name);
  const auto bundle = pipeline::run_pipeline(cfg, nullptr, [](const std::string& m) { spdlog::info("{}", m); });
  log_warnings(bundle.warnings);
  for (const auto& m : bundle.methods)
    spdlog::info("{}: tracking error {}", m.name,
                 m.metrics.tracking_error ? config::format_number(*m.metrics.tracking_error) : "undefined");
  report::write_reports(cfg.out_dir, bundle, cfg, set);
  spdlog::info("wrote {}", cfg.out_dir.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cardinality-constrained index tracking via annealed Ising sampling"};
  app.require_subcommand(1);
  Options o;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {{"run", "Full walk-forward pipeline and every report"},
                      {"sample", "Selection frequencies on the training window"},
                      {"select", "Sector-balanced selection on the training window"},
                      {"backtest", "Walk-forward backtest reports only"},
                      {"coupling-curve", "Coupling strength over VIX in [10, 50]"},
                      {"validate", "Validate the configuration and print effective values"}};
  for (const auto& s : subs) add_common(*app.add_subcommand(s.name, s.help), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto logger = spdlog::stderr_color_mt("isingtrack");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(o.log_level));

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "validate") return cmd_validate(o);
    if (cmd == "coupling-curve") return cmd_coupling_curve(o);
    if (cmd == "sample") return cmd_sample_or_select(o, false);
    if (cmd == "select") return cmd_sample_or_select(o, true);
    if (cmd == "backtest") return cmd_run(o, report::FileSet::Backtest);
    return cmd_run(o, report::FileSet::Full);
  } catch (const Error& e) {
    spdlog::error("{} error: {}", to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return 1;
  }
}
