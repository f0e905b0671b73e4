#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "isingtrack/config.hpp"
#include "isingtrack/errors.hpp"
#include "isingtrack/pipeline.hpp"
#include "isingtrack/report.hpp"

namespace fs = std::filesystem;
using namespace isingtrack;

namespace {

const fs::path kFixture = ISINGTRACK_FIXTURE_DIR;

fs::path scratch(const std::string& name) {
  fs::path p = fs::path(ISINGTRACK_SCRATCH_DIR) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void put(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

config::RunConfig fixture_config() { return config::load_config(kFixture / "config.cfg"); }

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + ISINGTRACK_CLI + "\" " + args + " --log-level error >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("fixture run emits every report and is reproducible") {
  const auto cfg = fixture_config();
  backtest::AccessLog log;
  const auto bundle = pipeline::run_pipeline(cfg, &log);
  CHECK(log.future_reads() == 0);
  REQUIRE(bundle.methods.size() == 4);
  CHECK(bundle.dm.size() == 6);
  CHECK(bundle.has_frequencies);

  const auto a = scratch("run_a"), b = scratch("run_b");
  report::write_reports(a, bundle, cfg);
  report::write_reports(b, pipeline::run_pipeline(cfg), cfg);
  for (const auto& name : report::report_files(bundle)) {
    CAPTURE(name);
    REQUIRE(fs::exists(a / name));
    if (name != "run_manifest.json") CHECK(slurp(a / name) == slurp(b / name));
  }

  const auto curve = lines(slurp(a / "equity_curve.csv"));
  CHECK(curve.front() == "date,ising,greedy,robust_mvo,hrp,index");
  CHECK(curve.size() == bundle.methods[0].curve.dates.size() + 1);
  for (const auto& row : curve) CHECK(std::count(row.begin(), row.end(), ',') == 5);

  const auto holdings = lines(slurp(a / "holdings.csv"));
  CHECK(holdings.size() > 1);
  CHECK(slurp(a / "metrics.json").find("\"tracking_error\"") != std::string::npos);
}

TEST_CASE("a different seed changes only the sampled method") {
  auto cfg = fixture_config();
  cfg.methods = {"greedy", "hrp"};
  const auto first = pipeline::run_pipeline(cfg);
  cfg.sampler.seed += 1;
  const auto second = pipeline::run_pipeline(cfg);
  for (std::size_t m = 0; m < first.methods.size(); ++m)
    CHECK(first.methods[m].curve.portfolio_returns == second.methods[m].curve.portfolio_returns);
}

TEST_CASE("coupling curve values") {
  const auto curve = pipeline::emit_coupling_curve(factors::CouplingConfig{});
  REQUIRE(curve.size() == 81);
  CHECK(curve.front().vix == 10.0);
  CHECK(curve.back().vix == 50.0);
  auto at = [&](double v) {
    for (const auto& p : curve)
      if (p.vix == v) return p.gamma;
    FAIL("missing grid point");
    return 0.0;
  };
  CHECK(at(20.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(at(18.5) == doctest::Approx(0.5 * std::exp(0.0375)).epsilon(1e-12));
  CHECK(at(18.5) == doctest::Approx(0.519).epsilon(1e-3));
  CHECK(at(50.0) == doctest::Approx(0.5 * std::exp(-0.75)).epsilon(1e-12));
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].gamma <= curve[i - 1].gamma);
  for (const auto& p : curve) CHECK((p.gamma >= 0.1 && p.gamma <= 0.8));
}

TEST_CASE("more assets requested than exist is infeasible") {
  auto cfg = fixture_config();
  cfg.k = 11;
  try {
    pipeline::run_pipeline(cfg);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
  }
}

TEST_CASE("output directory protocol") {
  const auto dir = scratch("protocol");
  report::write_directory(dir, {{"metrics.json", "{}"}, {"a.csv", "x\n"}});
  CHECK(slurp(dir / "a.csv") == "x\n");
  report::write_directory(dir, {{"metrics.json", "{\"v\":2}"}});
  CHECK_FALSE(fs::exists(dir / "a.csv"));
  CHECK(slurp(dir / "metrics.json") == "{\"v\":2}");

  const auto foreign = scratch("foreign");
  put(foreign / "notes.txt", "keep me");
  CHECK_THROWS_AS(report::write_directory(foreign, {{"metrics.json", "{}"}}), Error);
  CHECK(slurp(foreign / "notes.txt") == "keep me");
  for (const auto& entry : fs::directory_iterator(foreign.parent_path()))
    CHECK(entry.path().filename().string().find(".tmp") == std::string::npos);
}

TEST_CASE("command line exit codes") {
  const auto cfg = (kFixture / "config.cfg").string();
  const auto out = scratch("cli_run");
  CHECK(cli("run --config \"" + cfg + "\" --out \"" + out.string() + "\" --methods greedy,hrp") == 0);
  CHECK(fs::exists(out / "metrics.json"));
  CHECK(fs::exists(out / "run_manifest.json"));

  const auto sel = scratch("cli_select");
  CHECK(cli("select --config \"" + cfg + "\" --out \"" + sel.string() + "\"") == 0);
  CHECK(fs::exists(sel / "frequencies.csv"));

  CHECK(cli("validate --config \"" + cfg + "\"") == 0);
  CHECK(cli("coupling-curve --config \"" + cfg + "\"") == 0);
  CHECK(cli("run") == 2);
  CHECK(cli("frobnicate --config x") == 2);

  const auto bad = scratch("bad_cfg") / "run.cfg";
  put(bad, "selector.k = -3\n");
  CHECK(cli("validate --config \"" + bad.string() + "\"") == 2);

  const auto big = scratch("big_k") / "run.cfg";
  {
    std::string text = slurp(kFixture / "config.cfg");
    text.replace(text.find("selector.k = 4"), 14, "selector.k = 99");
    for (const char* f : {"prices.csv", "volumes.csv", "index.csv", "vix.csv", "sectors.csv"})
      text.replace(text.find(std::string("= ") + f), 2 + std::string(f).size(),
                   "= " + (kFixture / f).string());
    put(big, text);
  }
  CHECK(cli("run --config \"" + big.string() + "\" --out \"" + scratch("big_out").string() + "\"") == 2);

  const auto missing = scratch("missing") / "run.cfg";
  put(missing, "data.prices = nope.csv\ndata.volumes = nope.csv\ndata.index = nope.csv\ndata.vix = nope.csv\n"
               "data.sectors = nope.csv\n");
  CHECK(cli("run --config \"" + missing.string() + "\" --out \"" + scratch("missing_out").string() + "\"") == 3);
  CHECK_FALSE(fs::exists(scratch("missing_out")));
}
