#include "isingtrack/report.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "json.hpp"

#include "isingtrack/errors.hpp"
#include "isingtrack/kernels.hpp"

namespace isingtrack::report {

namespace {

using json = nlohmann::ordered_json;
using config::format_number;

// Rounds through the 10-significant-digit text form so that the JSON writer,
// which prints the shortest round-trip representation, emits at most 10 digits.
json number(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

json optional_number(const std::optional<double>& x) { return x ? number(*x) : json(nullptr); }

json metrics_object(const backtest::MetricsReport& m) {
  json o;
  o["tracking_error"] = optional_number(m.tracking_error);
  o["correlation"] = optional_number(m.correlation);
  o["total_return"] = optional_number(m.total_return);
  o["sharpe"] = optional_number(m.sharpe);
  o["sortino"] = optional_number(m.sortino);
  o["max_drawdown"] = optional_number(m.max_drawdown);
  o["information_ratio"] = optional_number(m.information_ratio);
  return o;
}

const std::vector<Date>& test_dates(const pipeline::ReportBundle& b) {
  static const std::vector<Date> none;
  return b.methods.empty() ? none : b.methods.front().curve.dates;
}

std::string sector_of(const marketdata::SectorMap& sectors, const std::string& ticker) {
  return sectors.contains(ticker) ? std::string(marketdata::to_string(sectors.at(ticker))) : "";
}

}  // namespace

void write_metrics_json(std::ostream& out, const pipeline::ReportBundle& bundle) {
  json root;
  json methods = json::object();
  for (const auto& m : bundle.methods) methods[m.name] = metrics_object(m.metrics);
  root["methods"] = std::move(methods);
  root["index"] = metrics_object(bundle.index_metrics);
  root["test_days"] = test_dates(bundle).size();
  out << root.dump(2) << '\n';
}

void write_equity_curve(std::ostream& out, const pipeline::ReportBundle& bundle) {
  out << "date";
  for (const auto& m : bundle.methods) out << ',' << m.name;
  out << ",index\n";
  const auto& dates = test_dates(bundle);
  std::vector<double> equity(bundle.methods.size(), 1.0);
  double index_equity = 1.0;
  for (std::size_t t = 0; t < dates.size(); ++t) {
    out << dates[t].to_string();
    for (std::size_t k = 0; k < bundle.methods.size(); ++k) {
      equity[k] *= 1.0 + bundle.methods[k].curve.portfolio_returns[t];
      out << ',' << format_number(equity[k] - 1.0);
    }
    index_equity *= 1.0 + bundle.methods.front().curve.index_returns[t];
    out << ',' << format_number(index_equity - 1.0) << '\n';
  }
}

void write_tracking_diff(std::ostream& out, const pipeline::ReportBundle& bundle) {
  out << "date";
  for (const auto& m : bundle.methods) out << ',' << m.name;
  out << '\n';
  const auto& dates = test_dates(bundle);
  for (std::size_t t = 0; t < dates.size(); ++t) {
    out << dates[t].to_string();
    for (const auto& m : bundle.methods)
      out << ',' << format_number(m.curve.portfolio_returns[t] - m.curve.index_returns[t]);
    out << '\n';
  }
}

void write_dm_tests(std::ostream& out, const pipeline::ReportBundle& bundle) {
  json tests = json::array();
  for (const auto& e : bundle.dm) {
    json o;
    o["method_a"] = e.a;
    o["method_b"] = e.b;
    o["statistic"] = optional_number(e.result.statistic);
    o["p_value"] = optional_number(e.result.p_value);
    o["loss_differential_mean"] = number(e.result.loss_differential_mean);
    tests.push_back(std::move(o));
  }
  out << json{{"loss", "squared_tracking_error"}, {"tests", std::move(tests)}}.dump(2) << '\n';
}

void write_holdings(std::ostream& out, const pipeline::ReportBundle& bundle) {
  out << "method,rebalance_date,ticker,weight,sector\n";
  for (const auto& m : bundle.methods)
    for (const auto& rec : m.curve.holdings_log)
      for (std::size_t i = 0; i < rec.selection.tickers.size(); ++i) {
        const auto& t = rec.selection.tickers[i];
        out << m.name << ',' << rec.date.to_string() << ',' << t << ',' << format_number(rec.selection.weights[i])
            << ',' << sector_of(bundle.sectors, t) << '\n';
      }
}

void write_sector_distribution(std::ostream& out, const pipeline::ReportBundle& bundle) {
  out << "method,rebalance_date,sector,count,weight\n";
  for (const auto& m : bundle.methods)
    for (const auto& rec : m.curve.holdings_log) {
      std::map<std::string, std::pair<std::size_t, double>> by_sector;
      for (std::size_t i = 0; i < rec.selection.tickers.size(); ++i) {
        auto& slot = by_sector[sector_of(bundle.sectors, rec.selection.tickers[i])];
        ++slot.first;
        slot.second += rec.selection.weights[i];
      }
      for (const auto& [sector, cw] : by_sector)
        out << m.name << ',' << rec.date.to_string() << ',' << sector << ',' << cw.first << ','
            << format_number(cw.second) << '\n';
    }
}

void write_frequencies(std::ostream& out, std::span<const std::string> tickers,
                       const sampler::SelectionFrequencies& freq) {
  out << "ticker,frequency";
  for (double b : freq.betas) out << ",beta_" << format_number(b);
  out << '\n';
  for (std::size_t i = 0; i < tickers.size(); ++i) {
    out << tickers[i] << ',' << format_number(freq.freq[i]);
    for (const auto& row : freq.freq_per_beta) out << ',' << format_number(row[i]);
    out << '\n';
  }
}

void write_coupling_curve(std::ostream& out, std::span<const pipeline::CouplingPoint> curve) {
  out << "vix,gamma\n";
  for (const auto& p : curve) out << format_number(p.vix) << ',' << format_number(p.gamma) << '\n';
}

void write_selection(std::ostream& out, const selector::Selection& selection, const marketdata::SectorMap& sectors) {
  out << "ticker,weight,sector\n";
  for (std::size_t i = 0; i < selection.tickers.size(); ++i)
    out << selection.tickers[i] << ',' << format_number(selection.weights[i]) << ','
        << sector_of(sectors, selection.tickers[i]) << '\n';
}

void write_manifest(std::ostream& out, const pipeline::ReportBundle& bundle, const config::RunConfig& cfg) {
  json root;
  root["version"] = kVersion;
  root["seed"] = cfg.sampler.seed;
  root["simd_kernels"] = std::string(simd::active().name);
  json conf;
  for (const auto& [k, v] : cfg.resolved()) conf[k] = v;
  root["config"] = std::move(conf);
  json methods = json::array();
  for (const auto& m : bundle.methods) methods.push_back(m.name);
  root["methods"] = std::move(methods);
  if (bundle.has_frequencies) {
    root["sampler"] = {{"samples", bundle.frequencies.n_samples_total},
                       {"max_rhat", number(bundle.frequencies.max_rhat)}};
  }
  json timings;
  for (const auto& [stage, secs] : bundle.timings) timings[stage] = number(secs);
  root["timings_seconds"] = std::move(timings);
  root["warnings"] = bundle.warnings;
  out << root.dump(2) << '\n';
}

std::vector<std::string> report_files(const pipeline::ReportBundle& bundle, FileSet set) {
  std::vector<std::string> files{"metrics.json", "equity_curve.csv", "tracking_diff.csv", "dm_tests.json",
                                 "holdings.csv"};
  if (set == FileSet::Backtest) return files;
  files.insert(files.end(), {"sector_distribution.csv", "coupling_curve.csv"});
  if (bundle.has_frequencies) files.push_back("frequencies.csv");
  files.push_back("run_manifest.json");
  return files;
}

void write_reports(const std::filesystem::path& dir, const pipeline::ReportBundle& bundle,
                   const config::RunConfig& cfg, FileSet set) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& name : report_files(bundle, set)) {
    std::ostringstream s;
    if (name == "metrics.json") write_metrics_json(s, bundle);
    else if (name == "equity_curve.csv") write_equity_curve(s, bundle);
    else if (name == "tracking_diff.csv") write_tracking_diff(s, bundle);
    else if (name == "dm_tests.json") write_dm_tests(s, bundle);
    else if (name == "holdings.csv") write_holdings(s, bundle);
    else if (name == "sector_distribution.csv") write_sector_distribution(s, bundle);
    else if (name == "coupling_curve.csv") write_coupling_curve(s, bundle.coupling_curve);
    else if (name == "frequencies.csv") write_frequencies(s, bundle.tickers, bundle.frequencies);
    else if (name == "run_manifest.json") write_manifest(s, bundle, cfg);
    files.emplace_back(name, s.str());
  }
  write_directory(dir, files);
}

void write_directory(const std::filesystem::path& dir,
                     const std::vector<std::pair<std::string, std::string>>& files) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path target = fs::absolute(dir);
  if (fs::exists(target)) {
    if (!fs::is_directory(target)) fail(ErrorCode::Io, target.string() + " exists and is not a directory");
    const bool previous_run = fs::exists(target / "run_manifest.json") || fs::exists(target / "metrics.json") ||
                              fs::exists(target / "frequencies.csv") || fs::exists(target / "coupling_curve.csv");
    if (!previous_run && !fs::is_empty(target))
      fail(ErrorCode::Io, target.string() + " is a non-empty directory that does not hold a previous run");
  }
  const fs::path parent = target.parent_path();
  fs::create_directories(parent, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + parent.string() + ": " + ec.message());

  fs::path staging;
  for (int attempt = 0;; ++attempt) {
    staging = parent / ("." + target.filename().string() + ".tmp" + std::to_string(attempt));
    if (fs::create_directory(staging, ec)) break;
    if (ec || attempt > 1000) fail(ErrorCode::Io, "cannot create staging directory in " + parent.string());
  }
  try {
    for (const auto& [name, content] : files) {
      std::ofstream f(staging / name, std::ios::binary);
      f << content;
      if (!f.flush()) fail(ErrorCode::Io, "failed writing " + (staging / name).string());
    }
    if (fs::exists(target)) fs::remove_all(target);
    fs::rename(staging, target);
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

}  // namespace isingtrack::report
