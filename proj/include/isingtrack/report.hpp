#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "isingtrack/config.hpp"
#include "isingtrack/pipeline.hpp"

namespace isingtrack::report {

inline constexpr const char* kVersion = "0.1.0";

void write_metrics_json(std::ostream& out, const pipeline::ReportBundle& bundle);
/// date, cumulative return per method, cumulative index return.
void write_equity_curve(std::ostream& out, const pipeline::ReportBundle& bundle);
/// date, daily r_p - r_idx per method.
void write_tracking_diff(std::ostream& out, const pipeline::ReportBundle& bundle);
void write_dm_tests(std::ostream& out, const pipeline::ReportBundle& bundle);
void write_holdings(std::ostream& out, const pipeline::ReportBundle& bundle);
/// Per method and rebalance: asset count and total weight for each sector held.
void write_sector_distribution(std::ostream& out, const pipeline::ReportBundle& bundle);
void write_frequencies(std::ostream& out, std::span<const std::string> tickers,
                       const sampler::SelectionFrequencies& freq);
void write_coupling_curve(std::ostream& out, std::span<const pipeline::CouplingPoint> curve);
void write_selection(std::ostream& out, const selector::Selection& selection, const marketdata::SectorMap& sectors);
void write_manifest(std::ostream& out, const pipeline::ReportBundle& bundle, const config::RunConfig& cfg);

enum class FileSet { Backtest, Full };

/// Files written for a run, in emission order.
std::vector<std::string> report_files(const pipeline::ReportBundle& bundle, FileSet set = FileSet::Full);

/// Writes every report into a fresh sibling directory and renames it onto
/// `dir`. An existing `dir` is replaced only if it is empty or holds a
/// previous run (contains run_manifest.json or metrics.json).
void write_reports(const std::filesystem::path& dir, const pipeline::ReportBundle& bundle,
                   const config::RunConfig& cfg, FileSet set = FileSet::Full);

/// Same atomic protocol for an arbitrary list of (file name, content) pairs.
void write_directory(const std::filesystem::path& dir,
                     const std::vector<std::pair<std::string, std::string>>& files);

}  // namespace isingtrack::report
