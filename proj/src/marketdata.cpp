#include "isingtrack/marketdata.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "csv.hpp"
#include "isingtrack/errors.hpp"

namespace isingtrack {

std::string csv::read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace marketdata {

namespace {

struct RawTable {
  std::vector<Date> dates;
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> cells;  // cells[column][row]
};

RawTable parse_wide(std::string_view text, std::string_view source) {
  auto rows = csv::split(text);
  if (rows.empty()) fail(ErrorCode::Parse, std::string(source) + ": empty file");
  const auto& header = rows.front();
  if (header.cells.size() < 2 || header.cells[0] != "date")
    fail(ErrorCode::Parse, csv::where(source, header.line, 1) + ": header must be date,TICK1,...");

  RawTable table;
  std::set<std::string> seen;
  for (std::size_t c = 1; c < header.cells.size(); ++c) {
    std::string name(header.cells[c]);
    if (name.empty()) fail(ErrorCode::Parse, csv::where(source, header.line, c + 1) + ": empty ticker");
    if (!seen.insert(name).second)
      fail(ErrorCode::Schema, csv::where(source, header.line, c + 1) + ": duplicate ticker " + name);
    table.columns.push_back(std::move(name));
  }
  table.cells.resize(table.columns.size());
  if (rows.size() == 1) fail(ErrorCode::Parse, std::string(source) + ": no data rows");

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() != header.cells.size())
      fail(ErrorCode::Parse, csv::where(source, row.line, 1) + ": expected " +
                                 std::to_string(header.cells.size()) + " cells, got " +
                                 std::to_string(row.cells.size()));
    auto date = Date::try_parse(row.cells[0]);
    if (!date) fail(ErrorCode::Parse, csv::where(source, row.line, 1) + ": bad date '" +
                                          std::string(row.cells[0]) + "'");
    if (!table.dates.empty() && *date <= table.dates.back())
      fail(ErrorCode::Parse, csv::where(source, row.line, 1) + ": dates must be strictly increasing");
    table.dates.push_back(*date);
    for (std::size_t c = 1; c < row.cells.size(); ++c) {
      std::string_view cell = row.cells[c];
      if (cell.empty()) {
        table.cells[c - 1].push_back(std::nullopt);
        continue;
      }
      auto value = csv::to_double(cell);
      if (!value) fail(ErrorCode::Parse, csv::where(source, row.line, c + 1) + ": not a number '" +
                                             std::string(cell) + "'");
      table.cells[c - 1].push_back(*value);
    }
  }
  return table;
}

void forward_fill(std::vector<std::optional<double>>& column) {
  std::optional<double> last;
  for (auto& cell : column) {
    if (cell) last = cell;
    else cell = last;
  }
}

}  // namespace

ReturnsPanel ReturnsPanel::slice(std::size_t begin, std::size_t end) const {
  end = std::min(end, num_days());
  begin = std::min(begin, end);
  ReturnsPanel out;
  out.tickers = tickers;
  out.dates.assign(dates.begin() + begin, dates.begin() + end);
  out.index_returns.assign(index_returns.begin() + begin, index_returns.begin() + end);
  out.vix.assign(vix.begin() + begin, vix.begin() + end);
  out.returns.reserve(returns.size());
  for (const auto& col : returns) out.returns.emplace_back(col.begin() + begin, col.begin() + end);
  out.volumes.reserve(volumes.size());
  for (const auto& col : volumes) out.volumes.emplace_back(col.begin() + begin, col.begin() + end);
  return out;
}

void ReturnsPanel::validate() const {
  const std::size_t t = dates.size();
  if (returns.size() != tickers.size()) fail(ErrorCode::Schema, "returns column count != ticker count");
  if (!volumes.empty() && volumes.size() != tickers.size())
    fail(ErrorCode::Schema, "volume column count != ticker count");
  if (index_returns.size() != t || vix.size() != t)
    fail(ErrorCode::Schema, "index/vix length differs from calendar");
  for (const auto& col : returns)
    if (col.size() != t) fail(ErrorCode::Schema, "return column length differs from calendar");
  for (const auto& col : volumes)
    if (col.size() != t) fail(ErrorCode::Schema, "volume column length differs from calendar");
}

PricePanel parse_price_panel(std::string_view prices_csv, std::string_view volumes_csv) {
  RawTable prices = parse_wide(prices_csv, "prices.csv");
  RawTable volumes = parse_wide(volumes_csv, "volumes.csv");

  if (std::set(prices.columns.begin(), prices.columns.end()) !=
      std::set(volumes.columns.begin(), volumes.columns.end()))
    fail(ErrorCode::Schema, "ticker mismatch between prices.csv and volumes.csv");
  if (prices.dates != volumes.dates)
    fail(ErrorCode::Schema, "date mismatch between prices.csv and volumes.csv");

  std::unordered_map<std::string, std::size_t> volume_col;
  for (std::size_t c = 0; c < volumes.columns.size(); ++c) volume_col[volumes.columns[c]] = c;

  const std::size_t n = prices.columns.size();
  std::vector<std::vector<std::optional<double>>> vol_cells(n);
  for (std::size_t a = 0; a < n; ++a) {
    vol_cells[a] = std::move(volumes.cells[volume_col.at(prices.columns[a])]);
    for (std::size_t t = 0; t < prices.dates.size(); ++t) {
      if (prices.cells[a][t] && !(*prices.cells[a][t] > 0.0))
        fail(ErrorCode::Parse, "prices.csv: non-positive price for " + prices.columns[a] + " on " +
                                   prices.dates[t].to_string());
      if (vol_cells[a][t] && !(*vol_cells[a][t] >= 0.0))
        fail(ErrorCode::Parse, "volumes.csv: negative volume for " + prices.columns[a] + " on " +
                                   prices.dates[t].to_string());
    }
    forward_fill(prices.cells[a]);
    forward_fill(vol_cells[a]);
  }

  // After forward-filling, a row is incomplete only before some asset's first observation.
  std::size_t first = 0;
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t t = 0;
    while (t < prices.dates.size() && !(prices.cells[a][t] && vol_cells[a][t])) ++t;
    first = std::max(first, t);
  }
  if (first == prices.dates.size())
    fail(ErrorCode::InsufficientData, "no trading day where every ticker has a price and volume");

  PricePanel panel;
  panel.tickers = prices.columns;
  panel.dates.assign(prices.dates.begin() + first, prices.dates.end());
  panel.prices.resize(n);
  panel.volumes.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t t = first; t < prices.dates.size(); ++t) {
      panel.prices[a].push_back(*prices.cells[a][t]);
      panel.volumes[a].push_back(*vol_cells[a][t]);
    }
  }
  return panel;
}

PricePanel load_price_panel(const std::filesystem::path& prices_path,
                            const std::filesystem::path& volumes_path) {
  return parse_price_panel(csv::read_file(prices_path), csv::read_file(volumes_path));
}

DatedSeries parse_dated_series(std::string_view text, std::string_view source) {
  auto rows = csv::split(text);
  if (rows.empty()) fail(ErrorCode::Parse, std::string(source) + ": empty file");
  const auto& header = rows.front();
  if (header.cells.size() != 2 || header.cells[0] != "date" || header.cells[1] != "value")
    fail(ErrorCode::Parse, csv::where(source, header.line, 1) + ": header must be date,value");
  DatedSeries series;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() != 2)
      fail(ErrorCode::Parse, csv::where(source, row.line, 1) + ": expected 2 cells");
    auto date = Date::try_parse(row.cells[0]);
    if (!date) fail(ErrorCode::Parse, csv::where(source, row.line, 1) + ": bad date");
    if (!series.dates.empty() && *date <= series.dates.back())
      fail(ErrorCode::Parse, csv::where(source, row.line, 1) + ": dates must be strictly increasing");
    auto value = csv::to_double(row.cells[1]);
    if (!value) fail(ErrorCode::Parse, csv::where(source, row.line, 2) + ": not a number");
    series.dates.push_back(*date);
    series.values.push_back(*value);
  }
  if (series.dates.empty()) fail(ErrorCode::Parse, std::string(source) + ": no data rows");
  return series;
}

DatedSeries load_dated_series(const std::filesystem::path& path) {
  return parse_dated_series(csv::read_file(path), path.filename().string());
}

ReturnsPanel compute_returns(const PricePanel& panel, const DatedSeries& index_prices,
                             const DatedSeries& vix_levels) {
  // Intersection of the three calendars; all inputs are sorted.
  std::vector<std::size_t> rows_panel, rows_index, rows_vix;
  std::size_t a = 0, b = 0, c = 0;
  while (a < panel.dates.size() && b < index_prices.dates.size() && c < vix_levels.dates.size()) {
    Date d = std::max({panel.dates[a], index_prices.dates[b], vix_levels.dates[c]});
    if (panel.dates[a] < d) { ++a; continue; }
    if (index_prices.dates[b] < d) { ++b; continue; }
    if (vix_levels.dates[c] < d) { ++c; continue; }
    rows_panel.push_back(a++);
    rows_index.push_back(b++);
    rows_vix.push_back(c++);
  }
  if (rows_panel.size() < 2)
    fail(ErrorCode::InsufficientData, "fewer than 2 common dates across prices, index and VIX");

  const std::size_t n = panel.num_assets();
  const std::size_t t_out = rows_panel.size() - 1;
  ReturnsPanel out;
  out.tickers = panel.tickers;
  out.returns.assign(n, Series(t_out));
  out.volumes.assign(n, Series(t_out));
  out.index_returns.resize(t_out);
  out.vix.resize(t_out);
  for (std::size_t k = 1; k <= t_out; ++k) {
    out.dates.push_back(panel.dates[rows_panel[k]]);
    for (std::size_t i = 0; i < n; ++i) {
      out.returns[i][k - 1] = panel.prices[i][rows_panel[k]] / panel.prices[i][rows_panel[k - 1]] - 1.0;
      out.volumes[i][k - 1] = panel.volumes[i][rows_panel[k]];
    }
    double prev = index_prices.values[rows_index[k - 1]];
    double cur = index_prices.values[rows_index[k]];
    if (!(prev > 0.0) || !(cur > 0.0))
      fail(ErrorCode::Parse, "index.csv: non-positive level on " + out.dates.back().to_string());
    out.index_returns[k - 1] = cur / prev - 1.0;
    out.vix[k - 1] = vix_levels.values[rows_vix[k]];
  }
  return out;
}

SplitDataset split_train_test(const ReturnsPanel& panel, Date split_date) {
  if (panel.dates.empty()) fail(ErrorCode::InsufficientData, "empty returns panel");
  auto it = std::lower_bound(panel.dates.begin(), panel.dates.end(), split_date);
  if (it == panel.dates.end())
    fail(ErrorCode::InsufficientData, "split date " + split_date.to_string() + " is after the last trading day");
  const auto cut = static_cast<std::size_t>(it - panel.dates.begin());
  if (cut < kMinTrainingDays)
    fail(ErrorCode::InsufficientData, "training window has " + std::to_string(cut) +
                                          " days; at least " + std::to_string(kMinTrainingDays) +
                                          " required");
  return SplitDataset{panel.slice(0, cut), panel.slice(cut, panel.num_days()), *it};
}

std::string_view to_string(Sector sector) {
  switch (sector) {
    case Sector::Technology: return "Technology";
    case Sector::Healthcare: return "Healthcare";
    case Sector::Financials: return "Financials";
    case Sector::ConsumerDiscretionary: return "Consumer Discretionary";
    case Sector::ConsumerStaples: return "Consumer Staples";
    case Sector::Energy: return "Energy";
    case Sector::Industrials: return "Industrials";
    case Sector::CommunicationServices: return "Communication Services";
    case Sector::Utilities: return "Utilities";
    case Sector::RealEstate: return "Real Estate";
  }
  return "?";
}

const std::array<Sector, kSectorCount>& all_sectors() {
  static constexpr std::array<Sector, kSectorCount> sectors{
      Sector::Technology,       Sector::Healthcare,  Sector::Financials,
      Sector::ConsumerDiscretionary, Sector::ConsumerStaples, Sector::Energy,
      Sector::Industrials,      Sector::CommunicationServices, Sector::Utilities,
      Sector::RealEstate};
  return sectors;
}

std::optional<Sector> parse_sector(std::string_view label) {
  for (Sector s : all_sectors())
    if (to_string(s) == label) return s;
  return std::nullopt;
}

Sector SectorMap::at(const std::string& ticker) const {
  auto it = entries_.find(ticker);
  if (it == entries_.end()) fail(ErrorCode::Coverage, "no sector for ticker " + ticker);
  return it->second;
}

std::size_t SectorMap::distinct_sectors() const {
  std::set<Sector> sectors;
  for (const auto& [ticker, sector] : entries_) sectors.insert(sector);
  return sectors.size();
}

void SectorMap::require_coverage(std::span<const std::string> universe) const {
  std::string missing;
  for (const auto& ticker : universe) {
    if (!entries_.contains(ticker)) missing += (missing.empty() ? "" : ", ") + ticker;
  }
  if (!missing.empty()) fail(ErrorCode::Coverage, "sectors.csv has no sector for: " + missing);
}

SectorMap parse_sector_map(std::string_view text, std::span<const std::string> universe) {
  auto rows = csv::split(text);
  if (rows.empty()) fail(ErrorCode::Parse, "sectors.csv: empty file");
  const auto& header = rows.front();
  if (header.cells.size() != 2 || header.cells[0] != "ticker" || header.cells[1] != "sector")
    fail(ErrorCode::Parse, csv::where("sectors.csv", header.line, 1) + ": header must be ticker,sector");
  std::map<std::string, Sector> entries;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() != 2 || row.cells[0].empty())
      fail(ErrorCode::Parse, csv::where("sectors.csv", row.line, 1) + ": expected ticker,sector");
    auto sector = parse_sector(row.cells[1]);
    if (!sector)
      fail(ErrorCode::Schema, csv::where("sectors.csv", row.line, 2) + ": unknown sector '" +
                                  std::string(row.cells[1]) + "'");
    std::string ticker(row.cells[0]);
    auto [it, inserted] = entries.emplace(ticker, *sector);
    if (!inserted && it->second != *sector)
      fail(ErrorCode::Schema, csv::where("sectors.csv", row.line, 1) + ": conflicting sectors for " + ticker);
  }
  SectorMap map(std::move(entries));
  if (!universe.empty()) map.require_coverage(universe);
  return map;
}

SectorMap load_sector_map(const std::filesystem::path& path, std::span<const std::string> universe) {
  return parse_sector_map(csv::read_file(path), universe);
}

}  // namespace marketdata
}  // namespace isingtrack
