#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isingtrack/date.hpp"

namespace isingtrack::marketdata {

using Series = std::vector<double>;

/// Adjusted close prices and share volumes, one column per ticker.
struct PricePanel {
  std::vector<Date> dates;
  std::vector<std::string> tickers;
  std::vector<Series> prices;   // prices[asset][day]
  std::vector<Series> volumes;  // volumes[asset][day]

  std::size_t num_assets() const { return tickers.size(); }
  std::size_t num_days() const { return dates.size(); }
};

/// A dated single-value series (benchmark prices, VIX levels).
struct DatedSeries {
  std::vector<Date> dates;
  Series values;
};

/// Simple daily returns aligned with benchmark returns and the VIX level.
/// Volumes are carried along on the same calendar for the liquidity factor.
struct ReturnsPanel {
  std::vector<std::string> tickers;
  std::vector<Date> dates;
  std::vector<Series> returns;  // returns[asset][day]
  Series index_returns;
  Series vix;
  std::vector<Series> volumes;  // volumes[asset][day]; may be empty

  std::size_t num_assets() const { return tickers.size(); }
  std::size_t num_days() const { return dates.size(); }

  /// Rows [begin, end) as a new panel.
  ReturnsPanel slice(std::size_t begin, std::size_t end) const;
  /// Throws Schema if the column lengths disagree with the calendar.
  void validate() const;
};

enum class Sector {
  Technology,
  Healthcare,
  Financials,
  ConsumerDiscretionary,
  ConsumerStaples,
  Energy,
  Industrials,
  CommunicationServices,
  Utilities,
  RealEstate,
};

inline constexpr std::size_t kSectorCount = 10;

std::string_view to_string(Sector sector);
std::optional<Sector> parse_sector(std::string_view label);
const std::array<Sector, kSectorCount>& all_sectors();

class SectorMap {
 public:
  SectorMap() = default;
  explicit SectorMap(std::map<std::string, Sector> entries) : entries_(std::move(entries)) {}

  Sector at(const std::string& ticker) const;
  bool contains(const std::string& ticker) const { return entries_.contains(ticker); }
  std::size_t size() const { return entries_.size(); }
  std::size_t distinct_sectors() const;
  const std::map<std::string, Sector>& entries() const { return entries_; }

  /// Throws Coverage listing every ticker without a sector.
  void require_coverage(std::span<const std::string> universe) const;

 private:
  std::map<std::string, Sector> entries_;
};

struct SplitDataset {
  ReturnsPanel train;
  ReturnsPanel test;
  Date split_date;
};

/// Longest factor lookback; training windows shorter than this are rejected.
inline constexpr std::size_t kMinTrainingDays = 252;

PricePanel load_price_panel(const std::filesystem::path& prices_path,
                            const std::filesystem::path& volumes_path);
PricePanel parse_price_panel(std::string_view prices_csv, std::string_view volumes_csv);

/// `date,value` CSV with no missing cells.
DatedSeries load_dated_series(const std::filesystem::path& path);
DatedSeries parse_dated_series(std::string_view csv, std::string_view source = "series");

ReturnsPanel compute_returns(const PricePanel& panel, const DatedSeries& index_prices,
                             const DatedSeries& vix_levels);

SplitDataset split_train_test(const ReturnsPanel& panel, Date split_date);

/// An empty universe skips the coverage check.
SectorMap load_sector_map(const std::filesystem::path& path,
                          std::span<const std::string> universe = {});
SectorMap parse_sector_map(std::string_view csv, std::span<const std::string> universe = {});

}  // namespace isingtrack::marketdata
