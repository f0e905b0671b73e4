// Writes the synthetic 10-asset, 2-sector fixture used by the end-to-end tests.
//   make_fixture OUT_DIR [SEED]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "isingtrack/date.hpp"

namespace fs = std::filesystem;
using isingtrack::Date;

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: make_fixture OUT_DIR [SEED]\n");
    return 2;
  }
  const fs::path out = argv[1];
  const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 20210104;
  fs::create_directories(out);

  constexpr int kAssets = 10;
  constexpr int kDays = 600;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);

  std::vector<Date> dates;
  for (Date d{2021, 1, 4}; dates.size() < kDays; d = d.plus_days(1))
    if (!d.is_weekend()) dates.push_back(d);

  std::vector<std::string> tickers;
  for (int a = 0; a < kAssets; ++a) tickers.push_back((a < 5 ? "TEC" : "FIN") + std::to_string(a % 5 + 1));

  // Market, sector and idiosyncratic factors; loadings differ per asset so that
  // correlations with the index and momentum vary across the universe.
  std::vector<double> beta(kAssets), sector_load(kAssets), idio(kAssets), drift(kAssets), base_volume(kAssets);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int a = 0; a < kAssets; ++a) {
    beta[a] = 0.6 + 0.8 * u(rng);
    sector_load[a] = 0.4 + 0.8 * u(rng);
    idio[a] = 0.004 + 0.012 * u(rng);
    drift[a] = 0.0006 * (u(rng) - 0.3);
    base_volume[a] = 1e5 * std::exp(3.0 * u(rng));
  }

  std::vector<std::vector<double>> price(kAssets, std::vector<double>(kDays)), volume = price;
  std::vector<double> index(kDays), vix(kDays);
  double level = 18.0;
  for (int a = 0; a < kAssets; ++a) price[a][0] = 50.0 + 100.0 * u(rng);
  index[0] = 1000.0;
  for (int t = 0; t < kDays; ++t) {
    level = std::clamp(level + 0.08 * (18.0 - level) + 1.2 * z(rng), 11.0, 45.0);
    vix[t] = level;
    const double vol_scale = level / 18.0;
    const double market = 0.0004 + 0.009 * vol_scale * z(rng);
    const double sector_shock[2] = {0.006 * z(rng), 0.006 * z(rng)};
    double index_ret = 0.0;
    for (int a = 0; a < kAssets; ++a) {
      const double r =
          drift[a] + beta[a] * market + sector_load[a] * sector_shock[a / 5] + idio[a] * vol_scale * z(rng);
      if (t > 0) price[a][t] = price[a][t - 1] * (1.0 + r);
      volume[a][t] = std::round(base_volume[a] * std::exp(0.3 * z(rng)));
      index_ret += r / kAssets;
    }
    if (t > 0) index[t] = index[t - 1] * (1.0 + index_ret + 0.0005 * z(rng));
  }

  auto write_panel = [&](const char* name, const std::vector<std::vector<double>>& cols, const char* fmt) {
    std::ofstream f(out / name);
    f << "date";
    for (const auto& t : tickers) f << ',' << t;
    f << '\n';
    char buf[32];
    for (int t = 0; t < kDays; ++t) {
      f << dates[t].to_string();
      for (int a = 0; a < kAssets; ++a) {
        std::snprintf(buf, sizeof buf, fmt, cols[a][t]);
        f << ',' << buf;
      }
      f << '\n';
    }
  };
  auto write_series = [&](const char* name, const std::vector<double>& v) {
    std::ofstream f(out / name);
    f << "date,value\n";
    char buf[32];
    for (int t = 0; t < kDays; ++t) {
      std::snprintf(buf, sizeof buf, "%.6f", v[t]);
      f << dates[t].to_string() << ',' << buf << '\n';
    }
  };
  write_panel("prices.csv", price, "%.6f");
  write_panel("volumes.csv", volume, "%.0f");
  write_series("index.csv", index);
  write_series("vix.csv", vix);

  std::ofstream s(out / "sectors.csv");
  s << "ticker,sector\n";
  for (int a = 0; a < kAssets; ++a) s << tickers[a] << ',' << (a < 5 ? "Technology" : "Financials") << '\n';

  std::printf("wrote %d assets x %d days to %s (%s .. %s)\n", kAssets, kDays, out.c_str(),
              dates.front().to_string().c_str(), dates.back().to_string().c_str());
  return 0;
}
