#pragma once
// Synthetic weekly price files for the pipeline and acceptance tests.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wavecoh/series.hpp"

namespace fixture {

inline const wavecoh::Date kFirstMonday = wavecoh::parse_date("2003-11-24");

/// Prices 100 * exp(cumsum(returns)) on consecutive Mondays; the log returns of
/// the file are `returns` up to rounding in the text representation.
inline void write_prices(const std::filesystem::path& path, const std::vector<double>& returns,
                         const std::string& column = "value") {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << "date," << column << "\n";
  double level = 0.0;
  char buf[64];
  for (std::size_t i = 0; i <= returns.size(); ++i) {
    if (i > 0) level += returns[i - 1];
    std::snprintf(buf, sizeof buf, "%.17g", 100.0 * std::exp(level));
    out << wavecoh::format_date(kFirstMonday + std::chrono::days{7 * static_cast<long>(i)}) << ','
        << buf << "\n";
  }
}

struct Pair {
  std::vector<double> x;
  std::vector<double> y;
};

/// Independent white noise plus a shared in-phase 32-week cosine switched on
/// for weeks [begin, end) only.
inline Pair planted_pair(std::size_t n, std::size_t begin, std::size_t end, double amplitude,
                         std::uint64_t seed) {
  Pair p{oracle::white_noise(n, seed), oracle::white_noise(n, seed + 1)};
  for (std::size_t i = begin; i < end && i < n; ++i) {
    const double c = amplitude * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / 32.0);
    p.x[i] += c;
    p.y[i] += c;
  }
  return p;
}

}  // namespace fixture
