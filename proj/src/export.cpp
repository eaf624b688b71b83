#include "wavecoh/export.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <system_error>

#include "wavecoh/error.hpp"

namespace wavecoh {

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double round9(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

namespace {

template <typename T, typename Format>
std::string grid_csv_impl(const Matrix<T>& values, std::span<const double> periods,
                          std::span<const Date> dates, Format format) {
  std::string out = "period_weeks";
  for (const Date d : dates) {
    out += ',';
    out += format_date(d);
  }
  out += '\n';
  for (std::size_t j = 0; j < values.rows(); ++j) {
    out += format_number(periods[j]);
    for (const T v : values.row(j)) {
      out += ',';
      out += format(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string grid_csv(const Matrix<double>& values, std::span<const double> periods,
                     std::span<const Date> dates) {
  return grid_csv_impl(values, periods, dates, [](double v) { return format_number(v); });
}

std::string grid_csv(const Matrix<std::uint8_t>& values, std::span<const double> periods,
                     std::span<const Date> dates) {
  return grid_csv_impl(values, periods, dates,
                       [](std::uint8_t v) { return std::string(v ? "1" : "0"); });
}

nlohmann::ordered_json json_vector(std::span<const double> values) {
  auto arr = nlohmann::ordered_json::array();
  for (double v : values) arr.push_back(round9(v));
  return arr;
}

nlohmann::ordered_json json_matrix(const Matrix<double>& values) {
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t j = 0; j < values.rows(); ++j) rows.push_back(json_vector(values.row(j)));
  return rows;
}

nlohmann::ordered_json json_matrix(const Matrix<std::uint8_t>& values) {
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t j = 0; j < values.rows(); ++j) {
    auto row = nlohmann::ordered_json::array();
    for (auto v : values.row(j)) row.push_back(static_cast<int>(v));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir,
                                                 const std::vector<OutputFile>& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError(dir.string() + ": cannot create output directory: " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& file : files) {
    const auto target = dir / file.name;
    auto temp = target;
    temp += ".tmp";
    {
      std::ofstream out(temp, std::ios::binary | std::ios::trunc);
      out.write(file.content.data(), static_cast<std::streamsize>(file.content.size()));
      if (!out) throw InputError(temp.string() + ": write failed");
    }
    std::filesystem::rename(temp, target, ec);
    if (ec) throw InputError(target.string() + ": rename failed: " + ec.message());
    written.push_back(target);
  }
  return written;
}

}  // namespace wavecoh
