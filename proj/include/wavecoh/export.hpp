#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "wavecoh/matrix.hpp"
#include "wavecoh/series.hpp"

namespace wavecoh {

/// Shortest text of `v` rounded to 9 significant digits. Used for every number
/// written by the exporters so CSV, JSON and SVG metadata agree textually.
std::string format_number(double v);
/// `v` rounded to 9 significant digits.
double round9(double v);

/// First row: "period_weeks" followed by ISO dates; each further row: the
/// Fourier period followed by the row's values.
std::string grid_csv(const Matrix<double>& values, std::span<const double> periods,
                     std::span<const Date> dates);
std::string grid_csv(const Matrix<std::uint8_t>& values, std::span<const double> periods,
                     std::span<const Date> dates);

nlohmann::ordered_json json_matrix(const Matrix<double>& values);
nlohmann::ordered_json json_matrix(const Matrix<std::uint8_t>& values);
nlohmann::ordered_json json_vector(std::span<const double> values);

struct OutputFile {
  std::string name;
  std::string content;
};

/// Writes every file to `dir` through a temporary name and a rename.
std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir,
                                                 const std::vector<OutputFile>& files);

}  // namespace wavecoh
