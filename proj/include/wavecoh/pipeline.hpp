#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wavecoh/coherence.hpp"
#include "wavecoh/cwt.hpp"
#include "wavecoh/export.hpp"
#include "wavecoh/series.hpp"
#include "wavecoh/significance.hpp"

namespace wavecoh {

enum class OutputFormat { GridCsv, GridJson, Svg };

/// "grid-csv", "grid-json" or "svg"; throws ConfigError otherwise.
OutputFormat parse_format(std::string_view name);
std::string_view format_name(OutputFormat format);

struct RenderOptions {
  std::string colormap = "jet";  // jet, viridis or gray
  int arrow_spacing = 32;        // pixels; at most one arrow per spacing x spacing cell
  int plot_width = 760;
  int plot_height = 400;
};

struct AnalysisConfig {
  std::filesystem::path input_x;
  std::filesystem::path input_y;
  std::string column_x = "value";
  std::string column_y = "value";
  std::string date_column = "date";
  bool use_log_returns = true;
  std::optional<double> s0;
  std::optional<double> dj;
  double omega0 = 6.0;
  std::size_t n_surrogates = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 20031124;
  std::filesystem::path out = ".";
  std::vector<OutputFormat> formats{OutputFormat::GridCsv};
  unsigned threads = 0;  // execution only; never affects results
  bool pool_time = false;
  RenderOptions render;

  /// Throws ConfigError for out-of-range fields. `pair` requires both inputs.
  void validate(bool pair) const;
  bool wants(OutputFormat f) const;
  /// Result-affecting settings; excludes thread count.
  nlohmann::ordered_json echo() const;
};

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct InputDigest {
  std::string path;
  std::string sha256;
};

struct Provenance {
  nlohmann::ordered_json config;
  std::string version;
  std::vector<InputDigest> inputs;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();

  nlohmann::ordered_json to_json() const;
};

/// Grid from the config's overrides, or default_grid. Throws ConfigError when
/// the overrides do not fit a series of n samples.
ScaleGrid grid_for(const AnalysisConfig& config, std::size_t n, double dt);

/// Log returns (or normalized log levels with use_log_returns off), then standardized.
TimeSeries prepare(const TimeSeries& prices, bool use_log_returns);

struct TransformBundle {
  TimeSeries series;
  CwtMatrix transform;
  Provenance provenance;
};

struct ResultBundle {
  TimeSeries x;
  TimeSeries y;
  CoherenceField coherence;
  SignificanceField significance;
  Provenance provenance;
};

TransformBundle run_transform(const AnalysisConfig& config);
ResultBundle run_pair(const AnalysisConfig& config);

/// Analysis of already prepared (aligned, standardized) series.
ResultBundle analyze_pair(const TimeSeries& x, const TimeSeries& y, const AnalysisConfig& config);

std::vector<OutputFile> transform_outputs(const TransformBundle& bundle,
                                          const AnalysisConfig& config);
std::vector<OutputFile> pair_outputs(const ResultBundle& bundle, const AnalysisConfig& config);

/// Run and write. Nothing is written if any stage fails.
std::vector<std::filesystem::path> cmd_transform(const AnalysisConfig& config);
std::vector<std::filesystem::path> cmd_pair(const AnalysisConfig& config);

}  // namespace wavecoh
