#include "wavecoh/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "wavecoh/error.hpp"
#include "wavecoh/svg.hpp"

namespace wavecoh {

OutputFormat parse_format(std::string_view name) {
  if (name == "grid-csv") return OutputFormat::GridCsv;
  if (name == "grid-json") return OutputFormat::GridJson;
  if (name == "svg") return OutputFormat::Svg;
  throw ConfigError("unknown format '" + std::string(name) + "' (grid-csv, grid-json, svg)");
}

std::string_view format_name(OutputFormat format) {
  switch (format) {
    case OutputFormat::GridCsv: return "grid-csv";
    case OutputFormat::GridJson: return "grid-json";
    case OutputFormat::Svg: return "svg";
  }
  return "";
}

void AnalysisConfig::validate(bool pair) const {
  if (input_x.empty()) throw ConfigError("--input-x is required");
  if (pair && input_y.empty()) throw ConfigError("--input-y is required for pair");
  if (column_x.empty() || column_y.empty() || date_column.empty()) {
    throw ConfigError("column names must be non-empty");
  }
  if (s0 && !(*s0 > 0.0 && std::isfinite(*s0))) throw ConfigError("--s0 must be positive");
  if (dj && !(*dj > 0.0 && *dj <= 0.5)) throw ConfigError("--dj must be in (0, 0.5]");
  if (!(omega0 >= 5.0) || !std::isfinite(omega0)) throw ConfigError("--omega0 must be >= 5");
  if (pair) {
    if (n_surrogates < kMinSurrogates) {
      throw ConfigError("--surrogates must be at least " + std::to_string(kMinSurrogates));
    }
    if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("--alpha must be in (0, 0.5)");
  }
  if (formats.empty()) throw ConfigError("at least one --format is required");
  if (render.arrow_spacing < 32) throw ConfigError("arrow spacing must be at least 32 pixels");
  if (render.plot_width < 100 || render.plot_height < 100) {
    throw ConfigError("plot size must be at least 100 x 100 pixels");
  }
  if (render.colormap != "jet" && render.colormap != "viridis" && render.colormap != "gray") {
    throw ConfigError("unknown colormap '" + render.colormap + "'");
  }
}

bool AnalysisConfig::wants(OutputFormat f) const {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

nlohmann::ordered_json AnalysisConfig::echo() const {
  nlohmann::ordered_json j;
  j["input_x"] = input_x.string();
  j["column_x"] = column_x;
  if (!input_y.empty()) {
    j["input_y"] = input_y.string();
    j["column_y"] = column_y;
  }
  j["date_column"] = date_column;
  j["use_log_returns"] = use_log_returns;
  j["s0"] = s0 ? nlohmann::ordered_json(*s0) : nlohmann::ordered_json(nullptr);
  j["dj"] = dj ? nlohmann::ordered_json(*dj) : nlohmann::ordered_json(nullptr);
  j["omega0"] = omega0;
  j["n_surrogates"] = n_surrogates;
  j["alpha"] = alpha;
  j["seed"] = seed;
  j["pool_time"] = pool_time;
  auto formats_json = nlohmann::ordered_json::array();
  for (auto f : formats) formats_json.push_back(std::string(format_name(f)));
  j["formats"] = formats_json;
  j["colormap"] = render.colormap;
  j["arrow_spacing"] = render.arrow_spacing;
  return j;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  for (unsigned i = 0; i < len; ++i) {
    char b[3];
    std::snprintf(b, sizeof b, "%02x", digest[i]);
    hex += b;
  }
  return hex;
}

nlohmann::ordered_json Provenance::to_json() const {
  nlohmann::ordered_json j;
  j["library"] = "wavecoh";
  j["version"] = version;
  j["config"] = config;
  auto in = nlohmann::ordered_json::array();
  for (const auto& d : inputs) in.push_back({{"path", d.path}, {"sha256", d.sha256}});
  j["inputs"] = in;
  j["details"] = details;
  return j;
}

ScaleGrid grid_for(const AnalysisConfig& config, std::size_t n, double dt) {
  if (!config.s0 && !config.dj) return default_grid(n, dt);
  const double s0 = config.s0.value_or(2.0 * dt);
  const double dj = config.dj.value_or(1.0 / 12.0);
  const double octaves = std::log2(static_cast<double>(n) * dt / s0);
  if (!(octaves >= 0.0)) {
    throw ConfigError("--s0 exceeds the series duration (" + std::to_string(n) + " samples)");
  }
  return ScaleGrid::make(s0, dj, static_cast<int>(std::floor(octaves / dj)));
}

TimeSeries prepare(const TimeSeries& prices, bool use_log_returns) {
  TimeSeries s = use_log_returns ? log_returns(prices) : normalized_log_price(prices);
  if (s.size() < kMinSeriesLength) {
    throw InputError("series '" + s.name + "' has fewer than " +
                     std::to_string(kMinSeriesLength) + " usable values");
  }
  return standardize(s);
}

namespace {

std::string file_label(const std::filesystem::path& path) {
  auto stem = path.stem().string();
  return stem.empty() ? path.string() : stem;
}

Provenance base_provenance(const AnalysisConfig& config) {
  Provenance p;
  p.config = config.echo();
  p.version = WAVECOH_VERSION;
  p.inputs.push_back({config.input_x.string(), sha256_file(config.input_x)});
  if (!config.input_y.empty()) {
    p.inputs.push_back({config.input_y.string(), sha256_file(config.input_y)});
  }
  return p;
}

nlohmann::ordered_json grid_json(const ScaleGrid& grid, const MorletParams& morlet) {
  nlohmann::ordered_json j;
  j["s0"] = grid.s0;
  j["dj"] = grid.dj;
  j["J"] = grid.J;
  j["omega0"] = morlet.omega0;
  j["period_factor"] = round9(morlet.period_factor);
  return j;
}

std::vector<Date> time_axis(const TimeSeries& s) {
  std::vector<Date> dates(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) dates[i] = s.date_at(i);
  return dates;
}

std::string coi_csv(std::span<const double> coi, const std::vector<Date>& dates,
                    double period_factor) {
  std::string out = "date,coi_scale_weeks,coi_period_weeks\n";
  for (std::size_t u = 0; u < coi.size(); ++u) {
    out += format_date(dates[u]) + "," + format_number(coi[u]) + "," +
           format_number(coi[u] * period_factor) + "\n";
  }
  return out;
}

std::string scales_csv(const ScaleGrid& grid, double period_factor) {
  std::string out = "index,scale_weeks,period_weeks\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    out += std::to_string(j) + "," + format_number(grid.scales[j]) + "," +
           format_number(grid.scales[j] * period_factor) + "\n";
  }
  return out;
}

nlohmann::ordered_json axes_json(const std::vector<Date>& dates, const ScaleGrid& grid,
                                 const MorletParams& morlet) {
  nlohmann::ordered_json axes;
  auto t = nlohmann::ordered_json::array();
  for (Date d : dates) t.push_back(format_date(d));
  axes["time"] = t;
  axes["scale_weeks"] = json_vector(grid.scales);
  axes["period_weeks"] = json_vector(grid.periods(morlet));
  return axes;
}

}  // namespace

TransformBundle run_transform(const AnalysisConfig& config) {
  config.validate(false);
  Provenance provenance = base_provenance(config);
  RawSeries raw = load_csv(config.input_x, config.column_x, {config.date_column});
  raw.name = file_label(config.input_x);
  const TimeSeries weekly = to_weekly(raw);
  TimeSeries series = prepare(weekly, config.use_log_returns);

  const MorletParams morlet = morlet_params(config.omega0);
  const ScaleGrid grid = grid_for(config, series.size(), series.dt);
  TransformBundle bundle{series, cwt(series, grid, morlet), std::move(provenance)};
  std::size_t missing = 0;
  for (std::size_t i = 1; i < weekly.dates.size(); ++i) {
    missing += static_cast<std::size_t>((weekly.dates[i] - weekly.dates[i - 1]).count() / 7 - 1);
  }
  bundle.provenance.details["n"] = series.size();
  bundle.provenance.details["dropped_rows"] = raw.dropped_rows;
  bundle.provenance.details["missing_weeks"] = missing;
  bundle.provenance.details["grid"] = grid_json(grid, morlet);
  return bundle;
}

ResultBundle analyze_pair(const TimeSeries& x, const TimeSeries& y, const AnalysisConfig& config) {
  const MorletParams morlet = morlet_params(config.omega0);
  const ScaleGrid grid = grid_for(config, x.size(), x.dt);
  ResultBundle bundle;
  bundle.x = x;
  bundle.y = y;
  bundle.coherence = wct(x, y, grid, morlet);
  bundle.significance =
      mc_significance(x, y, bundle.coherence, config.n_surrogates, config.alpha, config.seed,
                      {config.threads, config.pool_time});
  bundle.provenance.details["n"] = x.size();
  bundle.provenance.details["grid"] = grid_json(grid, morlet);
  const Ar1Params fx = fit_ar1(x);
  const Ar1Params fy = fit_ar1(y);
  bundle.provenance.details["ar1_x"] = {{"phi", round9(fx.phi)}, {"sigma", round9(fx.sigma)}};
  bundle.provenance.details["ar1_y"] = {{"phi", round9(fy.phi)}, {"sigma", round9(fy.sigma)}};
  bundle.provenance.details["significant_fraction_outside_coi"] =
      round9(significant_fraction(bundle.significance, bundle.coherence));
  return bundle;
}

ResultBundle run_pair(const AnalysisConfig& config) {
  config.validate(true);
  Provenance provenance = base_provenance(config);
  RawSeries raw_x = load_csv(config.input_x, config.column_x, {config.date_column});
  RawSeries raw_y = load_csv(config.input_y, config.column_y, {config.date_column});
  raw_x.name = file_label(config.input_x);
  raw_y.name = file_label(config.input_y);
  if (raw_x.name == raw_y.name) {
    raw_x.name += ":" + config.column_x;
    raw_y.name += ":" + config.column_y;
  }
  const AlignedPair aligned = align_weekly(raw_x, raw_y);
  const TimeSeries x = prepare(aligned.x, config.use_log_returns);
  const TimeSeries y = prepare(aligned.y, config.use_log_returns);

  ResultBundle bundle = analyze_pair(x, y, config);
  auto details = bundle.provenance.details;
  bundle.provenance = std::move(provenance);
  bundle.provenance.details = std::move(details);
  bundle.provenance.details["dropped_rows_x"] = raw_x.dropped_rows;
  bundle.provenance.details["dropped_rows_y"] = raw_y.dropped_rows;
  bundle.provenance.details["missing_weeks"] = aligned.missing_weeks;
  return bundle;
}

std::vector<OutputFile> transform_outputs(const TransformBundle& bundle,
                                          const AnalysisConfig& config) {
  const CwtMatrix& w = bundle.transform;
  Matrix<double> power(w.scales(), w.length());
  for (std::size_t i = 0; i < power.size(); ++i) power.values()[i] = std::norm(w.coefficients.values()[i]);
  const auto dates = time_axis(bundle.series);
  const auto periods = w.grid.periods(w.morlet);
  const std::string provenance = bundle.provenance.to_json().dump(2) + "\n";

  std::vector<OutputFile> files;
  if (config.wants(OutputFormat::GridCsv)) {
    files.push_back({"power.csv", grid_csv(power, periods, dates)});
    files.push_back({"coi.csv", coi_csv(w.coi, dates, w.morlet.period_factor)});
    files.push_back({"scales.csv", scales_csv(w.grid, w.morlet.period_factor)});
    files.push_back({"provenance.json", provenance});
  }
  if (config.wants(OutputFormat::GridJson)) {
    nlohmann::ordered_json doc;
    doc["axes"] = axes_json(dates, w.grid, w.morlet);
    doc["coi_scale_weeks"] = json_vector(w.coi);
    doc["fields"]["power"] = json_matrix(power);
    doc["provenance"] = bundle.provenance.to_json();
    files.push_back({"transform.json", doc.dump() + "\n"});
  }
  if (config.wants(OutputFormat::Svg)) {
    files.push_back({"power.svg", render_power_svg(bundle, config.render)});
  }
  return files;
}

std::vector<OutputFile> pair_outputs(const ResultBundle& bundle, const AnalysisConfig& config) {
  const CoherenceField& f = bundle.coherence;
  const SignificanceField& sig = bundle.significance;
  const auto dates = time_axis(bundle.x);
  const auto periods = f.grid.periods(f.morlet);
  const std::string provenance = bundle.provenance.to_json().dump(2) + "\n";

  std::vector<OutputFile> files;
  if (config.wants(OutputFormat::GridCsv)) {
    files.push_back({"r2.csv", grid_csv(f.r2, periods, dates)});
    files.push_back({"phase.csv", grid_csv(f.phase, periods, dates)});
    files.push_back({"percentile.csv", grid_csv(sig.percentile, periods, dates)});
    files.push_back({"mask.csv", grid_csv(sig.significant, periods, dates)});
    files.push_back({"coi.csv", coi_csv(f.coi, dates, f.morlet.period_factor)});
    files.push_back({"scales.csv", scales_csv(f.grid, f.morlet.period_factor)});
    files.push_back({"provenance.json", provenance});
  }
  if (config.wants(OutputFormat::GridJson)) {
    nlohmann::ordered_json doc;
    doc["axes"] = axes_json(dates, f.grid, f.morlet);
    doc["coi_scale_weeks"] = json_vector(f.coi);
    doc["fields"]["r2"] = json_matrix(f.r2);
    doc["fields"]["phase"] = json_matrix(f.phase);
    doc["fields"]["percentile"] = json_matrix(sig.percentile);
    doc["fields"]["mask"] = json_matrix(sig.significant);
    doc["fields"]["degenerate"] = json_matrix(f.degenerate);
    doc["significance"] = {{"alpha", sig.alpha},
                           {"n_surrogates", sig.n_surrogates},
                           {"seed", sig.seed},
                           {"pooled", sig.pooled}};
    doc["provenance"] = bundle.provenance.to_json();
    files.push_back({"pair.json", doc.dump() + "\n"});
  }
  if (config.wants(OutputFormat::Svg)) {
    files.push_back({"coherence.svg", render_svg(bundle, config.render)});
  }
  return files;
}

std::vector<std::filesystem::path> cmd_transform(const AnalysisConfig& config) {
  const TransformBundle bundle = run_transform(config);
  return write_outputs(config.out, transform_outputs(bundle, config));
}

std::vector<std::filesystem::path> cmd_pair(const AnalysisConfig& config) {
  const ResultBundle bundle = run_pair(config);
  return write_outputs(config.out, pair_outputs(bundle, config));
}

}  // namespace wavecoh
