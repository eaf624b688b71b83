// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "wavecoh/coherence.hpp"
#include "wavecoh/cwt.hpp"
#include "wavecoh/pipeline.hpp"
#include "wavecoh/significance.hpp"

using namespace wavecoh;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

TimeSeries series_of(std::vector<double> v) { return make_series("s", std::move(v)); }

std::size_t row_of_period(const ScaleGrid& grid, const MorletParams& params, double period) {
  return static_cast<std::size_t>(std::lround(grid.index_of(period / params.period_factor)));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path work_dir() {
  const auto dir = fs::temp_directory_path() / "wavecoh_acceptance";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WAVECOH_CLI_PATH) + " " + args + " > /dev/null";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

// Fixture series that exercise different regimes of the coherence computation.
std::vector<std::vector<double>> assorted_series(std::size_t n) {
  std::vector<std::vector<double>> out;
  out.push_back(oracle::white_noise(n, 1));
  out.push_back(oracle::ar1(n, 0.9, 2));
  out.push_back(oracle::cosine(n, 32.0));
  out.push_back(oracle::band_limited(n));
  auto spiky = oracle::white_noise(n, 3);
  spiky[n / 3] = 1e6;
  spiky[n / 2] = -4e5;
  out.push_back(spiky);
  auto tiny = oracle::white_noise(n, 4);
  for (double& v : tiny) v *= 1e-150;
  out.push_back(tiny);
  std::vector<double> step(n, 0.0);
  for (std::size_t i = n / 2; i < n; ++i) step[i] = 1.0;
  out.push_back(step);
  return out;
}

Outcome self_coherence() {
  const std::size_t n = 512;
  const auto params = morlet_params();
  const auto grid = default_grid(n, 1.0);
  double worst = 0.0;
  double slowest = 0.0;
  for (const auto& v : assorted_series(n)) {
    const auto x = series_of(v);
    const auto t0 = std::chrono::steady_clock::now();
    const auto field = wct(x, x, grid, params);
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    for (std::size_t i = 0; i < field.r2.size(); ++i) {
      if (field.degenerate.values()[i]) continue;
      worst = std::max(worst, std::abs(field.r2.values()[i] - 1.0));
    }
  }
  return {worst <= 1e-10 && slowest < 1.0,
          "max |r2 - 1| = " + fmt("%.3g", worst) + ", slowest wct " + fmt("%.3f", slowest) + " s"};
}

Outcome range_bound() {
  const std::size_t n = 256;
  const auto params = morlet_params();
  CoherenceEngine engine(n, 1.0, default_grid(n, 1.0), params);
  double lo = 1.0;
  double hi = 0.0;
  std::mt19937_64 pick(2024);
  for (std::uint64_t k = 0; k < 200; ++k) {
    // Alternate between white, red, and blue noise, with random amplitudes.
    const double phi_x = (k % 3 == 0) ? 0.0 : (k % 3 == 1 ? 0.8 : -0.6);
    const double phi_y = (k % 4 == 0) ? 0.95 : 0.2;
    auto x = oracle::ar1(n, phi_x, 1000 + 2 * k);
    auto y = oracle::ar1(n, phi_y, 1001 + 2 * k);
    const double ax = std::ldexp(1.0, static_cast<int>(pick() % 40) - 20);
    for (double& v : x) v *= ax;
    const auto field = engine(x, y);
    for (double r : field.r2.values()) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  return {lo >= 0.0 && hi <= 1.0 + 1e-12, "r2 range [" + fmt("%.3g", lo) + ", " + fmt("%.17g", hi) + "]"};
}

Outcome scale_localization() {
  const std::size_t n = 512;
  const auto params = morlet_params();
  const auto grid = default_grid(n, 1.0);
  const auto w = cwt(oracle::cosine(n, 32.0), 1.0, grid, params);
  std::size_t best = 0;
  double best_power = -1.0;
  for (std::size_t j = 0; j < w.scales(); ++j) {
    double p = 0.0;
    for (std::size_t u = 0; u < n; ++u) p += std::norm(w.coefficients(j, u));
    if (p > best_power) {
      best_power = p;
      best = j;
    }
  }
  const double period = params.period_factor * grid.scales[best];
  const double steps = std::abs(std::log2(period / 32.0)) / grid.dj;
  return {steps <= 1.0 + 1e-9, "peak period " + fmt("%.4f", period) + " weeks (" + fmt("%.3f", steps) + " grid steps from 32)"};
}

Outcome phase_convention() {
  const std::size_t n = 512;
  const auto params = morlet_params();
  const auto grid = default_grid(n, 1.0);
  auto x = oracle::cosine(n, 32.0);
  auto y = oracle::cosine(n, 32.0, 8.0);
  const auto nx = oracle::white_noise(n, 77);
  const auto ny = oracle::white_noise(n, 78);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] += 0.1 * nx[i];
    y[i] += 0.1 * ny[i];
  }
  const auto field = wct(series_of(x), series_of(y), grid, params);
  const std::size_t j = row_of_period(grid, params, 32.0);
  double min_r2 = 1.0;
  double worst_phase = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    if (!field.reliable(j, u)) continue;
    min_r2 = std::min(min_r2, field.r2(j, u));
    worst_phase = std::max(worst_phase, std::abs(std::abs(field.phase(j, u)) - pi / 2));
  }
  const double period = params.period_factor * grid.scales[j];
  const double lead = lead_time(pi / 2, grid.scales[j], params);
  const bool quarter = std::abs(lead - period / 4) <= 1e-12 * period &&
                       std::abs(lead_time(pi / 2, 32.0 / params.period_factor, params) - 8.0) < 1e-12;
  return {min_r2 > 0.9 && worst_phase <= 0.1 && quarter,
          "min r2 " + fmt("%.4f", min_r2) + ", max ||phase| - pi/2| " + fmt("%.4f", worst_phase) +
              " rad, lead at period 32 = " + fmt("%.6g", lead_time(pi / 2, 32.0 / params.period_factor, params)) +
              " weeks"};
}

Outcome energy_preservation() {
  const std::size_t n = 512;
  const auto params = morlet_params();
  const auto x = oracle::band_limited(n);
  const auto w = cwt(x, 1.0, default_grid(n, 1.0), params);
  double direct = 0.0;
  for (std::size_t u = n / 4; u < 3 * n / 4; ++u) direct += x[u] * x[u];
  const double rel = std::abs(energy(w, n / 4, 3 * n / 4) / direct - 1.0);
  return {rel < 0.05, "relative energy error " + fmt("%.4f", rel)};
}

Outcome reconstruction() {
  const std::size_t n = 512;
  const auto params = morlet_params();
  const auto x = oracle::band_limited(n);
  const auto r = reconstruct(cwt(x, 1.0, default_grid(n, 1.0), params), params);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t u = n / 4; u < 3 * n / 4; ++u) {
    num += (r.values[u] - x[u]) * (r.values[u] - x[u]);
    den += x[u] * x[u];
  }
  const double rmse = std::sqrt(num / den);
  return {rmse < 0.05, "interior relative RMSE " + fmt("%.4f", rmse)};
}

Outcome direct_integration() {
  const std::size_t n = 64;
  const auto params = morlet_params();
  const auto grid = default_grid(n, 1.0);
  double worst = 0.0;
  for (std::uint64_t seed : {64u, 65u, 66u}) {
    const auto x = oracle::white_noise(n, seed);
    const auto w = cwt(x, 1.0, grid, params);
    const auto direct = oracle::direct_cwt(x, 1.0, grid.scales, params.omega0);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      for (std::size_t u = 0; u < n; ++u) {
        if (!w.reliable(j, u)) continue;
        num += std::norm(w.coefficients(j, u) - direct(j, u));
        den += std::norm(direct(j, u));
      }
    }
    worst = std::max(worst, std::sqrt(num / den));
  }
  return {worst < 1e-3, "worst relative RMS " + fmt("%.3g", worst) + " over 3 series"};
}

Outcome monte_carlo_calibration() {
  const std::size_t n = 380;
  const auto params = morlet_params();
  const auto grid = default_grid(n, 1.0);
  CoherenceEngine engine(n, 1.0, grid, params);
  double sum = 0.0;
  double lo = 1.0;
  double hi = 0.0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    const auto x = simulate_ar1({0.5, 1.0}, n, stream_seed(8, 2 * t));
    const auto y = simulate_ar1({0.5, 1.0}, n, stream_seed(8, 2 * t + 1));
    const auto observed = engine(x.values, y.values);
    const auto sig = mc_significance(x, y, observed, 300, 0.05, 1000 + t);
    const double f = significant_fraction(sig, observed);
    sum += f;
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  const double mean = sum / trials;
  return {mean >= 0.03 && mean <= 0.07,
          "mean significant fraction " + fmt("%.4f", mean) + " (per-trial " + fmt("%.3f", lo) + ".." +
              fmt("%.3f", hi) + ")"};
}

Outcome ar1_estimator() {
  double sum = 0.0;
  for (std::uint64_t k = 0; k < 200; ++k) sum += fit_ar1(simulate_ar1({0.72, 1.0}, 380, stream_seed(9, k))).phi;
  const double mean = sum / 200;
  return {std::abs(mean - 0.72) <= 0.05, "mean fitted phi " + fmt("%.4f", mean)};
}

void write_planted_inputs(const fs::path& dir) {
  const auto p = fixture::planted_pair(380, 150, 250, 1.0, 10);
  fixture::write_prices(dir / "planted_x.csv", p.x);
  fixture::write_prices(dir / "planted_y.csv", p.y);
}

std::string pair_args(const fs::path& dir, const fs::path& out, const std::string& extra) {
  return "pair --input-x " + (dir / "planted_x.csv").string() + " --input-y " +
         (dir / "planted_y.csv").string() + " --out " + out.string() +
         " --format grid-csv --format grid-json --format svg --seed 424242 " + extra;
}

Outcome determinism() {
  const auto dir = work_dir();
  write_planted_inputs(dir);
  fs::remove_all(dir / "det1");
  fs::remove_all(dir / "det4");
  if (run_cli(pair_args(dir, dir / "det1", "--threads 1")) != 0 ||
      run_cli(pair_args(dir, dir / "det4", "--threads 4")) != 0) {
    return {false, "cli pair run failed"};
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "det1")) {
    const auto other = dir / "det4" / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
      return {false, entry.path().filename().string() + " differs"};
    }
    ++files;
  }
  return {files == 9, std::to_string(files) + " output files byte-identical (threads 1 vs 4)"};
}

Outcome planted_signal() {
  const auto dir = work_dir();
  write_planted_inputs(dir);
  AnalysisConfig config;
  config.input_x = dir / "planted_x.csv";
  config.input_y = dir / "planted_y.csv";
  const auto bundle = run_pair(config);
  const auto& f = bundle.coherence;
  const auto& mask = bundle.significance.significant;
  const auto periods = f.grid.periods(f.morlet);
  const std::size_t n = f.r2.cols();
  const std::size_t rows = f.r2.rows();
  // Column u of the result is return u of the fixture.
  const std::size_t begin = 150;
  const std::size_t end = 250;

  // Connected component (4-neighbour) of significant cells through the centre of the window at period 32.
  const std::size_t j32 = row_of_period(f.grid, f.morlet, 32.0);
  const std::size_t centre = (begin + end) / 2;
  if (!mask(j32, centre)) return {false, "centre cell (period 32, week 200) not significant"};
  Matrix<std::uint8_t> seen(rows, n);
  std::deque<std::pair<std::size_t, std::size_t>> queue{{j32, centre}};
  seen(j32, centre) = 1;
  std::size_t size = 0;
  double log_period = 0.0;
  double time = 0.0;
  double cos_sum = 0.0;
  double sin_sum = 0.0;
  while (!queue.empty()) {
    const auto [j, u] = queue.front();
    queue.pop_front();
    ++size;
    log_period += std::log2(periods[j]);
    time += static_cast<double>(u);
    cos_sum += std::cos(f.phase(j, u));
    sin_sum += std::sin(f.phase(j, u));
    const std::pair<long, long> steps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& [dj, du] : steps) {
      const long a = static_cast<long>(j) + dj;
      const long b = static_cast<long>(u) + du;
      if (a < 0 || b < 0 || a >= static_cast<long>(rows) || b >= static_cast<long>(n)) continue;
      if (!mask(a, b) || seen(a, b)) continue;
      seen(a, b) = 1;
      queue.emplace_back(a, b);
    }
  }
  const double centroid_period = std::exp2(log_period / size);
  const double centroid_time = time / size;
  const double mean_phase = std::atan2(sin_sum, cos_sum);

  // Significant share of reliable cells outside the window.
  std::size_t outside = 0;
  std::size_t outside_sig = 0;
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t u = 0; u < n; ++u) {
      if (!f.reliable(j, u) || (u >= begin && u < end)) continue;
      ++outside;
      outside_sig += mask(j, u);
    }
  }
  const double spill = static_cast<double>(outside_sig) / static_cast<double>(outside);
  const bool region = centroid_period >= 16.0 && centroid_period <= 64.0 && centroid_time >= begin &&
                      centroid_time < end;
  const bool rightward = std::abs(mean_phase) < pi / 4;
  return {region && rightward && spill <= 0.10,
          "region of " + std::to_string(size) + " cells centred at period " + fmt("%.1f", centroid_period) +
              ", week " + fmt("%.0f", centroid_time) + ", mean phase " + fmt("%.3f", mean_phase) +
              " rad; significant outside window " + fmt("%.4f", spill)};
}

Outcome desk_performance() {
  const auto dir = work_dir();
  write_planted_inputs(dir);
  fs::remove_all(dir / "perf");
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = run_cli(pair_args(dir, dir / "perf", "--surrogates 1000 --threads 4"));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::size_t scales = default_grid(380, 1.0).size();
  return {rc == 0 && seconds < 60.0,
          "pair N=380, " + std::to_string(scales) + " scales, 1000 surrogates: " + fmt("%.2f", seconds) +
              " s on " + std::to_string(std::max(1u, std::thread::hardware_concurrency())) + " hardware threads"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      // The 1 s bound applies to each wct call and is checked inside; seven series are run.
      {1, "self-coherence", 7.0, self_coherence},
      {2, "range bound", 30.0, range_bound},
      {3, "scale localization", 1.0, scale_localization},
      {4, "phase/lead convention", 1.0, phase_convention},
      {5, "energy preservation", 1.0, energy_preservation},
      {6, "reconstruction", 1.0, reconstruction},
      {7, "direct-integration oracle", 10.0, direct_integration},
      {8, "monte carlo calibration", 600.0, monte_carlo_calibration},
      {9, "ar(1) estimator", 5.0, ar1_estimator},
      {10, "determinism", 120.0, determinism},
      {11, "planted signal end-to-end", 120.0, planted_signal},
      {12, "desk-scale performance", 60.0, desk_performance},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("[%s] criterion %2d %-28s %s; %.2f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), o.detail.c_str(), seconds, c.budget_seconds, in_time ? "" : " OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
