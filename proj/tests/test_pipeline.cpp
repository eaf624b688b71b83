#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "wavecoh/error.hpp"
#include "wavecoh/pipeline.hpp"
#include "wavecoh/svg.hpp"

using namespace wavecoh;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "wavecoh_pipeline_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_grid(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t count_of(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

AnalysisConfig pair_config(const fs::path& x, const fs::path& y, const fs::path& out) {
  AnalysisConfig c;
  c.input_x = x;
  c.input_y = y;
  c.out = out;
  c.n_surrogates = 200;
  c.formats = {OutputFormat::GridCsv, OutputFormat::GridJson, OutputFormat::Svg};
  return c;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("formats") {
    CHECK(parse_format("grid-csv") == OutputFormat::GridCsv);
    CHECK(parse_format("grid-json") == OutputFormat::GridJson);
    CHECK(parse_format("svg") == OutputFormat::Svg);
    CHECK(format_name(OutputFormat::Svg) == "svg");
    CHECK_THROWS_AS(parse_format("png"), ConfigError);
  }

  TEST_CASE("config validation") {
    AnalysisConfig c;
    c.input_x = "a.csv";
    CHECK_NOTHROW(c.validate(false));
    CHECK_THROWS_AS(c.validate(true), ConfigError);
    c.input_y = "b.csv";
    CHECK_NOTHROW(c.validate(true));
    auto bad = c;
    bad.alpha = 0.7;
    CHECK_THROWS_AS(bad.validate(true), ConfigError);
    bad = c;
    bad.n_surrogates = 10;
    CHECK_THROWS_AS(bad.validate(true), ConfigError);
    bad = c;
    bad.omega0 = 3.0;
    CHECK_THROWS_AS(bad.validate(true), ConfigError);
    bad = c;
    bad.dj = 0.0;
    CHECK_THROWS_AS(bad.validate(true), ConfigError);
    bad = c;
    bad.s0 = -1.0;
    CHECK_THROWS_AS(bad.validate(true), ConfigError);
    bad = c;
    bad.formats.clear();
    CHECK_THROWS_AS(bad.validate(true), ConfigError);
    bad = c;
    bad.render.colormap = "rainbow";
    CHECK_THROWS_AS(bad.validate(true), ConfigError);
    // Threads never appear in the echoed configuration.
    auto threaded = c;
    threaded.threads = 7;
    CHECK(threaded.echo() == c.echo());
  }

  TEST_CASE("grid overrides") {
    AnalysisConfig c;
    CHECK(grid_for(c, 380, 1.0).J == 90);
    c.dj = 0.25;
    const auto g = grid_for(c, 380, 1.0);
    CHECK(g.s0 == 2.0);
    CHECK(g.J == static_cast<int>(std::floor(std::log2(190.0) / 0.25)));
    c.s0 = 1000.0;
    CHECK_THROWS_AS(grid_for(c, 380, 1.0), ConfigError);
  }

  TEST_CASE("sha256 of a known file") {
    const auto dir = scratch("sha");
    std::ofstream(dir / "abc.txt") << "abc";
    CHECK(sha256_file(dir / "abc.txt") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("zero-variance input fails without writing anything") {
    const auto dir = scratch("flat");
    fixture::write_prices(dir / "flat.csv", std::vector<double>(100, 0.0));
    AnalysisConfig c;
    c.input_x = dir / "flat.csv";
    c.out = dir / "out";
    CHECK_THROWS_WITH_AS(cmd_transform(c), doctest::Contains("zero variance"), InputError);
    CHECK_FALSE(fs::exists(dir / "out"));
  }

  TEST_CASE("transform of a 32-week sinusoid peaks at period 32") {
    const auto dir = scratch("sine");
    fixture::write_prices(dir / "sine.csv", oracle::cosine(380, 32.0));
    AnalysisConfig c;
    c.input_x = dir / "sine.csv";
    c.out = dir / "out";
    c.formats = {OutputFormat::GridCsv, OutputFormat::GridJson, OutputFormat::Svg};
    const auto written = cmd_transform(c);
    CHECK(written.size() == 6);
    const auto grid = read_grid(dir / "out" / "power.csv");
    REQUIRE(grid.size() == 92);
    CHECK(grid[0][0] == "period_weeks");
    CHECK(grid[0][1] == "2003-12-01");  // first return is dated at the second price
    double best = -1.0;
    double best_period = 0.0;
    for (std::size_t r = 1; r < grid.size(); ++r) {
      double sum = 0.0;
      for (std::size_t k = 1; k < grid[r].size(); ++k) sum += std::stod(grid[r][k]);
      if (sum > best) {
        best = sum;
        best_period = std::stod(grid[r][0]);
      }
    }
    CHECK(std::abs(std::log2(best_period / 32.0)) <= 1.0 / 12 + 1e-9);

    // Same configuration, second run: byte-identical.
    auto again = c;
    again.out = dir / "out2";
    cmd_transform(again);
    for (const auto& name : {"power.csv", "coi.csv", "scales.csv", "provenance.json", "transform.json", "power.svg"}) {
      CAPTURE(name);
      CHECK(slurp(dir / "out" / name) == slurp(dir / "out2" / name));
    }
    const auto provenance = nlohmann::json::parse(slurp(dir / "out" / "provenance.json"));
    CHECK(provenance["inputs"][0]["sha256"] == sha256_file(c.input_x));
    CHECK(provenance["details"]["n"] == 380);
  }

  TEST_CASE("pair of a series with itself") {
    const auto dir = scratch("self");
    fixture::write_prices(dir / "a.csv", oracle::ar1(200, 0.3, 4));
    auto c = pair_config(dir / "a.csv", dir / "a.csv", dir / "out");
    c.n_surrogates = 100;
    cmd_pair(c);
    const auto r2 = read_grid(dir / "out" / "r2.csv");
    const auto phase = read_grid(dir / "out" / "phase.csv");
    for (std::size_t r = 1; r < r2.size(); ++r) {
      for (std::size_t k = 1; k < r2[r].size(); ++k) {
        CHECK(r2[r][k] == "1");
        CHECK(phase[r][k] == "0");
      }
    }
  }

  TEST_CASE("pair outputs are consistent projections of one bundle") {
    const auto dir = scratch("bundle");
    const auto planted = fixture::planted_pair(380, 150, 250, 1.0, 10);
    fixture::write_prices(dir / "x.csv", planted.x);
    fixture::write_prices(dir / "y.csv", planted.y);
    const auto c = pair_config(dir / "x.csv", dir / "y.csv", dir / "out");
    const auto paths = cmd_pair(c);
    CHECK(paths.size() == 9);
    const std::string svg = slurp(dir / "out" / "coherence.svg");
    const std::string r2 = slurp(dir / "out" / "r2.csv");
    CHECK(svg.find("<metadata id=\"wavecoh-r2\"><![CDATA[\n" + r2 + "]]></metadata>") != std::string::npos);
    CHECK(count_of(svg, "<use xlink:href=\"#arrow\"") > 0);
    const auto doc = nlohmann::json::parse(slurp(dir / "out" / "pair.json"));
    const auto grid = read_grid(dir / "out" / "r2.csv");
    CHECK(doc["fields"]["r2"].size() == grid.size() - 1);
    CHECK(format_number(doc["fields"]["r2"][40][200].get<double>()) == grid[41][201]);
    CHECK(doc["significance"]["n_surrogates"] == 200);
    const auto mask = read_grid(dir / "out" / "mask.csv");
    const auto pct = read_grid(dir / "out" / "percentile.csv");
    for (std::size_t r = 1; r < mask.size(); ++r) {
      for (std::size_t k = 1; k < mask[r].size(); ++k) {
        CHECK((mask[r][k] == "1") == (std::stod(pct[r][k]) >= 0.95));
      }
    }
  }

  TEST_CASE("independent red-noise pair: false-positive snapshot") {
    const auto dir = scratch("red");
    fixture::write_prices(dir / "x.csv", oracle::ar1(380, 0.5, 31));
    fixture::write_prices(dir / "y.csv", oracle::ar1(380, 0.5, 32));
    auto c = pair_config(dir / "x.csv", dir / "y.csv", dir / "out");
    c.n_surrogates = 1000;
    c.formats = {OutputFormat::GridCsv};
    cmd_pair(c);
    const auto provenance = nlohmann::json::parse(slurp(dir / "out" / "provenance.json"));
    const double fraction = provenance["details"]["significant_fraction_outside_coi"].get<double>();
    MESSAGE("significant fraction outside the cone of influence: " << fraction);
    CHECK(fraction >= 0.02);
    CHECK(fraction <= 0.09);
  }

  TEST_CASE("svg arrows follow the mask and the phase") {
    const std::size_t n = 200;
    auto x = standardize(make_series("x", oracle::ar1(n, 0.3, 8)));
    AnalysisConfig c;
    c.n_surrogates = 100;
    auto bundle = analyze_pair(x, x, c);

    std::fill(bundle.significance.significant.values().begin(), bundle.significance.significant.values().end(), 0);
    const std::string empty = render_svg(bundle, c.render);
    CHECK(count_of(empty, "<use xlink:href=\"#arrow\"") == 0);

    std::fill(bundle.significance.significant.values().begin(), bundle.significance.significant.values().end(), 1);
    const std::string full = render_svg(bundle, c.render);
    const std::size_t arrows = count_of(full, "<use xlink:href=\"#arrow\"");
    CHECK(arrows > 0);
    CHECK(count_of(full, "rotate(0.00)\"/>") == arrows);
    // At most one arrow per 32 x 32 pixel cell of the 760 x 400 plot.
    CHECK(arrows <= (760 / 32 + 1) * (400 / 32 + 1));

    for (double& p : bundle.coherence.phase.values()) p = std::numbers::pi / 2;
    const std::string quarter = render_svg(bundle, c.render);
    CHECK(count_of(quarter, "rotate(90.00)\"/>") == arrows);
  }

  TEST_CASE("cli exit codes") {
    const auto dir = scratch("exit");
    fixture::write_prices(dir / "a.csv", oracle::white_noise(100, 1));
    const std::string cli = WAVECOH_CLI_PATH;
    auto run = [&](const std::string& args) {
      const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
      return WEXITSTATUS(status);
    };
    CHECK(run("transform --input-x " + (dir / "a.csv").string() + " --out " + (dir / "o").string()) == 0);
    CHECK(fs::exists(dir / "o" / "power.csv"));
    CHECK(run("transform --input-x " + (dir / "missing.csv").string()) == 2);
    CHECK(run("transform --input-x " + (dir / "a.csv").string() + " --format png") == 3);
    CHECK(run("transform --input-x " + (dir / "a.csv").string() + " --omega0 2") == 3);
    CHECK(run("pair --input-x " + (dir / "a.csv").string()) == 3);
    CHECK(run("transform --input-x " + (dir / "a.csv").string() + " --column close") == 2);
  }
}
