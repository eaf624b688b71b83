#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wavecoh/coherence.hpp"
#include "wavecoh/cwt.hpp"
#include "wavecoh/error.hpp"
#include "wavecoh/pipeline.hpp"
#include "wavecoh/series.hpp"
#include "wavecoh/significance.hpp"

namespace py = pybind11;
using namespace wavecoh;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

template <typename T>
py::array_t<T> to_array(const Matrix<T>& m) {
  py::array_t<T> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

template <typename Field>
py::array_t<bool> reliable_mask(const Field& f) {
  const std::size_t rows = f.grid.size();
  const std::size_t cols = f.coi.size();
  py::array_t<bool> out({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t u = 0; u < cols; ++u) m(j, u) = f.grid.scales[j] <= f.coi[u];
  }
  return out;
}

TimeSeries series_from(const Array& a, double dt, const std::string& name = "x") {
  return make_series(name, to_vector(a), dt);
}

ScaleGrid grid_or_default(const std::optional<ScaleGrid>& grid, std::size_t n, double dt) {
  return grid ? *grid : default_grid(n, dt);
}

}  // namespace

PYBIND11_MODULE(_wavecoh, m) {
  m.doc() = "Morlet wavelet transform, wavelet coherence and red-noise significance";
  m.attr("__version__") = WAVECOH_VERSION;

  auto input_error = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  (void)input_error;

  py::class_<MorletParams>(m, "MorletParams")
      .def_readonly("omega0", &MorletParams::omega0)
      .def_readonly("admissibility_constant", &MorletParams::admissibility_constant)
      .def_readonly("reconstruction_constant", &MorletParams::reconstruction_constant)
      .def_readonly("efolding_factor", &MorletParams::efolding_factor)
      .def_readonly("period_factor", &MorletParams::period_factor)
      .def("__repr__", [](const MorletParams& p) {
        return "MorletParams(omega0=" + std::to_string(p.omega0) + ")";
      });
  m.def("morlet_params", &morlet_params, py::arg("omega0") = 6.0);

  py::class_<ScaleGrid>(m, "ScaleGrid")
      .def_static("make", &ScaleGrid::make, py::arg("s0"), py::arg("dj"), py::arg("J"))
      .def_readonly("s0", &ScaleGrid::s0)
      .def_readonly("dj", &ScaleGrid::dj)
      .def_readonly("J", &ScaleGrid::J)
      .def_property_readonly("scales", [](const ScaleGrid& g) { return to_array(g.scales); })
      .def("periods", [](const ScaleGrid& g, double omega0) { return to_array(g.periods(morlet_params(omega0))); },
           py::arg("omega0") = 6.0)
      .def("__len__", &ScaleGrid::size);
  m.def("default_grid", &default_grid, py::arg("n"), py::arg("dt") = 1.0);
  m.def("coi", [](std::size_t n, double dt, double omega0) { return to_array(coi(n, dt, morlet_params(omega0))); },
        py::arg("n"), py::arg("dt") = 1.0, py::arg("omega0") = 6.0);

  py::class_<CwtMatrix>(m, "CwtMatrix")
      .def_property_readonly("coefficients", [](const CwtMatrix& w) { return to_array(w.coefficients); })
      .def_property_readonly("power", [](const CwtMatrix& w) {
        Matrix<double> p(w.scales(), w.length());
        for (std::size_t i = 0; i < p.size(); ++i) p.values()[i] = std::norm(w.coefficients.values()[i]);
        return to_array(p);
      })
      .def_readonly("grid", &CwtMatrix::grid)
      .def_readonly("dt", &CwtMatrix::dt)
      .def_readonly("morlet", &CwtMatrix::morlet)
      .def_property_readonly("coi", [](const CwtMatrix& w) { return to_array(w.coi); })
      .def_property_readonly("periods", [](const CwtMatrix& w) { return to_array(w.grid.periods(w.morlet)); })
      .def("reliable", [](const CwtMatrix& w) { return reliable_mask(w); },
           "Boolean mask of cells outside the cone of influence.");

  m.def(
      "cwt",
      [](const Array& x, double dt, std::optional<ScaleGrid> grid, double omega0) {
        const auto v = to_vector(x);
        const auto g = grid_or_default(grid, v.size(), dt);
        const auto params = morlet_params(omega0);
        py::gil_scoped_release release;
        return cwt(std::span<const double>(v), dt, g, params);
      },
      py::arg("x"), py::arg("dt") = 1.0, py::arg("grid") = py::none(), py::arg("omega0") = 6.0);
  m.def("energy", py::overload_cast<const CwtMatrix&>(&energy), py::arg("w"));
  m.def("energy", py::overload_cast<const CwtMatrix&, std::size_t, std::size_t>(&energy), py::arg("w"),
        py::arg("begin"), py::arg("end"));
  m.def("reconstruct", [](const CwtMatrix& w) { return to_array(reconstruct(w, w.morlet).values); },
        py::arg("w"));
  m.def("xwt", [](const CwtMatrix& a, const CwtMatrix& b) { return to_array(xwt(a, b).coefficients); },
        py::arg("wx"), py::arg("wy"));

  py::class_<CoherenceField>(m, "CoherenceField")
      .def_property_readonly("r2", [](const CoherenceField& f) { return to_array(f.r2); })
      .def_property_readonly("phase", [](const CoherenceField& f) { return to_array(f.phase); })
      .def_property_readonly("sxx", [](const CoherenceField& f) { return to_array(f.sxx); })
      .def_property_readonly("syy", [](const CoherenceField& f) { return to_array(f.syy); })
      .def_property_readonly("degenerate", [](const CoherenceField& f) {
        return to_array(f.degenerate).attr("astype")("bool");
      })
      .def_readonly("grid", &CoherenceField::grid)
      .def_readonly("dt", &CoherenceField::dt)
      .def_readonly("morlet", &CoherenceField::morlet)
      .def_property_readonly("coi", [](const CoherenceField& f) { return to_array(f.coi); })
      .def_property_readonly("periods", [](const CoherenceField& f) { return to_array(f.grid.periods(f.morlet)); })
      .def("reliable", [](const CoherenceField& f) { return reliable_mask(f); });

  m.def(
      "wct",
      [](const Array& x, const Array& y, double dt, std::optional<ScaleGrid> grid, double omega0) {
        const auto sx = series_from(x, dt, "x");
        const auto sy = series_from(y, dt, "y");
        const auto g = grid_or_default(grid, sx.size(), dt);
        const auto params = morlet_params(omega0);
        py::gil_scoped_release release;
        return wct(sx, sy, g, params);
      },
      py::arg("x"), py::arg("y"), py::arg("dt") = 1.0, py::arg("grid") = py::none(), py::arg("omega0") = 6.0);
  m.def("lead_time",
        [](double phase, double scale, double omega0) { return lead_time(phase, scale, morlet_params(omega0)); },
        py::arg("phase"), py::arg("scale"), py::arg("omega0") = 6.0);

  py::class_<Ar1Params>(m, "Ar1Params")
      .def(py::init([](double phi, double sigma) { return Ar1Params{phi, sigma}; }), py::arg("phi"),
           py::arg("sigma"))
      .def_readonly("phi", &Ar1Params::phi)
      .def_readonly("sigma", &Ar1Params::sigma);
  m.def("fit_ar1", [](const Array& x) { return fit_ar1(series_from(x, 1.0)); }, py::arg("x"));
  m.def("simulate_ar1",
        [](const Ar1Params& p, std::size_t n, std::uint64_t seed) { return to_array(simulate_ar1(p, n, seed).values); },
        py::arg("params"), py::arg("n"), py::arg("seed"));

  py::class_<SignificanceField>(m, "SignificanceField")
      .def_property_readonly("percentile", [](const SignificanceField& s) { return to_array(s.percentile); })
      .def_property_readonly("significant", [](const SignificanceField& s) {
        return to_array(s.significant).attr("astype")("bool");
      })
      .def_readonly("alpha", &SignificanceField::alpha)
      .def_readonly("n_surrogates", &SignificanceField::n_surrogates)
      .def_readonly("seed", &SignificanceField::seed)
      .def_readonly("pooled", &SignificanceField::pooled);
  m.def(
      "mc_significance",
      [](const Array& x, const Array& y, const CoherenceField& observed, std::size_t n_surrogates,
         double alpha, std::uint64_t seed, unsigned threads, bool pool_time) {
        const auto sx = series_from(x, observed.dt, "x");
        const auto sy = series_from(y, observed.dt, "y");
        py::gil_scoped_release release;
        return mc_significance(sx, sy, observed, n_surrogates, alpha, seed, {threads, pool_time});
      },
      py::arg("x"), py::arg("y"), py::arg("observed"), py::arg("n_surrogates") = 1000, py::arg("alpha") = 0.05,
      py::arg("seed") = 20031124, py::arg("threads") = 0, py::arg("pool_time") = false);

  m.def("log_returns", [](const Array& x) { return to_array(log_returns(series_from(x, 1.0)).values); },
        py::arg("prices"));
  m.def("normalized_log_price",
        [](const Array& x) { return to_array(normalized_log_price(series_from(x, 1.0)).values); },
        py::arg("prices"));
  m.def("standardize", [](const Array& x) { return to_array(standardize(series_from(x, 1.0)).values); },
        py::arg("x"));
  m.def(
      "load_csv",
      [](const std::filesystem::path& path, const std::string& column, const std::string& date_column) {
        const RawSeries raw = load_csv(path, column, {date_column});
        std::vector<std::string> dates;
        std::vector<double> values;
        for (const auto& o : raw.observations) {
          dates.push_back(format_date(o.date));
          values.push_back(o.value);
        }
        return py::make_tuple(dates, to_array(values));
      },
      py::arg("path"), py::arg("column") = "value", py::arg("date_column") = "date",
      "Returns (ISO dates, values) with empty value cells dropped.");

  auto configure = [](AnalysisConfig& c, const py::kwargs& kwargs) {
    for (const auto& [key, value] : kwargs) {
      const auto k = key.cast<std::string>();
      if (k == "column_x") c.column_x = value.cast<std::string>();
      else if (k == "column_y") c.column_y = value.cast<std::string>();
      else if (k == "column") c.column_x = c.column_y = value.cast<std::string>();
      else if (k == "date_column") c.date_column = value.cast<std::string>();
      else if (k == "levels") c.use_log_returns = !value.cast<bool>();
      else if (k == "s0") c.s0 = value.cast<double>();
      else if (k == "dj") c.dj = value.cast<double>();
      else if (k == "omega0") c.omega0 = value.cast<double>();
      else if (k == "surrogates") c.n_surrogates = value.cast<std::size_t>();
      else if (k == "alpha") c.alpha = value.cast<double>();
      else if (k == "seed") c.seed = value.cast<std::uint64_t>();
      else if (k == "threads") c.threads = value.cast<unsigned>();
      else if (k == "pool_time") c.pool_time = value.cast<bool>();
      else if (k == "colormap") c.render.colormap = value.cast<std::string>();
      else if (k == "arrow_spacing") c.render.arrow_spacing = value.cast<int>();
      else if (k == "formats") {
        c.formats.clear();
        for (const auto& f : value.cast<std::vector<std::string>>()) c.formats.push_back(parse_format(f));
      } else {
        throw ConfigError("unknown option '" + k + "'");
      }
    }
  };

  m.def(
      "transform",
      [configure](const std::filesystem::path& input, const std::filesystem::path& out, const py::kwargs& kwargs) {
        AnalysisConfig c;
        c.input_x = input;
        c.out = out;
        configure(c, kwargs);
        py::gil_scoped_release release;
        return cmd_transform(c);
      },
      py::arg("input"), py::arg("out"),
      "Run the `transform` command; keyword options mirror the CLI flags. Returns written paths.");
  m.def(
      "pair",
      [configure](const std::filesystem::path& input_x, const std::filesystem::path& input_y,
                  const std::filesystem::path& out, const py::kwargs& kwargs) {
        AnalysisConfig c;
        c.input_x = input_x;
        c.input_y = input_y;
        c.out = out;
        configure(c, kwargs);
        py::gil_scoped_release release;
        return cmd_pair(c);
      },
      py::arg("input_x"), py::arg("input_y"), py::arg("out"),
      "Run the `pair` command; keyword options mirror the CLI flags. Returns written paths.");
}
