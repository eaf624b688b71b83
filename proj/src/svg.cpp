#include "wavecoh/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "wavecoh/contours.hpp"

namespace wavecoh {

namespace {

struct Rgb {
  double r, g, b;
};

Rgb colormap(const std::string& name, double t) {
  t = std::clamp(t, 0.0, 1.0);
  if (name == "gray") return {t, t, t};
  if (name == "viridis") {
    static constexpr std::array<Rgb, 9> anchors{{{0.267, 0.005, 0.329},
                                                 {0.279, 0.175, 0.483},
                                                 {0.230, 0.322, 0.546},
                                                 {0.173, 0.449, 0.558},
                                                 {0.128, 0.567, 0.551},
                                                 {0.153, 0.680, 0.504},
                                                 {0.363, 0.786, 0.386},
                                                 {0.678, 0.863, 0.190},
                                                 {0.993, 0.906, 0.144}}};
    const double pos = t * (anchors.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(pos), anchors.size() - 2);
    const double f = pos - static_cast<double>(i);
    const Rgb& a = anchors[i];
    const Rgb& b = anchors[i + 1];
    return {a.r + f * (b.r - a.r), a.g + f * (b.g - a.g), a.b + f * (b.b - a.b)};
  }
  auto ramp = [](double v) { return std::clamp(v, 0.0, 1.0); };
  return {ramp(1.5 - std::abs(4.0 * t - 3.0)), ramp(1.5 - std::abs(4.0 * t - 2.0)),
          ramp(1.5 - std::abs(4.0 * t - 1.0))};
}

std::string hex_color(const std::string& name, double t) {
  // 256 levels keep runs of equal colour mergeable.
  const double q = std::round(std::clamp(t, 0.0, 1.0) * 255.0) / 255.0;
  const Rgb c = colormap(name, q);
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c.r * 255)),
                static_cast<int>(std::lround(c.g * 255)), static_cast<int>(std::lround(c.b * 255)));
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Layout {
  double left = 70;
  double top = 40;
  double width = 760;
  double height = 400;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double cell_w() const { return width / static_cast<double>(cols); }
  double cell_h() const { return height / static_cast<double>(rows); }
  double x_of(double u) const { return left + (u + 0.5) * cell_w(); }
  double y_of(double j) const { return top + (j + 0.5) * cell_h(); }
};

struct Heatmap {
  const Matrix<double>* values = nullptr;
  double vmin = 0.0;
  double vmax = 1.0;
  std::string colormap;
  std::string title;
  std::string colorbar_label;
  std::vector<Date> dates;
  const ScaleGrid* grid = nullptr;
  MorletParams morlet;
  std::vector<double> coi;
};

void open_document(std::string& out, const Layout& l, const std::string& title) {
  const double total_w = l.left + l.width + 130;
  const double total_h = l.top + l.height + 130;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" "
         "version=\"1.1\" width=\"" + num(total_w) + "\" height=\"" + num(total_h) +
         "\" viewBox=\"0 0 " + num(total_w) + " " + num(total_h) + "\">\n";
  out += "<title>" + escape(title) + "</title>\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(total_w) + "\" height=\"" + num(total_h) +
         "\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(l.left) + "\" y=\"" + num(l.top - 15) +
         "\" font-family=\"sans-serif\" font-size=\"14\">" + escape(title) + "</text>\n";
}

void draw_cells(std::string& out, const Layout& l, const Heatmap& h) {
  out += "<g id=\"heatmap\" shape-rendering=\"crispEdges\">\n";
  const double span = h.vmax > h.vmin ? h.vmax - h.vmin : 1.0;
  for (std::size_t j = 0; j < l.rows; ++j) {
    auto row = h.values->row(j);
    std::size_t u = 0;
    while (u < l.cols) {
      const std::string color = hex_color(h.colormap, (row[u] - h.vmin) / span);
      std::size_t end = u + 1;
      while (end < l.cols && hex_color(h.colormap, (row[end] - h.vmin) / span) == color) ++end;
      out += "<rect x=\"" + num(l.left + u * l.cell_w()) + "\" y=\"" + num(l.top + j * l.cell_h()) +
             "\" width=\"" + num((end - u) * l.cell_w()) + "\" height=\"" + num(l.cell_h()) +
             "\" fill=\"" + color + "\"/>\n";
      u = end;
    }
  }
  out += "</g>\n";
}

double row_of_scale(const ScaleGrid& grid, double scale) {
  return std::clamp(grid.index_of(scale), -0.5, static_cast<double>(grid.size()) - 0.5);
}

void draw_coi(std::string& out, const Layout& l, const Heatmap& h) {
  // Cells with scale above the cone lie below the boundary line.
  std::string line;
  for (std::size_t u = 0; u < h.coi.size(); ++u) {
    line += (u == 0 ? "M" : " L") + num(l.x_of(static_cast<double>(u))) + "," +
            num(l.y_of(row_of_scale(*h.grid, h.coi[u])));
  }
  const double bottom = l.top + l.height;
  out += "<path id=\"coi-shade\" d=\"" + line + " L" + num(l.left + l.width) + "," + num(bottom) +
         " L" + num(l.left) + "," + num(bottom) + " Z\" fill=\"white\" fill-opacity=\"0.45\" stroke=\"none\"/>\n";
  out += "<path id=\"coi\" d=\"" + line +
         "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\" stroke-dasharray=\"6,3\"/>\n";
}

void draw_axes(std::string& out, const Layout& l, const Heatmap& h) {
  const double bottom = l.top + l.height;
  out += "<rect x=\"" + num(l.left) + "\" y=\"" + num(l.top) + "\" width=\"" + num(l.width) +
         "\" height=\"" + num(l.height) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out += "<g id=\"period-axis\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">\n";
  for (double period : {4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
    const double row = h.grid->index_of(period / h.morlet.period_factor);
    if (row < -0.5 || row > static_cast<double>(l.rows) - 0.5) continue;
    const double y = l.y_of(row);
    out += "<line x1=\"" + num(l.left - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(l.left) +
           "\" y2=\"" + num(y) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(l.left - 8) + "\" y=\"" + num(y + 4) + "\">" +
           std::to_string(static_cast<int>(period)) + "</text>\n";
  }
  out += "<text transform=\"translate(" + num(l.left - 45) + "," + num(l.top + l.height / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">Period (weeks)</text>\n</g>\n";

  out += "<g id=\"time-axis\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">\n";
  const auto& dates = h.dates;
  const bool yearly = !dates.empty() && (dates.back() - dates.front()).count() >= 730;
  std::vector<std::pair<std::size_t, std::string>> ticks;
  if (yearly) {
    int last_year = static_cast<int>(std::chrono::year_month_day{dates.front()}.year());
    for (std::size_t u = 1; u < dates.size(); ++u) {
      const int year = static_cast<int>(std::chrono::year_month_day{dates[u]}.year());
      if (year != last_year) ticks.emplace_back(u, std::to_string(year));
      last_year = year;
    }
  } else {
    const std::size_t step = std::max<std::size_t>(1, dates.size() / 6);
    for (std::size_t u = 0; u < dates.size(); u += step) ticks.emplace_back(u, format_date(dates[u]));
  }
  for (const auto& [u, label] : ticks) {
    const double x = l.x_of(static_cast<double>(u));
    out += "<line x1=\"" + num(x) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(x) + "\" y2=\"" +
           num(bottom + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(x) + "\" y=\"" + num(bottom + 18) + "\">" + label + "</text>\n";
  }
  out += "</g>\n";
}

void draw_colorbar(std::string& out, const Layout& l, const Heatmap& h) {
  const double x = l.left + l.width + 20;
  const int steps = 64;
  const double step_h = l.height / steps;
  out += "<g id=\"colorbar\" shape-rendering=\"crispEdges\">\n";
  for (int i = 0; i < steps; ++i) {
    const double t = 1.0 - (i + 0.5) / steps;
    out += "<rect x=\"" + num(x) + "\" y=\"" + num(l.top + i * step_h) + "\" width=\"14\" height=\"" +
           num(step_h + 0.5) + "\" fill=\"" + hex_color(h.colormap, t) + "\"/>\n";
  }
  out += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double t : {0.0, 0.5, 1.0}) {
    const double y = l.top + (1.0 - t) * l.height;
    out += "<text x=\"" + num(x + 18) + "\" y=\"" + num(y + 4) + "\">" +
           format_number(h.vmin + t * (h.vmax - h.vmin)) + "</text>\n";
  }
  out += "<text x=\"" + num(x) + "\" y=\"" + num(l.top - 8) + "\">" + escape(h.colorbar_label) +
         "</text>\n</g>\n";
}

Layout make_layout(const RenderOptions& options, std::size_t rows, std::size_t cols) {
  Layout l;
  l.width = options.plot_width;
  l.height = options.plot_height;
  l.rows = rows;
  l.cols = cols;
  return l;
}

}  // namespace

std::string render_svg(const ResultBundle& bundle, const RenderOptions& options) {
  const CoherenceField& f = bundle.coherence;
  const SignificanceField& sig = bundle.significance;
  const Layout l = make_layout(options, f.r2.rows(), f.r2.cols());

  Heatmap h;
  h.values = &f.r2;
  h.colormap = options.colormap;
  h.title = "Wavelet coherence: " + bundle.x.name + " vs " + bundle.y.name;
  h.colorbar_label = "R2";
  h.grid = &f.grid;
  h.morlet = f.morlet;
  h.coi = f.coi;
  h.dates.resize(bundle.x.size());
  for (std::size_t i = 0; i < h.dates.size(); ++i) h.dates[i] = bundle.x.date_at(i);

  std::string out;
  open_document(out, l, h.title);
  std::vector<double> periods = f.grid.periods(f.morlet);
  out += "<metadata id=\"wavecoh-r2\"><![CDATA[\n" + grid_csv(f.r2, periods, h.dates) +
         "]]></metadata>\n";
  out += "<defs><g id=\"arrow\"><line x1=\"-7\" y1=\"0\" x2=\"2\" y2=\"0\" stroke=\"black\" "
         "stroke-width=\"1.6\"/><polygon points=\"7,0 1,-3.5 1,3.5\" fill=\"black\"/></g></defs>\n";
  draw_cells(out, l, h);
  draw_coi(out, l, h);

  out += "<g id=\"significance\" fill=\"none\" stroke=\"black\" stroke-width=\"2.5\" "
         "stroke-linejoin=\"round\">\n";
  for (const Contour& c : significance_contours(sig)) {
    std::string d;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      // Corners at half-integer grid coordinates map to cell edges.
      const double x = l.left + (c.points[i].x + 0.5) * l.cell_w();
      const double y = l.top + (c.points[i].y + 0.5) * l.cell_h();
      d += (i == 0 ? "M" : " L") + num(x) + "," + num(y);
    }
    out += "<path d=\"" + d + " Z\"/>\n";
  }
  out += "</g>\n";

  out += "<g id=\"phase-arrows\">\n";
  const double spacing = options.arrow_spacing;
  for (double cy = l.top + spacing / 2; cy < l.top + l.height; cy += spacing) {
    for (double cx = l.left + spacing / 2; cx < l.left + l.width; cx += spacing) {
      const auto u = static_cast<std::size_t>((cx - l.left) / l.cell_w());
      const auto j = static_cast<std::size_t>((cy - l.top) / l.cell_h());
      if (u >= l.cols || j >= l.rows) continue;
      if (!sig.significant(j, u) || !f.reliable(j, u) || f.degenerate(j, u)) continue;
      // Positive phase (x leads) turns the arrow clockwise, i.e. downward on screen.
      const double degrees = f.phase(j, u) * 180.0 / std::numbers::pi;
      out += "<use xlink:href=\"#arrow\" transform=\"translate(" + num(cx) + "," + num(cy) +
             ") rotate(" + num(degrees) + ")\"/>\n";
    }
  }
  out += "</g>\n";

  draw_axes(out, l, h);
  draw_colorbar(out, l, h);

  const double ly = l.top + l.height + 45;
  const std::string xs = escape(bundle.x.name);
  const std::string ys = escape(bundle.y.name);
  out += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  const std::array<std::string, 4> lines{
      "right: in phase; left: anti-phase",
      "down: " + xs + " leads " + ys + " by pi/2",
      "up: " + ys + " leads " + xs + " by pi/2",
      "thick black line: significant at alpha = " + format_number(sig.alpha) +
          " against AR(1) red noise (" + std::to_string(sig.n_surrogates) + " surrogates)"};
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out += "<text x=\"" + num(l.left) + "\" y=\"" + num(ly + 15 * i) + "\">" + lines[i] + "</text>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

std::string render_power_svg(const TransformBundle& bundle, const RenderOptions& options) {
  const CwtMatrix& w = bundle.transform;
  Matrix<double> logpower(w.scales(), w.length());
  double top = -1e300;
  for (std::size_t i = 0; i < logpower.size(); ++i) {
    const double p = std::norm(w.coefficients.values()[i]);
    logpower.values()[i] = p > 0.0 ? std::log10(p) : -300.0;
    top = std::max(top, logpower.values()[i]);
  }
  const Layout l = make_layout(options, w.scales(), w.length());
  Heatmap h;
  h.values = &logpower;
  h.vmax = top;
  h.vmin = top - 4.0;
  h.colormap = options.colormap;
  h.title = "Wavelet power: " + bundle.series.name;
  h.colorbar_label = "log10 power";
  h.grid = &w.grid;
  h.morlet = w.morlet;
  h.coi = w.coi;
  h.dates.resize(bundle.series.size());
  for (std::size_t i = 0; i < h.dates.size(); ++i) h.dates[i] = bundle.series.date_at(i);

  std::string out;
  open_document(out, l, h.title);
  draw_cells(out, l, h);
  draw_coi(out, l, h);
  draw_axes(out, l, h);
  draw_colorbar(out, l, h);
  out += "</svg>\n";
  return out;
}

}  // namespace wavecoh
