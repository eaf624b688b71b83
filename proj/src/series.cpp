#include "wavecoh/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include "wavecoh/error.hpp"

namespace wavecoh {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

// Splits one CSV record. Quoted fields may contain commas; "" is an escaped quote.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

bool parse_number(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

void require_positive(const TimeSeries& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x.values[i] > 0.0)) {
      throw InputError("non-positive value at index " + std::to_string(i) + " of series '" +
                       x.name + "'");
    }
  }
}

Date advance(Date d, double weeks) {
  return d + std::chrono::days{static_cast<long>(std::lround(weeks * 7.0))};
}

}  // namespace

Date parse_date(std::string_view text) {
  text = trim(text);
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw InputError("unparseable date '" + std::string(text) + "'");
  }
  auto field = [&](std::size_t pos, std::size_t len, auto& value) {
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
    return ec == std::errc{} && ptr == text.data() + pos + len;
  };
  if (!field(0, 4, y) || !field(5, 2, m) || !field(8, 2, d)) {
    throw InputError("unparseable date '" + std::string(text) + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) throw InputError("invalid calendar date '" + std::string(text) + "'");
  return Date{ymd};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Date monday_of(Date d) {
  const std::chrono::weekday wd{d};
  return d - std::chrono::days{wd.iso_encoding() - 1};
}

Date TimeSeries::date_at(std::size_t i) const {
  if (i < dates.size()) return dates[i];
  return advance(t0, dt * static_cast<double>(i));
}

TimeSeries make_series(std::string name, std::vector<double> values, double dt, Date t0) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("sampling interval must be positive");
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("non-finite value in series '" + name + "'");
  }
  TimeSeries out;
  out.name = std::move(name);
  out.values = std::move(values);
  out.dt = dt;
  out.t0 = t0;
  return out;
}

RawSeries load_csv(const std::filesystem::path& path, std::string_view column,
                   const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string() + ": cannot open file");

  const std::string where = path.string();
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!trim(line).empty()) {
      header = split_record(line);
      break;
    }
  }
  if (header.empty()) throw InputError(where + ": missing header row");

  auto find_column = [&](std::string_view name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw InputError(where + ": missing column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t date_col = find_column(options.date_column);
  const std::size_t value_col = find_column(column);

  RawSeries raw;
  raw.name = std::string(column);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_record(line);
    const std::string ctx = where + ":" + std::to_string(line_no) + ": ";
    if (fields.size() <= std::max(date_col, value_col)) {
      throw InputError(ctx + "too few fields");
    }
    Date date;
    try {
      date = parse_date(fields[date_col]);
    } catch (const InputError& e) {
      throw InputError(ctx + e.what());
    }
    if (fields[value_col].empty()) {
      ++raw.dropped_rows;
      continue;
    }
    double value = 0.0;
    if (!parse_number(fields[value_col], value)) {
      throw InputError(ctx + "unparseable number '" + fields[value_col] + "'");
    }
    raw.observations.push_back({date, value});
  }
  if (raw.observations.empty()) throw InputError(where + ": zero usable rows");

  std::stable_sort(raw.observations.begin(), raw.observations.end(),
                   [](const Observation& a, const Observation& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < raw.observations.size(); ++i) {
    if (raw.observations[i].date == raw.observations[i - 1].date) {
      throw InputError(where + ": duplicate date " + format_date(raw.observations[i].date));
    }
  }
  return raw;
}

namespace {

std::map<Date, double> snap_to_mondays(const RawSeries& raw) {
  std::map<Date, double> weekly;
  for (const auto& obs : raw.observations) {
    const Date monday = monday_of(obs.date);
    if (!weekly.emplace(monday, obs.value).second) {
      throw InputError("duplicate week " + format_date(monday) + " in series '" + raw.name +
                       "'");
    }
  }
  return weekly;
}

}  // namespace

TimeSeries to_weekly(const RawSeries& raw) {
  const auto weekly = snap_to_mondays(raw);
  if (weekly.size() < kMinSeriesLength) {
    throw InputError("series '" + raw.name + "' has fewer than " +
                     std::to_string(kMinSeriesLength) + " weekly observations");
  }
  TimeSeries out;
  out.name = raw.name;
  out.dt = 1.0;
  for (const auto& [date, value] : weekly) {
    out.dates.push_back(date);
    out.values.push_back(value);
  }
  out.t0 = out.dates.front();
  return out;
}

AlignedPair align_weekly(const RawSeries& a, const RawSeries& b) {
  if (a.observations.empty() || b.observations.empty()) {
    throw InputError("insufficient overlap: empty series");
  }
  const auto wa = snap_to_mondays(a);
  const auto wb = snap_to_mondays(b);

  AlignedPair out;
  out.x.name = a.name;
  out.y.name = b.name;
  for (const auto& [date, value] : wa) {
    auto it = wb.find(date);
    if (it == wb.end()) continue;
    out.x.dates.push_back(date);
    out.x.values.push_back(value);
    out.y.values.push_back(it->second);
  }
  if (out.x.size() < kMinSeriesLength) {
    throw InputError("insufficient overlap: " + std::to_string(out.x.size()) +
                     " common weeks, need at least " + std::to_string(kMinSeriesLength));
  }
  out.y.dates = out.x.dates;
  out.x.t0 = out.y.t0 = out.x.dates.front();
  out.x.dt = out.y.dt = 1.0;
  for (std::size_t i = 1; i < out.x.dates.size(); ++i) {
    const auto gap = (out.x.dates[i] - out.x.dates[i - 1]).count() / 7;
    out.missing_weeks += static_cast<std::size_t>(gap - 1);
  }
  return out;
}

TimeSeries log_returns(const TimeSeries& x) {
  require_positive(x);
  TimeSeries out;
  out.name = x.name;
  out.dt = x.dt;
  out.t0 = x.date_at(x.size() > 1 ? 1 : 0);
  if (x.size() < 2) return out;
  out.values.reserve(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    out.values.push_back(std::log(x.values[i + 1] / x.values[i]));
  }
  if (!x.dates.empty()) out.dates.assign(x.dates.begin() + 1, x.dates.end());
  return out;
}

TimeSeries normalized_log_price(const TimeSeries& x) {
  require_positive(x);
  TimeSeries out = x;
  for (double& v : out.values) v = std::log(v);
  if (out.values.empty()) return out;
  const double lowest = *std::min_element(out.values.begin(), out.values.end());
  for (double& v : out.values) v -= lowest;
  return out;
}

TimeSeries standardize(const TimeSeries& x) {
  const std::size_t n = x.size();
  if (n < 2) throw InputError("zero variance: series '" + x.name + "' has fewer than 2 values");
  const double mean = std::accumulate(x.values.begin(), x.values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x.values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0) || sd <= 1e-300 || sd < 1e-14 * std::abs(mean)) {
    throw InputError("zero variance in series '" + x.name + "'");
  }
  TimeSeries out = x;
  for (double& v : out.values) v = (v - mean) / sd;
  return out;
}

}  // namespace wavecoh
