#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace wavecoh {

using Date = std::chrono::sys_days;

/// Parses YYYY-MM-DD. Throws InputError on anything else.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// Monday of the ISO week containing `d`.
Date monday_of(Date d);

struct Observation {
  Date date;
  double value = 0.0;
};

/// Price observations as read from disk, sorted by date.
struct RawSeries {
  std::string name;
  std::vector<Observation> observations;
  std::size_t dropped_rows = 0;  // rows whose value cell was empty

  std::size_t size() const noexcept { return observations.size(); }
};

/// Evenly spaced series. `dt` is in weeks. `dates` optionally carries the
/// calendar date of every sample; when empty, dates are t0 + i*dt.
struct TimeSeries {
  std::string name;
  std::vector<double> values;
  Date t0{};
  double dt = 1.0;
  std::vector<Date> dates;

  std::size_t size() const noexcept { return values.size(); }
  Date date_at(std::size_t i) const;
};

/// Builds a series on a nominal grid starting at `t0`; checks dt > 0 and finiteness.
TimeSeries make_series(std::string name, std::vector<double> values, double dt = 1.0,
                       Date t0 = Date{std::chrono::year{2000} / 1 / 3});

/// Smallest series length accepted by the analysis stages.
inline constexpr std::size_t kMinSeriesLength = 8;

struct CsvOptions {
  std::string date_column = "date";
};

RawSeries load_csv(const std::filesystem::path& path, std::string_view column,
                   const CsvOptions& options = {});

/// Snaps one raw series to Mondays. Errors if two observations share a week.
TimeSeries to_weekly(const RawSeries& raw);

struct AlignedPair {
  TimeSeries x;
  TimeSeries y;
  std::size_t missing_weeks = 0;  // weeks absent from the intersection grid
};

/// Weekly-snapped intersection of two raw series.
AlignedPair align_weekly(const RawSeries& a, const RawSeries& b);

TimeSeries log_returns(const TimeSeries& x);
TimeSeries normalized_log_price(const TimeSeries& x);
/// Zero mean, unit sample variance (divisor N-1).
TimeSeries standardize(const TimeSeries& x);

}  // namespace wavecoh
