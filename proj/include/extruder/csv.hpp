#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "extruder/sim.hpp"

namespace extruder {

/// Column order of every time-series CSV.
inline constexpr std::string_view kCsvHeader = "t,x,U,U_eff,P,sigma,D,dDdt,flow,F,e";

/// Header row plus one row per step, 17 significant digits.
void write_timeseries_csv(std::ostream& out, const TimeSeries& ts);

/// Parses a time-series CSV; ConfigError on a wrong header or malformed row.
std::vector<TimeSeriesRow> read_timeseries_csv(std::istream& in);

/// Writes the per-panel extracts (input, interface/predictor, delay, delay rate) as
/// <dir>/<stem>_<panel>.csv and returns the written paths.
std::vector<std::string> write_plot_data(const std::vector<TimeSeriesRow>& rows, const std::string& dir,
                                         const std::string& stem);

}  // namespace extruder
