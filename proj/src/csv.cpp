#include "extruder/csv.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "extruder/errors.hpp"

namespace extruder {

namespace {

using Column = double TimeSeriesRow::*;

constexpr Column kColumns[] = {
    &TimeSeriesRow::t,     &TimeSeriesRow::x, &TimeSeriesRow::U,    &TimeSeriesRow::U_eff,
    &TimeSeriesRow::P,     &TimeSeriesRow::sigma, &TimeSeriesRow::D, &TimeSeriesRow::dDdt,
    &TimeSeriesRow::flow,  &TimeSeriesRow::F, &TimeSeriesRow::e,
};

struct Panel {
    const char* name;
    const char* header;
    std::vector<Column> columns;
};

const std::vector<Panel>& panels()
{
    static const std::vector<Panel> list = {
        {"input", "t,U,U_eff", {&TimeSeriesRow::t, &TimeSeriesRow::U, &TimeSeriesRow::U_eff}},
        {"interface", "t,x,P,e", {&TimeSeriesRow::t, &TimeSeriesRow::x, &TimeSeriesRow::P, &TimeSeriesRow::e}},
        {"delay", "t,D,sigma", {&TimeSeriesRow::t, &TimeSeriesRow::D, &TimeSeriesRow::sigma}},
        {"delay_rate", "t,dDdt,F", {&TimeSeriesRow::t, &TimeSeriesRow::dDdt, &TimeSeriesRow::F}},
    };
    return list;
}

void write_row(std::ostream& out, const TimeSeriesRow& row, const std::vector<Column>& columns)
{
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out << (c ? "," : "") << fmt::format("{:.17g}", row.*columns[c]);
    }
    out << '\n';
}

}  // namespace

void write_timeseries_csv(std::ostream& out, const TimeSeries& ts)
{
    const std::vector<Column> all(std::begin(kColumns), std::end(kColumns));
    out << kCsvHeader << '\n';
    for (const auto& row : ts.rows) {
        write_row(out, row, all);
    }
}

std::vector<TimeSeriesRow> read_timeseries_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw ConfigError(fmt::format("expected CSV header '{}'", kCsvHeader));
    }
    std::vector<TimeSeriesRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        TimeSeriesRow row;
        std::istringstream fields(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(fields, cell, ',')) {
            if (c >= std::size(kColumns)) {
                throw ConfigError(fmt::format("line {}: too many columns", lineno));
            }
            try {
                row.*kColumns[c] = std::stod(cell);
            } catch (const std::exception&) {
                throw ConfigError(fmt::format("line {}: '{}' is not a number", lineno, cell));
            }
            ++c;
        }
        if (c != std::size(kColumns)) {
            throw ConfigError(fmt::format("line {}: expected {} columns, got {}", lineno, std::size(kColumns), c));
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::string> write_plot_data(const std::vector<TimeSeriesRow>& rows, const std::string& dir,
                                         const std::string& stem)
{
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    for (const auto& panel : panels()) {
        auto path = (std::filesystem::path(dir) / fmt::format("{}_{}.csv", stem, panel.name)).string();
        std::ofstream out(path);
        if (!out) {
            throw ConfigError(fmt::format("cannot write '{}'", path));
        }
        out << panel.header << '\n';
        for (const auto& row : rows) {
            write_row(out, row, panel.columns);
        }
        written.push_back(path);
    }
    return written;
}

}  // namespace extruder
