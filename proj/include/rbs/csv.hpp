#pragma once

// Minimal CSV reading/writing for traces and tables. Comma separated, '.'
// decimals, header row always present, no quoting.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rbs/analysis.hpp"
#include "rbs/core.hpp"
#include "rbs/sources.hpp"

namespace rbs::csv {

struct Table {
    std::string source;  // for diagnostics
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based line of each row
};

// Throws ConfigError when the file is missing, empty, or a row has the wrong
// number of fields.
Table read(const std::filesystem::path& path);
Table parse(std::string_view text, std::string source = "<memory>");

// Throws ConfigError unless the header equals the expected columns.
void expect_header(const Table& table, const std::vector<std::string>& columns);

// Strict numeric field; throws ConfigError naming file, line and column.
double number(const Table& table, std::size_t row, std::size_t col);

// Shortest round-trip representation, locale independent.
std::string format(double v);

void write_row(std::ostream& os, const std::vector<std::string>& fields);

SpeedTrace read_speed_trace(const std::filesystem::path& path, bool rpm);
WindTrace read_wind_trace(const std::filesystem::path& path);
sources::DriveCycle read_drive_cycle(const std::filesystem::path& path);
std::vector<analysis::BenchCaseRow> read_table1(const std::filesystem::path& path);

void write_table2(std::ostream& os, const std::vector<analysis::CaseSummary>& rows);

}  // namespace rbs::csv
