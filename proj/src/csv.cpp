#include "rbs/csv.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace rbs::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& cols) {
    std::string s;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) s += ',';
        s += cols[i];
    }
    return s;
}

}  // namespace

Table parse(std::string_view text, std::string source) {
    Table t;
    t.source = std::move(source);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) continue;
        auto fields = split(line);
        if (t.header.empty()) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw ConfigError(t.source + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(t.header.size()) + " fields, got " + std::to_string(fields.size()));
        }
        t.rows.push_back(std::move(fields));
        t.line_numbers.push_back(line_no);
    }
    if (t.header.empty()) throw ConfigError(t.source + ": file is empty");
    return t;
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

void expect_header(const Table& table, const std::vector<std::string>& columns) {
    if (table.header != columns) {
        throw ConfigError(table.source + ":1: expected header '" + join(columns) + "', got '" +
                          join(table.header) + "'");
    }
}

double number(const Table& table, std::size_t row, std::size_t col) {
    const std::string& s = table.rows[row][col];
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError(table.source + ":" + std::to_string(table.line_numbers[row]) + ": column '" +
                          table.header[col] + "' is not a finite number: '" + s + "'");
    }
    return v;
}

std::string format(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_row(std::ostream& os, const std::vector<std::string>& fields) {
    os << join(fields) << '\n';
}

namespace {

void require_rows(const Table& t) {
    if (t.rows.empty()) throw ConfigError(t.source + ": no data rows");
}

template <class Trace>
Trace to_trace(const Table& t, double scale) {
    require_rows(t);
    std::vector<Sample> s;
    s.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) s.push_back({number(t, i, 0), number(t, i, 1) * scale});
    try {
        return Trace(std::move(s));
    } catch (const InvalidInput& e) {
        throw ConfigError(t.source + ": " + e.what());
    }
}

}  // namespace

SpeedTrace read_speed_trace(const std::filesystem::path& path, bool rpm) {
    const auto t = read(path);
    expect_header(t, {"t_s", rpm ? "omega_rpm" : "omega_rad_s"});
    return to_trace<SpeedTrace>(t, rpm ? rpm_to_rad_s(1.0) : 1.0);
}

WindTrace read_wind_trace(const std::filesystem::path& path) {
    const auto t = read(path);
    expect_header(t, {"t_s", "v_mps"});
    return to_trace<WindTrace>(t, 1.0);
}

sources::DriveCycle read_drive_cycle(const std::filesystem::path& path) {
    const auto t = read(path);
    expect_header(t, {"t_s", "v_mps", "elev_m"});
    require_rows(t);
    std::vector<sources::CycleSample> s;
    for (std::size_t i = 0; i < t.rows.size(); ++i) s.push_back({number(t, i, 0), number(t, i, 1), number(t, i, 2)});
    try {
        return sources::DriveCycle(std::move(s));
    } catch (const InvalidInput& e) {
        throw ConfigError(t.source + ": " + e.what());
    }
}

std::vector<analysis::BenchCaseRow> read_table1(const std::filesystem::path& path) {
    const auto t = read(path);
    expect_header(t, {"case_id", "omega_max_rpm", "braking_s", "free_spin_s", "energy_j"});
    require_rows(t);
    std::vector<analysis::BenchCaseRow> rows;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        rows.push_back({t.rows[i][0], number(t, i, 1), number(t, i, 2), number(t, i, 3), number(t, i, 4)});
    }
    return rows;
}

void write_table2(std::ostream& os, const std::vector<analysis::CaseSummary>& rows) {
    write_row(os, {"case_id", "omega_max_rpm", "braking_s", "avg_free_spin_s", "avg_energy_j"});
    for (const auto& r : rows) {
        char period[32];
        char energy[32];
        std::snprintf(period, sizeof period, "%.1f", r.avg_free_spin_s);
        std::snprintf(energy, sizeof energy, "%.0f", r.avg_energy_j);
        write_row(os, {r.case_id, format(r.omega_max_rpm), format(r.braking_s), period, energy});
    }
}

}  // namespace rbs::csv
