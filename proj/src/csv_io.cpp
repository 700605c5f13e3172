#include "roughsde/csv_io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace roughsde {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_path_csv(const GridPath& path, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for writing: " + file);
    out << "t,value\n";
    for (std::size_t k = 0; k < path.nodes(); ++k) {
        out << format_double(path.grid.time(k)) << ',' << format_double(path.values[k]) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + file);
}

GridPath read_path_csv(const std::string& file) {
    CsvTable table = read_csv(file);
    if (table.header.size() != 2 || table.header[0] != "t" || table.header[1] != "value") {
        throw std::runtime_error("not a path CSV: " + file);
    }
    std::vector<double> t, v;
    for (const auto& row : table.rows) {
        if (row.size() != 2) throw std::runtime_error("ragged path CSV: " + file);
        t.push_back(std::stod(row[0]));
        v.push_back(std::stod(row[1]));
    }
    if (t.size() < 3) throw std::runtime_error("path CSV too short: " + file);
    return GridPath(Grid(t.back(), t.size() - 1), std::move(v));
}

void write_csv(const CsvTable& table, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open for writing: " + file);
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out << (i ? "," : "") << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + file);
}

CsvTable read_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open: " + file);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.emplace_back();
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

std::string utc_timestamp() {
    using namespace std::chrono;
    auto now = system_clock::now();
    auto ms = duration_cast<milliseconds>(now.time_since_epoch()) % 1000;
    std::time_t tt = system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[80];
    std::snprintf(buf, sizeof buf, "%04d%02d%02dT%02d%02d%02d%03d", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<int>(ms.count()));
    return buf;
}

}  // namespace roughsde
