#pragma once

#include <string>
#include <vector>

#include "roughsde/grid_path.hpp"

namespace roughsde {

// Shortest round-trip decimal form (%.17g trimmed by printf itself).
std::string format_double(double v);

// Header "t,value", one row per node, format_double on both columns.
void write_path_csv(const GridPath& path, const std::string& file);
GridPath read_path_csv(const std::string& file);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const CsvTable& table, const std::string& file);
CsvTable read_csv(const std::string& file);

// UTC timestamp "YYYYMMDDTHHMMSSmmm" for output file names.
std::string utc_timestamp();

}  // namespace roughsde
