#pragma once

#include <string>
#include <vector>

// Minimal CSV layer: header + string cells, comma separated, no quoting
// (writers never emit commas inside cells). Writes go through a temp file
// and an atomic rename. Floats print with 9 significant digits so emitted
// files are byte-stable regression fixtures.
namespace ccs::csvio {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void require_header(const std::vector<std::string>& expected) const;
};

std::string fmt(double x);

void write_atomic(const std::string& path, const Table& table);
Table read(const std::string& path);
bool exists(const std::string& path);

}  // namespace ccs::csvio
