#include "ccs/csvio.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ccs::csvio {

void Table::require_header(const std::vector<std::string>& expected) const {
    if (header != expected) {
        std::string want;
        for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
        std::string got;
        for (const auto& h : header) got += (got.empty() ? "" : ",") + h;
        throw std::runtime_error("csv: expected header [" + want + "], got [" + got + "]");
    }
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

void write_atomic(const std::string& path, const Table& table) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("csv: cannot open for writing: " + tmp.string());
        for (std::size_t i = 0; i < table.header.size(); ++i)
            out << (i ? "," : "") << table.header[i];
        out << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
            out << '\n';
        }
        if (!out) throw std::runtime_error("csv: write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

Table read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open: " + path);
    Table table;
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
            if (cells.size() != table.header.size())
                throw std::runtime_error("csv: ragged row in " + path);
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

bool exists(const std::string& path) { return std::filesystem::exists(path); }

}  // namespace ccs::csvio
