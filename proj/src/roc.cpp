#include "ccs/roc.hpp"

#include <map>
#include <stdexcept>

#include "ccs/csvio.hpp"

namespace ccs {

std::string channel_kind_name(ChannelKind k) {
    return k == ChannelKind::rayleigh ? "rayleigh" : "awgn";
}

ChannelKind channel_kind_from_name(const std::string& name) {
    if (name == "rayleigh") return ChannelKind::rayleigh;
    if (name == "awgn") return ChannelKind::awgn;
    throw std::invalid_argument("unknown channel kind: " + name);
}

void RocTable::validate(double tol) const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.p_m < 0.0 || r.p_m > 1.0 || r.p_f < 0.0 || r.p_f > 1.0)
            throw std::invalid_argument("roc: probabilities must lie in [0,1]");
        if (i > 0) {
            if (rows[i - 1].K0 >= r.K0) throw std::invalid_argument("roc: K0 must be increasing");
            if (r.p_m > rows[i - 1].p_m + tol)
                throw std::invalid_argument("roc: p_m must be nonincreasing in K0");
            if (r.p_f + tol < rows[i - 1].p_f)
                throw std::invalid_argument("roc: p_f must be nondecreasing in K0");
        }
    }
}

void write_roc_csv(const std::string& path, const std::vector<RocTable>& tables) {
    csvio::Table t;
    t.header = {"ebno_db", "L", "K0", "p_m", "p_f"};
    for (const auto& table : tables)
        for (const auto& row : table.rows)
            t.rows.push_back({csvio::fmt(table.ebno_db), std::to_string(table.L),
                              std::to_string(row.K0), csvio::fmt(row.p_m), csvio::fmt(row.p_f)});
    csvio::write_atomic(path, t);
}

std::vector<RocTable> read_roc_csv(const std::string& path) {
    const auto t = csvio::read(path);
    t.require_header({"ebno_db", "L", "K0", "p_m", "p_f"});
    std::map<std::pair<double, unsigned>, RocTable> grouped;
    for (const auto& r : t.rows) {
        const double ebno = std::stod(r[0]);
        const auto L = static_cast<unsigned>(std::stoul(r[1]));
        auto& table = grouped[{ebno, L}];
        table.ebno_db = ebno;
        table.L = L;
        table.rows.push_back(
            {static_cast<unsigned>(std::stoul(r[2])), std::stod(r[3]), std::stod(r[4])});
    }
    std::vector<RocTable> tables;
    for (auto& [_, table] : grouped) {
        table.validate();
        tables.push_back(std::move(table));
    }
    return tables;
}

}  // namespace ccs
