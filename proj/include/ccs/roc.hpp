#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Measured operating points of the inner list decoder: (K_0, p_m, p_f) rows
// plus the channel metadata needed to key a table inside a family. Shared
// between the estimator (phy) and the bound-driven optimizer (bounds).
namespace ccs {

enum class ChannelKind { rayleigh, awgn };

std::string channel_kind_name(ChannelKind k);
ChannelKind channel_kind_from_name(const std::string& name);

struct RocRow {
    unsigned K0 = 0;
    double p_m = 0.0;
    double p_f = 0.0;
};

struct RocTable {
    double ebno_db = 0.0;
    unsigned L = 0;
    unsigned n1 = 0;
    std::uint32_t Q = 0;
    unsigned Ka = 0;
    ChannelKind kind = ChannelKind::rayleigh;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<RocRow> rows;  // K0 ascending

    // Nested-list property: p_m nonincreasing, p_f nondecreasing in K0.
    void validate(double tol = 1e-9) const;
};

// CSV schema: header "ebno_db,L,K0,p_m,p_f", one row per (table, K0).
void write_roc_csv(const std::string& path, const std::vector<RocTable>& tables);
std::vector<RocTable> read_roc_csv(const std::string& path);

}  // namespace ccs
