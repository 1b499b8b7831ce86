#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ccs/roc.hpp"

// Closed-form achievability bounds for outer list-recoverable codes
// correcting t errors, the expected-surviving-path bound for the block
// upper-triangular tree ensemble, greedy per-slot bit allocation under a
// path budget, and the minimum-Eb/N0 grid search driven by measured ROC
// tables.
namespace ccs::bounds {

struct RcbConfig {
    unsigned log2_M = 1;  // message bits k, M = 2^k
    unsigned L = 1;       // slot count
    std::uint32_t Q = 2;  // alphabet size
    unsigned t = 0;       // correctable errors
    unsigned K_a = 1;     // active users
    double p_m = 0.0;
    double p_f = 0.0;

    void validate() const;
};

struct TreeBoundConfig {
    std::vector<unsigned> bit_allocation;  // b_1..b_L, sums to k
    unsigned c = 1;                        // bits per symbol, Q = 2^c
    unsigned K_a = 1;
    double p_m = 0.0;
    double p_f = 0.0;
    unsigned t = 0;

    unsigned L() const { return static_cast<unsigned>(bit_allocation.size()); }
    unsigned k() const;
    void validate() const;
};

struct OperatingPoint {
    double ebno_db = 0.0;
    unsigned L = 0;
    unsigned K0 = 0;
    double p_m = 0.0;
    double p_f = 0.0;
    double P_e = 1.0;
    double P_f = 0.0;
};

// Probability that K_a i.i.d. uniform messages over [M] take exactly r
// distinct values. Evaluated through a positive-term Stirling recurrence in
// the log domain; the alternating inclusion-exclusion form cancels
// catastrophically at the large-M end of the supported range.
double nu_r(double M, unsigned K_a, unsigned r);

// Binomial tail sum_{i=t+1}^{L} C(L,i) p_m^i (1-p_m)^(L-i).
double rcb_error_prob(unsigned L, unsigned t, double p_m);

// Expected-false-count bound, exact nu_r form. Rejects log2_M > 40; use the
// corollary evaluator for large message spaces.
double rcb_false_alarm(const RcbConfig& config);

// Large-M upper bound (M - K_a) * acceptance tail + collision probability.
double rcb_false_alarm_corollary(const RcbConfig& config);

// Probability that at least two of K_a uniform draws over M = 2^log2_M
// collide, and its simple C(K_a,2)/M cap.
double collision_prob(unsigned log2_M, unsigned K_a);
double collision_prob_cap(unsigned log2_M, unsigned K_a);

// Expected surviving-prefix bound v_l for level l (1-based) of the tree
// ensemble. Only b_1..b_l are read, so partial allocations are fine.
double expected_paths(std::span<const unsigned> bit_allocation, unsigned c, unsigned K_a,
                      double p_m, double p_f, unsigned t, unsigned l);
double expected_paths(const TreeBoundConfig& config, unsigned l);

// Same sum with the full-match term dropped: surviving prefixes that do not
// coincide with a transmitted one. v_l itself also counts the transmitted
// survivors (at the last level that is roughly K_a of them), so feasibility
// checks against small false-alarm targets must use this variant.
double expected_false_paths(std::span<const unsigned> bit_allocation, unsigned c, unsigned K_a,
                            double p_m, double p_f, unsigned t, unsigned l);

struct TreeBound {
    double P_e = 1.0;
    double P_f = 0.0;  // v_L: bounds the expected surviving-path count at the
                       // last level, reported as an expected-false-count bound
};

TreeBound ttree_bound(const TreeBoundConfig& config);

// Greedy per-slot bit allocation: assign the largest b_l in [0, c] keeping
// v_l <= v_star, stop once k bits are placed (remaining slots get 0).
// Returns nullopt when L_max slots cannot carry k bits under the budget.
std::optional<std::vector<unsigned>> greedy_bit_allocation(unsigned k, unsigned c, unsigned K_a,
                                                           double p_m, double p_f, unsigned t,
                                                           double v_star, unsigned L_max);

enum class BoundKind { corollary, ttree };

struct SearchConstraints {
    double pe_target = 0.1;
    double pf_target = 1e-3;
    double ratio = 1e-2;  // require P_f / P_e < ratio along the ROC sweep
    unsigned k = 1;       // message bits
    unsigned c = 1;       // bits per slot symbol (Q = 2^c)
    unsigned K_a = 1;
    unsigned t = 0;
    BoundKind bound = BoundKind::corollary;
    double v_star = std::numeric_limits<double>::infinity();  // ttree path budget
};

struct SearchResult {
    bool saturated = true;
    OperatingPoint point;
};

using RocFamily = std::map<std::pair<double, unsigned>, RocTable>;  // (ebno_db, L) -> table

RocFamily build_roc_family(const std::vector<RocTable>& tables);

// Smallest ebno grid point with a feasible (L, K0); ties prefer smaller L,
// then smaller K0. L is walked by hill descent from ceil(k/c) upward with a
// full-scan fallback when the profile turns out non-unimodal.
SearchResult min_ebno_search(const RocFamily& family, const SearchConstraints& constraints);

// One evaluated ROC row under a bound driver; used by the search and the CLI.
struct BoundEval {
    double P_e = 1.0;
    double P_f = std::numeric_limits<double>::infinity();
};

BoundEval evaluate_bound(const SearchConstraints& constraints, unsigned L, double p_m, double p_f);

// Curve CSV schema: Ka,t,ebno_db,L,K0,Pe,Pf.
struct CurveRow {
    unsigned Ka = 0;
    unsigned t = 0;
    double ebno_db = 0.0;
    unsigned L = 0;
    unsigned K0 = 0;
    double Pe = 0.0;
    double Pf = 0.0;
};

void write_curve_csv(const std::string& path, const std::vector<CurveRow>& rows);
std::vector<CurveRow> read_curve_csv(const std::string& path);

}  // namespace ccs::bounds
