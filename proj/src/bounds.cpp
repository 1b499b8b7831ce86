#include "ccs/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>

#include "ccs/achannel.hpp"
#include "ccs/csvio.hpp"

namespace ccs::bounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lchoose(double n, double k) {
    if (k < 0.0 || k > n) return -kInf;
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

// Compensated sum of logs; keeps the absolute error near one ulp of the
// largest partial sum instead of growing linearly with the term count.
double kahan_log_sum(const std::vector<double>& terms) {
    double sum = 0.0, comp = 0.0;
    for (const double t : terms) {
        const double y = t - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return sum;
}

// log of Stirling numbers of the second kind S(n, r) for r = 0..n. The
// recurrence S(n,r) = r S(n-1,r) + S(n-1,r-1) has positive terms only, so it
// runs in plain doubles with power-of-two rescaling; every nu_r digit the
// alternating inclusion-exclusion form destroys survives here.
std::vector<double> log_stirling2_row(unsigned n) {
    std::vector<double> row{1.0};
    double log_scale = 0.0;
    for (unsigned i = 1; i <= n; ++i) {
        std::vector<double> next(i + 1, 0.0);
        for (unsigned r = 1; r <= i; ++r)
            next[r] = (r < row.size() ? r * row[r] : 0.0) + row[r - 1];
        double peak = 0.0;
        for (const double v : next) peak = std::max(peak, v);
        if (peak > 1e280) {
            for (auto& v : next) v *= 0x1.0p-512;
            log_scale += 512.0 * std::numbers::ln2_v<double>;
        }
        row = std::move(next);
    }
    std::vector<double> logs(row.size(), -kInf);
    for (std::size_t r = 0; r < row.size(); ++r)
        if (row[r] > 0.0) logs[r] = std::log(row[r]) + log_scale;
    return logs;
}

// log of the falling factorial M (M-1) ... (M-r+1) = C(M,r) r!.
double log_falling_factorial(double M, unsigned r) {
    std::vector<double> terms;
    terms.reserve(r);
    for (unsigned i = 0; i < r; ++i) terms.push_back(std::log(M - static_cast<double>(i)));
    return kahan_log_sum(terms);
}

// log sum_{i=0}^{t} C(L,i) (1-mu)^i mu^(L-i): acceptance tail of the
// list-cover test for a codeword drawn independently of the lists.
double log_accept_tail(unsigned L, unsigned t, double mu) {
    if (mu <= 0.0) return t >= L ? 0.0 : -kInf;  // only the i=L term survives
    if (mu >= 1.0) return 0.0;                   // i=0 term is 1
    const double lmu = std::log(mu);
    const double l1mu = std::log1p(-mu);
    double acc = -kInf;
    for (unsigned i = 0; i <= std::min(t, L); ++i)
        acc = log_add(acc, lchoose(L, i) + i * l1mu + (L - i) * lmu);
    return std::min(acc, 0.0);
}

}  // namespace

void RcbConfig::validate() const {
    if (t > L) throw std::invalid_argument("bounds: t must be <= L");
    if (K_a < 1) throw std::invalid_argument("bounds: K_a must be >= 1");
    if (Q < 2) throw std::invalid_argument("bounds: Q must be >= 2");
    if (p_m < 0.0 || p_m > 1.0 || p_f < 0.0 || p_f > 1.0)
        throw std::invalid_argument("bounds: probabilities must lie in [0,1]");
}

unsigned TreeBoundConfig::k() const {
    return std::accumulate(bit_allocation.begin(), bit_allocation.end(), 0u);
}

void TreeBoundConfig::validate() const {
    if (bit_allocation.empty()) throw std::invalid_argument("bounds: empty bit allocation");
    if (c < 1 || c > 30) throw std::invalid_argument("bounds: c must be in [1,30]");
    if (K_a < 1) throw std::invalid_argument("bounds: K_a must be >= 1");
    if (p_m < 0.0 || p_m > 1.0 || p_f < 0.0 || p_f > 1.0)
        throw std::invalid_argument("bounds: probabilities must lie in [0,1]");
}

double nu_r(double M, unsigned K_a, unsigned r) {
    if (r < 1 || r > K_a || static_cast<double>(r) > M)
        throw std::domain_error("nu_r: require 1 <= r <= min(M, K_a)");
    const auto ls2 = log_stirling2_row(K_a);
    // nu_r = M (M-1) ... (M-r+1) S(K_a,r) / M^K_a, all factors positive.
    const double log_nu =
        log_falling_factorial(M, r) + ls2[r] - static_cast<double>(K_a) * std::log(M);
    return std::exp(log_nu);
}

double rcb_error_prob(unsigned L, unsigned t, double p_m) {
    if (t > L) throw std::invalid_argument("rcb_error_prob: t must be <= L");
    if (t == L || p_m <= 0.0) return 0.0;
    if (p_m >= 1.0) return 1.0;
    const double lp = std::log(p_m);
    const double lq = std::log1p(-p_m);
    double acc = -kInf;
    for (unsigned i = t + 1; i <= L; ++i)
        acc = log_add(acc, lchoose(L, i) + i * lp + (L - i) * lq);
    return std::min(std::exp(acc), 1.0);
}

double rcb_false_alarm(const RcbConfig& config) {
    config.validate();
    if (config.log2_M > 40)
        throw std::domain_error(
            "rcb_false_alarm: log2_M > 40 is outside the exact regime; use "
            "rcb_false_alarm_corollary");
    const double M = std::exp2(static_cast<double>(config.log2_M));
    const auto ls2 = log_stirling2_row(config.K_a);
    const double logM = std::log(M);
    const unsigned r_max =
        static_cast<unsigned>(std::min<double>(config.K_a, M));
    double acc = -kInf;
    for (unsigned r = 1; r <= r_max; ++r) {
        const double log_nu = log_falling_factorial(M, r) + ls2[r] -
                              static_cast<double>(config.K_a) * logM;
        const double mu = achannel::mu_r(config.Q, r, config.p_m, config.p_f);
        const double log_term = log_nu + std::log(M - static_cast<double>(r)) +
                                log_accept_tail(config.L, config.t, mu);
        acc = log_add(acc, log_term);
    }
    return std::exp(acc);
}

double collision_prob(unsigned log2_M, unsigned K_a) {
    // 1 - prod_{i=0}^{K_a-1} (1 - i * 2^-log2_M), in the log domain.
    double log_prod = 0.0;
    for (unsigned i = 1; i < K_a; ++i)
        log_prod += std::log1p(-static_cast<double>(i) * std::exp2(-static_cast<double>(log2_M)));
    return -std::expm1(log_prod);
}

double collision_prob_cap(unsigned log2_M, unsigned K_a) {
    const double pairs = 0.5 * static_cast<double>(K_a) * (static_cast<double>(K_a) - 1.0);
    return pairs * std::exp2(-static_cast<double>(log2_M));
}

double rcb_false_alarm_corollary(const RcbConfig& config) {
    config.validate();
    const double mu = achannel::mu_r(config.Q, config.K_a, config.p_m, config.p_f);
    const double log_mk =
        static_cast<double>(config.log2_M) * std::numbers::ln2_v<double> +
        std::log1p(-static_cast<double>(config.K_a) * std::exp2(-static_cast<double>(config.log2_M)));
    const double main_term = std::exp(log_mk + log_accept_tail(config.L, config.t, mu));
    return main_term + collision_prob(config.log2_M, config.K_a);
}

namespace {

// (1 - 1/M_j)^(K_a) with M_j = 2^(B_j), full relative precision.
double log_survive(double B, unsigned K_a) {
    if (B <= 0.0) return -kInf;  // M = 1: factor is 0
    return static_cast<double>(K_a) * std::log1p(-std::exp2(-B));
}

// lambda_j scaled by M_l: the match-length-j weight of the surviving-path
// bound. Differences of near-unity powers are taken through expm1 so that
// deep levels keep relative precision.
double scaled_lambda(double B_l, double log_lo, double log_hi, unsigned /*K_a*/) {
    // lambda = exp(log_hi) - exp(log_lo), result multiplied by M_l = 2^B_l.
    if (log_hi == -kInf) return 0.0;
    if (log_lo == -kInf) return std::exp(B_l * std::numbers::ln2_v<double> + log_hi);
    const double delta = log_hi - log_lo;
    if (delta <= 0.0) return 0.0;
    return std::exp(B_l * std::numbers::ln2_v<double> + log_lo) * std::expm1(delta);
}

double rho_j(unsigned j, unsigned l, unsigned t, double p_m, double gamma1, double gamma2) {
    double acc = 0.0;
    for (unsigned x = 0; x <= std::min(j, t); ++x) {
        const double fx = std::exp(lchoose(j, x)) * std::pow(p_m, x) * std::pow(1.0 - p_m, j - x);
        for (unsigned y = 0; x + y <= t && y <= l - j; ++y) {
            const double fy = std::exp(lchoose(l - j, y)) * std::pow(gamma1, y) *
                              std::pow(gamma2, (l - j) - y);
            acc += fx * fy;
        }
    }
    return acc;
}

}  // namespace

namespace {

double paths_sum(std::span<const unsigned> bit_allocation, unsigned c, unsigned K_a, double p_m,
                 double p_f, unsigned t, unsigned l, bool include_full_match) {
    if (l < 1 || l > bit_allocation.size())
        throw std::invalid_argument("expected_paths: level outside allocation");
    const double Q = std::exp2(static_cast<double>(c));
    const double gamma1 = (K_a / Q) * p_m + (1.0 - 1.0 / Q) * (1.0 - p_f);
    const double gamma2 = (K_a / Q) * (1.0 - p_m) + (1.0 - 1.0 / Q) * p_f;

    std::vector<double> B(l + 1, 0.0);  // cumulative bits, B[0] = 0
    for (unsigned i = 1; i <= l; ++i) B[i] = B[i - 1] + bit_allocation[i - 1];

    std::vector<double> log_sv(l + 1);  // log (1 - 1/M_j)^K_a
    for (unsigned i = 0; i <= l; ++i) log_sv[i] = log_survive(B[i], K_a);

    double v = 0.0;
    // j = 0 term: lambda_0 = (1 - 1/M_1)^K_a.
    v += rho_j(0, l, t, p_m, gamma1, gamma2) *
         (log_sv[1] == -kInf ? 0.0 : std::exp(B[l] * std::numbers::ln2_v<double> + log_sv[1]));
    for (unsigned j = 1; j + 1 <= l; ++j)
        v += rho_j(j, l, t, p_m, gamma1, gamma2) * scaled_lambda(B[l], log_sv[j], log_sv[j + 1], K_a);
    if (include_full_match)
        // j = l term: lambda_l = 1 - (1 - 1/M_l)^K_a = -expm1(log_sv[l]).
        v += rho_j(l, l, t, p_m, gamma1, gamma2) *
             std::exp(B[l] * std::numbers::ln2_v<double>) * (-std::expm1(log_sv[l]));
    return v;
}

}  // namespace

double expected_paths(std::span<const unsigned> bit_allocation, unsigned c, unsigned K_a,
                      double p_m, double p_f, unsigned t, unsigned l) {
    return paths_sum(bit_allocation, c, K_a, p_m, p_f, t, l, true);
}

double expected_false_paths(std::span<const unsigned> bit_allocation, unsigned c, unsigned K_a,
                            double p_m, double p_f, unsigned t, unsigned l) {
    return paths_sum(bit_allocation, c, K_a, p_m, p_f, t, l, false);
}

double expected_paths(const TreeBoundConfig& config, unsigned l) {
    config.validate();
    return expected_paths(config.bit_allocation, config.c, config.K_a, config.p_m, config.p_f,
                          config.t, l);
}

TreeBound ttree_bound(const TreeBoundConfig& config) {
    config.validate();
    TreeBound out;
    out.P_e = rcb_error_prob(config.L(), config.t, config.p_m);
    out.P_f = expected_paths(config, config.L());
    return out;
}

std::optional<std::vector<unsigned>> greedy_bit_allocation(unsigned k, unsigned c, unsigned K_a,
                                                           double p_m, double p_f, unsigned t,
                                                           double v_star, unsigned L_max) {
    if (v_star < 1.0) throw std::invalid_argument("greedy_bit_allocation: v_star must be >= 1");
    if (k < 1) throw std::invalid_argument("greedy_bit_allocation: k must be >= 1");
    std::vector<unsigned> alloc;
    unsigned assigned = 0;
    for (unsigned l = 1; l <= L_max; ++l) {
        if (assigned == k) {
            alloc.push_back(0);  // payload already placed, slot stays empty
            continue;
        }
        bool placed = false;
        const unsigned cap = std::min(c, k - assigned);
        for (unsigned b = cap + 1; b-- > 0;) {
            alloc.push_back(b);
            if (expected_paths(alloc, c, K_a, p_m, p_f, t, l) <= v_star) {
                assigned += b;
                placed = true;
                break;
            }
            alloc.pop_back();
        }
        if (!placed) return std::nullopt;  // budget violated even at b = 0
    }
    if (assigned < k) return std::nullopt;
    return alloc;
}

BoundEval evaluate_bound(const SearchConstraints& constraints, unsigned L, double p_m, double p_f) {
    BoundEval out;
    if (constraints.bound == BoundKind::corollary) {
        RcbConfig cfg;
        cfg.log2_M = constraints.k;
        cfg.L = L;
        cfg.Q = static_cast<std::uint32_t>(1u) << constraints.c;
        cfg.t = constraints.t;
        cfg.K_a = constraints.K_a;
        cfg.p_m = p_m;
        cfg.p_f = p_f;
        out.P_e = rcb_error_prob(L, constraints.t, p_m);
        out.P_f = rcb_false_alarm_corollary(cfg);
        return out;
    }
    const auto alloc = greedy_bit_allocation(constraints.k, constraints.c, constraints.K_a, p_m,
                                             p_f, constraints.t, constraints.v_star, L);
    if (!alloc) return out;  // P_e = 1: the slot budget cannot carry k bits
    out.P_e = rcb_error_prob(L, constraints.t, p_m);
    // The path budget counts every survivor; only the non-transmitted ones
    // are false alarms.
    out.P_f =
        expected_false_paths(*alloc, constraints.c, constraints.K_a, p_m, p_f, constraints.t, L);
    return out;
}

namespace {

struct LEval {
    double best_pe = kInf;
    unsigned K0 = 0;
    double p_m = 0.0, p_f = 0.0, P_f = kInf;
};

// Minimal P_e over the ROC rows of one table, subject to P_f / P_e < ratio.
LEval evaluate_table(const RocTable& table, const SearchConstraints& cs) {
    LEval ev;
    for (const auto& row : table.rows) {
        const auto b = evaluate_bound(cs, table.L, row.p_m, row.p_f);
        if (!(b.P_f < cs.ratio * b.P_e)) continue;
        if (b.P_e < ev.best_pe) {
            ev.best_pe = b.P_e;
            ev.K0 = row.K0;
            ev.p_m = row.p_m;
            ev.p_f = row.p_f;
            ev.P_f = b.P_f;
        }
    }
    return ev;
}

}  // namespace

RocFamily build_roc_family(const std::vector<RocTable>& tables) {
    RocFamily family;
    for (const auto& t : tables) {
        t.validate();
        family[{t.ebno_db, t.L}] = t;
    }
    return family;
}

SearchResult min_ebno_search(const RocFamily& family, const SearchConstraints& constraints) {
    if (family.empty()) throw std::invalid_argument("min_ebno_search: empty ROC family");
    std::set<double> ebnos;
    for (const auto& [key, _] : family) ebnos.insert(key.first);

    SearchResult result;
    for (const double ebno : ebnos) {
        std::vector<const RocTable*> tables;
        for (const auto& [key, table] : family)
            if (key.first == ebno) tables.push_back(&table);
        std::sort(tables.begin(), tables.end(),
                  [](const RocTable* a, const RocTable* b) { return a->L < b->L; });

        // Hill descent over L from the smallest slot count able to carry k
        // bits. Cache per-index evaluations; fall back to a full scan if the
        // profile is not unimodal around the located minimum.
        std::vector<std::optional<LEval>> cache(tables.size());
        auto eval_at = [&](std::size_t i) -> const LEval& {
            if (!cache[i]) cache[i] = evaluate_table(*tables[i], constraints);
            return *cache[i];
        };
        const unsigned L_start = (constraints.k + constraints.c - 1) / constraints.c;
        std::size_t idx = 0;
        while (idx + 1 < tables.size() && tables[idx]->L < L_start) ++idx;
        while (idx + 1 < tables.size() && eval_at(idx + 1).best_pe < eval_at(idx).best_pe) ++idx;
        while (idx > 0 && eval_at(idx - 1).best_pe < eval_at(idx).best_pe) --idx;
        const bool left_ok = idx == 0 || !(eval_at(idx - 1).best_pe < eval_at(idx).best_pe);
        const bool right_ok =
            idx + 1 >= tables.size() || !(eval_at(idx + 1).best_pe < eval_at(idx).best_pe);
        // Infeasible plateaus give the descent nothing to follow; scan.
        if (!left_ok || !right_ok || eval_at(idx).best_pe == kInf)
            for (std::size_t i = 0; i < tables.size(); ++i) eval_at(i);

        const bool maybe_feasible = [&] {
            for (std::size_t i = 0; i < tables.size(); ++i)
                if (cache[i] && cache[i]->best_pe < constraints.pe_target &&
                    cache[i]->P_f < constraints.pf_target)
                    return true;
            return false;
        }();
        if (!maybe_feasible) continue;

        // Canonical tie-break at the winning ebno: smallest L, then smallest
        // K0, among all rows meeting both targets.
        for (const RocTable* table : tables) {
            for (const auto& row : table->rows) {
                const auto b = evaluate_bound(constraints, table->L, row.p_m, row.p_f);
                if (!(b.P_f < constraints.ratio * b.P_e)) continue;
                if (!(b.P_e < constraints.pe_target) || !(b.P_f < constraints.pf_target)) continue;
                result.saturated = false;
                result.point = OperatingPoint{ebno,   table->L, row.K0, row.p_m,
                                              row.p_f, b.P_e,    b.P_f};
                return result;
            }
        }
    }
    return result;
}

void write_curve_csv(const std::string& path, const std::vector<CurveRow>& rows) {
    csvio::Table t;
    t.header = {"Ka", "t", "ebno_db", "L", "K0", "Pe", "Pf"};
    for (const auto& r : rows)
        t.rows.push_back({std::to_string(r.Ka), std::to_string(r.t), csvio::fmt(r.ebno_db),
                          std::to_string(r.L), std::to_string(r.K0), csvio::fmt(r.Pe),
                          csvio::fmt(r.Pf)});
    csvio::write_atomic(path, t);
}

std::vector<CurveRow> read_curve_csv(const std::string& path) {
    const auto t = csvio::read(path);
    t.require_header({"Ka", "t", "ebno_db", "L", "K0", "Pe", "Pf"});
    std::vector<CurveRow> rows;
    for (const auto& r : t.rows) {
        CurveRow row;
        row.Ka = static_cast<unsigned>(std::stoul(r[0]));
        row.t = static_cast<unsigned>(std::stoul(r[1]));
        row.ebno_db = std::stod(r[2]);
        row.L = static_cast<unsigned>(std::stoul(r[3]));
        row.K0 = static_cast<unsigned>(std::stoul(r[4]));
        row.Pe = std::stod(r[5]);
        row.Pf = std::stod(r[6]);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ccs::bounds
