#include "ccs/phy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ccs::phy {

InnerCodebook gen_codebook(unsigned n1, std::uint32_t Q, double P, std::uint64_t seed) {
    if (n1 < 1) throw std::invalid_argument("gen_codebook: n1 must be >= 1");
    if (Q < 2) throw std::invalid_argument("gen_codebook: Q must be >= 2");
    if (P <= 0.0) throw std::invalid_argument("gen_codebook: P must be positive");
    InnerCodebook cb;
    cb.n1 = n1;
    cb.Q = Q;
    cb.P = P;
    cb.seed = seed;
    cb.columns.resize(n1, Q);
    auto eng = rng::make_engine(seed);
    const double target = std::sqrt(static_cast<double>(n1) * P);
    for (std::uint32_t q = 0; q < Q; ++q) {
        double norm2 = 0.0;
        for (unsigned i = 0; i < n1; ++i) {
            const auto z = rng::cgaussian(eng);
            cb.columns(i, q) = z;
            norm2 += std::norm(z);
        }
        cb.columns.col(q) *= target / std::sqrt(norm2);
    }
    return cb;
}

std::vector<std::complex<double>> draw_fading_gains(unsigned K_a, rng::Engine& rng) {
    std::vector<std::complex<double>> gains(K_a);
    for (auto& g : gains) g = rng::cgaussian(rng);
    return gains;
}

cvec transmit_slot(const InnerCodebook& codebook, std::span<const std::uint32_t> symbols,
                   std::span<const std::complex<double>> gains, rng::Engine& rng,
                   double noise_scale) {
    if (symbols.size() != gains.size())
        throw std::invalid_argument("transmit_slot: one gain per transmitted symbol");
    cvec y = cvec::Zero(codebook.n1);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (symbols[i] >= codebook.Q) throw std::domain_error("transmit_slot: symbol outside codebook");
        y += gains[i] * codebook.columns.col(symbols[i]);
    }
    if (noise_scale != 0.0)
        for (unsigned d = 0; d < codebook.n1; ++d) y(d) += noise_scale * rng::cgaussian(rng);
    return y;
}

OmpWorkspace::OmpWorkspace(const InnerCodebook& codebook, std::uint32_t gram_cache_limit)
    : codebook_(&codebook) {
    if (codebook.Q <= gram_cache_limit)
        gram_ = codebook.columns.adjoint() * codebook.columns;
}

Eigen::VectorXcd OmpWorkspace::gram_column(std::uint32_t j) const {
    if (gram_) return gram_->col(j);
    return codebook_->columns.adjoint() * codebook_->columns.col(j);
}

std::vector<std::uint32_t> omp_decode(const OmpWorkspace& ws, const cvec& y, unsigned K0) {
    const auto& cb = ws.codebook();
    if (K0 < 1 || K0 > cb.Q) throw std::invalid_argument("omp_decode: require 1 <= K0 <= Q");
    if (y.size() != static_cast<Eigen::Index>(cb.n1))
        throw std::invalid_argument("omp_decode: observation length != n1");

    const double col_norm2 = static_cast<double>(cb.n1) * cb.P;
    const double tol = 1e-10 * col_norm2;

    // Residual correlations maintained in the Gram domain: after selecting a
    // column we orthonormalize it against the chosen span (u_s) and track
    // w_s = A^H u_s, so corr <- corr - w_s * (u_s^H r).
    Eigen::VectorXcd corr = cb.columns.adjoint() * y;
    Eigen::MatrixXcd w(cb.Q, K0);
    std::vector<std::uint32_t> picks;
    picks.reserve(K0);
    std::vector<char> used(cb.Q, 0);
    unsigned rank = 0;

    for (unsigned s = 0; s < K0; ++s) {
        std::uint32_t best = 0;
        double best_mag = -1.0;
        for (std::uint32_t q = 0; q < cb.Q; ++q) {
            if (used[q]) continue;
            const double mag = std::norm(corr(q));
            if (mag > best_mag) {
                best_mag = mag;
                best = q;
            }
        }
        picks.push_back(best);
        used[best] = 1;

        Eigen::VectorXcd wn = ws.gram_column(best);
        double norm2 = col_norm2;
        for (unsigned i = 0; i < rank; ++i) {
            const std::complex<double> c = std::conj(w(best, i));
            wn -= c * w.col(i);
            norm2 -= std::norm(c);
        }
        if (norm2 <= tol) continue;  // numerically in the span: residual unchanged
        const double beta = std::sqrt(norm2);
        wn /= beta;
        const std::complex<double> d = corr(best) / beta;  // u^H residual
        corr -= wn * d;
        w.col(rank) = wn;
        ++rank;
    }
    return picks;
}

std::vector<std::uint32_t> omp_decode(const InnerCodebook& codebook, const cvec& y, unsigned K0) {
    const OmpWorkspace ws(codebook);
    return omp_decode(ws, y, K0);
}

namespace {

struct RocCounters {
    std::vector<std::uint64_t> miss;   // per K0: transmitted distinct symbols not in first K0
    std::vector<std::uint64_t> alarm;  // per K0: non-transmitted symbols in first K0
    std::uint64_t sent = 0;            // sum of |Y_A|
    std::uint64_t absent = 0;          // sum of Q - |Y_A|

    explicit RocCounters(unsigned K0_max) : miss(K0_max + 1, 0), alarm(K0_max + 1, 0) {}

    void merge(const RocCounters& o) {
        for (std::size_t i = 0; i < miss.size(); ++i) {
            miss[i] += o.miss[i];
            alarm[i] += o.alarm[i];
        }
        sent += o.sent;
        absent += o.absent;
    }
};

void run_roc_trials(const RocParams& params, const InnerCodebook& cb, const OmpWorkspace& ws,
                    std::uint64_t first, std::uint64_t count, RocCounters& counters) {
    std::vector<std::uint32_t> symbols(params.Ka);
    std::vector<std::complex<double>> gains(params.Ka);
    std::vector<char> transmitted(params.Q, 0);
    std::vector<std::uint64_t> hit_hist(params.K0_max + 1, 0);
    std::vector<std::uint64_t> alarm_hist(params.K0_max + 1, 0);

    for (std::uint64_t trial = first; trial < first + count; ++trial) {
        auto eng = rng::make_engine(params.seed, trial);
        std::fill(transmitted.begin(), transmitted.end(), 0);
        unsigned distinct = 0;
        for (unsigned i = 0; i < params.Ka; ++i) {
            symbols[i] = static_cast<std::uint32_t>(rng::uniform_below(eng, params.Q));
            if (!transmitted[symbols[i]]) {
                transmitted[symbols[i]] = 1;
                ++distinct;
            }
        }
        if (params.kind == ChannelKind::rayleigh)
            for (auto& g : gains) g = rng::cgaussian(eng);
        else
            std::fill(gains.begin(), gains.end(), std::complex<double>(1.0, 0.0));

        const cvec y = transmit_slot(cb, symbols, gains, eng);
        const auto picks = omp_decode(ws, y, params.K0_max);

        std::fill(hit_hist.begin(), hit_hist.end(), 0);
        std::fill(alarm_hist.begin(), alarm_hist.end(), 0);
        for (std::size_t pos = 0; pos < picks.size(); ++pos) {
            if (transmitted[picks[pos]])
                ++hit_hist[pos + 1];
            else
                ++alarm_hist[pos + 1];
        }
        std::uint64_t hits = 0, alarms = 0;
        for (unsigned K0 = 1; K0 <= params.K0_max; ++K0) {
            hits += hit_hist[K0];
            alarms += alarm_hist[K0];
            counters.miss[K0] += distinct - hits;
            counters.alarm[K0] += alarms;
        }
        counters.sent += distinct;
        counters.absent += params.Q - distinct;
    }
}

}  // namespace

RocTable estimate_roc(const RocParams& params) {
    if (params.trials < 1) throw std::invalid_argument("estimate_roc: trials must be >= 1");
    if (params.K0_max < 1 || params.K0_max > params.Q)
        throw std::invalid_argument("estimate_roc: require 1 <= K0_max <= Q");
    const auto cb = gen_codebook(params.n1, params.Q, params.P, rng::derive_seed(params.seed, ~0ull));
    const OmpWorkspace ws(cb);

    RocCounters total(params.K0_max);
    const unsigned workers = std::max(1u, params.workers);
    if (workers == 1 || params.trials < 2 * workers) {
        run_roc_trials(params, cb, ws, 0, params.trials, total);
    } else {
        std::vector<RocCounters> parts(workers, RocCounters(params.K0_max));
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (params.trials + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t first = w * chunk;
            const std::uint64_t count = std::min<std::uint64_t>(chunk, params.trials - std::min<std::uint64_t>(first, params.trials));
            if (count == 0) break;
            pool.emplace_back([&, w, first, count] {
                run_roc_trials(params, cb, ws, first, count, parts[w]);
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& part : parts) total.merge(part);
    }

    RocTable table;
    table.ebno_db = params.ebno_db;
    table.L = params.L;
    table.n1 = params.n1;
    table.Q = params.Q;
    table.Ka = params.Ka;
    table.kind = params.kind;
    table.trials = params.trials;
    table.seed = params.seed;
    table.rows.reserve(params.K0_max);
    for (unsigned K0 = 1; K0 <= params.K0_max; ++K0) {
        RocRow row;
        row.K0 = K0;
        row.p_m = total.sent ? static_cast<double>(total.miss[K0]) / total.sent : 0.0;
        row.p_f = total.absent ? static_cast<double>(total.alarm[K0]) / total.absent : 0.0;
        table.rows.push_back(row);
    }
    table.validate();
    return table;
}

}  // namespace ccs::phy
