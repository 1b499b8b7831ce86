#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ccs/rng.hpp"
#include "ccs/roc.hpp"

// Inner compressed-sensing slot code: a random spherical codebook over the
// complex field, the fading / AWGN multiple-access slot channel, orthogonal
// matching pursuit list decoding, and ROC (p_m, p_f vs K_0) estimation.
namespace ccs::phy {

using cvec = Eigen::VectorXcd;

struct InnerCodebook {
    unsigned n1 = 0;
    std::uint32_t Q = 0;
    double P = 0.0;
    std::uint64_t seed = 0;
    Eigen::MatrixXcd columns;  // n1 x Q, each column squared norm n1 * P
};

// i.i.d. complex Gaussian columns scaled onto the power shell; deterministic
// per seed.
InnerCodebook gen_codebook(unsigned n1, std::uint32_t Q, double P, std::uint64_t seed);

std::vector<std::complex<double>> draw_fading_gains(unsigned K_a, rng::Engine& rng);

// y = sum_i gains[i] * column(symbols[i]) + noise_scale * z with z unit
// circularly symmetric complex Gaussian per dimension. AWGN mode is gains all
// one; quasi-static fading means the caller draws gains once per frame and
// passes them to every slot.
cvec transmit_slot(const InnerCodebook& codebook, std::span<const std::uint32_t> symbols,
                   std::span<const std::complex<double>> gains, rng::Engine& rng,
                   double noise_scale = 1.0);

// Precomputed state shared by every OMP call against one codebook. The Gram
// matrix is cached when it fits comfortably (Q <= gram_cache_limit), else
// Gram columns are formed on demand.
class OmpWorkspace {
public:
    explicit OmpWorkspace(const InnerCodebook& codebook, std::uint32_t gram_cache_limit = 4096);

    const InnerCodebook& codebook() const { return *codebook_; }
    Eigen::VectorXcd gram_column(std::uint32_t j) const;

private:
    const InnerCodebook* codebook_;
    std::optional<Eigen::MatrixXcd> gram_;
};

// Ordered OMP selections: K0 iterations of max-|correlation| pick plus
// least-squares residual update (run in the Gram domain; a numerically
// dependent pick leaves the residual unchanged, tolerance 1e-10). The first j
// selections are identical for every K0 >= j.
std::vector<std::uint32_t> omp_decode(const OmpWorkspace& ws, const cvec& y, unsigned K0);
std::vector<std::uint32_t> omp_decode(const InnerCodebook& codebook, const cvec& y, unsigned K0);

struct RocParams {
    unsigned n1 = 1;
    std::uint32_t Q = 2;
    double P = 1.0;
    unsigned Ka = 1;
    ChannelKind kind = ChannelKind::rayleigh;
    unsigned K0_max = 1;
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    // Annotations carried into the table metadata / CSV schema.
    double ebno_db = 0.0;
    unsigned L = 0;
};

// Monte Carlo ROC: each trial transmits K_a uniform symbols through one slot,
// records the full OMP selection order once and derives (p_m, p_f) for every
// K0 <= K0_max from pooled counters. Deterministic per seed regardless of
// worker count.
RocTable estimate_roc(const RocParams& params);

}  // namespace ccs::phy
