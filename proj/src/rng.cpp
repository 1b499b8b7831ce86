#include "ccs/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace ccs::rng {

std::uint64_t binomial(Engine& eng, std::uint64_t n, double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binomial: p outside [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - binomial(eng, n, 1.0 - p);

    const double u = uniform01(eng);
    const double nd = static_cast<double>(n);
    const auto mode = static_cast<std::uint64_t>(std::min(nd, std::floor((nd + 1.0) * p)));
    // log pmf at the mode, then two-sided recurrence walk until the drawn
    // mass u is covered. The masses partition [0,1), so the result is an
    // exact sample of the distribution.
    const double logq = std::log1p(-p);
    const double logp = std::log(p);
    auto log_pmf = [&](std::uint64_t k) {
        const double kd = static_cast<double>(k);
        return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
               kd * logp + (nd - kd) * logq;
    };
    double acc = 0.0;
    std::uint64_t lo = mode, hi = mode;
    double pmf_lo = std::exp(log_pmf(mode));
    double pmf_hi = pmf_lo;
    acc += pmf_lo;
    if (u < acc) return mode;
    const double ratio = p / (1.0 - p);
    while (true) {
        // Next candidate mass on each side.
        const double next_hi =
            hi < n ? pmf_hi * (nd - static_cast<double>(hi)) / (static_cast<double>(hi) + 1.0) * ratio
                   : 0.0;
        const double next_lo =
            lo > 0 ? pmf_lo * static_cast<double>(lo) / (nd - static_cast<double>(lo) + 1.0) / ratio
                   : 0.0;
        if (next_hi <= 0.0 && next_lo <= 0.0) {
            // Exhausted representable mass; u landed in rounding residue.
            return hi < n ? hi + 1 : hi;
        }
        if (next_hi >= next_lo) {
            ++hi;
            pmf_hi = next_hi;
            acc += pmf_hi;
            if (u < acc) return hi;
        } else {
            --lo;
            pmf_lo = next_lo;
            acc += pmf_lo;
            if (u < acc) return lo;
        }
    }
}

}  // namespace ccs::rng
