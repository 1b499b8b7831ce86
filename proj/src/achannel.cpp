#include "ccs/achannel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace ccs::achannel {

void OuterChannelParams::validate() const {
    if (Q < 2) throw std::invalid_argument("achannel: Q must be >= 2");
    if (K_a < 1) throw std::invalid_argument("achannel: K_a must be >= 1");
    if (p_m < 0.0 || p_m > 1.0 || p_f < 0.0 || p_f > 1.0)
        throw std::invalid_argument("achannel: probabilities must lie in [0,1]");
}

SlotSymbolSet::SlotSymbolSet(std::vector<std::uint32_t> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool SlotSymbolSet::contains(std::uint32_t s) const {
    return std::binary_search(members_.begin(), members_.end(), s);
}

SlotSymbolSet a_channel_union(std::span<const std::uint32_t> transmitted, std::uint32_t Q) {
    std::vector<std::uint32_t> out;
    out.reserve(transmitted.size());
    for (const auto s : transmitted) {
        if (s >= Q) throw std::domain_error("a_channel_union: symbol outside alphabet");
        out.push_back(s);
    }
    return SlotSymbolSet(std::move(out));
}

SlotSymbolSet apply_symbol_noise(const SlotSymbolSet& ya, const OuterChannelParams& params,
                                 rng::Engine& rng) {
    params.validate();
    std::vector<std::uint32_t> out;
    out.reserve(ya.size());
    for (const auto s : ya.members()) {
        if (s >= params.Q) throw std::domain_error("apply_symbol_noise: symbol outside alphabet");
        if (!rng::chance(rng, params.p_m)) out.push_back(s);
    }

    const std::uint64_t non_members = params.Q - ya.size();
    const std::uint64_t inserted = rng::binomial(rng, non_members, params.p_f);
    if (inserted > 0) {
        if (inserted * 2 > non_members) {
            // Dense insertion: enumerate non-members and take a uniform subset.
            std::vector<std::uint32_t> pool;
            pool.reserve(non_members);
            for (std::uint32_t s = 0; s < params.Q; ++s)
                if (!ya.contains(s)) pool.push_back(s);
            for (std::uint64_t i = 0; i < inserted; ++i) {
                const auto j = i + rng::uniform_below(rng, pool.size() - i);
                std::swap(pool[i], pool[j]);
                out.push_back(pool[i]);
            }
        } else {
            std::unordered_set<std::uint32_t> chosen;
            chosen.reserve(inserted * 2);
            while (chosen.size() < inserted) {
                const auto s = static_cast<std::uint32_t>(rng::uniform_below(rng, params.Q));
                if (ya.contains(s) || !chosen.insert(s).second) continue;
                out.push_back(s);
            }
        }
    }
    return SlotSymbolSet(std::move(out));
}

unsigned list_cover_distance(const ReceivedLists& y, std::span<const std::uint32_t> x) {
    if (x.size() != y.slots.size())
        throw std::domain_error("list_cover_distance: codeword length != slot count");
    unsigned d = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!y.slots[i].contains(x[i])) ++d;
    return d;
}

double mu_r(std::uint32_t Q, unsigned r, double p_m, double p_f) {
    if (Q < 2) throw std::invalid_argument("mu_r: Q must be >= 2");
    if (r < 1) throw std::invalid_argument("mu_r: r must be >= 1");
    // ((Q-1)/Q)^r via log1p for precision at large Q.
    const double beta = std::exp(static_cast<double>(r) * std::log1p(-1.0 / Q));
    const double mu = (1.0 - beta) * (1.0 - p_m) + beta * p_f;
    return std::clamp(mu, 0.0, 1.0);
}

double binary_entropy(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double capacity_estimate(const OuterChannelParams& params) {
    params.validate();
    const double Q = params.Q;
    const double beta = std::exp(static_cast<double>(params.K_a) * std::log1p(-1.0 / Q));
    const double mu = mu_r(params.Q, params.K_a, params.p_m, params.p_f);
    return Q * binary_entropy(mu) - Q * (1.0 - beta) * binary_entropy(params.p_m) -
           Q * beta * binary_entropy(params.p_f);
}

}  // namespace ccs::achannel
