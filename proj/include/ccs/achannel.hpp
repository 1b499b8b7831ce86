#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ccs/rng.hpp"

// Abstract channel seen by the outer code: per-slot set union of the
// transmitted symbols followed by independent per-element miss / false-alarm
// noise. Also hosts the list-cover distance and the uniform-input capacity
// estimate of that channel.
namespace ccs::achannel {

struct OuterChannelParams {
    std::uint32_t Q = 2;   // alphabet size
    unsigned K_a = 1;      // active users
    double p_m = 0.0;      // per-element miss probability
    double p_f = 0.0;      // per-element false-alarm probability

    void validate() const;
};

// Sorted duplicate-free set of slot symbols in [0, Q).
class SlotSymbolSet {
public:
    SlotSymbolSet() = default;
    explicit SlotSymbolSet(std::vector<std::uint32_t> members);

    bool contains(std::uint32_t s) const;
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    const std::vector<std::uint32_t>& members() const { return members_; }

    bool operator==(const SlotSymbolSet& o) const { return members_ == o.members_; }

private:
    std::vector<std::uint32_t> members_;
};

struct ReceivedLists {
    std::vector<SlotSymbolSet> slots;

    unsigned L() const { return static_cast<unsigned>(slots.size()); }
};

// Set union of the transmitted symbols. Throws if any symbol is >= Q.
SlotSymbolSet a_channel_union(std::span<const std::uint32_t> transmitted, std::uint32_t Q);

// Keep each member with probability 1-p_m, insert each non-member with
// probability p_f. The insertion side draws an exact Binomial(Q-|ya|, p_f)
// count and then places it uniformly, which is distributionally identical to
// the per-element loop at any alphabet size.
SlotSymbolSet apply_symbol_noise(const SlotSymbolSet& ya, const OuterChannelParams& params,
                                 rng::Engine& rng);

// Number of positions where the codeword symbol is absent from the slot list.
unsigned list_cover_distance(const ReceivedLists& y, std::span<const std::uint32_t> x);

// Probability that a fixed alphabet element appears in the noisy output when
// r uniform symbols were transmitted.
double mu_r(std::uint32_t Q, unsigned r, double p_m, double p_f);

// Binary entropy with h(0) = h(1) = 0.
double binary_entropy(double x);

// Uniform-input capacity estimate in bits per outer symbol (may be negative:
// it is derived from an upper bound on the output entropy and is returned
// unfloored).
double capacity_estimate(const OuterChannelParams& params);

}  // namespace ccs::achannel
