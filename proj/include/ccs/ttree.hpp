#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ccs/achannel.hpp"

// Tree outer code with a block upper-triangular GF(2) generator: slot symbol
// i depends only on message chunks 1..i, and the sequential decoder keeps
// every prefix within list-cover distance t of the received slot lists.
namespace ccs::ttree {

// Message bits, MSB-first, chunk 1 first.
using Bits = std::vector<std::uint8_t>;

Bits bits_from_uint(std::uint64_t value, unsigned width);
std::uint64_t uint_from_bits(const Bits& bits);

struct TreeCodeSpec {
    std::vector<unsigned> bit_allocation;  // b_1..b_L
    unsigned c = 1;                        // bits per symbol, Q = 2^c
    std::uint64_t seed = 0;

    // block(j, i), 0-based j <= i: rows of G_{j+1,i+1}. Row r is the c-bit
    // symbol contribution of bit r of chunk j+1 (bit c-1 is the symbol MSB).
    const std::vector<std::uint32_t>& block(unsigned j, unsigned i) const;

    unsigned L() const { return static_cast<unsigned>(bit_allocation.size()); }
    unsigned k() const;
    std::uint32_t Q() const { return 1u << c; }

    std::vector<std::vector<std::uint32_t>> blocks;  // linear index, see impl
};

// Sample every admissible block with i.i.d. fair bits; deterministic per seed.
TreeCodeSpec build_generator(const std::vector<unsigned>& bit_allocation, unsigned c,
                             std::uint64_t seed);

// Outer codeword in [Q]^L. The chunk-to-symbol map is the identity on c-bit
// integers read MSB-first.
std::vector<std::uint32_t> encode(const TreeCodeSpec& spec, const Bits& u);

struct DecodeResult {
    std::vector<Bits> messages;       // lexicographic order
    std::vector<unsigned> distances;  // list-cover distance per message
    bool overflow = false;            // a level exceeded path_cap and was pruned
};

// All messages whose codeword is within list-cover distance t of y. With a
// path cap, each level keeps the path_cap lowest-distance prefixes (ties by
// lexicographic prefix) and the overflow flag is raised.
DecodeResult decode(const TreeCodeSpec& spec, const achannel::ReceivedLists& y, unsigned t,
                    std::optional<std::size_t> path_cap = std::nullopt);

// Deterministic binary layout: u32 L, u32 c, u32 b[L], then block bits in
// block order (i outer, j inner), row-major, symbol MSB first, packed 8 per
// byte high bit first.
std::vector<std::uint8_t> serialize_spec(const TreeCodeSpec& spec);
TreeCodeSpec deserialize_spec(const std::vector<std::uint8_t>& bytes);

}  // namespace ccs::ttree
