#pragma once

#include <cstdint>
#include <vector>

#include "ccs/achannel.hpp"
#include "ccs/gf.hpp"
#include "ccs/ttree.hpp"  // Bits

// Reed-Solomon outer code decoded by Guruswami-Sudan list recovery
// (interpolation via Koetter's incremental basis reduction, factorization via
// Roth-Ruckenstein root descent), plus the prefix/coset codebook that spreads
// users over shifts of a small-field code, with an optional systematic CRC.
namespace ccs::rs {

using Bits = ttree::Bits;

struct RsCodeSpec {
    gf::Field field;
    unsigned L;                      // code length (slot count)
    unsigned k_O;                    // dimension
    std::vector<gf::Elem> locators;  // distinct evaluation points

    RsCodeSpec(gf::Field f, unsigned L, unsigned k_O);
    RsCodeSpec(gf::Field f, unsigned L, unsigned k_O, std::vector<gf::Elem> locators);
};

// codeword_j = f(beta_j) with the message as coefficients, lowest degree
// first.
std::vector<gf::Elem> rs_encode(const RsCodeSpec& spec, std::span<const gf::Elem> message);

struct MultiplicityMatrix {
    unsigned q = 0;  // alphabet rows
    unsigned L = 0;  // positions
    std::vector<unsigned> m;  // row-major q x L

    unsigned at(unsigned i, unsigned j) const { return m[static_cast<std::size_t>(i) * L + j]; }
    // Uniform multiplicity on list members, zero elsewhere.
    static MultiplicityMatrix from_lists(const achannel::ReceivedLists& y, unsigned q,
                                         unsigned mult);
    // Interpolation cost C(M) = 1/2 sum m_ij (m_ij + 1).
    std::uint64_t cost() const;
};

struct InterpolationPoint {
    gf::Elem x;
    gf::Elem y;
    unsigned mult;
};

// Nonzero Q(x,y) of minimal (1, k_O-1)-weighted degree vanishing at each
// point to its prescribed multiplicity (all Hasse derivatives of lower order).
gf::BivariatePolynomial gs_interpolate(const gf::Field& field,
                                       const std::vector<InterpolationPoint>& points,
                                       unsigned k_O);

// Every f with deg f < k_O such that (y - f(x)) divides q, no duplicates.
std::vector<gf::Polynomial> gs_factor(const gf::Field& field, const gf::BivariatePolynomial& q,
                                      unsigned k_O);

// Full list recovery with uniform multiplicity `mult`: returns the message
// coefficient vectors (length k_O, lowest degree first) of every recovered
// codeword.
std::vector<std::vector<gf::Elem>> list_recover(const RsCodeSpec& spec,
                                                const achannel::ReceivedLists& y, unsigned mult);

// Output list size cap sqrt(2 C(M) / (k_O - 1)).
double list_size_bound(std::uint64_t cost, unsigned k_O);

// With full lists of size K_a in every position and uniform multiplicity m,
// recovery is guaranteed up to this many uncovered positions.
double uniform_list_correctable_errors(unsigned L, unsigned k_O, unsigned K_a, unsigned mult);

// Rate ceiling of the single-field whole-alphabet scheme; kept as a
// feasibility calculator only.
double naive_scheme_max_rate(unsigned K_a);

// Systematic CRC with the fixed degree-h generator table (see docs).
Bits crc_attach(const Bits& payload, unsigned h);
bool crc_check(const Bits& word, unsigned h);
std::uint32_t crc_generator(unsigned h);

struct CosetSchemeConfig {
    unsigned c = 15;        // slot bits, Q = 2^c
    unsigned x_p = 0;       // prefix bits; field size q = 2^(c - x_p)
    unsigned L = 1;         // slot count / RS length
    unsigned k_O = 1;       // RS dimension
    unsigned k = 1;         // payload bits
    unsigned h = 0;         // CRC bits
    unsigned mult = 1;      // GS multiplicity
    bool carry_crc = false; // false: k bits padded into the RS payload, CRC
                            // charged in energy accounting only; true: k+h
                            // bits physically carried and checked at decode

    unsigned q_bits() const { return c - x_p; }
    std::uint32_t Q() const { return 1u << c; }
    std::uint32_t q() const { return 1u << q_bits(); }
    unsigned carried_bits() const { return carry_crc ? k + h : k; }
    void validate() const;
};

// Slot symbols p_u * q + s_j: RS codeword of the packed payload in the low
// bits, the user prefix copied into the top x_p bits of every slot.
std::vector<std::uint32_t> coset_encode(const CosetSchemeConfig& config, const Bits& payload,
                                        std::uint32_t p_u);

// Partition slot lists by prefix, list-recover each coset, unpack and (in
// carry_crc mode) CRC-filter; deduplicated payloads.
std::vector<Bits> coset_decode(const CosetSchemeConfig& config, const achannel::ReceivedLists& y);

// Payload bits as a hex string, MSB first, zero-padded to whole nibbles.
std::string payload_hex(const Bits& payload);

}  // namespace ccs::rs
