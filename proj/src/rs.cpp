#include "ccs/rs.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace ccs::rs {

RsCodeSpec::RsCodeSpec(gf::Field f, unsigned L_, unsigned k_O_)
    : RsCodeSpec(std::move(f), L_, k_O_, {}) {
    locators.resize(L);
    for (unsigned j = 0; j < L; ++j) locators[j] = j;  // field elements in index order
}

RsCodeSpec::RsCodeSpec(gf::Field f, unsigned L_, unsigned k_O_, std::vector<gf::Elem> locs)
    : field(std::move(f)), L(L_), k_O(k_O_), locators(std::move(locs)) {
    if (k_O < 1 || k_O > L) throw std::invalid_argument("rs: require 1 <= k_O <= L");
    if (L > field.size()) throw std::invalid_argument("rs: require L <= field size");
    if (!locators.empty()) {
        if (locators.size() != L) throw std::invalid_argument("rs: locator count != L");
        auto sorted = locators;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("rs: locators must be distinct");
        for (const auto b : sorted)
            if (!field.valid(b)) throw std::invalid_argument("rs: locator outside field");
    }
}

std::vector<gf::Elem> rs_encode(const RsCodeSpec& spec, std::span<const gf::Elem> message) {
    if (message.size() != spec.k_O) throw std::domain_error("rs_encode: message length != k_O");
    gf::Polynomial f(std::vector<gf::Elem>(message.begin(), message.end()));
    std::vector<gf::Elem> codeword(spec.L);
    for (unsigned j = 0; j < spec.L; ++j) codeword[j] = gf::poly_eval(spec.field, f, spec.locators[j]);
    return codeword;
}

MultiplicityMatrix MultiplicityMatrix::from_lists(const achannel::ReceivedLists& y, unsigned q,
                                                  unsigned mult) {
    MultiplicityMatrix mm;
    mm.q = q;
    mm.L = y.L();
    mm.m.assign(static_cast<std::size_t>(q) * mm.L, 0);
    for (unsigned j = 0; j < mm.L; ++j)
        for (const auto s : y.slots[j].members()) {
            if (s >= q) throw std::domain_error("multiplicity: symbol outside field");
            mm.m[static_cast<std::size_t>(s) * mm.L + j] = mult;
        }
    return mm;
}

std::uint64_t MultiplicityMatrix::cost() const {
    std::uint64_t c = 0;
    for (const auto v : m) c += static_cast<std::uint64_t>(v) * (v + 1);
    return c / 2;
}

namespace {

// Monomials of (1, u)-weighted degree <= d.
std::uint64_t monomials_below(std::uint64_t d, unsigned u) {
    std::uint64_t n = 0;
    for (std::uint64_t b = 0; b * u <= d; ++b) n += d - b * u + 1;
    return n;
}

// Dense working polynomial for the interpolation loop: coefficient of
// x^a y^b at [b * x_cap + a]. Leading monomial bookkeeping uses the
// (weighted degree, then y degree) order.
struct DensePoly {
    std::vector<gf::Elem> c;
    unsigned x_cap = 0;
    unsigned max_x = 0;  // upper bound on stored x degree
    unsigned max_y = 0;

    gf::Elem at(unsigned a, unsigned b) const { return c[static_cast<std::size_t>(b) * x_cap + a]; }
    gf::Elem& at(unsigned a, unsigned b) { return c[static_cast<std::size_t>(b) * x_cap + a]; }
};

struct Monomial {
    long wdeg = -1;
    unsigned y = 0;
};

Monomial leading_monomial(const DensePoly& g, unsigned u) {
    Monomial lm;
    for (unsigned b = 0; b <= g.max_y; ++b)
        for (unsigned a = 0; a <= g.max_x; ++a) {
            if (g.at(a, b) == 0) continue;
            const long w = static_cast<long>(a) + static_cast<long>(u) * b;
            if (w > lm.wdeg || (w == lm.wdeg && b > lm.y)) lm = {w, b};
        }
    return lm;
}

bool lm_less(const Monomial& a, const Monomial& b) {
    if (a.wdeg != b.wdeg) return a.wdeg < b.wdeg;
    return a.y < b.y;
}

}  // namespace

gf::BivariatePolynomial gs_interpolate(const gf::Field& field,
                                       const std::vector<InterpolationPoint>& points,
                                       unsigned k_O) {
    if (k_O < 2) throw std::invalid_argument("gs_interpolate: k_O must be >= 2");
    const unsigned u = k_O - 1;
    std::uint64_t cost = 0;
    for (const auto& p : points) {
        if (!field.valid(p.x) || !field.valid(p.y))
            throw std::invalid_argument("gs_interpolate: point outside field");
        cost += static_cast<std::uint64_t>(p.mult) * (p.mult + 1) / 2;
    }
    if (cost == 0) throw std::domain_error("gs_interpolate: no constraints");

    // Smallest weighted degree whose monomial count exceeds the constraint
    // count; a nonzero solution within that budget exists by dimension count.
    std::uint64_t delta = 0;
    while (monomials_below(delta, u) <= cost) ++delta;
    const auto y_cap = static_cast<unsigned>(delta / u);

    // Koetter's update: one candidate per leading y degree. Every candidate
    // satisfies all constraints processed so far.
    const auto x_cap = static_cast<unsigned>(cost + 1);
    std::vector<DensePoly> g(y_cap + 1);
    for (unsigned b = 0; b <= y_cap; ++b) {
        g[b].x_cap = x_cap + 1;
        g[b].max_y = y_cap;
        g[b].c.assign(static_cast<std::size_t>(g[b].x_cap) * (y_cap + 1), 0);
        g[b].at(0, b) = 1;
    }

    std::vector<gf::Elem> pow_x(x_cap + 1), pow_y(y_cap + 1);
    for (const auto& p : points) {
        pow_x[0] = 1;
        for (unsigned i = 1; i <= x_cap; ++i) pow_x[i] = field.mul(pow_x[i - 1], p.x);
        pow_y[0] = 1;
        for (unsigned i = 1; i <= y_cap; ++i) pow_y[i] = field.mul(pow_y[i - 1], p.y);

        for (unsigned order = 0; order < p.mult; ++order) {
            for (unsigned a = 0; a <= order; ++a) {
                const unsigned b = order - a;
                if (b > y_cap) continue;
                // Hasse derivative functional D^(a,b) at (p.x, p.y).
                std::vector<gf::Elem> d(y_cap + 1, 0);
                int best = -1;
                Monomial best_lm;
                for (unsigned j = 0; j <= y_cap; ++j) {
                    gf::Elem acc = 0;
                    for (unsigned s = b; s <= g[j].max_y; ++s) {
                        if (!gf::binom_odd(s, b)) continue;
                        const gf::Elem ys = pow_y[s - b];
                        if (ys == 0 && s != b) continue;
                        for (unsigned r = a; r <= g[j].max_x; ++r) {
                            const gf::Elem cf = g[j].at(r, s);
                            if (cf == 0 || !gf::binom_odd(r, a)) continue;
                            acc = field.add(acc, field.mul(cf, field.mul(pow_x[r - a], ys)));
                        }
                    }
                    d[j] = acc;
                    if (acc != 0) {
                        const auto lm = leading_monomial(g[j], u);
                        if (best < 0 || lm_less(lm, best_lm)) {
                            best = static_cast<int>(j);
                            best_lm = lm;
                        }
                    }
                }
                if (best < 0) continue;  // constraint already satisfied
                const auto jstar = static_cast<unsigned>(best);
                const gf::Elem dinv = field.inv(d[jstar]);
                for (unsigned j = 0; j <= y_cap; ++j) {
                    if (j == jstar || d[j] == 0) continue;
                    const gf::Elem scale = field.mul(d[j], dinv);
                    auto& gj = g[j];
                    const auto& gs = g[jstar];
                    for (unsigned s = 0; s <= gs.max_y; ++s)
                        for (unsigned r = 0; r <= gs.max_x; ++r) {
                            const gf::Elem cf = gs.at(r, s);
                            if (cf != 0) gj.at(r, s) = field.add(gj.at(r, s), field.mul(scale, cf));
                        }
                    gj.max_x = std::max(gj.max_x, gs.max_x);
                    gj.max_y = std::max(gj.max_y, gs.max_y);
                }
                // g_jstar *= (x - p.x), raising its weighted degree by one.
                auto& gs = g[jstar];
                for (unsigned s = 0; s <= gs.max_y; ++s)
                    for (unsigned r = std::min(gs.max_x + 1, x_cap) + 1; r-- > 0;) {
                        const gf::Elem lower = r > 0 ? gs.at(r - 1, s) : 0;
                        gs.at(r, s) = field.add(lower, field.mul(p.x, gs.at(r, s)));
                    }
                gs.max_x = std::min(gs.max_x + 1, x_cap);
            }
        }
    }

    int best = -1;
    Monomial best_lm;
    for (unsigned j = 0; j <= y_cap; ++j) {
        const auto lm = leading_monomial(g[j], u);
        if (lm.wdeg < 0) continue;
        if (best < 0 || lm_less(lm, best_lm)) {
            best = static_cast<int>(j);
            best_lm = lm;
        }
    }
    if (best < 0) throw std::logic_error("gs_interpolate: no nonzero candidate");

    gf::BivariatePolynomial out;
    const auto& win = g[static_cast<unsigned>(best)];
    for (unsigned b = 0; b <= win.max_y; ++b)
        for (unsigned a = 0; a <= win.max_x; ++a)
            if (win.at(a, b) != 0) out.coef[{a, b}] = win.at(a, b);
    return out;
}

namespace {

void roth_ruckenstein(const gf::Field& field, const gf::BivariatePolynomial& q, unsigned k_O,
                      unsigned depth, std::vector<gf::Elem>& coeffs,
                      std::vector<std::vector<gf::Elem>>& out) {
    if (q.is_zero()) return;
    if (depth == k_O) return;
    const auto node = strip_x_factor(q);
    // Roots of node(0, y).
    gf::Polynomial ry;
    for (const auto& [key, c] : node.coef)
        if (key.first == 0) {
            if (ry.coef.size() <= key.second) ry.coef.resize(key.second + 1, 0);
            ry.coef[key.second] = c;
        }
    ry.normalize();
    for (gf::Elem gamma = 0; gamma < field.size(); ++gamma) {
        if (!ry.is_zero() && gf::poly_eval(field, ry, gamma) != 0) continue;
        coeffs.push_back(gamma);
        if (depth + 1 == k_O) {
            out.push_back(coeffs);
        } else {
            roth_ruckenstein(field, shift_y_root(field, node, gamma), k_O, depth + 1, coeffs, out);
        }
        coeffs.pop_back();
    }
}

}  // namespace

std::vector<gf::Polynomial> gs_factor(const gf::Field& field, const gf::BivariatePolynomial& q,
                                      unsigned k_O) {
    if (q.is_zero()) throw std::invalid_argument("gs_factor: zero polynomial");
    if (k_O < 2) throw std::invalid_argument("gs_factor: k_O must be >= 2");
    std::vector<std::vector<gf::Elem>> raw;
    std::vector<gf::Elem> coeffs;
    roth_ruckenstein(field, q, k_O, 0, coeffs, raw);

    // The descent can emit spurious or duplicate candidates; keep exactly
    // those with q(x, f(x)) = 0.
    std::set<std::vector<gf::Elem>> seen;
    std::vector<gf::Polynomial> out;
    for (const auto& cand : raw) {
        if (!seen.insert(cand).second) continue;
        gf::Polynomial f{std::vector<gf::Elem>(cand)};
        if (substitute_y(field, q, f).is_zero()) out.push_back(std::move(f));
    }
    return out;
}

double list_size_bound(std::uint64_t cost, unsigned k_O) {
    return std::sqrt(2.0 * static_cast<double>(cost) / (k_O - 1));
}

double uniform_list_correctable_errors(unsigned L, unsigned k_O, unsigned K_a, unsigned mult) {
    const double m = mult;
    return L * (1.0 - std::sqrt(static_cast<double>(k_O - 1) / L * K_a * (m + 1.0) / m));
}

double naive_scheme_max_rate(unsigned K_a) { return 1.0 / K_a; }

std::string payload_hex(const Bits& payload) {
    static const char* digits = "0123456789abcdef";
    const std::size_t nibbles = (payload.size() + 3) / 4;
    std::string out;
    out.reserve(nibbles);
    unsigned acc = 0;
    unsigned used = (4 - payload.size() % 4) % 4;  // implicit leading zero bits
    for (const auto b : payload) {
        acc = (acc << 1) | (b & 1);
        if (++used == 4) {
            out.push_back(digits[acc & 0xf]);
            acc = 0;
            used = 0;
        }
    }
    return out;
}

std::vector<std::vector<gf::Elem>> list_recover(const RsCodeSpec& spec,
                                                const achannel::ReceivedLists& y, unsigned mult) {
    if (mult < 1) throw std::invalid_argument("list_recover: multiplicity must be >= 1");
    if (y.L() != spec.L) throw std::domain_error("list_recover: slot count mismatch");
    std::vector<InterpolationPoint> points;
    for (unsigned j = 0; j < spec.L; ++j)
        for (const auto s : y.slots[j].members()) {
            if (s >= spec.field.size()) throw std::domain_error("list_recover: symbol outside field");
            points.push_back({spec.locators[j], s, mult});
        }
    if (points.empty()) return {};

    const auto q = gs_interpolate(spec.field, points, spec.k_O);
    const auto factors = gs_factor(spec.field, q, spec.k_O);
    std::vector<std::vector<gf::Elem>> out;
    out.reserve(factors.size());
    for (const auto& f : factors) {
        std::vector<gf::Elem> msg(spec.k_O, 0);
        std::copy(f.coef.begin(), f.coef.end(), msg.begin());
        out.push_back(std::move(msg));
    }
    return out;
}

std::uint32_t crc_generator(unsigned h) {
    if (h < 1 || h > 16) throw std::invalid_argument("crc: h must be in [1,16]");
    return gf::Field::default_modulus(h);
}

namespace {

// Remainder of word * x^h divided by the degree-h generator, MSB first.
std::uint32_t crc_remainder(const Bits& bits, unsigned h) {
    const std::uint32_t gen = crc_generator(h);
    const std::uint32_t top = 1u << h;
    std::uint32_t reg = 0;
    for (const auto bit : bits) {
        reg = (reg << 1) | (bit & 1);
        if (reg & top) reg ^= gen;
    }
    for (unsigned i = 0; i < h; ++i) {
        reg <<= 1;
        if (reg & top) reg ^= gen;
    }
    return reg & (top - 1);
}

}  // namespace

Bits crc_attach(const Bits& payload, unsigned h) {
    Bits out = payload;
    const std::uint32_t r = crc_remainder(payload, h);
    for (unsigned i = 0; i < h; ++i) out.push_back((r >> (h - 1 - i)) & 1);
    return out;
}

bool crc_check(const Bits& word, unsigned h) {
    if (word.size() < h) return false;
    const Bits payload(word.begin(), word.end() - h);
    std::uint32_t r = 0;
    for (unsigned i = 0; i < h; ++i) r = (r << 1) | (word[word.size() - h + i] & 1);
    return crc_remainder(payload, h) == r;
}

void CosetSchemeConfig::validate() const {
    if (c < 1 || c > 30) throw std::invalid_argument("coset: c must be in [1,30]");
    if (x_p >= c) throw std::invalid_argument("coset: x_p must be < c");
    if (q_bits() > 16) throw std::invalid_argument("coset: field size above 2^16");
    if (L > q()) throw std::invalid_argument("coset: require L <= q");
    if (k_O < 1 || k_O > L) throw std::invalid_argument("coset: require 1 <= k_O <= L");
    if (h > 32) throw std::invalid_argument("coset: h must be <= 32");
    if (carry_crc && h > 16) throw std::invalid_argument("coset: carried CRC limited to h <= 16");
    if (carried_bits() > k_O * q_bits())
        throw std::invalid_argument("coset: payload does not fit k_O field symbols");
    if (mult < 1) throw std::invalid_argument("coset: multiplicity must be >= 1");
}

namespace {

std::vector<gf::Elem> pack_symbols(const Bits& bits, unsigned k_O, unsigned q_bits) {
    std::vector<gf::Elem> symbols(k_O, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) {
            const auto sym = static_cast<unsigned>(i / q_bits);
            symbols[sym] |= 1u << (q_bits - 1 - i % q_bits);
        }
    return symbols;
}

Bits unpack_symbols(const std::vector<gf::Elem>& symbols, unsigned n_bits, unsigned q_bits) {
    Bits bits(n_bits, 0);
    for (std::size_t i = 0; i < n_bits; ++i)
        bits[i] = (symbols[i / q_bits] >> (q_bits - 1 - i % q_bits)) & 1;
    return bits;
}

}  // namespace

std::vector<std::uint32_t> coset_encode(const CosetSchemeConfig& config, const Bits& payload,
                                        std::uint32_t p_u) {
    config.validate();
    if (payload.size() != config.k) throw std::domain_error("coset_encode: payload length != k");
    if (p_u >= (1u << config.x_p)) throw std::domain_error("coset_encode: prefix out of range");

    Bits carried = config.carry_crc ? crc_attach(payload, config.h) : payload;
    const auto symbols = pack_symbols(carried, config.k_O, config.q_bits());  // zero-padded tail

    const RsCodeSpec spec(gf::Field(config.q_bits()), config.L, config.k_O);
    const auto codeword = rs_encode(spec, symbols);
    std::vector<std::uint32_t> slots(config.L);
    for (unsigned j = 0; j < config.L; ++j) slots[j] = p_u * config.q() + codeword[j];
    return slots;
}

std::vector<Bits> coset_decode(const CosetSchemeConfig& config, const achannel::ReceivedLists& y) {
    config.validate();
    if (y.L() != config.L) throw std::domain_error("coset_decode: slot count mismatch");
    const std::uint32_t q = config.q();

    // Prefixes present anywhere, and their per-slot small-field lists.
    std::set<std::uint32_t> prefixes;
    for (const auto& slot : y.slots)
        for (const auto s : slot.members()) {
            if (s >= config.Q()) throw std::domain_error("coset_decode: symbol outside alphabet");
            prefixes.insert(s / q);
        }

    const RsCodeSpec spec(gf::Field(config.q_bits()), config.L, config.k_O);
    const double needed_score = std::sqrt(2.0 * static_cast<double>(config.k_O - 1));
    std::set<Bits> found;
    for (const auto p : prefixes) {
        achannel::ReceivedLists coset;
        coset.slots.reserve(config.L);
        std::uint64_t entries = 0;
        unsigned covered_slots = 0;
        for (const auto& slot : y.slots) {
            std::vector<std::uint32_t> members;
            for (const auto s : slot.members())
                if (s / q == p) members.push_back(s % q);
            entries += members.size();
            if (!members.empty()) ++covered_slots;
            coset.slots.emplace_back(std::move(members));
        }
        if (entries == 0) continue;
        // Max achievable score is mult * covered_slots; skip cosets that
        // cannot meet the recovery condition.
        const double cost =
            0.5 * static_cast<double>(config.mult) * (config.mult + 1) * static_cast<double>(entries);
        if (static_cast<double>(config.mult) * covered_slots < needed_score * std::sqrt(cost))
            continue;

        for (const auto& msg : list_recover(spec, coset, config.mult)) {
            const Bits carried = unpack_symbols(msg, config.carried_bits(), config.q_bits());
            // Padding tail must be zero for a genuine payload.
            bool pad_ok = true;
            for (std::size_t i = config.carried_bits(); i < msg.size() * config.q_bits(); ++i)
                if ((msg[i / config.q_bits()] >> (config.q_bits() - 1 - i % config.q_bits())) & 1) {
                    pad_ok = false;
                    break;
                }
            if (!pad_ok) continue;
            if (config.carry_crc) {
                if (!crc_check(carried, config.h)) continue;
                found.insert(Bits(carried.begin(), carried.end() - config.h));
            } else {
                found.insert(carried);
            }
        }
    }
    return {found.begin(), found.end()};
}

}  // namespace ccs::rs
