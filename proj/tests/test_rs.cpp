#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "ccs/achannel.hpp"
#include "ccs/rng.hpp"
#include "ccs/rs.hpp"

using namespace ccs;
using rs::Bits;

namespace {

// Score (M, C) of a codeword against uniform-multiplicity lists.
std::uint64_t codeword_score(const achannel::ReceivedLists& y,
                             const std::vector<gf::Elem>& codeword, unsigned mult) {
    std::uint64_t s = 0;
    for (std::size_t j = 0; j < codeword.size(); ++j)
        if (y.slots[j].contains(codeword[j])) s += mult;
    return s;
}

std::vector<gf::Elem> message_from_index(std::uint64_t idx, unsigned k_O, std::uint32_t q) {
    std::vector<gf::Elem> msg(k_O);
    for (unsigned i = 0; i < k_O; ++i) {
        msg[i] = static_cast<gf::Elem>(idx % q);
        idx /= q;
    }
    return msg;
}

achannel::ReceivedLists random_lists(rng::Engine& eng, unsigned L, std::uint32_t q,
                                     unsigned max_size) {
    achannel::ReceivedLists y;
    for (unsigned j = 0; j < L; ++j) {
        std::vector<std::uint32_t> members;
        const auto size = rng::uniform_below(eng, max_size + 1);
        while (members.size() < size)
            members.push_back(static_cast<std::uint32_t>(rng::uniform_below(eng, q)));
        y.slots.emplace_back(std::move(members));
    }
    return y;
}

}  // namespace

TEST_CASE("rs_encode on constants and the identity polynomial") {
    const rs::RsCodeSpec spec(gf::Field(3), 7, 2);
    std::vector<gf::Elem> constant{5, 0};
    CHECK(rs_encode(spec, constant) == std::vector<gf::Elem>(7, 5));
    std::vector<gf::Elem> identity{0, 1};
    CHECK(rs_encode(spec, identity) == spec.locators);
}

TEST_CASE("distinct codewords of an MDS code agree in at most k_O - 1 positions") {
    const rs::RsCodeSpec spec(gf::Field(3), 7, 2);
    std::vector<std::vector<gf::Elem>> codewords;
    for (std::uint64_t idx = 0; idx < 64; ++idx)
        codewords.push_back(rs_encode(spec, message_from_index(idx, 2, 8)));
    for (std::size_t a = 0; a < 64; ++a)
        for (std::size_t b = a + 1; b < 64; ++b) {
            unsigned agree = 0;
            for (unsigned j = 0; j < 7; ++j)
                if (codewords[a][j] == codewords[b][j]) ++agree;
            CHECK(agree <= 1);
        }
}

TEST_CASE("single-point interpolation vanishes with minimal weighted degree") {
    const gf::Field f(4);
    const auto q = rs::gs_interpolate(f, {{6, 11, 1}}, 2);
    CHECK(gf::bivariate_eval(f, q, 6, 11) == 0);
    CHECK(gf::weighted_degree(q, 2) == 1);  // only 1, x, y lie below; 1 alone cannot vanish
    CHECK_THROWS_AS(rs::gs_interpolate(f, {}, 2), std::domain_error);
}

TEST_CASE("interpolation satisfies every Hasse constraint on random instances") {
    const gf::Field f(4);
    auto eng = rng::make_engine(51);
    for (int trial = 0; trial < 30; ++trial) {
        const unsigned k_O = 2 + static_cast<unsigned>(rng::uniform_below(eng, 3));
        const unsigned mult = 1 + static_cast<unsigned>(rng::uniform_below(eng, 2));
        std::set<std::pair<gf::Elem, gf::Elem>> pts;
        const unsigned n_pts = 3 + static_cast<unsigned>(rng::uniform_below(eng, 10));
        while (pts.size() < n_pts)
            pts.insert({static_cast<gf::Elem>(rng::uniform_below(eng, 16)),
                        static_cast<gf::Elem>(rng::uniform_below(eng, 16))});
        std::vector<rs::InterpolationPoint> points;
        for (const auto& [x, y] : pts) points.push_back({x, y, mult});

        const auto q = rs::gs_interpolate(f, points, k_O);
        REQUIRE(!q.is_zero());
        for (const auto& p : points)
            for (unsigned a = 0; a < p.mult; ++a)
                for (unsigned b = 0; a + b < p.mult; ++b)
                    CHECK(gf::hasse_derivative_eval(f, q, a, b, p.x, p.y) == 0);

        // Weighted degree within the dimension-count budget.
        std::uint64_t cost = 0;
        for (const auto& p : points) cost += p.mult * (p.mult + 1) / 2;
        std::uint64_t delta = 0;
        auto monomials = [&](std::uint64_t d) {
            std::uint64_t n = 0;
            for (std::uint64_t b = 0; b * (k_O - 1) <= d; ++b) n += d - b * (k_O - 1) + 1;
            return n;
        };
        while (monomials(delta) <= cost) ++delta;
        CHECK(gf::weighted_degree(q, k_O) <= static_cast<long>(delta));
    }
}

TEST_CASE("gs_factor recovers constructed roots") {
    const gf::Field field(4);
    auto eng = rng::make_engine(52);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<gf::Elem> fc(3), gc(3);
        for (auto& c : fc) c = static_cast<gf::Elem>(rng::uniform_below(eng, 16));
        for (auto& c : gc) c = static_cast<gf::Elem>(rng::uniform_below(eng, 16));
        const gf::Polynomial fp{std::vector<gf::Elem>(fc)};
        const gf::Polynomial gp{std::vector<gf::Elem>(gc)};
        if (fp == gp) continue;
        // q = (y - f)(y - g) expanded: y^2 + (f+g) y + f g.
        gf::BivariatePolynomial q;
        q.set(field, 0, 2, 1);
        const auto sum = poly_add(field, fp, gp);
        for (std::size_t i = 0; i < sum.coef.size(); ++i)
            q.add_to(field, static_cast<unsigned>(i), 1, sum.coef[i]);
        const auto prod = poly_mul(field, fp, gp);
        for (std::size_t i = 0; i < prod.coef.size(); ++i)
            q.add_to(field, static_cast<unsigned>(i), 0, prod.coef[i]);

        auto roots = rs::gs_factor(field, q, 3);
        REQUIRE(roots.size() == 2);
        CHECK(((roots[0] == fp && roots[1] == gp) || (roots[0] == gp && roots[1] == fp)));
    }
}

TEST_CASE("gs_factor on a y-free polynomial returns nothing") {
    const gf::Field field(4);
    gf::BivariatePolynomial q;
    q.set(field, 1, 0, 1);
    q.set(field, 0, 0, 1);  // x + 1
    CHECK(rs::gs_factor(field, q, 3).empty());
}

TEST_CASE("gs_factor equals the exhaustive divisibility scan") {
    const gf::Field field(4);
    auto eng = rng::make_engine(53);
    for (int trial = 0; trial < 8; ++trial) {
        gf::BivariatePolynomial q;
        // Random sparse polynomial with y-degree up to 3.
        const unsigned terms = 4 + static_cast<unsigned>(rng::uniform_below(eng, 8));
        for (unsigned i = 0; i < terms; ++i)
            q.set(field, static_cast<unsigned>(rng::uniform_below(eng, 5)),
                  static_cast<unsigned>(rng::uniform_below(eng, 4)),
                  static_cast<gf::Elem>(rng::uniform_below(eng, 16)));
        if (q.is_zero()) continue;

        std::set<std::vector<gf::Elem>> expected;
        for (std::uint64_t idx = 0; idx < 16 * 16 * 16; ++idx) {
            const auto msg = message_from_index(idx, 3, 16);
            const gf::Polynomial cand{std::vector<gf::Elem>(msg)};
            if (substitute_y(field, q, cand).is_zero()) {
                auto padded = cand.coef;
                padded.resize(3, 0);
                expected.insert(padded);
            }
        }
        std::set<std::vector<gf::Elem>> got;
        for (const auto& root : rs::gs_factor(field, q, 3)) {
            auto padded = root.coef;
            padded.resize(3, 0);
            got.insert(padded);
        }
        CHECK(got == expected);
    }
}

TEST_CASE("noiseless singleton lists are list-recovered") {
    const rs::RsCodeSpec spec(gf::Field(4), 15, 2);
    auto eng = rng::make_engine(54);
    for (int trial = 0; trial < 10; ++trial) {
        const auto msg = message_from_index(rng::uniform_below(eng, 256), 2, 16);
        const auto cw = rs_encode(spec, msg);
        achannel::ReceivedLists y;
        for (const auto s : cw) y.slots.emplace_back(std::vector<std::uint32_t>{s});
        const auto out = rs::list_recover(spec, y, 1);
        CHECK(std::count(out.begin(), out.end(), msg) == 1);
    }
}

TEST_CASE("recovery survives up to the uniform-list error budget") {
    // Full lists of size K_a = 2 with m = 2: the budget below is positive.
    const unsigned L = 15, k_O = 2, Ka = 2, mult = 2;
    const auto t_max =
        static_cast<unsigned>(std::floor(rs::uniform_list_correctable_errors(L, k_O, Ka, mult)));
    REQUIRE(t_max >= 1);
    const rs::RsCodeSpec spec(gf::Field(4), L, k_O);
    auto eng = rng::make_engine(55);
    for (int trial = 0; trial < 10; ++trial) {
        const auto msg = message_from_index(rng::uniform_below(eng, 256), k_O, 16);
        const auto cw = rs_encode(spec, msg);
        const auto other = message_from_index(rng::uniform_below(eng, 256), k_O, 16);
        const auto cw2 = rs_encode(spec, other);
        achannel::ReceivedLists y;
        for (unsigned j = 0; j < L; ++j) {
            std::vector<std::uint32_t> members{cw2[j]};
            if (j >= t_max) members.push_back(cw[j]);  // erase the first t_max slots
            while (members.size() < Ka)
                members.push_back(static_cast<std::uint32_t>(rng::uniform_below(eng, 16)));
            y.slots.emplace_back(std::move(members));
        }
        const auto out = rs::list_recover(spec, y, mult);
        CHECK(std::count(out.begin(), out.end(), msg) == 1);
    }
}

TEST_CASE("list_recover finds every codeword meeting the score condition") {
    auto eng = rng::make_engine(56);
    for (const unsigned k_O : {2u, 3u}) {
        const rs::RsCodeSpec spec(gf::Field(4), 15, k_O);
        for (const unsigned mult : {1u, 2u}) {
            for (int trial = 0; trial < 12; ++trial) {
                const auto y = random_lists(eng, 15, 16, 3);
                std::uint64_t entries = 0;
                for (const auto& slot : y.slots) entries += slot.size();
                if (entries == 0) continue;
                const double cost = 0.5 * mult * (mult + 1) * static_cast<double>(entries);
                const double need = std::sqrt(2.0 * (k_O - 1) * cost);

                const auto out = rs::list_recover(spec, y, mult);
                CHECK(static_cast<double>(out.size()) <= rs::list_size_bound(
                                                             static_cast<std::uint64_t>(cost), k_O));
                std::set<std::vector<gf::Elem>> got(out.begin(), out.end());
                std::uint64_t total = 1;
                for (unsigned i = 0; i < k_O; ++i) total *= 16;
                for (std::uint64_t idx = 0; idx < total; ++idx) {
                    const auto msg = message_from_index(idx, k_O, 16);
                    const auto cw = rs_encode(spec, msg);
                    if (static_cast<double>(codeword_score(y, cw, mult)) >= need)
                        CHECK(got.count(msg) == 1);
                }
            }
        }
    }
}

TEST_CASE("crc attach/check round trip and single-bit detection") {
    auto eng = rng::make_engine(57);
    for (const unsigned h : {8u, 14u, 15u}) {
        for (int trial = 0; trial < 50; ++trial) {
            Bits payload(40);
            for (auto& b : payload) b = static_cast<std::uint8_t>(eng() >> 63);
            const auto word = rs::crc_attach(payload, h);
            CHECK(word.size() == payload.size() + h);
            CHECK(rs::crc_check(word, h));
            auto corrupted = word;
            const auto pos = rng::uniform_below(eng, corrupted.size());
            corrupted[pos] ^= 1;
            CHECK(!rs::crc_check(corrupted, h));
        }
    }
}

TEST_CASE("uniformly random words pass the crc at rate about 2^-h") {
    const unsigned h = 8;
    auto eng = rng::make_engine(58);
    const int trials = 200000;
    int passes = 0;
    for (int trial = 0; trial < trials; ++trial) {
        Bits word(32 + h);
        for (auto& b : word) b = static_cast<std::uint8_t>(eng() >> 63);
        passes += rs::crc_check(word, h) ? 1 : 0;
    }
    const double p = std::exp2(-static_cast<double>(h));
    const double sigma = std::sqrt(p * (1 - p) / trials);
    CHECK(std::abs(static_cast<double>(passes) / trials - p) < 3 * sigma);
}

TEST_CASE("coset config consistency checks") {
    rs::CosetSchemeConfig cfg;
    cfg.c = 15;
    cfg.x_p = 7;
    cfg.L = 40;
    cfg.k_O = 13;
    cfg.k = 100;
    cfg.h = 14;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.q() == 256);
    CHECK(cfg.q_bits() == 8);
    CHECK(cfg.k_O * cfg.q_bits() >= cfg.k);  // 104 carried bits, 4 zero-padded

    auto bad = cfg;
    bad.L = 300;  // longer than the field size
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    auto crc_carried = cfg;
    crc_carried.carry_crc = true;  // 114 bits exceed 104
    CHECK_THROWS_AS(crc_carried.validate(), std::invalid_argument);
}

TEST_CASE("coset encoding embeds the RS codeword under the shared prefix") {
    rs::CosetSchemeConfig cfg;
    cfg.c = 10;
    cfg.x_p = 2;
    cfg.L = 20;
    cfg.k_O = 4;
    cfg.k = 30;
    cfg.h = 8;
    cfg.validate();
    auto eng = rng::make_engine(59);
    Bits payload(30);
    for (auto& b : payload) b = static_cast<std::uint8_t>(eng() >> 63);

    const auto plain = rs::coset_encode(cfg, payload, 0);
    for (const auto s : plain) CHECK(s < cfg.q());  // prefix 0: low bits only

    const auto shifted = rs::coset_encode(cfg, payload, 3);
    for (unsigned j = 0; j < cfg.L; ++j) {
        CHECK((shifted[j] >> cfg.q_bits()) == 3);
        CHECK((shifted[j] & (cfg.q() - 1)) == plain[j]);
    }
}

TEST_CASE("coset decode recovers users; carried CRC filters forgeries") {
    for (const bool carry : {false, true}) {
        rs::CosetSchemeConfig cfg;
        cfg.c = 10;
        cfg.x_p = 2;
        cfg.L = 20;
        cfg.k_O = 5;
        cfg.k = carry ? 30 : 38;
        cfg.h = 8;
        cfg.carry_crc = carry;
        cfg.validate();

        auto eng = rng::make_engine(60);
        const unsigned users = 4;
        std::vector<Bits> payloads;
        achannel::ReceivedLists y;
        y.slots.assign(cfg.L, achannel::SlotSymbolSet{});
        std::vector<std::vector<std::uint32_t>> slot_members(cfg.L);
        for (unsigned u = 0; u < users; ++u) {
            Bits payload(cfg.k);
            for (auto& b : payload) b = static_cast<std::uint8_t>(eng() >> 63);
            payloads.push_back(payload);
            const auto cw = rs::coset_encode(cfg, payload, u);  // distinct prefixes
            for (unsigned j = 0; j < cfg.L; ++j) slot_members[j].push_back(cw[j]);
        }
        for (unsigned j = 0; j < cfg.L; ++j)
            y.slots[j] = achannel::SlotSymbolSet(slot_members[j]);

        const auto out = rs::coset_decode(cfg, y);
        for (const auto& p : payloads)
            CHECK(std::count(out.begin(), out.end(), p) == 1);
        if (carry) CHECK(out.size() == users);  // CRC suppresses everything else
    }
}

TEST_CASE("single noiseless user round trips through the coset scheme") {
    rs::CosetSchemeConfig cfg;
    cfg.c = 10;
    cfg.x_p = 2;
    cfg.L = 12;
    cfg.k_O = 3;
    cfg.k = 20;
    cfg.h = 4;
    cfg.carry_crc = true;
    cfg.validate();
    auto eng = rng::make_engine(61);
    Bits payload(20);
    for (auto& b : payload) b = static_cast<std::uint8_t>(eng() >> 63);
    const auto cw = rs::coset_encode(cfg, payload, 1);
    achannel::ReceivedLists y;
    for (const auto s : cw) y.slots.emplace_back(std::vector<std::uint32_t>{s});
    const auto out = rs::coset_decode(cfg, y);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == payload);
}

TEST_CASE("payload hex encoding is MSB-first with nibble padding") {
    CHECK(rs::payload_hex({}) == "");
    CHECK(rs::payload_hex({1}) == "1");
    CHECK(rs::payload_hex({1, 0, 0, 0}) == "8");
    CHECK(rs::payload_hex({1, 1, 1, 1, 0, 0, 0, 0}) == "f0");
    CHECK(rs::payload_hex({0, 1, 0, 1, 1, 0, 1, 0, 1}) == "0b5");  // 9 bits
}

TEST_CASE("naive whole-field scheme rate ceiling") {
    CHECK(rs::naive_scheme_max_rate(50) == doctest::Approx(0.02));
    CHECK(rs::uniform_list_correctable_errors(15, 2, 2, 2) > 0.0);
    // Rate above 1/K_a leaves no usable error budget at scale.
    CHECK(rs::uniform_list_correctable_errors(15, 8, 4, 1) < 0.0);
}
