#include "ccs/gf.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace ccs::gf {

namespace {

// Primitive polynomials, one per extension degree. Classic LFSR-tap table;
// every entry is order-checked again at construction time.
constexpr std::uint32_t kDefaultModulus[17] = {
    0,       0x3,    0x7,    0xB,    0x13,   0x25,   0x43,    0x89,   0x11D,
    0x211,   0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003,  0x1100B,
};

}  // namespace

std::uint32_t Field::default_modulus(unsigned m) {
    if (m < 1 || m > 16) throw std::invalid_argument("gf: extension degree must be in [1,16]");
    return kDefaultModulus[m];
}

Field::Field(unsigned m) : Field(m, default_modulus(m)) {}

Field::Field(unsigned m, std::uint32_t modulus) : m_(m), modulus_(modulus) {
    if (m < 1 || m > 16) throw std::invalid_argument("gf: extension degree must be in [1,16]");
    if (static_cast<unsigned>(std::bit_width(modulus)) != m + 1)
        throw std::invalid_argument("gf: modulus degree does not match m");
    build_tables();
}

void Field::build_tables() {
    const std::uint32_t q = size();
    log_.assign(q, q);  // q = "unset" sentinel
    alog_.assign(q - 1, 0);
    std::uint32_t b = 1;
    for (std::uint32_t i = 0; i < q - 1; ++i) {
        if (log_[b] != q) throw std::invalid_argument("gf: modulus is not primitive");
        log_[b] = i;
        alog_[i] = b;
        b <<= 1;
        if (b & q) b ^= modulus_;
    }
    if (b != 1) throw std::invalid_argument("gf: modulus is not primitive");
}

Elem Field::inv(Elem a) const {
    if (a == 0) throw std::domain_error("gf: inverse of zero");
    return alog_[(order() - log_[a]) % order()];
}

Elem Field::pow(Elem a, std::uint64_t e) const {
    if (a == 0) return e == 0 ? 1 : 0;
    const std::uint64_t r = (static_cast<std::uint64_t>(log_[a]) * (e % order())) % order();
    return alog_[r];
}

void Polynomial::normalize() {
    while (!coef.empty() && coef.back() == 0) coef.pop_back();
}

Elem poly_eval(const Field& f, const Polynomial& p, Elem x) {
    Elem acc = 0;
    for (auto it = p.coef.rbegin(); it != p.coef.rend(); ++it) acc = f.add(f.mul(acc, x), *it);
    return acc;
}

Polynomial poly_add(const Field& f, const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    r.coef.resize(std::max(a.coef.size(), b.coef.size()), 0);
    for (std::size_t i = 0; i < r.coef.size(); ++i)
        r.coef[i] = f.add(a.coefficient(i), b.coefficient(i));
    r.normalize();
    return r;
}

Polynomial poly_mul(const Field& f, const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    Polynomial r;
    r.coef.assign(a.coef.size() + b.coef.size() - 1, 0);
    for (std::size_t i = 0; i < a.coef.size(); ++i) {
        if (a.coef[i] == 0) continue;
        for (std::size_t j = 0; j < b.coef.size(); ++j)
            r.coef[i + j] = f.add(r.coef[i + j], f.mul(a.coef[i], b.coef[j]));
    }
    r.normalize();
    return r;
}

Polynomial poly_scale(const Field& f, const Polynomial& a, Elem s) {
    if (s == 0) return {};
    Polynomial r = a;
    for (auto& c : r.coef) c = f.mul(c, s);
    return r;
}

Elem BivariatePolynomial::get(unsigned dx, unsigned dy) const {
    const auto it = coef.find({dx, dy});
    return it == coef.end() ? 0 : it->second;
}

void BivariatePolynomial::set(const Field&, unsigned dx, unsigned dy, Elem v) {
    if (v == 0)
        coef.erase({dx, dy});
    else
        coef[{dx, dy}] = v;
}

void BivariatePolynomial::add_to(const Field& f, unsigned dx, unsigned dy, Elem v) {
    if (v == 0) return;
    const Key key{dx, dy};
    const auto it = coef.find(key);
    if (it == coef.end()) {
        coef.emplace(key, v);
        return;
    }
    it->second = f.add(it->second, v);
    if (it->second == 0) coef.erase(it);
}

unsigned BivariatePolynomial::y_degree() const {
    unsigned d = 0;
    for (const auto& [key, _] : coef) d = std::max(d, key.second);
    return d;
}

long weighted_degree(const BivariatePolynomial& q, unsigned k_O) {
    if (q.is_zero()) throw std::domain_error("weighted_degree: zero polynomial");
    long best = -1;
    for (const auto& [key, _] : q.coef)
        best = std::max(best, static_cast<long>(key.first) +
                                  static_cast<long>(k_O - 1) * static_cast<long>(key.second));
    return best;
}

Elem bivariate_eval(const Field& f, const BivariatePolynomial& q, Elem x0, Elem y0) {
    Elem acc = 0;
    for (const auto& [key, c] : q.coef)
        acc = f.add(acc, f.mul(c, f.mul(f.pow(x0, key.first), f.pow(y0, key.second))));
    return acc;
}

Elem hasse_derivative_eval(const Field& f, const BivariatePolynomial& q, unsigned a, unsigned b,
                           Elem x0, Elem y0) {
    Elem acc = 0;
    for (const auto& [key, c] : q.coef) {
        const auto [r, s] = key;
        if (r < a || s < b) continue;
        if (!binom_odd(r, a) || !binom_odd(s, b)) continue;
        acc = f.add(acc, f.mul(c, f.mul(f.pow(x0, r - a), f.pow(y0, s - b))));
    }
    return acc;
}

Polynomial substitute_y(const Field& f, const BivariatePolynomial& q, const Polynomial& fx) {
    // Horner in y with polynomial coefficients.
    std::vector<Polynomial> y_coef(q.y_degree() + 1);
    for (const auto& [key, c] : q.coef) {
        auto& p = y_coef[key.second].coef;
        if (p.size() <= key.first) p.resize(key.first + 1, 0);
        p[key.first] = c;
    }
    for (auto& p : y_coef) p.normalize();
    Polynomial acc;
    for (auto it = y_coef.rbegin(); it != y_coef.rend(); ++it)
        acc = poly_add(f, poly_mul(f, acc, fx), *it);
    return acc;
}

BivariatePolynomial shift_y_root(const Field& f, const BivariatePolynomial& q, Elem gamma) {
    BivariatePolynomial r;
    for (const auto& [key, c] : q.coef) {
        const auto [a, b] = key;
        // (x y + gamma)^b expanded with mod-2 binomials.
        for (unsigned j = 0; j <= b; ++j) {
            if (!binom_odd(b, j)) continue;
            r.add_to(f, a + j, j, f.mul(c, f.pow(gamma, b - j)));
        }
    }
    return r;
}

BivariatePolynomial strip_x_factor(const BivariatePolynomial& q) {
    if (q.is_zero()) return q;
    unsigned shift = UINT32_MAX;
    for (const auto& [key, _] : q.coef) shift = std::min(shift, key.first);
    if (shift == 0) return q;
    BivariatePolynomial r;
    for (const auto& [key, c] : q.coef) r.coef[{key.first - shift, key.second}] = c;
    return r;
}

}  // namespace ccs::gf
