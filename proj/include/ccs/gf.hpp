#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

// GF(2^m) arithmetic plus the univariate / bivariate polynomial machinery
// used by the Reed-Solomon list-recovery decoder.
//
// Elements use the polynomial basis: bit i of the integer value is the
// coefficient of x^i. Multiplication goes through log/antilog tables, so a
// Field object is built once and then read concurrently without locking.
namespace ccs::gf {

using Elem = std::uint32_t;

class Field {
public:
    // Field with the built-in primitive modulus for this extension degree.
    explicit Field(unsigned m);
    // Field with an explicit modulus (bit mask, degree-m term included).
    // The modulus must be primitive; this is checked exhaustively.
    Field(unsigned m, std::uint32_t modulus);

    unsigned m() const { return m_; }
    std::uint32_t modulus() const { return modulus_; }
    std::uint32_t size() const { return 1u << m_; }
    std::uint32_t order() const { return size() - 1; }  // multiplicative group order

    static std::uint32_t default_modulus(unsigned m);

    bool valid(Elem a) const { return a < size(); }

    Elem add(Elem a, Elem b) const { return a ^ b; }
    Elem sub(Elem a, Elem b) const { return a ^ b; }
    Elem mul(Elem a, Elem b) const {
        if (a == 0 || b == 0) return 0;
        std::uint32_t s = log_[a] + log_[b];
        if (s >= order()) s -= order();
        return alog_[s];
    }
    Elem inv(Elem a) const;
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
    Elem pow(Elem a, std::uint64_t e) const;

private:
    void build_tables();

    unsigned m_;
    std::uint32_t modulus_;
    std::vector<std::uint32_t> log_;   // log_[a] for a != 0
    std::vector<std::uint32_t> alog_;  // alog_[i] = alpha^i
};

// Univariate polynomial, coefficients lowest degree first. The zero
// polynomial is the empty vector; otherwise the trailing coefficient is
// nonzero.
struct Polynomial {
    std::vector<Elem> coef;

    Polynomial() = default;
    explicit Polynomial(std::vector<Elem> c) : coef(std::move(c)) { normalize(); }

    void normalize();
    bool is_zero() const { return coef.empty(); }
    int degree() const { return static_cast<int>(coef.size()) - 1; }
    Elem coefficient(std::size_t i) const { return i < coef.size() ? coef[i] : 0; }

    bool operator==(const Polynomial& o) const { return coef == o.coef; }
};

Elem poly_eval(const Field& f, const Polynomial& p, Elem x);
Polynomial poly_add(const Field& f, const Polynomial& a, const Polynomial& b);
Polynomial poly_mul(const Field& f, const Polynomial& a, const Polynomial& b);
Polynomial poly_scale(const Field& f, const Polynomial& a, Elem s);

// Sparse bivariate polynomial over GF(2^m); keys are (deg_x, deg_y) and no
// zero coefficient is ever stored.
struct BivariatePolynomial {
    using Key = std::pair<unsigned, unsigned>;
    std::map<Key, Elem> coef;

    bool is_zero() const { return coef.empty(); }
    Elem get(unsigned dx, unsigned dy) const;
    void set(const Field& f, unsigned dx, unsigned dy, Elem v);
    void add_to(const Field& f, unsigned dx, unsigned dy, Elem v);
    unsigned y_degree() const;
};

// Maximum over monomials of deg_x + (k_O - 1) * deg_y. Throws on the zero
// polynomial.
long weighted_degree(const BivariatePolynomial& q, unsigned k_O);

Elem bivariate_eval(const Field& f, const BivariatePolynomial& q, Elem x0, Elem y0);

// Hasse derivative of order (a, b) evaluated at (x0, y0). Binomial
// coefficients are reduced mod 2 (Lucas), which is what characteristic 2
// demands.
Elem hasse_derivative_eval(const Field& f, const BivariatePolynomial& q, unsigned a, unsigned b,
                           Elem x0, Elem y0);

// q(x, f(x)) collapsed to a univariate polynomial. Zero result is exactly
// the condition for (y - f(x)) to divide q.
Polynomial substitute_y(const Field& f, const BivariatePolynomial& q, const Polynomial& fx);

// q(x, x*y + gamma), the Roth-Ruckenstein descent step.
BivariatePolynomial shift_y_root(const Field& f, const BivariatePolynomial& q, Elem gamma);

// Divide out the largest power of x dividing q (no-op on zero).
BivariatePolynomial strip_x_factor(const BivariatePolynomial& q);

// C(n, k) parity in GF(2): odd iff k is a submask of n.
inline bool binom_odd(unsigned n, unsigned k) { return (n & k) == k; }

}  // namespace ccs::gf
