#pragma once

#include "kn/rational.hpp"

#include <span>
#include <utility>
#include <vector>

namespace kn {

/// Dense univariate polynomial over Q, lowest degree first. The zero
/// polynomial has no coefficients; otherwise the leading coefficient is nonzero.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coeffs);
  Polynomial(const Rational& constant);  // NOLINT(google-explicit-constructor)
  Polynomial(long constant) : Polynomial(Rational(constant)) {}  // NOLINT

  static Polynomial monomial(const Rational& c, int degree);
  /// (z - root)^power
  static Polynomial linear_power(const Rational& root, int power);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  std::span<const Rational> coefficients() const { return coeffs_; }
  /// Coefficient of z^i; zero outside the stored range.
  Rational coeff(int i) const;
  const Rational& leading() const { return coeffs_.back(); }

  Rational operator()(const Rational& x) const;

  Polynomial derivative() const;
  /// p(z + a)
  Polynomial taylor_shift(const Rational& a) const;
  /// z^deg * p(1/z)
  Polynomial reversed() const;
  Polynomial monic() const;

  /// Exact division by (z - a) when p(a) = 0; throws otherwise.
  Polynomial divide_linear(const Rational& a) const;
  /// Multiplicity of a as a root; zero polynomial is a precondition violation.
  int root_multiplicity(const Rational& a) const;
  /// First `count` Taylor coefficients at a, i.e. coefficients of p(a + t).
  std::vector<Rational> taylor_coefficients(const Rational& a, int count) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  /// Euclidean division: (quotient, remainder).
  static std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b);
  /// Monic gcd; gcd(0, 0) = 0.
  static Polynomial gcd(Polynomial a, Polynomial b);

  /// All distinct rational roots with multiplicity, ascending. Searches
  /// candidates by the rational root theorem; returns false in `complete`
  /// when irreducible factors of degree >= 2 remain.
  std::vector<std::pair<Rational, int>> rational_roots(bool* complete = nullptr) const;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// Truncated power-series quotient a/b to `terms` coefficients; b[0] != 0.
std::vector<Rational> series_divide(std::span<const Rational> a, std::span<const Rational> b, int terms);

}  // namespace kn
