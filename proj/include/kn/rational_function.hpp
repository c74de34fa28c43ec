#pragma once

#include "kn/polynomial.hpp"

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kn {

/// A point of the projective line: a rational coordinate or infinity.
class Point {
 public:
  static Point at(Rational x) {
    x.canonicalize();
    return Point(std::move(x), false);
  }
  static Point infinity() { return Point(Rational(0), true); }

  bool is_infinity() const { return infinite_; }
  /// Coordinate; only meaningful for finite points.
  const Rational& coordinate() const { return x_; }

  friend bool operator==(const Point& a, const Point& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.x_ == b.x_);
  }
  std::string to_string() const;

 private:
  Point(Rational x, bool inf) : x_(std::move(x)), infinite_(inf) {}
  Rational x_;
  bool infinite_;
};

/// Order of the zero function.
inline constexpr int kPositiveInfinity = std::numeric_limits<int>::max();

/// Exact ratio of polynomials in canonical form: gcd-reduced with a monic
/// denominator. When every denominator root is rational the factorization is
/// kept alongside, which makes products, sums and derivatives cheap.
class RationalFunction {
 public:
  using Roots = std::vector<std::pair<Rational, int>>;  // (root, multiplicity), ascending

  RationalFunction() : den_(Rational(1)), factored_(true) {}
  RationalFunction(Polynomial p);  // NOLINT(google-explicit-constructor)
  RationalFunction(const Rational& c) : RationalFunction(Polynomial(c)) {}  // NOLINT
  RationalFunction(long c) : RationalFunction(Polynomial(c)) {}  // NOLINT
  RationalFunction(Polynomial num, Polynomial den);

  /// num / prod (z - root)^mult; roots need not be reduced against num.
  static RationalFunction from_factored(Polynomial num, Roots roots);
  static RationalFunction z();

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool has_rational_poles() const { return factored_; }
  /// Finite poles with their orders; throws if some pole is irrational.
  const Roots& poles() const;

  RationalFunction derivative() const;
  /// Evaluation at a point that is not a pole.
  Rational operator()(const Rational& x) const;

  RationalFunction& operator+=(const RationalFunction& o);
  RationalFunction& operator-=(const RationalFunction& o);
  RationalFunction& operator*=(const RationalFunction& o);
  RationalFunction& operator*=(const Rational& c);

  friend RationalFunction operator+(RationalFunction a, const RationalFunction& b) { return a += b; }
  friend RationalFunction operator-(RationalFunction a, const RationalFunction& b) { return a -= b; }
  friend RationalFunction operator-(RationalFunction a) { return a *= Rational(-1); }
  friend RationalFunction operator*(RationalFunction a, const RationalFunction& b) { return a *= b; }
  friend RationalFunction operator*(RationalFunction a, const Rational& c) { return a *= c; }
  friend RationalFunction operator*(const Rational& c, RationalFunction a) { return a *= c; }
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  std::string to_string() const;

 private:
  void cancel_factored();
  void rebuild_denominator();
  void try_factor();

  Polynomial num_;
  Polynomial den_;
  Roots roots_;
  bool factored_ = false;
};

/// Local expansion f = sum_{i} c_i t^(leading_order + i) with t = z - p, or
/// t = 1/z at infinity.
struct LaurentExpansion {
  Point at = Point::infinity();
  bool identically_zero = false;
  int leading_order = 0;
  std::vector<Rational> coefficients;
  int truncation_order = 0;  // first order not represented

  Rational coefficient(int order) const;
};

LaurentExpansion laurent_expand(const RationalFunction& f, const Point& at, int terms);

/// Vanishing order at the point (negative for poles); kPositiveInfinity for 0.
int order_at(const RationalFunction& f, const Point& at);

/// Residue of the 1-form f dz at the point. At infinity the chart w = 1/z is
/// used explicitly: f dz = -f(1/w) w^-2 dw.
Rational residue_form(const RationalFunction& f, const Point& at);

/// Sum of residues of f dz over all finite poles plus infinity is zero.
bool residue_sum_check(const RationalFunction& f);

/// Parses expressions in z with + - * / ^ (integer exponents), parentheses
/// and integer literals, so "3/4*z" is (3/4)z. Throws std::invalid_argument.
RationalFunction parse_rational_function(const std::string& text);

}  // namespace kn
