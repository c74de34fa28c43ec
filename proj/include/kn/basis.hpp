#pragma once

// Genus-0 multipoint Krichever-Novikov bases. In-points are rational
// punctures P_1..P_N, the out-point is infinity, and a weight-λ form is
// stored as a rational function g standing for g (dz)^λ.

#include "kn/rational_function.hpp"

#include <compare>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

namespace kn {

struct BasisIndex {
  int weight = 0;
  int n = 0;
  int p = 1;  // 1-based puncture index

  friend auto operator<=>(const BasisIndex&, const BasisIndex&) = default;
};

std::string to_string(const BasisIndex& i);

/// Truncated local series sum_i coeffs[i] t^(lead+i); exact through order
/// lead + size - 1. The leading stored coefficient may be zero.
struct Series {
  int lead = 0;
  std::vector<Rational> coeffs;

  int known_through() const { return lead + static_cast<int>(coeffs.size()) - 1; }
  /// Coefficient of t^order; zero below lead, throws beyond the known range.
  Rational at(int order) const;
};

Series series_of(const RationalFunction& f, const Point& at, int through);
Series operator*(const Series& a, const Series& b);
Series operator+(const Series& a, const Series& b);
Series operator*(const Series& a, const Rational& c);
/// d/dt, which is d/dz at a finite point.
Series derivative(const Series& a);

/// Order of f^λ_{n,p} at P_q.
inline int local_order(int weight, int n, int p, int q) { return n - weight + (q == p ? 0 : 1); }
/// Order at infinity of the function part of f^λ_{n,p} for N punctures.
inline int infinity_order(int N, int weight, int n) { return -N * (n + 1 - weight) + 1; }

class Geometry {
 public:
  explicit Geometry(std::vector<Rational> punctures);

  int size() const { return static_cast<int>(punctures_.size()); }
  /// 1-based, as in the index p of f^λ_{n,p}.
  const Rational& puncture(int p) const;
  const std::vector<Rational>& punctures() const { return punctures_; }
  /// Punctures in order, then infinity.
  std::vector<Point> points() const;

  /// The rational function of f^λ_{n,p}; computed once and cached.
  const RationalFunction& basis_function(const BasisIndex& i) const;

  /// Local series of f^λ_{n,p} at P_q, exact at least through `through`.
  Series basis_series(const BasisIndex& i, int q, int through) const;

  friend bool operator==(const Geometry& a, const Geometry& b) { return a.punctures_ == b.punctures_; }

 private:
  std::vector<Rational> punctures_;
  mutable std::mutex mu_;
  mutable std::map<BasisIndex, std::unique_ptr<RationalFunction>> cache_;
  mutable std::map<std::pair<BasisIndex, int>, Series> series_cache_;
};

using GeometryPtr = std::shared_ptr<const Geometry>;

GeometryPtr make_geometry(std::vector<Rational> punctures);
/// Parses puncture strings such as "0", "1/2"; throws std::invalid_argument.
GeometryPtr make_geometry(const std::vector<std::string>& punctures);

/// func (dz)^weight on the geometry.
struct FormElement {
  RationalFunction func;
  int weight = 0;
  GeometryPtr geom;

  /// Throws std::domain_error unless every finite pole is a puncture.
  void check_support() const;
  /// Order of the form (not just of func) at a point; dz has order -2 at infinity.
  int order_at(const Point& at) const;
};

void require_same_geometry(const FormElement& a, const FormElement& b);

/// Finite linear combination of basis elements f^λ_{n,p} of one weight.
class KNExpansion {
 public:
  using Key = std::pair<int, int>;  // (n, p)

  explicit KNExpansion(int weight = 0) : weight_(weight) {}

  int weight() const { return weight_; }
  const std::map<Key, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Rational coefficient(int n, int p) const;
  void add(int n, int p, const Rational& c);

  /// (min degree, max degree) of the support; nullopt for zero.
  std::optional<std::pair<int, int>> degree_window() const;

  KNExpansion& operator+=(const KNExpansion& o);
  KNExpansion& operator-=(const KNExpansion& o);
  KNExpansion& operator*=(const Rational& c);
  friend KNExpansion operator+(KNExpansion a, const KNExpansion& b) { return a += b; }
  friend KNExpansion operator-(KNExpansion a, const KNExpansion& b) { return a -= b; }
  friend KNExpansion operator*(KNExpansion a, const Rational& c) { return a *= c; }
  friend KNExpansion operator*(const Rational& c, KNExpansion a) { return a *= c; }
  friend bool operator==(const KNExpansion&, const KNExpansion&) = default;

  static KNExpansion single(int weight, int n, int p, const Rational& c = Rational(1));

 private:
  int weight_;
  std::map<Key, Rational> terms_;
};

/// f^λ_{n,p}; verifies its orders at every puncture and at infinity and the
/// leading coefficient 1 at P_p. Throws std::out_of_range for a bad p.
FormElement make_basis(const GeometryPtr& geom, int weight, int n, int p);

/// Named elements: A_{n,p} = f^0_{n,p}, e_{n,p} = f^-1_{n,p},
/// ω^{n,p} = f^1_{-n,p}, Ω^{n,p} = f^2_{-n,p}.
FormElement basis_A(const GeometryPtr& geom, int n, int p);
FormElement basis_e(const GeometryPtr& geom, int n, int p);
FormElement basis_omega(const GeometryPtr& geom, int n, int p);
FormElement basis_Omega(const GeometryPtr& geom, int n, int p);

/// Sum of residues of f g dz over the in-points; cross-checked against minus
/// the residue at infinity on every call. Weights must add up to 1.
Rational kn_pairing(const FormElement& f, const FormElement& g);

/// Coefficients by pairing against the dual basis.
KNExpansion expand_in_basis(const FormElement& f);

/// Expansion of a weight-λ form from its local series at every puncture
/// (local[q-1] at P_q) and a lower bound for the order of the function at
/// infinity. The series must be exact through floor(-order_inf / N).
KNExpansion expand_from_series(const GeometryPtr& geom, int weight, const std::vector<Series>& local, int order_inf);

/// Reference expansion that computes every coefficient as a residue pairing.
KNExpansion expand_by_pairing(const FormElement& f);

/// Sum of coefficient times basis element.
FormElement reconstruct(const GeometryPtr& geom, const KNExpansion& x);

/// Degree range of the nonzero expansion terms; nullopt for the zero form.
std::optional<std::pair<int, int>> homogeneous_degree_window(const FormElement& f);

}  // namespace kn
