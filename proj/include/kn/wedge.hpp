#pragma once

// Fermion representation: sections ψ_{n,p,j} ⊗ v_a of the trivial rank-r
// bundle, their linear enumeration, semi-infinite wedge sectors of fixed
// charge and the regularized action of D_g.

#include "kn/affine.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace kn {

struct Shape {
  int N = 1;     // punctures
  int r = 1;     // bundle rank
  int dimV = 1;  // dimension of V_τ

  int block() const { return N * r * dimV; }
};

struct SectionIndex {
  int n = 0;
  int p = 1;  // 1..N
  int j = 0;  // 0..r-1
  int a = 1;  // 1..dimV

  friend bool operator==(const SectionIndex&, const SectionIndex&) = default;
};

/// M = n·B + ((p-1)r + j)·dimV + (a-1); throws std::out_of_range.
int linear_index(const SectionIndex& s, const Shape& shape);
SectionIndex section_index(int M, const Shape& shape);

/// g acting on V_τ through matrices τ(x_i) of a basis x_i of g, and an
/// optional connection form on the trivial rank-r bundle.
struct RepresentationData {
  int r = 1;
  int dimV = 1;
  std::vector<MatrixElement> generators;
  std::vector<Matrix> tau;
  /// r×r entries of weight-1 forms; empty means the zero connection.
  std::vector<std::vector<RationalFunction>> connection;

  /// g = tag of the given rank acting on C^rank by matrix multiplication.
  static RepresentationData fundamental(AlgebraTag tag, int rank, int bundle_rank = 1);

  /// Checks sizes, τ([x_i,x_j]) = [τ(x_i), τ(x_j)] and that the connection
  /// has at most simple poles at the punctures and infinity.
  void validate(const Geometry& geom) const;
  /// Coefficients of x in the generators; throws if x is not in their span.
  std::vector<Rational> coordinates(const MatrixElement& x) const;
  Matrix tau_of(const MatrixElement& x) const;
};

/// ψ_{n,j,p} as r functions: A_{n,p} in component j. Verifies the orders at
/// the punctures and at infinity.
std::vector<FormElement> section_basis(const GeometryPtr& geom, const RepresentationData& rep, int n, int j, int p);

/// Matrix over the linear index set with finitely many nonzero entries per
/// column, all within rows [M + lo, M + hi] of column M. Columns are built on
/// demand and cached; a column outside its band is a hard error.
class BandedOperator {
 public:
  using Column = std::vector<std::pair<int, Rational>>;
  using Generator = std::function<Column(int)>;

  BandedOperator() : BandedOperator(0, 0, nullptr) {}
  BandedOperator(int lo, int hi, Generator gen);

  int lo() const { return impl_->lo; }
  int hi() const { return impl_->hi; }
  bool is_zero_operator() const { return !impl_->gen; }

  const Column& column(int M) const;
  Rational entry(int row, int col) const;

  friend BandedOperator operator+(const BandedOperator& a, const BandedOperator& b);
  friend BandedOperator operator*(const Rational& c, const BandedOperator& a);

 private:
  struct Impl {
    int lo, hi;
    Generator gen;
    std::mutex mu;
    std::map<int, Column> cache;
  };
  std::shared_ptr<Impl> impl_;
};

/// ψ_{N_0} ∧ ψ_{N_1} ∧ ... with N_k = k + charge for k >= explicit.size().
/// Stored canonically: the prefix never ends with a tail entry.
class WedgeMonomial {
 public:
  /// Vacuum ψ_m ∧ ψ_{m+1} ∧ ...
  explicit WedgeMonomial(int charge = 0) : charge_(charge) {}
  /// Throws std::invalid_argument unless strictly increasing and below the tail.
  WedgeMonomial(int charge, std::vector<int> explicit_entries);

  int charge() const { return charge_; }
  const std::vector<int>& entries() const { return entries_; }
  /// First index of the tail: everything >= it is occupied.
  int tail_start() const { return static_cast<int>(entries_.size()) + charge_; }
  bool occupied(int index) const;
  int degree() const;

  friend auto operator<=>(const WedgeMonomial&, const WedgeMonomial&) = default;

 private:
  void canonicalize();

  int charge_;
  std::vector<int> entries_;
};

std::string to_string(const WedgeMonomial& m);

/// Σ_k (N_k - k - charge).
int monomial_degree(const WedgeMonomial& m);

/// All monomials of the charge with the given degree (<= 0); there are p(-degree).
std::vector<WedgeMonomial> enumerate_monomials(int charge, int degree);

class WedgeVector {
 public:
  WedgeVector() = default;
  explicit WedgeVector(const WedgeMonomial& m, const Rational& c = Rational(1)) { add(m, c); }

  const std::map<WedgeMonomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Rational coefficient(const WedgeMonomial& m) const;
  void add(const WedgeMonomial& m, const Rational& c);

  WedgeVector& operator+=(const WedgeVector& o);
  WedgeVector& operator-=(const WedgeVector& o);
  WedgeVector& operator*=(const Rational& c);
  friend WedgeVector operator+(WedgeVector a, const WedgeVector& b) { return a += b; }
  friend WedgeVector operator-(WedgeVector a, const WedgeVector& b) { return a -= b; }
  friend WedgeVector operator*(const Rational& c, WedgeVector a) { return a *= c; }
  friend bool operator==(const WedgeVector&, const WedgeVector&) = default;

 private:
  std::map<WedgeMonomial, Rational> terms_;
};

/// Diagonal units act by [I occupied] - [I >= cutoff]; the default cutoff is
/// the charge of the monomial (normal ordering against its own vacuum).
struct Regularization {
  std::optional<int> cutoff;
};

WedgeVector wedge_apply(const BandedOperator& op, const WedgeVector& v, Regularization reg = {});
WedgeVector wedge_apply(const BandedOperator& op, const WedgeMonomial& m, Regularization reg = {});

/// The fermion representation of D_g on one geometry.
class FermionRep {
 public:
  FermionRep(std::shared_ptr<const AffineAlgebra> algebra, RepresentationData rep);

  const AffineAlgebra& algebra() const { return *algebra_; }
  const GeometryPtr& geometry() const { return algebra_->geometry(); }
  const RepresentationData& representation() const { return rep_; }
  const Shape& shape() const { return shape_; }

  /// x ⊗ A_{k,q}; cached per generator.
  BandedOperator current(const MatrixElement& x, int k, int q) const;
  /// x ⊗ A for any function A.
  BandedOperator matrix_of_current(const MatrixElement& x, const FormElement& A) const;
  /// ∇_e for e = e_{k,q}; cached.
  BandedOperator field(int k, int q) const;
  BandedOperator matrix_of_field(const FormElement& e) const;
  BandedOperator field_operator(const KNExpansion& e) const;
  BandedOperator current_operator(const CurrentElement& x) const;
  /// r(X) for the current and vector-field parts; the central part is ignored.
  BandedOperator of(const DgElement& X) const;

  /// The vector ([r(X), r(Y)] - r([X,Y])) v.
  WedgeVector defect(const DgElement& X, const DgElement& Y, const WedgeVector& v, Regularization reg = {}) const;

  /// Scalar of the defect on the vacuum of the charge, verified on `checks`
  /// further monomials; throws std::logic_error if it is not scalar.
  Rational extract_cocycle(const DgElement& X, const DgElement& Y, int charge, int checks = 5,
                           Regularization reg = {}) const;

 private:
  BandedOperator build_current(const Matrix& tau, int k, int q) const;

  std::shared_ptr<const AffineAlgebra> algebra_;
  RepresentationData rep_;
  Shape shape_;
  int field_extra_;  // degree width of ∇_e beyond e's own degree
  mutable std::mutex mu_;
  mutable std::map<std::tuple<int, int, int>, BandedOperator> generator_cache_;  // (basis index, k, q)
  mutable std::map<std::pair<int, int>, BandedOperator> field_cache_;
};

}  // namespace kn
