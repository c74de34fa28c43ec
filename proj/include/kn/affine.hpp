#pragma once

// Current algebras g ⊗ A for g = gl(r), sl(r), gl(1), their central
// extension by the function cocycle, and the mixed algebra D_g = g ⊗ A ⊕ L.

#include "kn/cocycles.hpp"
#include "kn/linalg.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace kn {

enum class AlgebraTag { GL, SL, GL1 };

std::string to_string(AlgebraTag t);
AlgebraTag parse_algebra_tag(const std::string& text);

/// Element of the finite-dimensional matrix algebra.
struct MatrixElement {
  Matrix entries;
  AlgebraTag tag = AlgebraTag::GL;

  /// Throws std::invalid_argument on a non-square, empty, non-traceless SL
  /// or non-1x1 GL1 matrix.
  void validate() const;
  int rank() const { return entries.rows(); }

  friend bool operator==(const MatrixElement&, const MatrixElement&) = default;
};

MatrixElement commutator(const MatrixElement& x, const MatrixElement& y);

/// E_ij for GL and GL1; E_ij (i != j) followed by E_ii - E_{i+1,i+1} for SL.
std::vector<MatrixElement> standard_basis(AlgebraTag tag, int rank);

/// α = a·tr(xy) + b·tr(x)tr(y).
struct BilinearForm {
  Rational trace = 1;
  Rational trace_trace = 0;

  static BilinearForm trace_form() { return {1, 0}; }
  static BilinearForm trace_trace_form() { return {0, 1}; }
  Rational operator()(const MatrixElement& x, const MatrixElement& y) const;
};

/// Basis dual to `basis` under α; throws std::invalid_argument if α is
/// degenerate on it.
std::vector<MatrixElement> dual_basis(const std::vector<MatrixElement>& basis, const BilinearForm& alpha);

/// Σ x_{n,p} ⊗ A_{n,p}, stored by basis index, zero matrices dropped.
class CurrentElement {
 public:
  using Key = std::pair<int, int>;

  CurrentElement(AlgebraTag tag, int rank) : tag_(tag), rank_(rank) {}

  static CurrentElement single(const MatrixElement& x, int n, int p);
  /// x ⊗ f for a function f, expanded in the basis.
  static CurrentElement tensor(const MatrixElement& x, const FormElement& f);

  AlgebraTag tag() const { return tag_; }
  int rank() const { return rank_; }
  const std::map<Key, Matrix>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(int n, int p, const Matrix& m);
  /// The (i,j) entry function as an expansion.
  KNExpansion entry(int i, int j) const;

  CurrentElement& operator+=(const CurrentElement& o);
  CurrentElement& operator-=(const CurrentElement& o);
  CurrentElement& operator*=(const Rational& c);
  friend CurrentElement operator+(CurrentElement a, const CurrentElement& b) { return a += b; }
  friend CurrentElement operator-(CurrentElement a, const CurrentElement& b) { return a -= b; }
  friend CurrentElement operator*(const Rational& c, CurrentElement a) { return a *= c; }
  friend bool operator==(const CurrentElement&, const CurrentElement&) = default;

 private:
  AlgebraTag tag_;
  int rank_;
  std::map<Key, Matrix> terms_;
};

/// current + central·t.
struct AffineElement {
  CurrentElement current;
  Rational central;

  friend bool operator==(const AffineElement&, const AffineElement&) = default;
};

/// current + vector_field + central·t.
struct DgElement {
  CurrentElement current;
  KNExpansion vector_field{-1};
  Rational central;

  friend bool operator==(const DgElement&, const DgElement&) = default;
};

AffineElement operator+(const AffineElement& a, const AffineElement& b);
AffineElement operator*(const Rational& c, const AffineElement& a);
DgElement operator+(const DgElement& a, const DgElement& b);
DgElement operator*(const Rational& c, const DgElement& a);

struct AffineSplit {
  CurrentElement plus;
  AffineElement zero;  // includes the central term
  CurrentElement minus;
};

/// Bracket context for one geometry, algebra and choice of α, R, T; caches
/// the structure and cocycle tables it uses.
class AffineAlgebra {
 public:
  AffineAlgebra(GeometryPtr geom, AlgebraTag tag, int rank, BilinearForm alpha = {}, ProjectiveConnection R = {},
                AffineConnection T = {});

  const GeometryPtr& geometry() const { return geom_; }
  AlgebraTag tag() const { return tag_; }
  int rank() const { return rank_; }
  const BilinearForm& alpha() const { return alpha_; }

  CurrentElement zero() const { return {tag_, rank_}; }

  /// [x⊗f, y⊗g] = [x,y]⊗fg + α(x,y)γ^A(f,g) t.
  AffineElement bracket(const AffineElement& x, const AffineElement& y) const;
  /// [e, x⊗A] = x⊗(e.A) + tr(x)γ^m(e,A) t and [e,f] = [e,f] + γ^L(e,f) t on
  /// top of the affine bracket.
  DgElement dg_bracket(const DgElement& x, const DgElement& y) const;
  /// e.X on currents, without central term.
  CurrentElement act(const KNExpansion& e, const CurrentElement& x) const;

  /// x ⊗ 1 with 1 = Σ_p A_{0,p}.
  AffineElement embed_finite(const MatrixElement& x) const;

  /// Splits each entry function with triangular_split; t goes to the zero part.
  AffineSplit split(const AffineElement& x, SplitVariant variant = SplitVariant::standard()) const;

  /// Membership in g ⊗ A^(1)_-: every entry function vanishes at infinity.
  bool is_regular(const CurrentElement& x) const;

  const CocycleTable& function_cocycle() const { return cA_; }
  const CocycleTable& field_cocycle() const { return cL_; }
  const CocycleTable& mixing_cocycle() const { return cM_; }
  const StructureTable& product_table() const { return prod_; }
  const StructureTable& bracket_table() const { return brk_; }
  const StructureTable& action_table() const { return act_; }

 private:
  void check(const CurrentElement& x) const;

  GeometryPtr geom_;
  AlgebraTag tag_;
  int rank_;
  BilinearForm alpha_;
  StructureTable prod_, brk_, act_;
  CocycleTable cA_, cL_, cM_;
};

}  // namespace kn
