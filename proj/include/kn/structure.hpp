#pragma once

// Products, brackets and Lie derivatives of KN forms, their structure
// constants in the basis, almost-grading bounds and triangular splits.

#include "kn/basis.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>

namespace kn {

/// Pointwise product; weights add.
FormElement form_product(const FormElement& a, const FormElement& b);
/// [e, f] = (e f' - f e') d/dz for two vector fields.
FormElement form_bracket(const FormElement& e, const FormElement& f);
/// e.f = (e g' + λ e' g)(dz)^λ for f = g (dz)^λ.
FormElement form_lie_derivative(const FormElement& e, const FormElement& f);

KNExpansion multiply(const FormElement& a, const FormElement& b);
KNExpansion bracket(const FormElement& e, const FormElement& f);
KNExpansion lie_derivative(const FormElement& e, const FormElement& f);

enum class TableKind { FunctionProduct, VectorBracket, FieldOnForm };

std::string to_string(TableKind k);

/// Structure constants of one operation on basis pairs, computed on demand
/// and cached. For FieldOnForm the entry (n,p),(m,r) is e_{n,p}.f^λ_{m,r}.
class StructureTable {
 public:
  StructureTable(GeometryPtr geom, TableKind kind, int form_weight = 0);

  const GeometryPtr& geometry() const { return geom_; }
  TableKind kind() const { return kind_; }
  int form_weight() const { return form_weight_; }
  /// Weight of the entries.
  int result_weight() const;

  const KNExpansion& entry(int n, int p, int m, int r) const;

  /// Largest h - (n+m) over entries with n, m in [lo, hi]. Throws
  /// std::logic_error when some entry has a term below degree n+m.
  int measure(int lo, int hi) const;

  /// Coefficient at degree n+m predicted by the leading-term law.
  Rational leading_coefficient(int n, int p, int m, int r, int h_p) const;

 private:
  KNExpansion compute(int n, int p, int m, int r) const;

  GeometryPtr geom_;
  TableKind kind_;
  int form_weight_;
  mutable std::mutex mu_;
  mutable std::map<std::tuple<int, int, int, int>, std::unique_ptr<KNExpansion>> entries_;
};

struct AlmostGradingBounds {
  int K = 0;  // functions
  int L = 0;  // vector fields
  int M = 0;  // vector fields on functions
  bool stable = false;  // unchanged when the window grows by two on each side
};

/// Exhaustive measurement over n, m in [lo, hi] and the widened window.
/// Results are cached per puncture configuration and window.
AlmostGradingBounds measure_bounds(const GeometryPtr& geom, int lo, int hi);

/// Bounds on the default window |n| <= 6.
AlmostGradingBounds default_bounds(const GeometryPtr& geom);

struct SplitVariant {
  enum class Kind { Standard, EnlargedStar, Depth };
  Kind kind = Kind::Standard;
  int depth = 0;  // p of the depth variant

  static SplitVariant standard() { return {Kind::Standard, 0}; }
  static SplitVariant enlarged() { return {Kind::EnlargedStar, 0}; }
  static SplitVariant depth_p(int p) { return {Kind::Depth, p}; }
};

SplitVariant parse_split_variant(const std::string& text);

struct TriangularSplit {
  KNExpansion plus;
  KNExpansion zero;
  KNExpansion minus;
  SplitVariant variant;
};

/// Splits a function (weight 0) or vector field (weight -1) expansion.
/// Standard: plus = degrees >= 1, zero = [-bound, 0], minus = below.
/// EnlargedStar moves the elements regular at all punctures into plus
/// (degree 0 for functions, 0 and -1 for vector fields). Depth: minus is the
/// part vanishing at infinity to order >= p (functions) or >= p+1 (vector
/// fields); the strip is spanned by the basis elements that are not leading
/// terms of such elements.
TriangularSplit triangular_split(const GeometryPtr& geom, const KNExpansion& x, SplitVariant variant, int bound);

enum class SplitPart { Plus, Zero, Minus };

struct ClosureReport {
  bool closed = true;
  std::string witness;  // first offending pair when not closed
};

/// Samples all basis pairs of the part with degrees within |n| <= window and
/// checks their product (FunctionProduct) or bracket (VectorBracket) stays in
/// the standard part.
ClosureReport closure_check(const StructureTable& table, SplitPart part, int bound, int window);

}  // namespace kn
