#pragma once

// The geometric 2-cocycles of the function algebra, the vector field algebra
// and their semidirect product D, with checks of the cocycle identity,
// locality, coboundary equivalence and L-invariance.

#include "kn/structure.hpp"

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

namespace kn {

/// Chart expression of a projective connection; poles only at the punctures
/// and infinity.
struct ProjectiveConnection {
  RationalFunction value;
};

/// Chart expression of an affine connection; poles only at the punctures and
/// infinity, and at most a simple pole at infinity after the chart change,
/// which means T(z) vanishes at infinity.
struct AffineConnection {
  RationalFunction value;
};

/// Throws std::invalid_argument when the connection is not admissible.
void validate(const ProjectiveConnection& R, const Geometry& geom);
void validate(const AffineConnection& T, const Geometry& geom);

/// Sum of the residues of f dz over the in-points.
Rational in_point_residue_sum(const RationalFunction& f, const Geometry& geom);

Rational cocycle_A(const FormElement& g, const FormElement& h);
Rational cocycle_L(const FormElement& e, const FormElement& f, const ProjectiveConnection& R = {});
/// γ(e, g) for a vector field e and a function g.
Rational cocycle_mix(const FormElement& e, const FormElement& g, const AffineConnection& T = {});

enum class CocycleKind { Function, VectorField, Mixing };

std::string to_string(CocycleKind k);

/// Values on basis pairs, cached. Function: γ(A_{n,p}, A_{m,r});
/// VectorField: γ(e_{n,p}, e_{m,r}); Mixing: γ(e_{n,p}, A_{m,r}).
class CocycleTable {
 public:
  CocycleTable(GeometryPtr geom, CocycleKind kind, ProjectiveConnection R = {}, AffineConnection T = {});

  const GeometryPtr& geometry() const { return geom_; }
  CocycleKind kind() const { return kind_; }

  Rational value(int n, int p, int m, int r) const;
  /// Bilinear extension to expansions of the matching weights.
  Rational operator()(const KNExpansion& x, const KNExpansion& y) const;

 private:
  Rational compute(int n, int p, int m, int r) const;

  GeometryPtr geom_;
  CocycleKind kind_;
  ProjectiveConnection R_;
  AffineConnection T_;
  mutable std::mutex mu_;
  mutable std::map<std::tuple<int, int, int, int>, Rational> cache_;
};

/// Element e + A of D = L ⋉ A.
struct DElement {
  KNExpansion field{-1};
  KNExpansion func{0};

  friend bool operator==(const DElement&, const DElement&) = default;
};

DElement operator+(const DElement& a, const DElement& b);
DElement operator*(const Rational& c, const DElement& a);

/// [e + A, f + B] = [e, f] + (e.B - f.A).
DElement d_bracket(const GeometryPtr& geom, const DElement& x, const DElement& y);

/// a·γ^A + b·γ^L + c·γ^m on D, with γ(A, e) = -γ(e, A).
class DCocycle {
 public:
  DCocycle(GeometryPtr geom, ProjectiveConnection R = {}, AffineConnection T = {}, Rational a = 1, Rational b = 1,
           Rational c = 1);
  Rational operator()(const DElement& x, const DElement& y) const;

 private:
  GeometryPtr geom_;
  CocycleTable A_, L_, M_;
  Rational a_, b_, c_;
};

template <class T>
bool check_antisymmetry(const std::function<Rational(const T&, const T&)>& gamma, const std::vector<T>& sample) {
  for (const auto& x : sample)
    for (const auto& y : sample)
      if (gamma(x, y) != -gamma(y, x)) return false;
  return true;
}

/// γ([f,g],h) + γ([g,h],f) + γ([h,f],g) = 0 on every triple.
template <class T>
bool check_cocycle_identity(const std::function<Rational(const T&, const T&)>& gamma,
                            const std::function<T(const T&, const T&)>& bracket,
                            const std::vector<std::array<T, 3>>& triples) {
  for (const auto& [f, g, h] : triples) {
    if (gamma(bracket(f, g), h) + gamma(bracket(g, h), f) + gamma(bracket(h, f), g) != 0) return false;
  }
  return true;
}

/// Value of a cocycle on the basis pair (n,p), (m,r).
using BasisPairCocycle = std::function<Rational(int n, int p, int m, int r)>;

struct LocalityWindow {
  int M1 = 0;
  int M2 = 0;
  bool nonzero = false;  // false when the cocycle vanishes on the window
  bool stable = false;   // unchanged when the window grows by two on each side
};

LocalityWindow check_locality(const GeometryPtr& geom, const BasisPairCocycle& gamma, int lo, int hi);

/// Linear functional on a basis, given by finitely many values.
struct BasisFunctional {
  std::map<std::pair<int, int>, Rational> values;

  Rational operator()(const KNExpansion& x) const;
};

/// [f,g] on the basis pair (n,p), (m,r).
using BasisPairBracket = std::function<KNExpansion(int n, int p, int m, int r)>;

BasisPairBracket table_bracket(const StructureTable& table);

/// γ1(f,g) - γ2(f,g) = φ([f,g]) for all basis pairs with degrees in [lo, hi].
bool coboundary_equivalent(const GeometryPtr& geom, const BasisPairBracket& bracket, const BasisPairCocycle& gamma1,
                           const BasisPairCocycle& gamma2, const BasisFunctional& phi, int lo, int hi);

/// Solves for a φ with γ1 - γ2 = φ∘[,] on the window; nullopt if none exists.
std::optional<BasisFunctional> solve_coboundary(const GeometryPtr& geom, const BasisPairBracket& bracket,
                                                const BasisPairCocycle& gamma1, const BasisPairCocycle& gamma2,
                                                int lo, int hi);

struct LInvarianceReport {
  bool derivation = true;  // c(e.A, B) + c(A, e.B) = 0
  bool literal = true;     // c(e.A, B) = c(A, e.B)
};

/// Evaluates both identities for a bilinear form c on functions over the
/// samples (e, A, B).
LInvarianceReport check_L_invariance(const std::function<Rational(const FormElement&, const FormElement&)>& c,
                                     const std::vector<std::array<FormElement, 3>>& samples);

}  // namespace kn
