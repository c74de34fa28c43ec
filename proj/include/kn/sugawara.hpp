#pragma once

// Sugawara operators on fermion wedge sectors, casimir and semi-casimir
// solvers, and the commutator checks built on them.

#include "kn/wedge.hpp"

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace kn {

/// Range [lo, hi] of n + m outside which l_{(k,r)}^{(n,p)(m,s)} vanishes by
/// order counting at the punctures and at infinity.
std::pair<int, int> sugawara_support(const Geometry& geom, int k, int r, int p, int s);

/// l_{(k,r)}^{(n,p)(m,s)} = Σ_q res_{P_q} ω^{n,p} ω^{m,s} e_{k,r}.
Rational sugawara_coeff(const GeometryPtr& geom, int k, int r, int n, int p, int m, int s);

class SugawaraCoefficients {
 public:
  explicit SugawaraCoefficients(GeometryPtr geom) : geom_(std::move(geom)) {}

  const GeometryPtr& geometry() const { return geom_; }
  Rational operator()(int k, int r, int n, int p, int m, int s) const;

 private:
  GeometryPtr geom_;
  mutable std::mutex mu_;
  mutable std::map<std::array<int, 6>, Rational> cache_;
};

struct ModeLabel {
  int n = 0;
  int p = 1;

  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

/// :x(a) y(b): as an operator product left·right, so `right` acts first.
struct OrderedModes {
  ModeLabel left;
  ModeLabel right;
  bool swapped = false;
};

/// Keeps x(n)y(m) for n <= m and swaps to y(m)x(n) for n > m.
OrderedModes normal_order(ModeLabel a, ModeLabel b);

/// Abelian or simple summand of g with dual bases for the trace form.
struct SugawaraPart {
  std::string name;
  std::vector<MatrixElement> basis;
  std::vector<MatrixElement> dual;
  Rational level;
  Rational kappa;
};

class CriticalLevel : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Level of the fermions on one summand, in the sign convention of the
/// Sugawara rescaling: the defect of [x(A_{1,1}), y(A_{-1,1})] equals
/// -level · tr(xy) · γ^A(A_{1,1}, A_{-1,1}).
Rational measure_level(const FermionRep& rep, const MatrixElement& x, const MatrixElement& y);

/// Half the eigenvalue of Σ ad(u_i) ad(u^i) on the span of `basis`.
Rational half_adjoint_casimir(const std::vector<MatrixElement>& basis, const std::vector<MatrixElement>& dual);

class SugawaraContext {
 public:
  /// Levels measured on the representation.
  explicit SugawaraContext(std::shared_ptr<const FermionRep> rep);
  /// Levels given per summand; a missing one is measured.
  SugawaraContext(std::shared_ptr<const FermionRep> rep, std::optional<Rational> abelian_level,
                  std::optional<Rational> simple_level);

  const FermionRep& rep() const { return *rep_; }
  const std::vector<SugawaraPart>& parts() const { return parts_; }
  const SugawaraCoefficients& coefficients() const { return coeffs_; }

  /// Current operator of a basis (dual = false) or dual basis element.
  BandedOperator mode(int part, int i, bool dual, int n, int p) const;

  /// Memoized L*_{k,r} images of single monomials.
  std::optional<WedgeVector> cached_image(int k, int r, const WedgeMonomial& m) const;
  void store_image(int k, int r, const WedgeMonomial& m, const WedgeVector& image) const;

 private:
  std::shared_ptr<const FermionRep> rep_;
  std::vector<SugawaraPart> parts_;
  SugawaraCoefficients coeffs_;
  mutable std::mutex mu_;
  mutable std::map<std::array<int, 5>, BandedOperator> modes_;
  mutable std::map<std::tuple<int, int, WedgeMonomial>, WedgeVector> images_;
};

/// L*_{k,r} v. Throws CriticalLevel if c + κ = 0 on a summand.
WedgeVector apply_sugawara(const SugawaraContext& ctx, int k, int r, const WedgeVector& v);

/// T[e] v = Σ a_{n,p} L*_{n,p} v.
WedgeVector apply_T_of_field(const SugawaraContext& ctx, const KNExpansion& e, const WedgeVector& v);

/// x ⊗ A as a current.
CurrentElement current_of(const AffineAlgebra& algebra, const MatrixElement& x, const KNExpansion& A);

/// [T[e], x(A)] v = x(e.A) v on every sample.
bool check_fundamental(const SugawaraContext& ctx, const KNExpansion& e, const MatrixElement& x,
                       const KNExpansion& A, const std::vector<WedgeVector>& samples);

enum class CheckStatus { Pass, Fail, Inconclusive };
std::string to_string(CheckStatus s);

struct CheckReport {
  CheckStatus status = CheckStatus::Pass;
  std::string witness;
  std::optional<Rational> scalar;
};

enum class CandidateKind { Casimir, SemiCasimir };
std::string to_string(CandidateKind k);

/// Σ a_n e_n at P_1. `truncated` marks coefficients beyond n_max as unknown
/// rather than zero.
struct CasimirCandidate {
  std::map<int, Rational> coefficients;
  int n_min = 0;
  int n_max = 0;
  CandidateKind kind = CandidateKind::Casimir;
  bool truncated = true;

  KNExpansion field() const;
  static CasimirCandidate exact(const KNExpansion& e, CandidateKind kind = CandidateKind::Casimir);
};

/// γ(A_{-k}, e_m) as seen by the representation.
using ModeCocycle = std::function<Rational(int k, int m)>;

struct CasimirSolution {
  std::vector<CasimirCandidate> basis;
  std::map<int, Rational> diagonal;  // k -> γ(A_{-k}, e_k), k != 0
  std::vector<int> non_generic;      // k != 0 with a vanishing diagonal entry
};

/// Kernel of Σ_m a_m γ(A_{-k}, e_m) = 0, k != 0, with k and m in [n_min, n_max].
CasimirSolution casimir_solve(const ModeCocycle& gamma, int n_min, int n_max);

class SingularDiagonal : public std::runtime_error {
 public:
  SingularDiagonal(int k, const std::string& what) : std::runtime_error(what), k_(k) {}
  int k() const { return k_; }

 private:
  int k_;
};

/// Γ(e) for e = Σ_{m <= 0} a_m e_m: solves the k > 0 equations for a_m,
/// 0 < m <= n_max. Throws SingularDiagonal naming the offending k.
CasimirCandidate gamma_extend(const std::map<int, Rational>& nonpositive, const ModeCocycle& gamma, int n_max);

/// Δ_e = r(e) - T[e].
WedgeVector apply_delta(const SugawaraContext& ctx, const CasimirCandidate& e, const WedgeVector& v);

/// Whether every index above the candidate's window acts by zero on vectors
/// of degree >= min_degree, both through r(e) and T[e].
bool truncation_sufficient(const SugawaraContext& ctx, const CasimirCandidate& e, int min_degree);

/// [Δ_e, x(A)] = scalar · id on the samples. For a casimir the scalar is
/// mixing_factor · tr(x) · γ^m(e, A); for a semi-casimir A must have negative
/// degrees and the scalar is 0.
CheckReport check_delta_commutation(const SugawaraContext& ctx, const CasimirCandidate& e, const MatrixElement& x,
                                    const KNExpansion& A, const std::vector<WedgeVector>& samples,
                                    const Rational& mixing_factor);

/// [Δ(e), Δ(f)] acts on every sample by one shared scalar.
CheckReport check_pairwise_scalar(const SugawaraContext& ctx, const CasimirCandidate& e, const CasimirCandidate& f,
                                  const std::vector<WedgeVector>& samples);

/// Lowest degree among the monomials of the vectors; 0 for none.
int min_degree(const std::vector<WedgeVector>& vs);

}  // namespace kn
