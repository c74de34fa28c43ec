#include "kn/sugawara.hpp"

#include <algorithm>
#include <sstream>

namespace kn {

namespace {

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
int ceil_div(int a, int b) { return -floor_div(-a, b); }

// Largest n whose current x(A_{n,p}) can act nontrivially on a monomial of
// degree d: its band starts at nB - (B-1), and moving an occupied slot up by
// more than -d lands on an occupied slot.
int top_acting_index(int block, int degree) { return floor_div(std::max(0, -degree) + block - 1, block); }

}  // namespace

std::pair<int, int> sugawara_support(const Geometry& geom, int k, int r, int p, int s) {
  const int N = geom.size();
  int delta = 3;
  for (int q = 1; q <= N; ++q) delta = std::min(delta, (q != p) + (q != s) + (q != r));
  return {k + delta, k + 2 - ceil_div(2, N)};
}

Rational sugawara_coeff(const GeometryPtr& geom, int k, int r, int n, int p, int m, int s) {
  const int N = geom->size();
  if (p < 1 || p > N || s < 1 || s > N || r < 1 || r > N) throw std::out_of_range("puncture index out of range");
  auto [lo, hi] = sugawara_support(*geom, k, r, p, s);
  if (n + m < lo || n + m > hi) return 0;
  const BasisIndex a{1, -n, p}, b{1, -m, s}, c{-1, k, r};
  Rational total;
  for (int q = 1; q <= N; ++q) {
    const int la = local_order(1, -n, p, q), lb = local_order(1, -m, s, q), lc = local_order(-1, k, r, q);
    if (la + lb + lc > -1) continue;
    Series sa = geom->basis_series(a, q, -1 - lb - lc);
    Series sb = geom->basis_series(b, q, -1 - la - lc);
    Series sc = geom->basis_series(c, q, -1 - la - lb);
    // stored leads may sit below the true order; refetch if that costs precision
    sa = geom->basis_series(a, q, -1 - sb.lead - sc.lead);
    sb = geom->basis_series(b, q, -1 - sa.lead - sc.lead);
    sc = geom->basis_series(c, q, -1 - sa.lead - sb.lead);
    total += (sa * sb * sc).at(-1);
  }
  return total;
}

Rational SugawaraCoefficients::operator()(int k, int r, int n, int p, int m, int s) const {
  auto [lo, hi] = sugawara_support(*geom_, k, r, p, s);
  if (n + m < lo || n + m > hi) return 0;
  const std::array<int, 6> key{k, r, n, p, m, s};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Rational v = sugawara_coeff(geom_, k, r, n, p, m, s);
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(key, v).first->second;
}

OrderedModes normal_order(ModeLabel a, ModeLabel b) {
  if (a.n <= b.n) return {a, b, false};
  return {b, a, true};
}

Rational measure_level(const FermionRep& rep, const MatrixElement& x, const MatrixElement& y) {
  const AffineAlgebra& alg = rep.algebra();
  const Rational form = BilinearForm::trace_form()(x, y);
  const Rational g = alg.function_cocycle().value(1, 1, -1, 1);
  if (is_zero(form) || is_zero(g)) throw std::invalid_argument("level probe pair has no central term");
  DgElement X{CurrentElement::single(x, 1, 1), KNExpansion(-1), 0};
  DgElement Y{CurrentElement::single(y, -1, 1), KNExpansion(-1), 0};
  return -rep.extract_cocycle(X, Y, 0) / (form * g);
}

Rational half_adjoint_casimir(const std::vector<MatrixElement>& basis, const std::vector<MatrixElement>& dual) {
  if (basis.empty()) return 0;
  const MatrixElement& y = basis.front();
  Matrix c(y.rank(), y.rank());
  for (size_t i = 0; i < basis.size(); ++i) c += commutator(basis[i], commutator(dual[i], y)).entries;
  // c = 2κ·y; read the factor off any nonzero entry of y
  for (int i = 0; i < y.rank(); ++i)
    for (int j = 0; j < y.rank(); ++j)
      if (!is_zero(y.entries(i, j))) {
        const Rational f = c(i, j) / y.entries(i, j);
        if (c != y.entries * f) throw std::logic_error("adjoint casimir is not scalar on the summand");
        return f / 2;
      }
  return 0;
}

SugawaraContext::SugawaraContext(std::shared_ptr<const FermionRep> rep) : SugawaraContext(rep, std::nullopt, std::nullopt) {}

SugawaraContext::SugawaraContext(std::shared_ptr<const FermionRep> rep, std::optional<Rational> abelian_level,
                                 std::optional<Rational> simple_level)
    : rep_(std::move(rep)), coeffs_(rep_->geometry()) {
  const AffineAlgebra& alg = rep_->algebra();
  const AlgebraTag tag = alg.tag();
  const int r = alg.rank();
  const BilinearForm trace = BilinearForm::trace_form();
  if (tag != AlgebraTag::SL) {
    SugawaraPart part{"abelian", {{Matrix::identity(r), tag}}, {}, 0, 0};
    part.dual = dual_basis(part.basis, trace);
    part.level = abelian_level ? *abelian_level : measure_level(*rep_, part.basis[0], part.dual[0]);
    parts_.push_back(std::move(part));
  }
  if (r >= 2) {
    SugawaraPart part{"simple", standard_basis(AlgebraTag::SL, r), {}, 0, 0};
    for (auto& x : part.basis) x.tag = tag;
    part.dual = dual_basis(part.basis, trace);
    part.kappa = half_adjoint_casimir(part.basis, part.dual);
    part.level = simple_level ? *simple_level : measure_level(*rep_, part.basis[0], part.dual[0]);
    parts_.push_back(std::move(part));
  }
}

BandedOperator SugawaraContext::mode(int part, int i, bool dual, int n, int p) const {
  const std::array<int, 5> key{part, i, dual ? 1 : 0, n, p};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = modes_.find(key);
    if (it != modes_.end()) return it->second;
  }
  const SugawaraPart& sp = parts_.at(part);
  BandedOperator op = rep_->current(dual ? sp.dual.at(i) : sp.basis.at(i), n, p);
  std::lock_guard<std::mutex> lock(mu_);
  return modes_.emplace(key, op).first->second;
}

std::optional<WedgeVector> SugawaraContext::cached_image(int k, int r, const WedgeMonomial& m) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = images_.find({k, r, m});
  if (it == images_.end()) return std::nullopt;
  return it->second;
}

void SugawaraContext::store_image(int k, int r, const WedgeMonomial& m, const WedgeVector& image) const {
  std::lock_guard<std::mutex> lock(mu_);
  images_.emplace(std::make_tuple(k, r, m), image);
}

WedgeVector apply_sugawara(const SugawaraContext& ctx, int k, int r, const WedgeVector& v) {
  const int N = ctx.rep().geometry()->size();
  if (r < 1 || r > N) throw std::out_of_range("puncture index out of range");
  for (const auto& part : ctx.parts())
    if (is_zero(part.level + part.kappa))
      throw CriticalLevel("critical level: c + kappa = 0 on the " + part.name + " summand");
  const int B = ctx.rep().shape().block();
  const int lo = k, hi = k + 2 - ceil_div(2, N);
  const auto& l = ctx.coefficients();
  WedgeVector out;
  for (const auto& [mono, coef] : v.terms()) {
    if (auto hit = ctx.cached_image(k, r, mono)) {
      out += coef * *hit;
      continue;
    }
    const int top = top_acting_index(B, monomial_degree(mono));
    const WedgeVector start(mono);
    WedgeVector image;
    for (size_t pi = 0; pi < ctx.parts().size(); ++pi) {
      const SugawaraPart& part = ctx.parts()[pi];
      const int ip = static_cast<int>(pi);
      WedgeVector acc;
      for (size_t i = 0; i < part.basis.size(); ++i) {
        const int ii = static_cast<int>(i);
        // n <= m: u^i(m,s) acts first
        for (int m = ceil_div(lo, 2); m <= top; ++m)
          for (int s = 1; s <= N; ++s) {
            WedgeVector w;
            bool computed = false;
            for (int n = lo - m; n <= std::min(m, hi - m); ++n)
              for (int p = 1; p <= N; ++p) {
                const Rational c = l(k, r, n, p, m, s);
                if (is_zero(c)) continue;
                if (!computed) {
                  w = wedge_apply(ctx.mode(ip, ii, true, m, s), start);
                  computed = true;
                }
                if (w.is_zero()) continue;
                acc += c * wedge_apply(ctx.mode(ip, ii, false, n, p), w);
              }
          }
        // n > m: u_i(n,p) acts first
        for (int n = ceil_div(lo + 1, 2); n <= top; ++n)
          for (int p = 1; p <= N; ++p) {
            WedgeVector w;
            bool computed = false;
            for (int m = lo - n; m <= std::min(n - 1, hi - n); ++m)
              for (int s = 1; s <= N; ++s) {
                const Rational c = l(k, r, n, p, m, s);
                if (is_zero(c)) continue;
                if (!computed) {
                  w = wedge_apply(ctx.mode(ip, ii, false, n, p), start);
                  computed = true;
                }
                if (w.is_zero()) continue;
                acc += c * wedge_apply(ctx.mode(ip, ii, true, m, s), w);
              }
          }
      }
      image += Rational(-1) / (2 * (part.level + part.kappa)) * acc;
    }
    ctx.store_image(k, r, mono, image);
    out += coef * image;
  }
  return out;
}

WedgeVector apply_T_of_field(const SugawaraContext& ctx, const KNExpansion& e, const WedgeVector& v) {
  if (e.weight() != -1) throw std::invalid_argument("T[e] needs a vector field");
  WedgeVector out;
  for (const auto& [key, a] : e.terms()) out += a * apply_sugawara(ctx, key.first, key.second, v);
  return out;
}

CurrentElement current_of(const AffineAlgebra& algebra, const MatrixElement& x, const KNExpansion& A) {
  if (A.weight() != 0) throw std::invalid_argument("currents take functions");
  x.validate();
  CurrentElement c = algebra.zero();
  for (const auto& [key, a] : A.terms()) c.add(key.first, key.second, x.entries * a);
  return c;
}

bool check_fundamental(const SugawaraContext& ctx, const KNExpansion& e, const MatrixElement& x,
                       const KNExpansion& A, const std::vector<WedgeVector>& samples) {
  const FermionRep& rep = ctx.rep();
  const CurrentElement xa = current_of(rep.algebra(), x, A);
  const BandedOperator XA = rep.current_operator(xa);
  const BandedOperator XeA = rep.current_operator(rep.algebra().act(e, xa));
  for (const auto& v : samples) {
    const WedgeVector lhs = apply_T_of_field(ctx, e, wedge_apply(XA, v)) - wedge_apply(XA, apply_T_of_field(ctx, e, v));
    if (lhs != wedge_apply(XeA, v)) return false;
  }
  return true;
}

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "PASS";
    case CheckStatus::Fail:
      return "FAIL";
    case CheckStatus::Inconclusive:
      return "INCONCLUSIVE";
  }
  return "?";
}

std::string to_string(CandidateKind k) { return k == CandidateKind::Casimir ? "casimir" : "semi-casimir"; }

KNExpansion CasimirCandidate::field() const {
  KNExpansion e(-1);
  for (const auto& [n, a] : coefficients) e.add(n, 1, a);
  return e;
}

CasimirCandidate CasimirCandidate::exact(const KNExpansion& e, CandidateKind kind) {
  if (e.weight() != -1) throw std::invalid_argument("candidate needs a vector field");
  CasimirCandidate c;
  c.kind = kind;
  c.truncated = false;
  for (const auto& [key, a] : e.terms()) {
    if (key.second != 1) throw std::invalid_argument("candidates live at the first puncture");
    c.coefficients[key.first] = a;
  }
  if (auto w = e.degree_window()) std::tie(c.n_min, c.n_max) = *w;
  return c;
}

CasimirSolution casimir_solve(const ModeCocycle& gamma, int n_min, int n_max) {
  CasimirSolution out;
  if (n_min > n_max) return out;
  const int cols = n_max - n_min + 1;
  std::vector<int> rows;
  for (int k = n_min; k <= n_max; ++k)
    if (k != 0) rows.push_back(k);
  for (int k : rows) {
    out.diagonal[k] = gamma(k, k);
    if (is_zero(out.diagonal[k])) out.non_generic.push_back(k);
  }
  Matrix sys(static_cast<int>(rows.size()), cols);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int m = n_min; m <= n_max; ++m) sys(static_cast<int>(i), m - n_min) = gamma(rows[i], m);
  for (const auto& v : nullspace(sys)) {
    CasimirCandidate c;
    c.n_min = n_min;
    c.n_max = n_max;
    c.kind = CandidateKind::Casimir;
    for (int m = n_min; m <= n_max; ++m)
      if (!is_zero(v[m - n_min])) c.coefficients[m] = v[m - n_min];
    out.basis.push_back(std::move(c));
  }
  return out;
}

CasimirCandidate gamma_extend(const std::map<int, Rational>& nonpositive, const ModeCocycle& gamma, int n_max) {
  CasimirCandidate out;
  out.kind = CandidateKind::SemiCasimir;
  out.n_max = std::max(n_max, 0);
  out.n_min = 0;
  for (const auto& [m, a] : nonpositive) {
    if (m > 0) throw std::invalid_argument("gamma_extend takes coefficients on degrees <= 0");
    out.n_min = std::min(out.n_min, m);
    if (!is_zero(a)) out.coefficients[m] = a;
  }
  if (n_max <= 0) return out;
  for (int k = 1; k <= n_max; ++k)
    if (is_zero(gamma(k, k))) throw SingularDiagonal(k, "singular diagonal at k = " + std::to_string(k));
  Matrix sys(n_max, n_max);
  std::vector<Rational> rhs(n_max);
  for (int k = 1; k <= n_max; ++k) {
    for (int m = 1; m <= n_max; ++m) sys(k - 1, m - 1) = gamma(k, m);
    for (const auto& [m, a] : out.coefficients) rhs[k - 1] -= a * gamma(k, m);
  }
  if (rank(sys) != n_max) throw SingularDiagonal(0, "positive-degree system is singular");
  const std::vector<Rational> x = *solve(sys, rhs);
  for (int m = 1; m <= n_max; ++m)
    if (!is_zero(x[m - 1])) out.coefficients[m] = x[m - 1];
  return out;
}

WedgeVector apply_delta(const SugawaraContext& ctx, const CasimirCandidate& e, const WedgeVector& v) {
  const KNExpansion f = e.field();
  return wedge_apply(ctx.rep().field_operator(f), v) - apply_T_of_field(ctx, f, v);
}

int min_degree(const std::vector<WedgeVector>& vs) {
  int d = 0;
  for (const auto& v : vs)
    for (const auto& [m, c] : v.terms()) d = std::min(d, monomial_degree(m));
  return d;
}

bool truncation_sufficient(const SugawaraContext& ctx, const CasimirCandidate& e, int min_degree) {
  if (!e.truncated) return true;
  // L*_m only involves pairs whose first-acting index is >= ceil(m/2); r(e_m) is stricter than that.
  return ceil_div(e.n_max + 1, 2) > top_acting_index(ctx.rep().shape().block(), min_degree);
}

namespace {

std::string describe(const WedgeVector& v) {
  std::ostringstream s;
  bool first = true;
  for (const auto& [m, c] : v.terms()) {
    if (!first) s << " + ";
    first = false;
    s << c << "*" << to_string(m);
  }
  return first ? "0" : s.str();
}

// s with out = s·v, if any.
std::optional<Rational> scalar_of(const WedgeVector& out, const WedgeVector& v) {
  if (v.is_zero()) return out.is_zero() ? std::optional<Rational>(0) : std::nullopt;
  const auto& [m, c] = *v.terms().begin();
  const Rational s = out.coefficient(m) / c;
  if (out != s * v) return std::nullopt;
  return s;
}

}  // namespace

CheckReport check_delta_commutation(const SugawaraContext& ctx, const CasimirCandidate& e, const MatrixElement& x,
                                    const KNExpansion& A, const std::vector<WedgeVector>& samples,
                                    const Rational& mixing_factor) {
  const FermionRep& rep = ctx.rep();
  const AffineAlgebra& alg = rep.algebra();
  Rational expected;
  if (e.kind == CandidateKind::SemiCasimir) {
    for (const auto& [key, a] : A.terms())
      if (key.first >= 0) throw std::invalid_argument("semi-casimir checks take A of negative degree");
  } else {
    expected = mixing_factor * x.entries.trace() * alg.mixing_cocycle()(e.field(), A);
  }
  const BandedOperator XA = rep.current_operator(current_of(alg, x, A));
  CheckReport report;
  report.scalar = expected;
  for (const auto& v : samples) {
    const WedgeVector xv = wedge_apply(XA, v);
    if (!truncation_sufficient(ctx, e, min_degree({v, xv}))) {
      report.status = CheckStatus::Inconclusive;
      report.witness = "window too narrow for degree " + std::to_string(min_degree({v, xv}));
      return report;
    }
    const WedgeVector c = apply_delta(ctx, e, xv) - wedge_apply(XA, apply_delta(ctx, e, v));
    if (c != expected * v) {
      report.status = CheckStatus::Fail;
      report.witness = "on " + describe(v) + ": " + describe(c);
      return report;
    }
  }
  return report;
}

CheckReport check_pairwise_scalar(const SugawaraContext& ctx, const CasimirCandidate& e, const CasimirCandidate& f,
                                  const std::vector<WedgeVector>& samples) {
  CheckReport report;
  for (const auto& v : samples) {
    const WedgeVector fv = apply_delta(ctx, f, v);
    const WedgeVector ev = apply_delta(ctx, e, v);
    if (!truncation_sufficient(ctx, e, min_degree({v, fv})) || !truncation_sufficient(ctx, f, min_degree({v, ev}))) {
      report.status = CheckStatus::Inconclusive;
      report.witness = "window too narrow on " + describe(v);
      report.scalar.reset();
      return report;
    }
    const WedgeVector c = apply_delta(ctx, e, fv) - apply_delta(ctx, f, ev);
    const auto s = scalar_of(c, v);
    if (!s || (report.scalar && *report.scalar != *s)) {
      report.status = CheckStatus::Fail;
      report.witness = "on " + describe(v) + ": " + describe(c);
      return report;
    }
    report.scalar = s;
  }
  return report;
}

}  // namespace kn
