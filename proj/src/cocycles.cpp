#include "kn/cocycles.hpp"

#include "kn/linalg.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace kn {

void validate(const ProjectiveConnection& R, const Geometry& geom) {
  for (const auto& [root, mult] : R.value.poles()) {
    (void)mult;
    if (std::find(geom.punctures().begin(), geom.punctures().end(), root) == geom.punctures().end())
      throw std::invalid_argument("projective connection has a pole away from the punctures");
  }
  if (!R.value.has_rational_poles()) throw std::invalid_argument("projective connection has irrational poles");
}

void validate(const AffineConnection& T, const Geometry& geom) {
  validate(ProjectiveConnection{T.value}, geom);
  if (!T.value.is_zero() && order_at(T.value, Point::infinity()) < 1)
    throw std::invalid_argument("affine connection has a pole of order > 1 at infinity");
}

Rational in_point_residue_sum(const RationalFunction& f, const Geometry& geom) {
  Rational sum;
  for (const auto& x : geom.punctures()) sum += residue_form(f, Point::at(x));
  return sum;
}

namespace {

void require_weights(const FormElement& a, int wa, const FormElement& b, int wb, const char* what) {
  require_same_geometry(a, b);
  if (a.weight != wa || b.weight != wb) throw std::invalid_argument(std::string(what) + ": wrong form weights");
}

}  // namespace

Rational cocycle_A(const FormElement& g, const FormElement& h) {
  require_weights(g, 0, h, 0, "cocycle_A");
  return in_point_residue_sum(g.func * h.func.derivative(), *g.geom);
}

Rational cocycle_L(const FormElement& e, const FormElement& f, const ProjectiveConnection& R) {
  require_weights(e, -1, f, -1, "cocycle_L");
  const RationalFunction& a = e.func;
  const RationalFunction& b = f.func;
  RationalFunction a1 = a.derivative(), b1 = b.derivative();
  RationalFunction a3 = a1.derivative().derivative(), b3 = b1.derivative().derivative();
  RationalFunction integrand = (a3 * b - a * b3) * Rational(1, 2);
  if (!R.value.is_zero()) integrand -= R.value * (a1 * b - a * b1);
  return in_point_residue_sum(integrand, *e.geom);
}

Rational cocycle_mix(const FormElement& e, const FormElement& g, const AffineConnection& T) {
  require_weights(e, -1, g, 0, "cocycle_mix");
  RationalFunction g1 = g.func.derivative();
  RationalFunction integrand = e.func * g1.derivative();
  if (!T.value.is_zero()) integrand += T.value * e.func * g1;
  return in_point_residue_sum(integrand, *e.geom);
}

std::string to_string(CocycleKind k) {
  switch (k) {
    case CocycleKind::Function:
      return "function";
    case CocycleKind::VectorField:
      return "vector-field";
    case CocycleKind::Mixing:
      return "mixing";
  }
  return "?";
}

CocycleTable::CocycleTable(GeometryPtr geom, CocycleKind kind, ProjectiveConnection R, AffineConnection T)
    : geom_(std::move(geom)), kind_(kind), R_(std::move(R)), T_(std::move(T)) {
  if (!geom_) throw std::invalid_argument("null geometry");
  validate(R_, *geom_);
  validate(T_, *geom_);
}

Rational CocycleTable::compute(int n, int p, int m, int r) const {
  // Residue at each P_q from local series, exact through order -1.
  const int wa = kind_ == CocycleKind::Function ? 0 : -1;
  const int wb = kind_ == CocycleKind::VectorField ? -1 : 0;
  const RationalFunction& conn = kind_ == CocycleKind::VectorField ? R_.value : T_.value;
  const bool with_conn = kind_ != CocycleKind::Function && !conn.is_zero();
  Rational sum;
  for (int q = 1; q <= geom_->size(); ++q) {
    const Point at = Point::at(geom_->puncture(q));
    const int la = local_order(wa, n, p, q);
    const int lb = local_order(wb, m, r, q);
    const int lc = with_conn ? std::min(0, order_at(conn, at)) : 0;
    Series a = geom_->basis_series({wa, n, p}, q, 3 - lb - lc);
    Series b = geom_->basis_series({wb, m, r}, q, 3 - la - lc);
    Series integrand;
    switch (kind_) {
      case CocycleKind::Function:
        integrand = a * derivative(b);
        break;
      case CocycleKind::VectorField: {
        Series a1 = derivative(a), b1 = derivative(b);
        integrand = (derivative(derivative(a1)) * b + a * derivative(derivative(b1)) * Rational(-1)) * Rational(1, 2);
        if (with_conn) {
          Series c = series_of(conn, at, -la - lb + 2);
          integrand = integrand + c * (a1 * b + a * b1 * Rational(-1)) * Rational(-1);
        }
        break;
      }
      case CocycleKind::Mixing: {
        Series b1 = derivative(b);
        integrand = a * derivative(b1);
        if (with_conn) integrand = integrand + series_of(conn, at, -la - lb + 2) * a * b1;
        break;
      }
    }
    sum += integrand.at(-1);
  }
  return sum;
}

Rational CocycleTable::value(int n, int p, int m, int r) const {
  auto key = std::make_tuple(n, p, m, r);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Rational v = compute(n, p, m, r);
  std::lock_guard<std::mutex> lock(mu_);
  cache_.emplace(key, v);
  return v;
}

Rational CocycleTable::operator()(const KNExpansion& x, const KNExpansion& y) const {
  Rational sum;
  for (const auto& [i, a] : x.terms())
    for (const auto& [j, b] : y.terms()) sum += a * b * value(i.first, i.second, j.first, j.second);
  return sum;
}

DElement operator+(const DElement& a, const DElement& b) { return {a.field + b.field, a.func + b.func}; }

DElement operator*(const Rational& c, const DElement& a) { return {a.field * c, a.func * c}; }

DElement d_bracket(const GeometryPtr& geom, const DElement& x, const DElement& y) {
  FormElement ex = reconstruct(geom, x.field), ey = reconstruct(geom, y.field);
  DElement out;
  out.field = bracket(ex, ey);
  out.func = lie_derivative(ex, reconstruct(geom, y.func)) - lie_derivative(ey, reconstruct(geom, x.func));
  return out;
}

DCocycle::DCocycle(GeometryPtr geom, ProjectiveConnection R, AffineConnection T, Rational a, Rational b, Rational c)
    : geom_(geom),
      A_(geom, CocycleKind::Function),
      L_(geom, CocycleKind::VectorField, std::move(R)),
      M_(geom, CocycleKind::Mixing, {}, std::move(T)),
      a_(std::move(a)),
      b_(std::move(b)),
      c_(std::move(c)) {}

Rational DCocycle::operator()(const DElement& x, const DElement& y) const {
  return a_ * A_(x.func, y.func) + b_ * L_(x.field, y.field) + c_ * (M_(x.field, y.func) - M_(y.field, x.func));
}

LocalityWindow check_locality(const GeometryPtr& geom, const BasisPairCocycle& gamma, int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("empty window");
  auto scan = [&](int a, int b) {
    LocalityWindow w;
    for (int n = a; n <= b; ++n)
      for (int m = a; m <= b; ++m)
        for (int p = 1; p <= geom->size(); ++p)
          for (int r = 1; r <= geom->size(); ++r) {
            if (gamma(n, p, m, r) == 0) continue;
            if (!w.nonzero) {
              w.M1 = w.M2 = n + m;
              w.nonzero = true;
            }
            w.M1 = std::max(w.M1, n + m);
            w.M2 = std::min(w.M2, n + m);
          }
    return w;
  };
  LocalityWindow w = scan(lo, hi);
  LocalityWindow wide = scan(lo - 2, hi + 2);
  w.stable = wide.nonzero == w.nonzero && wide.M1 == w.M1 && wide.M2 == w.M2;
  return w;
}

Rational BasisFunctional::operator()(const KNExpansion& x) const {
  Rational sum;
  for (const auto& [k, c] : x.terms()) {
    auto it = values.find(k);
    if (it != values.end()) sum += c * it->second;
  }
  return sum;
}

BasisPairBracket table_bracket(const StructureTable& table) {
  return [&table](int n, int p, int m, int r) { return table.entry(n, p, m, r); };
}

bool coboundary_equivalent(const GeometryPtr& geom, const BasisPairBracket& bracket, const BasisPairCocycle& gamma1,
                           const BasisPairCocycle& gamma2, const BasisFunctional& phi, int lo, int hi) {
  const int N = geom->size();
  for (int n = lo; n <= hi; ++n)
    for (int m = lo; m <= hi; ++m)
      for (int p = 1; p <= N; ++p)
        for (int r = 1; r <= N; ++r)
          if (gamma1(n, p, m, r) - gamma2(n, p, m, r) != phi(bracket(n, p, m, r))) return false;
  return true;
}

std::optional<BasisFunctional> solve_coboundary(const GeometryPtr& geom, const BasisPairBracket& bracket,
                                                const BasisPairCocycle& gamma1, const BasisPairCocycle& gamma2,
                                                int lo, int hi) {
  const int N = geom->size();
  std::vector<std::tuple<int, int, int, int>> pairs;
  std::vector<KNExpansion> values;
  std::set<std::pair<int, int>> keys;
  for (int n = lo; n <= hi; ++n)
    for (int m = lo; m <= hi; ++m)
      for (int p = 1; p <= N; ++p)
        for (int r = 1; r <= N; ++r) {
          pairs.emplace_back(n, p, m, r);
          values.push_back(bracket(n, p, m, r));
          for (const auto& [k, c] : values.back().terms()) keys.insert(k);
        }
  std::vector<std::pair<int, int>> unknowns(keys.begin(), keys.end());
  std::map<std::pair<int, int>, int> column;
  for (size_t i = 0; i < unknowns.size(); ++i) column[unknowns[i]] = static_cast<int>(i);
  Matrix a(static_cast<int>(pairs.size()), static_cast<int>(unknowns.size()));
  std::vector<Rational> rhs(pairs.size());
  for (size_t row = 0; row < pairs.size(); ++row) {
    auto [n, p, m, r] = pairs[row];
    for (const auto& [k, c] : values[row].terms()) a(static_cast<int>(row), column[k]) = c;
    rhs[row] = gamma1(n, p, m, r) - gamma2(n, p, m, r);
  }
  auto x = solve(a, rhs);
  if (!x) return std::nullopt;
  BasisFunctional phi;
  for (size_t i = 0; i < unknowns.size(); ++i)
    if (!is_zero((*x)[i])) phi.values[unknowns[i]] = (*x)[i];
  return phi;
}

LInvarianceReport check_L_invariance(const std::function<Rational(const FormElement&, const FormElement&)>& c,
                                     const std::vector<std::array<FormElement, 3>>& samples) {
  LInvarianceReport report;
  for (const auto& [e, a, b] : samples) {
    Rational left = c(form_lie_derivative(e, a), b);
    Rational right = c(a, form_lie_derivative(e, b));
    if (left + right != 0) report.derivation = false;
    if (left != right) report.literal = false;
  }
  return report;
}

}  // namespace kn
