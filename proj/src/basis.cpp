#include "kn/basis.hpp"

#include <stdexcept>

namespace kn {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::string to_string(const BasisIndex& i) {
  return "f^" + std::to_string(i.weight) + "_{" + std::to_string(i.n) + "," + std::to_string(i.p) + "}";
}

Geometry::Geometry(std::vector<Rational> punctures) : punctures_(std::move(punctures)) {
  if (punctures_.empty()) throw std::invalid_argument("geometry needs at least one puncture");
  for (auto& x : punctures_) x.canonicalize();
  for (size_t i = 0; i < punctures_.size(); ++i) {
    for (size_t j = i + 1; j < punctures_.size(); ++j) {
      if (punctures_[i] == punctures_[j]) {
        throw std::invalid_argument("punctures must be distinct (" + kn::to_string(punctures_[i]) + " repeated)");
      }
    }
  }
}

const Rational& Geometry::puncture(int p) const {
  if (p < 1 || p > size()) throw std::out_of_range("puncture index " + std::to_string(p) + " out of range");
  return punctures_[static_cast<size_t>(p - 1)];
}

std::vector<Point> Geometry::points() const {
  std::vector<Point> out;
  for (auto& x : punctures_) out.push_back(Point::at(x));
  out.push_back(Point::infinity());
  return out;
}

namespace {

// Orders at every puncture and at infinity, and the leading coefficient 1 at P_p.
void verify_basis_element(const Geometry& geom, const BasisIndex& idx, const RationalFunction& func) {
  const int N = geom.size();
  const int n = idx.n, p = idx.p, weight = idx.weight;
  for (int i = 1; i <= N; ++i) {
    int expect = (n + 1 - weight) - (i == p ? 1 : 0);
    if (order_at(func, Point::at(geom.puncture(i))) != expect) {
      throw std::logic_error("basis element " + to_string(idx) + " has the wrong order at P_" + std::to_string(i));
    }
  }
  // genus 0: -N(n+1-λ) + (2λ-1)(g-1), and (dz)^λ contributes -2λ
  if (order_at(func, Point::infinity()) - 2 * weight != -N * (n + 1 - weight) - (2 * weight - 1)) {
    throw std::logic_error("basis element " + to_string(idx) + " has the wrong order at infinity");
  }
  LaurentExpansion lead = laurent_expand(func, Point::at(geom.puncture(p)), 1);
  if (lead.coefficients.front() != 1) throw std::logic_error("basis element " + to_string(idx) + " is not normalized");
}

}  // namespace

const RationalFunction& Geometry::basis_function(const BasisIndex& i) const {
  if (i.p < 1 || i.p > size()) throw std::out_of_range("puncture index " + std::to_string(i.p) + " out of range");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(i);
    if (it != cache_.end()) return *it->second;
  }
  // c (z - P_p)^(n-λ) prod_{q != p} (z - P_q)^(n+1-λ)
  const int own = i.n - i.weight;
  const int other = i.n + 1 - i.weight;
  const Rational& pp = puncture(i.p);
  Rational c = 1;
  Polynomial num(Rational(1));
  RationalFunction::Roots roots;
  auto attach = [&](const Rational& at, int e) {
    if (e > 0) num = num * Polynomial::linear_power(at, e);
    if (e < 0) roots.emplace_back(at, -e);
  };
  attach(pp, own);
  for (int q = 1; q <= size(); ++q) {
    if (q == i.p) continue;
    attach(puncture(q), other);
    c *= kn::pow(pp - puncture(q), -other);
  }
  auto f = std::make_unique<RationalFunction>(RationalFunction::from_factored(num * c, std::move(roots)));
  verify_basis_element(*this, i, *f);
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = cache_.emplace(i, std::move(f));
  return *it->second;
}

Rational Series::at(int order) const {
  if (order < lead) return 0;
  if (order > known_through()) throw std::out_of_range("series coefficient beyond the known range");
  return coeffs[static_cast<size_t>(order - lead)];
}

Series series_of(const RationalFunction& f, const Point& at, int through) {
  if (f.is_zero()) return {through + 1, {}};
  int lead = kn::order_at(f, at);
  if (through < lead) return {through + 1, {}};
  LaurentExpansion e = laurent_expand(f, at, through - lead + 1);
  return {e.leading_order, std::move(e.coefficients)};
}

Series operator*(const Series& a, const Series& b) {
  Series out;
  out.lead = a.lead + b.lead;
  const int through = std::min(a.known_through() + b.lead, b.known_through() + a.lead);
  if (through < out.lead) return {through + 1, {}};
  out.coeffs.resize(static_cast<size_t>(through - out.lead + 1));
  for (size_t i = 0; i < a.coeffs.size(); ++i) {
    if (is_zero(a.coeffs[i])) continue;
    for (size_t j = 0; j < b.coeffs.size() && i + j < out.coeffs.size(); ++j) out.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  }
  return out;
}

Series operator+(const Series& a, const Series& b) {
  Series out;
  out.lead = std::min(a.lead, b.lead);
  const int through = std::min(a.known_through(), b.known_through());
  if (through < out.lead) return {through + 1, {}};
  out.coeffs.resize(static_cast<size_t>(through - out.lead + 1));
  for (int o = out.lead; o <= through; ++o) out.coeffs[static_cast<size_t>(o - out.lead)] = a.at(o) + b.at(o);
  return out;
}

Series operator*(const Series& a, const Rational& c) {
  Series out = a;
  for (auto& x : out.coeffs) x *= c;
  return out;
}

Series derivative(const Series& a) {
  Series out;
  out.lead = a.lead - 1;
  out.coeffs.resize(a.coeffs.size());
  for (size_t i = 0; i < a.coeffs.size(); ++i) out.coeffs[i] = a.coeffs[i] * (a.lead + static_cast<int>(i));
  return out;
}

Series Geometry::basis_series(const BasisIndex& i, int q, int through) const {
  auto key = std::make_pair(i, q);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = series_cache_.find(key);
    if (it != series_cache_.end() && it->second.known_through() >= through) return it->second;
  }
  const RationalFunction& f = basis_function(i);
  // own order is n-λ at P_p and n+1-λ elsewhere; fetch a little extra to limit recomputation
  const int lead = i.n - i.weight + (q == i.p ? 0 : 1);
  Series s = series_of(f, Point::at(puncture(q)), std::max(through, lead) + 4);
  std::lock_guard<std::mutex> lock(mu_);
  auto& slot = series_cache_[key];
  if (slot.known_through() < s.known_through() || slot.coeffs.empty()) slot = s;
  return slot;
}

GeometryPtr make_geometry(std::vector<Rational> punctures) {
  return std::make_shared<const Geometry>(std::move(punctures));
}

GeometryPtr make_geometry(const std::vector<std::string>& punctures) {
  std::vector<Rational> pts;
  for (auto& s : punctures) pts.push_back(parse_rational(s));
  return make_geometry(std::move(pts));
}

void FormElement::check_support() const {
  if (!geom) throw std::invalid_argument("form element without geometry");
  if (func.is_zero()) return;
  if (!func.has_rational_poles()) throw std::domain_error("support violation: pole off the puncture set");
  for (auto& [r, k] : func.poles()) {
    bool ok = false;
    for (auto& x : geom->punctures()) ok = ok || x == r;
    if (!ok) throw std::domain_error("support violation: pole at " + kn::to_string(r) + " is not a puncture");
  }
}

int FormElement::order_at(const Point& at) const {
  int o = kn::order_at(func, at);
  if (o == kPositiveInfinity || !at.is_infinity()) return o;
  return o - 2 * weight;
}

void require_same_geometry(const FormElement& a, const FormElement& b) {
  if (!a.geom || !b.geom) throw std::invalid_argument("form element without geometry");
  if (a.geom != b.geom && !(*a.geom == *b.geom)) throw std::invalid_argument("geometry mismatch");
}

Rational KNExpansion::coefficient(int n, int p) const {
  auto it = terms_.find({n, p});
  return it == terms_.end() ? Rational(0) : it->second;
}

void KNExpansion::add(int n, int p, const Rational& c) {
  if (kn::is_zero(c)) return;
  auto [it, inserted] = terms_.emplace(Key{n, p}, c);
  if (inserted) return;
  it->second += c;
  if (kn::is_zero(it->second)) terms_.erase(it);
}

std::optional<std::pair<int, int>> KNExpansion::degree_window() const {
  if (terms_.empty()) return std::nullopt;
  return std::make_pair(terms_.begin()->first.first, terms_.rbegin()->first.first);
}

KNExpansion& KNExpansion::operator+=(const KNExpansion& o) {
  if (o.weight_ != weight_ && !o.is_zero()) throw std::invalid_argument("adding expansions of different weight");
  for (auto& [k, c] : o.terms_) add(k.first, k.second, c);
  return *this;
}

KNExpansion& KNExpansion::operator-=(const KNExpansion& o) {
  if (o.weight_ != weight_ && !o.is_zero()) throw std::invalid_argument("adding expansions of different weight");
  for (auto& [k, c] : o.terms_) add(k.first, k.second, -c);
  return *this;
}

KNExpansion& KNExpansion::operator*=(const Rational& c) {
  if (kn::is_zero(c)) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) v *= c;
  return *this;
}

KNExpansion KNExpansion::single(int weight, int n, int p, const Rational& c) {
  KNExpansion x(weight);
  x.add(n, p, c);
  return x;
}

FormElement make_basis(const GeometryPtr& geom, int weight, int n, int p) {
  if (!geom) throw std::invalid_argument("null geometry");
  if (p < 1 || p > geom->size()) throw std::out_of_range("puncture index " + std::to_string(p) + " out of range");
  return {geom->basis_function({weight, n, p}), weight, geom};
}

FormElement basis_A(const GeometryPtr& geom, int n, int p) { return make_basis(geom, 0, n, p); }
FormElement basis_e(const GeometryPtr& geom, int n, int p) { return make_basis(geom, -1, n, p); }
FormElement basis_omega(const GeometryPtr& geom, int n, int p) { return make_basis(geom, 1, -n, p); }
FormElement basis_Omega(const GeometryPtr& geom, int n, int p) { return make_basis(geom, 2, -n, p); }

Rational kn_pairing(const FormElement& f, const FormElement& g) {
  require_same_geometry(f, g);
  if (f.weight + g.weight != 1) {
    throw std::invalid_argument("pairing needs complementary weights, got " + std::to_string(f.weight) + " and " +
                                std::to_string(g.weight));
  }
  RationalFunction h = f.func * g.func;
  Rational sum = 0;
  for (auto& x : f.geom->punctures()) sum += residue_form(h, Point::at(x));
  if (sum != -residue_form(h, Point::infinity())) {
    throw std::logic_error("pairing: in-point residues disagree with the residue at infinity");
  }
  return sum;
}

namespace {

// Degrees that can carry a nonzero coefficient, from the orders of f.
std::optional<std::pair<int, int>> candidate_degrees(const FormElement& f) {
  if (f.func.is_zero()) return std::nullopt;
  const int N = f.geom->size();
  int lo = kPositiveInfinity;
  for (auto& x : f.geom->punctures()) lo = std::min(lo, kn::order_at(f.func, Point::at(x)));
  lo += f.weight;
  const int hi = f.weight + floor_div(-kn::order_at(f.func, Point::infinity()), N);
  return std::make_pair(lo, hi);
}

}  // namespace

KNExpansion expand_by_pairing(const FormElement& f) {
  f.check_support();
  KNExpansion out(f.weight);
  auto window = candidate_degrees(f);
  if (!window) return out;
  const int N = f.geom->size();
  for (int n = window->first; n <= window->second; ++n) {
    for (int p = 1; p <= N; ++p) {
      out.add(n, p, kn_pairing(f, make_basis(f.geom, 1 - f.weight, -n, p)));
    }
  }
  return out;
}

KNExpansion expand_from_series(const GeometryPtr& geom, int weight, const std::vector<Series>& local, int order_inf) {
  const int N = geom->size();
  if (static_cast<int>(local.size()) != N) throw std::invalid_argument("one local series per puncture expected");
  KNExpansion out(weight);
  if (order_inf == kPositiveInfinity) return out;
  const int top = floor_div(-order_inf, N);  // highest order needed at each puncture
  int lo = kPositiveInfinity;
  std::vector<int> first(static_cast<size_t>(N));
  for (int q = 0; q < N; ++q) {
    const Series& s = local[q];
    if (s.known_through() < top) throw std::invalid_argument("local series too short for the expansion");
    int o = s.known_through() + 1;
    for (size_t i = 0; i < s.coeffs.size(); ++i) {
      if (!is_zero(s.coeffs[i])) {
        o = s.lead + static_cast<int>(i);
        break;
      }
    }
    first[q] = o;
    lo = std::min(lo, o);
  }
  const int hi = weight + top;
  for (int n = lo + weight; n <= hi; ++n) {
    for (int p = 1; p <= N; ++p) {
      BasisIndex dual{1 - weight, -n, p};
      Rational c = 0;
      for (int q = 1; q <= N; ++q) {
        const int dual_lead = weight - n - (q == p ? 1 : 0);
        const int a_max = -1 - dual_lead;
        if (a_max < first[q - 1]) continue;
        Series d = geom->basis_series(dual, q, -1 - first[q - 1]);
        const Series& s = local[q - 1];
        for (int a = first[q - 1]; a <= a_max; ++a) {
          const Rational& fa = s.coeffs[static_cast<size_t>(a - s.lead)];
          if (is_zero(fa)) continue;
          c += fa * d.at(-1 - a);
        }
      }
      out.add(n, p, c);
    }
  }
  return out;
}

KNExpansion expand_in_basis(const FormElement& f) {
  f.check_support();
  if (f.func.is_zero()) return KNExpansion(f.weight);
  const int N = f.geom->size();
  const int order_inf = kn::order_at(f.func, Point::infinity());
  const int top = floor_div(-order_inf, N);
  std::vector<Series> local;
  for (auto& x : f.geom->punctures()) local.push_back(series_of(f.func, Point::at(x), top));
  return expand_from_series(f.geom, f.weight, local, order_inf);
}

FormElement reconstruct(const GeometryPtr& geom, const KNExpansion& x) {
  RationalFunction sum;
  for (auto& [k, c] : x.terms()) sum += geom->basis_function({x.weight(), k.first, k.second}) * c;
  return {sum, x.weight(), geom};
}

std::optional<std::pair<int, int>> homogeneous_degree_window(const FormElement& f) {
  return expand_in_basis(f).degree_window();
}

}  // namespace kn
