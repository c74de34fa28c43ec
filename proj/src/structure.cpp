#include "kn/structure.hpp"

#include "kn/linalg.hpp"

#include <algorithm>
#include <stdexcept>

namespace kn {

FormElement form_product(const FormElement& a, const FormElement& b) {
  require_same_geometry(a, b);
  return {a.func * b.func, a.weight + b.weight, a.geom};
}

FormElement form_bracket(const FormElement& e, const FormElement& f) {
  require_same_geometry(e, f);
  if (e.weight != -1 || f.weight != -1) throw std::invalid_argument("bracket needs two vector fields");
  return {e.func * f.func.derivative() - f.func * e.func.derivative(), -1, e.geom};
}

FormElement form_lie_derivative(const FormElement& e, const FormElement& f) {
  require_same_geometry(e, f);
  if (e.weight != -1) throw std::invalid_argument("Lie derivative along a form that is not a vector field");
  RationalFunction g = e.func * f.func.derivative();
  if (f.weight != 0) g += e.func.derivative() * f.func * Rational(f.weight);
  return {g, f.weight, e.geom};
}

KNExpansion multiply(const FormElement& a, const FormElement& b) {
  if (a.weight != 0 || b.weight != 0) throw std::invalid_argument("multiply needs two functions");
  return expand_in_basis(form_product(a, b));
}

KNExpansion bracket(const FormElement& e, const FormElement& f) { return expand_in_basis(form_bracket(e, f)); }

KNExpansion lie_derivative(const FormElement& e, const FormElement& f) {
  return expand_in_basis(form_lie_derivative(e, f));
}

std::string to_string(TableKind k) {
  switch (k) {
    case TableKind::FunctionProduct:
      return "function-product";
    case TableKind::VectorBracket:
      return "vector-bracket";
    case TableKind::FieldOnForm:
      return "field-on-form";
  }
  return "?";
}

StructureTable::StructureTable(GeometryPtr geom, TableKind kind, int form_weight)
    : geom_(std::move(geom)), kind_(kind), form_weight_(form_weight) {
  if (!geom_) throw std::invalid_argument("null geometry");
}

int StructureTable::result_weight() const {
  switch (kind_) {
    case TableKind::FunctionProduct:
      return 0;
    case TableKind::VectorBracket:
      return -1;
    case TableKind::FieldOnForm:
      return form_weight_;
  }
  return 0;
}

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

KNExpansion StructureTable::compute(int n, int p, int m, int r) const {
  // Works on local series at the punctures; the order at infinity bounds the top degree.
  const int N = geom_->size();
  const int wa = kind_ == TableKind::FunctionProduct ? 0 : -1;
  const int wb = kind_ == TableKind::FunctionProduct ? 0 : kind_ == TableKind::VectorBracket ? -1 : form_weight_;
  const bool differential = kind_ != TableKind::FunctionProduct;
  const int order_inf = infinity_order(N, wa, n) + infinity_order(N, wb, m) + (differential ? 1 : 0);
  const int top = floor_div(-order_inf, N);
  std::vector<Series> local;
  for (int q = 1; q <= N; ++q) {
    const int la = local_order(wa, n, p, q);
    const int lb = local_order(wb, m, r, q);
    const int extra = differential ? 2 : 0;
    Series a = geom_->basis_series({wa, n, p}, q, top - lb + extra);
    Series b = geom_->basis_series({wb, m, r}, q, top - la + extra);
    switch (kind_) {
      case TableKind::FunctionProduct:
        local.push_back(a * b);
        break;
      case TableKind::VectorBracket:
        local.push_back(a * derivative(b) + b * derivative(a) * Rational(-1));
        break;
      case TableKind::FieldOnForm: {
        Series g = a * derivative(b);
        if (wb != 0) g = g + derivative(a) * b * Rational(wb);
        local.push_back(g);
        break;
      }
    }
  }
  return expand_from_series(geom_, result_weight(), local, order_inf);
}

const KNExpansion& StructureTable::entry(int n, int p, int m, int r) const {
  auto key = std::make_tuple(n, p, m, r);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return *it->second;
  }
  KNExpansion x = compute(n, p, m, r);
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = entries_.emplace(key, std::make_unique<KNExpansion>(std::move(x)));
  return *it->second;
}

Rational StructureTable::leading_coefficient(int n, int p, int m, int r, int h_p) const {
  if (p != r || h_p != p) return 0;
  switch (kind_) {
    case TableKind::FunctionProduct:
      return 1;
    case TableKind::VectorBracket:
      return m - n;
    case TableKind::FieldOnForm:
      return m + form_weight_ * n;
  }
  return 0;
}

int StructureTable::measure(int lo, int hi) const {
  const int N = geom_->size();
  int bound = 0;
  for (int n = lo; n <= hi; ++n) {
    for (int m = lo; m <= hi; ++m) {
      for (int p = 1; p <= N; ++p) {
        for (int r = 1; r <= N; ++r) {
          auto w = entry(n, p, m, r).degree_window();
          if (!w) continue;
          if (w->first < n + m) {
            throw std::logic_error(to_string(kind_) + ": term below degree n+m for (" + std::to_string(n) + "," +
                                   std::to_string(p) + ")x(" + std::to_string(m) + "," + std::to_string(r) + ")");
          }
          bound = std::max(bound, w->second - (n + m));
        }
      }
    }
  }
  return bound;
}

namespace {

std::mutex bounds_mu;
std::map<std::tuple<std::vector<Rational>, int, int>, AlmostGradingBounds> bounds_cache;

}  // namespace

AlmostGradingBounds measure_bounds(const GeometryPtr& geom, int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("empty window");
  auto key = std::make_tuple(geom->punctures(), lo, hi);
  {
    std::lock_guard<std::mutex> lock(bounds_mu);
    auto it = bounds_cache.find(key);
    if (it != bounds_cache.end()) return it->second;
  }
  StructureTable prod(geom, TableKind::FunctionProduct);
  StructureTable brk(geom, TableKind::VectorBracket);
  StructureTable act(geom, TableKind::FieldOnForm, 0);
  AlmostGradingBounds b;
  b.K = prod.measure(lo, hi);
  b.L = brk.measure(lo, hi);
  b.M = act.measure(lo, hi);
  b.stable = prod.measure(lo - 2, hi + 2) == b.K && brk.measure(lo - 2, hi + 2) == b.L &&
             act.measure(lo - 2, hi + 2) == b.M;
  std::lock_guard<std::mutex> lock(bounds_mu);
  bounds_cache.emplace(key, b);
  return b;
}

AlmostGradingBounds default_bounds(const GeometryPtr& geom) { return measure_bounds(geom, -6, 6); }

SplitVariant parse_split_variant(const std::string& text) {
  if (text == "standard") return SplitVariant::standard();
  if (text == "enlarged") return SplitVariant::enlarged();
  if (text.rfind("depth", 0) == 0) {
    std::string rest = text.substr(5);
    if (!rest.empty() && rest.front() == ':') rest.erase(0, 1);
    if (rest.empty()) throw std::invalid_argument("depth variant needs a parameter, e.g. depth:1");
    return SplitVariant::depth_p(std::stoi(rest));
  }
  throw std::invalid_argument("unknown split variant '" + text + "'");
}

namespace {

// Depth split of the degree <= 0 part of x.
void depth_split(const GeometryPtr& geom, const KNExpansion& low, int depth, KNExpansion& zero, KNExpansion& minus) {
  const int lambda = low.weight();
  if (lambda != 0 && lambda != -1) throw std::invalid_argument("depth split is defined for functions and vector fields");
  if (lambda == 0 && depth < 1) throw std::invalid_argument("function depth split needs p >= 1");
  if (lambda == -1 && depth < 0) throw std::invalid_argument("vector field depth split needs p >= 0");
  const int N = geom->size();
  const int target = lambda == 0 ? depth : depth + 1;  // required form order at infinity
  // form order of f^λ_n at infinity is -N(n+1-λ) + 1 - 2λ; below n_auto every element qualifies
  int n_auto = 0;
  while (-N * (n_auto + 1 - lambda) + 1 - 2 * lambda < target) --n_auto;
  std::vector<std::pair<int, int>> middle;  // (n, p), n descending
  for (int n = 0; n > n_auto; --n) {
    for (int p = 1; p <= N; ++p) middle.emplace_back(n, p);
  }
  for (auto& [k, c] : low.terms()) {
    if (k.first <= n_auto) minus.add(k.first, k.second, c);
  }
  if (middle.empty()) return;
  // conditions: function Laurent coefficients at infinity below order target + 2λ vanish
  const int func_target = target + 2 * lambda;
  const int o_min = -N * (1 - lambda) + 1;
  const int nconds = func_target - o_min;
  const int cols = static_cast<int>(middle.size());
  Matrix conds(std::max(nconds, 0), cols);
  for (int j = 0; j < cols; ++j) {
    const RationalFunction& f = geom->basis_function({lambda, middle[j].first, middle[j].second});
    LaurentExpansion e = laurent_expand(f, Point::infinity(), std::max(nconds, 1));
    for (int i = 0; i < nconds; ++i) conds(i, j) = e.coefficient(o_min + i);
  }
  auto w = nullspace(conds);
  Matrix wm(static_cast<int>(w.size()), cols);
  for (int i = 0; i < wm.rows(); ++i) {
    for (int j = 0; j < cols; ++j) wm(i, j) = w[i][j];
  }
  std::vector<int> pivots = rref(wm);
  std::vector<Rational> m(static_cast<size_t>(cols));
  for (int j = 0; j < cols; ++j) m[j] = low.coefficient(middle[j].first, middle[j].second);
  std::vector<Rational> wpart(static_cast<size_t>(cols));
  for (size_t k = 0; k < pivots.size(); ++k) {
    const Rational y = m[pivots[k]];
    if (is_zero(y)) continue;
    for (int j = 0; j < cols; ++j) wpart[j] += y * wm(static_cast<int>(k), j);
  }
  for (int j = 0; j < cols; ++j) {
    minus.add(middle[j].first, middle[j].second, wpart[j]);
    zero.add(middle[j].first, middle[j].second, m[j] - wpart[j]);
  }
}

}  // namespace

TriangularSplit triangular_split(const GeometryPtr& geom, const KNExpansion& x, SplitVariant variant, int bound) {
  const int lambda = x.weight();
  TriangularSplit s{KNExpansion(lambda), KNExpansion(lambda), KNExpansion(lambda), variant};
  switch (variant.kind) {
    case SplitVariant::Kind::Standard:
    case SplitVariant::Kind::EnlargedStar: {
      if (bound < 0) throw std::invalid_argument("negative almost-grading bound");
      int plus_from = 1;
      if (variant.kind == SplitVariant::Kind::EnlargedStar) plus_from = lambda == -1 ? -1 : 0;
      for (auto& [k, c] : x.terms()) {
        if (k.first >= plus_from) {
          s.plus.add(k.first, k.second, c);
        } else if (k.first >= -bound) {
          s.zero.add(k.first, k.second, c);
        } else {
          s.minus.add(k.first, k.second, c);
        }
      }
      return s;
    }
    case SplitVariant::Kind::Depth: {
      KNExpansion low(lambda);
      for (auto& [k, c] : x.terms()) {
        if (k.first >= 1) {
          s.plus.add(k.first, k.second, c);
        } else {
          low.add(k.first, k.second, c);
        }
      }
      depth_split(geom, low, variant.depth, s.zero, s.minus);
      return s;
    }
  }
  throw std::invalid_argument("unknown split variant");
}

ClosureReport closure_check(const StructureTable& table, SplitPart part, int bound, int window) {
  if (table.kind() == TableKind::FieldOnForm) throw std::invalid_argument("closure is checked on algebra tables");
  auto in_part = [&](int n) {
    switch (part) {
      case SplitPart::Plus:
        return n >= 1;
      case SplitPart::Zero:
        return n >= -bound && n <= 0;
      case SplitPart::Minus:
        return n <= -bound - 1;
    }
    return false;
  };
  const int N = table.geometry()->size();
  for (int n = -window; n <= window; ++n) {
    if (!in_part(n)) continue;
    for (int m = -window; m <= window; ++m) {
      if (!in_part(m)) continue;
      for (int p = 1; p <= N; ++p) {
        for (int r = 1; r <= N; ++r) {
          for (auto& [k, c] : table.entry(n, p, m, r).terms()) {
            if (!in_part(k.first)) {
              return {false, "(" + std::to_string(n) + "," + std::to_string(p) + ")*(" + std::to_string(m) + "," +
                                 std::to_string(r) + ") has a term of degree " + std::to_string(k.first)};
            }
          }
        }
      }
    }
  }
  return {};
}

}  // namespace kn
