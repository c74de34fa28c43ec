#include "kn/wedge.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace kn {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

int linear_index(const SectionIndex& s, const Shape& shape) {
  if (s.p < 1 || s.p > shape.N || s.j < 0 || s.j >= shape.r || s.a < 1 || s.a > shape.dimV)
    throw std::out_of_range("section index out of range");
  return s.n * shape.block() + ((s.p - 1) * shape.r + s.j) * shape.dimV + (s.a - 1);
}

SectionIndex section_index(int M, const Shape& shape) {
  const int B = shape.block();
  SectionIndex s;
  s.n = floor_div(M, B);
  const int rem = M - s.n * B;
  s.a = rem % shape.dimV + 1;
  const int pj = rem / shape.dimV;
  s.p = pj / shape.r + 1;
  s.j = pj % shape.r;
  return s;
}

RepresentationData RepresentationData::fundamental(AlgebraTag tag, int rank, int bundle_rank) {
  if (tag == AlgebraTag::GL1) rank = 1;
  RepresentationData rep;
  rep.r = bundle_rank;
  rep.dimV = rank;
  rep.generators = standard_basis(tag, rank);
  for (const auto& x : rep.generators) rep.tau.push_back(x.entries);
  return rep;
}

std::vector<Rational> RepresentationData::coordinates(const MatrixElement& x) const {
  if (generators.empty()) throw std::invalid_argument("representation without generators");
  const int r2 = x.rank() * x.rank();
  Matrix a(r2, static_cast<int>(generators.size()));
  std::vector<Rational> b(r2);
  for (int i = 0; i < x.rank(); ++i)
    for (int j = 0; j < x.rank(); ++j) {
      const int row = i * x.rank() + j;
      b[row] = x.entries(i, j);
      for (size_t g = 0; g < generators.size(); ++g) a(row, static_cast<int>(g)) = generators[g].entries(i, j);
    }
  auto c = solve(a, b);
  if (!c) throw std::invalid_argument("element is not in the span of the generators");
  return *c;
}

Matrix RepresentationData::tau_of(const MatrixElement& x) const {
  std::vector<Rational> c = coordinates(x);
  Matrix out(dimV, dimV);
  for (size_t g = 0; g < generators.size(); ++g)
    if (!is_zero(c[g])) out += tau[g] * c[g];
  return out;
}

void RepresentationData::validate(const Geometry& geom) const {
  if (r < 1 || dimV < 1) throw std::invalid_argument("representation needs r >= 1 and dim V >= 1");
  if (tau.size() != generators.size()) throw std::invalid_argument("one τ matrix per generator required");
  for (const auto& t : tau)
    if (t.rows() != dimV || t.cols() != dimV) throw std::invalid_argument("τ matrix has the wrong size");
  for (size_t i = 0; i < generators.size(); ++i)
    for (size_t j = 0; j < generators.size(); ++j) {
      Matrix lhs = tau_of(commutator(generators[i], generators[j]));
      if (lhs != tau[i] * tau[j] - tau[j] * tau[i]) throw std::invalid_argument("τ is not a Lie algebra homomorphism");
    }
  if (connection.empty()) return;
  if (static_cast<int>(connection.size()) != r) throw std::invalid_argument("connection form must be r x r");
  for (const auto& row : connection) {
    if (static_cast<int>(row.size()) != r) throw std::invalid_argument("connection form must be r x r");
    for (const auto& f : row) {
      if (f.is_zero()) continue;
      if (!f.has_rational_poles()) throw std::invalid_argument("connection form has irrational poles");
      for (const auto& [root, mult] : f.poles()) {
        if (std::find(geom.punctures().begin(), geom.punctures().end(), root) == geom.punctures().end())
          throw std::invalid_argument("connection form has a pole away from the punctures");
        if (mult > 1) throw std::invalid_argument("connection form pole is not simple");
      }
      if (order_at(f, Point::infinity()) < 1) throw std::invalid_argument("connection form pole at infinity is not simple");
    }
  }
}

std::vector<FormElement> section_basis(const GeometryPtr& geom, const RepresentationData& rep, int n, int j, int p) {
  if (j < 0 || j >= rep.r) throw std::out_of_range("bundle component out of range");
  FormElement a = basis_A(geom, n, p);
  const int N = geom->size();
  for (int q = 1; q <= N; ++q)
    if (a.order_at(Point::at(geom->puncture(q))) != n + (q == p ? 0 : 1))
      throw std::logic_error("section has the wrong order at a puncture");
  if (a.order_at(Point::infinity()) != -n * N - N + 1) throw std::logic_error("section has the wrong order at infinity");
  std::vector<FormElement> out(rep.r, FormElement{RationalFunction(), 0, geom});
  out[j] = a;
  return out;
}

BandedOperator::BandedOperator(int lo, int hi, Generator gen) : impl_(std::make_shared<Impl>()) {
  impl_->lo = lo;
  impl_->hi = hi;
  impl_->gen = std::move(gen);
}

const BandedOperator::Column& BandedOperator::column(int M) const {
  static const Column empty;
  if (!impl_->gen) return empty;
  {
    std::lock_guard<std::mutex> lock(impl_->mu);
    auto it = impl_->cache.find(M);
    if (it != impl_->cache.end()) return it->second;
  }
  Column raw = impl_->gen(M);
  std::map<int, Rational> merged;
  for (auto& [row, v] : raw) {
    if (row < M + impl_->lo || row > M + impl_->hi)
      throw std::logic_error("operator column " + std::to_string(M) + " has row " + std::to_string(row) +
                             " outside its band");
    merged[row] += v;
  }
  Column col;
  for (auto& [row, v] : merged)
    if (!is_zero(v)) col.emplace_back(row, v);
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->cache.emplace(M, std::move(col)).first->second;
}

Rational BandedOperator::entry(int row, int col) const {
  for (const auto& [r, v] : column(col))
    if (r == row) return v;
  return 0;
}

BandedOperator operator+(const BandedOperator& a, const BandedOperator& b) {
  if (a.is_zero_operator()) return b;
  if (b.is_zero_operator()) return a;
  return BandedOperator(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()), [a, b](int M) {
    BandedOperator::Column col = a.column(M);
    const auto& other = b.column(M);
    col.insert(col.end(), other.begin(), other.end());
    return col;
  });
}

BandedOperator operator*(const Rational& c, const BandedOperator& a) {
  if (is_zero(c) || a.is_zero_operator()) return {};
  return BandedOperator(a.lo(), a.hi(), [a, c](int M) {
    BandedOperator::Column col = a.column(M);
    for (auto& [row, v] : col) v *= c;
    return col;
  });
}

WedgeMonomial::WedgeMonomial(int charge, std::vector<int> explicit_entries)
    : charge_(charge), entries_(std::move(explicit_entries)) {
  for (size_t i = 1; i < entries_.size(); ++i)
    if (entries_[i - 1] >= entries_[i]) throw std::invalid_argument("wedge entries must be strictly increasing");
  if (!entries_.empty() && entries_.back() >= tail_start())
    throw std::invalid_argument("wedge entries collide with the tail");
  canonicalize();
}

void WedgeMonomial::canonicalize() {
  while (!entries_.empty() && entries_.back() == static_cast<int>(entries_.size()) - 1 + charge_) entries_.pop_back();
}

bool WedgeMonomial::occupied(int index) const {
  return index >= tail_start() || std::binary_search(entries_.begin(), entries_.end(), index);
}

int WedgeMonomial::degree() const {
  int d = 0;
  for (size_t k = 0; k < entries_.size(); ++k) d += entries_[k] - static_cast<int>(k) - charge_;
  return d;
}

int monomial_degree(const WedgeMonomial& m) { return m.degree(); }

std::string to_string(const WedgeMonomial& m) {
  std::ostringstream os;
  os << "[" << m.charge() << ":";
  for (size_t i = 0; i < m.entries().size(); ++i) os << (i ? "," : "") << m.entries()[i];
  os << "|" << m.tail_start() << "...]";
  return os.str();
}

std::vector<WedgeMonomial> enumerate_monomials(int charge, int degree) {
  std::vector<WedgeMonomial> out;
  if (degree > 0) return out;
  std::vector<int> parts;
  std::function<void(int, int)> rec = [&](int remaining, int largest) {
    if (remaining == 0) {
      std::vector<int> e(parts.size());
      for (size_t k = 0; k < parts.size(); ++k) e[k] = static_cast<int>(k) + charge - parts[k];
      out.emplace_back(charge, std::move(e));
      return;
    }
    for (int part = std::min(remaining, largest); part >= 1; --part) {
      parts.push_back(part);
      rec(remaining - part, part);
      parts.pop_back();
    }
  };
  rec(-degree, -degree);
  return out;
}

Rational WedgeVector::coefficient(const WedgeMonomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void WedgeVector::add(const WedgeMonomial& m, const Rational& c) {
  if (kn::is_zero(c)) return;
  if (!terms_.empty() && terms_.begin()->first.charge() != m.charge())
    throw std::logic_error("wedge vector mixes charge sectors");
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (kn::is_zero(it->second)) terms_.erase(it);
  }
}

WedgeVector& WedgeVector::operator+=(const WedgeVector& o) {
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

WedgeVector& WedgeVector::operator-=(const WedgeVector& o) {
  for (const auto& [m, c] : o.terms_) add(m, -c);
  return *this;
}

WedgeVector& WedgeVector::operator*=(const Rational& c) {
  if (kn::is_zero(c)) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

WedgeVector wedge_apply(const BandedOperator& op, const WedgeMonomial& m, Regularization reg) {
  WedgeVector out;
  if (op.is_zero_operator()) return out;
  const int q = m.charge();
  const int cutoff = reg.cutoff.value_or(q);
  const int T0 = m.tail_start();
  const auto& E = m.entries();

  auto off_diagonal = [&](int J) {
    for (const auto& [I, v] : op.column(J)) {
      if (I == J || m.occupied(I)) continue;
      std::vector<int> L = E;
      for (int t = T0; t <= J; ++t) L.push_back(t);
      auto pos_j = std::lower_bound(L.begin(), L.end(), J);
      L.erase(pos_j);
      auto pos_i = std::lower_bound(L.begin(), L.end(), I);
      const int lo = std::min(I, J), hi = std::max(I, J);
      const auto between = std::count_if(L.begin(), L.end(), [&](int x) { return x > lo && x < hi; });
      L.insert(pos_i, I);
      out.add(WedgeMonomial(q, std::move(L)), between % 2 == 0 ? v : -v);
    }
  };
  for (int J : E) off_diagonal(J);
  for (int J = T0; J < T0 - op.lo(); ++J) off_diagonal(J);

  const int first = std::min(E.empty() ? T0 : E.front(), cutoff);
  const int last = std::max(T0, cutoff);
  for (int I = first; I < last; ++I) {
    const int d = (m.occupied(I) ? 1 : 0) - (I >= cutoff ? 1 : 0);
    if (d == 0) continue;
    Rational v = op.entry(I, I);
    if (!is_zero(v)) out.add(m, v * d);
  }
  return out;
}

WedgeVector wedge_apply(const BandedOperator& op, const WedgeVector& v, Regularization reg) {
  WedgeVector out;
  for (const auto& [m, c] : v.terms()) out += c * wedge_apply(op, m, reg);
  return out;
}

FermionRep::FermionRep(std::shared_ptr<const AffineAlgebra> algebra, RepresentationData rep)
    : algebra_(std::move(algebra)), rep_(std::move(rep)) {
  const GeometryPtr& geom = algebra_->geometry();
  rep_.validate(*geom);
  for (const auto& x : rep_.generators)
    if (x.tag != algebra_->tag() || x.rank() != algebra_->rank())
      throw std::invalid_argument("representation generators belong to a different algebra");
  shape_ = {geom->size(), rep_.r, rep_.dimV};
  const int N = geom->size();
  field_extra_ = default_bounds(geom).M;
  if (!rep_.connection.empty()) field_extra_ = std::max(field_extra_, 3 - (3 + N - 1) / N);
}

BandedOperator FermionRep::build_current(const Matrix& tau, int k, int q) const {
  if (tau.is_zero()) return {};
  const int B = shape_.block();
  const int K = default_bounds(geometry()).K;
  auto algebra = algebra_;
  Shape shape = shape_;
  return BandedOperator(k * B - (B - 1), (k + K) * B + (B - 1), [algebra, shape, tau, k, q](int M) {
    SectionIndex s = section_index(M, shape);
    BandedOperator::Column col;
    for (const auto& [key, c] : algebra->product_table().entry(k, q, s.n, s.p).terms())
      for (int b = 1; b <= shape.dimV; ++b) {
        const Rational& t = tau(b - 1, s.a - 1);
        if (!is_zero(t)) col.emplace_back(linear_index({key.first, key.second, s.j, b}, shape), c * t);
      }
    return col;
  });
}

BandedOperator FermionRep::current(const MatrixElement& x, int k, int q) const {
  for (size_t i = 0; i < rep_.generators.size(); ++i) {
    if (rep_.generators[i] != x) continue;
    auto key = std::make_tuple(static_cast<int>(i), k, q);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = generator_cache_.find(key);
    if (it == generator_cache_.end()) it = generator_cache_.emplace(key, build_current(rep_.tau[i], k, q)).first;
    return it->second;
  }
  BandedOperator op;
  std::vector<Rational> c = rep_.coordinates(x);
  for (size_t i = 0; i < c.size(); ++i)
    if (!is_zero(c[i])) op = op + c[i] * current(rep_.generators[i], k, q);
  return op;
}

BandedOperator FermionRep::matrix_of_current(const MatrixElement& x, const FormElement& A) const {
  BandedOperator op;
  const KNExpansion e = expand_in_basis(A);
  for (const auto& [key, c] : e.terms()) op = op + c * current(x, key.first, key.second);
  return op;
}

BandedOperator FermionRep::field(int k, int q) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = field_cache_.find({k, q});
  if (it != field_cache_.end()) return it->second;
  const int B = shape_.block();
  auto algebra = algebra_;
  Shape shape = shape_;
  auto connection = rep_.connection;
  BandedOperator op(k * B - (B - 1), (k + field_extra_) * B + (B - 1), [algebra, shape, connection, k, q](int M) {
    SectionIndex s = section_index(M, shape);
    BandedOperator::Column col;
    for (const auto& [key, c] : algebra->action_table().entry(k, q, s.n, s.p).terms())
      col.emplace_back(linear_index({key.first, key.second, s.j, s.a}, shape), c);
    if (!connection.empty()) {
      const GeometryPtr& geom = algebra->geometry();
      RationalFunction ea = geom->basis_function({-1, k, q}) * geom->basis_function({0, s.n, s.p});
      for (int i = 0; i < shape.r; ++i) {
        const RationalFunction& w = connection[i][s.j];
        if (w.is_zero()) continue;
        const KNExpansion wea = expand_in_basis({w * ea, 0, geom});
        for (const auto& [key, c] : wea.terms())
          col.emplace_back(linear_index({key.first, key.second, i, s.a}, shape), c);
      }
    }
    return col;
  });
  field_cache_.emplace(std::make_pair(k, q), op);
  return op;
}

BandedOperator FermionRep::field_operator(const KNExpansion& e) const {
  if (e.weight() != -1) throw std::invalid_argument("field operator needs a vector field");
  BandedOperator op;
  for (const auto& [key, c] : e.terms()) op = op + c * field(key.first, key.second);
  return op;
}

BandedOperator FermionRep::matrix_of_field(const FormElement& e) const { return field_operator(expand_in_basis(e)); }

BandedOperator FermionRep::current_operator(const CurrentElement& x) const {
  BandedOperator op;
  for (const auto& [key, m] : x.terms()) op = op + current({m, algebra_->tag()}, key.first, key.second);
  return op;
}

BandedOperator FermionRep::of(const DgElement& X) const {
  return current_operator(X.current) + field_operator(X.vector_field);
}

WedgeVector FermionRep::defect(const DgElement& X, const DgElement& Y, const WedgeVector& v, Regularization reg) const {
  BandedOperator a = of(X), b = of(Y), c = of(algebra_->dg_bracket(X, Y));
  return wedge_apply(a, wedge_apply(b, v, reg), reg) - wedge_apply(b, wedge_apply(a, v, reg), reg) -
         wedge_apply(c, v, reg);
}

Rational FermionRep::extract_cocycle(const DgElement& X, const DgElement& Y, int charge, int checks,
                                     Regularization reg) const {
  WedgeMonomial vac(charge);
  WedgeVector d = defect(X, Y, WedgeVector(vac), reg);
  const Rational s = d.coefficient(vac);
  if (d != s * WedgeVector(vac)) throw std::logic_error("defect on the vacuum is not a multiple of the vacuum");
  int done = 0;
  for (int deg = -1; done < checks; --deg) {
    for (const auto& m : enumerate_monomials(charge, deg)) {
      if (done == checks) break;
      WedgeVector dm = defect(X, Y, WedgeVector(m), reg);
      if (dm != s * WedgeVector(m))
        throw std::logic_error("defect is not scalar on " + to_string(m));
      ++done;
    }
  }
  return s;
}

}  // namespace kn
