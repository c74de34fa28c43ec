#include "kn/affine.hpp"

#include <stdexcept>

namespace kn {

std::string to_string(AlgebraTag t) {
  switch (t) {
    case AlgebraTag::GL:
      return "gl";
    case AlgebraTag::SL:
      return "sl";
    case AlgebraTag::GL1:
      return "gl1";
  }
  return "?";
}

AlgebraTag parse_algebra_tag(const std::string& text) {
  if (text == "gl") return AlgebraTag::GL;
  if (text == "sl") return AlgebraTag::SL;
  if (text == "gl1") return AlgebraTag::GL1;
  throw std::invalid_argument("unknown algebra '" + text + "' (expected gl, sl or gl1)");
}

void MatrixElement::validate() const {
  if (entries.rows() < 1 || entries.rows() != entries.cols()) throw std::invalid_argument("matrix must be square, r >= 1");
  if (tag == AlgebraTag::GL1 && entries.rows() != 1) throw std::invalid_argument("gl1 element must be 1x1");
  if (tag == AlgebraTag::SL && !is_zero(entries.trace())) throw std::invalid_argument("sl element must be traceless");
}

MatrixElement commutator(const MatrixElement& x, const MatrixElement& y) {
  if (x.tag != y.tag || x.rank() != y.rank()) throw std::invalid_argument("commutator of different algebras");
  return {x.entries * y.entries - y.entries * x.entries, x.tag};
}

std::vector<MatrixElement> standard_basis(AlgebraTag tag, int rank) {
  if (tag == AlgebraTag::GL1) rank = 1;
  if (rank < 1) throw std::invalid_argument("rank must be >= 1");
  std::vector<MatrixElement> out;
  auto unit = [&](int i, int j) {
    Matrix m(rank, rank);
    m(i, j) = 1;
    return m;
  };
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j)
      if (tag != AlgebraTag::SL || i != j) out.push_back({unit(i, j), tag});
  if (tag == AlgebraTag::SL)
    for (int i = 0; i + 1 < rank; ++i) out.push_back({unit(i, i) - unit(i + 1, i + 1), tag});
  return out;
}

namespace {

Rational alpha_of(const BilinearForm& a, const Matrix& x, const Matrix& y) {
  Rational v;
  if (!is_zero(a.trace)) v += a.trace * (x * y).trace();
  if (!is_zero(a.trace_trace)) v += a.trace_trace * x.trace() * y.trace();
  return v;
}

}  // namespace

Rational BilinearForm::operator()(const MatrixElement& x, const MatrixElement& y) const {
  return alpha_of(*this, x.entries, y.entries);
}

std::vector<MatrixElement> dual_basis(const std::vector<MatrixElement>& basis, const BilinearForm& alpha) {
  const int n = static_cast<int>(basis.size());
  Matrix gram(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) gram(a, b) = alpha(basis[a], basis[b]);
  if (rank(gram) != n) throw std::invalid_argument("bilinear form is degenerate on the basis");
  std::vector<MatrixElement> out;
  for (int c = 0; c < n; ++c) {
    std::vector<Rational> unit(n);
    unit[c] = 1;
    std::vector<Rational> x = *solve(gram, unit);
    Matrix m(basis[0].rank(), basis[0].rank());
    for (int k = 0; k < n; ++k)
      if (!is_zero(x[k])) m += basis[k].entries * x[k];
    out.push_back({m, basis[0].tag});
  }
  return out;
}

CurrentElement CurrentElement::single(const MatrixElement& x, int n, int p) {
  x.validate();
  CurrentElement c(x.tag, x.rank());
  c.add(n, p, x.entries);
  return c;
}

CurrentElement CurrentElement::tensor(const MatrixElement& x, const FormElement& f) {
  x.validate();
  if (f.weight != 0) throw std::invalid_argument("currents take functions");
  CurrentElement c(x.tag, x.rank());
  const KNExpansion e = expand_in_basis(f);
  for (const auto& [k, v] : e.terms()) c.add(k.first, k.second, x.entries * v);
  return c;
}

void CurrentElement::add(int n, int p, const Matrix& m) {
  if (m.rows() != rank_ || m.cols() != rank_) throw std::invalid_argument("matrix size does not match the algebra");
  if (m.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace({n, p}, m);
  if (!inserted) {
    it->second += m;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

KNExpansion CurrentElement::entry(int i, int j) const {
  KNExpansion x(0);
  for (const auto& [k, m] : terms_) x.add(k.first, k.second, m(i, j));
  return x;
}

CurrentElement& CurrentElement::operator+=(const CurrentElement& o) {
  if (o.tag_ != tag_ || o.rank_ != rank_) throw std::invalid_argument("currents of different algebras");
  for (const auto& [k, m] : o.terms_) add(k.first, k.second, m);
  return *this;
}

CurrentElement& CurrentElement::operator-=(const CurrentElement& o) {
  if (o.tag_ != tag_ || o.rank_ != rank_) throw std::invalid_argument("currents of different algebras");
  for (const auto& [k, m] : o.terms_) add(k.first, k.second, m * Rational(-1));
  return *this;
}

CurrentElement& CurrentElement::operator*=(const Rational& c) {
  if (kn::is_zero(c)) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, m] : terms_) m *= c;
  return *this;
}

AffineElement operator+(const AffineElement& a, const AffineElement& b) {
  return {a.current + b.current, a.central + b.central};
}

AffineElement operator*(const Rational& c, const AffineElement& a) { return {c * a.current, c * a.central}; }

DgElement operator+(const DgElement& a, const DgElement& b) {
  return {a.current + b.current, a.vector_field + b.vector_field, a.central + b.central};
}

DgElement operator*(const Rational& c, const DgElement& a) {
  return {c * a.current, a.vector_field * c, c * a.central};
}

AffineAlgebra::AffineAlgebra(GeometryPtr geom, AlgebraTag tag, int rank, BilinearForm alpha, ProjectiveConnection R,
                             AffineConnection T)
    : geom_(geom),
      tag_(tag),
      rank_(tag == AlgebraTag::GL1 ? 1 : rank),
      alpha_(std::move(alpha)),
      prod_(geom, TableKind::FunctionProduct),
      brk_(geom, TableKind::VectorBracket),
      act_(geom, TableKind::FieldOnForm, 0),
      cA_(geom, CocycleKind::Function),
      cL_(geom, CocycleKind::VectorField, std::move(R)),
      cM_(geom, CocycleKind::Mixing, {}, std::move(T)) {
  if (tag == AlgebraTag::GL1 && rank != 1) throw std::invalid_argument("gl1 has rank 1");
  if (rank_ < 1 || (tag == AlgebraTag::SL && rank_ < 2)) throw std::invalid_argument("invalid rank for the algebra");
}

void AffineAlgebra::check(const CurrentElement& x) const {
  if (x.tag() != tag_ || x.rank() != rank_) throw std::invalid_argument("current of a different algebra");
  if (tag_ == AlgebraTag::SL)
    for (const auto& [k, m] : x.terms())
      if (!is_zero(m.trace())) throw std::invalid_argument("sl current with a trace");
}

AffineElement AffineAlgebra::bracket(const AffineElement& x, const AffineElement& y) const {
  check(x.current);
  check(y.current);
  AffineElement out{zero(), Rational(0)};
  for (const auto& [i, a] : x.current.terms()) {
    for (const auto& [j, b] : y.current.terms()) {
      Matrix c = a * b - b * a;
      if (!c.is_zero())
        for (const auto& [k, v] : prod_.entry(i.first, i.second, j.first, j.second).terms())
          out.current.add(k.first, k.second, c * v);
      Rational al = alpha_of(alpha_, a, b);
      if (!is_zero(al)) out.central += al * cA_.value(i.first, i.second, j.first, j.second);
    }
  }
  return out;
}

CurrentElement AffineAlgebra::act(const KNExpansion& e, const CurrentElement& x) const {
  check(x);
  if (e.weight() != -1) throw std::invalid_argument("act needs a vector field");
  CurrentElement out = zero();
  for (const auto& [i, c] : e.terms())
    for (const auto& [j, m] : x.terms())
      for (const auto& [k, v] : act_.entry(i.first, i.second, j.first, j.second).terms())
        out.add(k.first, k.second, m * (c * v));
  return out;
}

DgElement AffineAlgebra::dg_bracket(const DgElement& x, const DgElement& y) const {
  AffineElement cur = bracket({x.current, 0}, {y.current, 0});
  DgElement out{cur.current + act(x.vector_field, y.current) - act(y.vector_field, x.current), KNExpansion(-1),
                cur.central};
  for (const auto& [i, a] : x.vector_field.terms())
    for (const auto& [j, b] : y.vector_field.terms())
      out.vector_field += brk_.entry(i.first, i.second, j.first, j.second) * (a * b);
  out.central += cL_(x.vector_field, y.vector_field);
  auto mixed = [&](const KNExpansion& e, const CurrentElement& c) {
    Rational s;
    for (const auto& [i, a] : e.terms())
      for (const auto& [j, m] : c.terms()) {
        Rational tr = m.trace();
        if (!is_zero(tr)) s += a * tr * cM_.value(i.first, i.second, j.first, j.second);
      }
    return s;
  };
  out.central += mixed(x.vector_field, y.current) - mixed(y.vector_field, x.current);
  return out;
}

AffineElement AffineAlgebra::embed_finite(const MatrixElement& x) const {
  x.validate();
  if (x.tag != tag_ || x.rank() != rank_) throw std::invalid_argument("element of a different algebra");
  CurrentElement c = zero();
  for (int p = 1; p <= geom_->size(); ++p) c.add(0, p, x.entries);
  return {c, 0};
}

AffineSplit AffineAlgebra::split(const AffineElement& x, SplitVariant variant) const {
  check(x.current);
  const int K = variant.kind == SplitVariant::Kind::Depth ? 0 : default_bounds(geom_).K;
  AffineSplit s{zero(), {zero(), x.central}, zero()};
  for (int i = 0; i < rank_; ++i) {
    for (int j = 0; j < rank_; ++j) {
      KNExpansion f = x.current.entry(i, j);
      if (f.is_zero()) continue;
      TriangularSplit t = triangular_split(geom_, f, variant, K);
      auto place = [&](const KNExpansion& part, CurrentElement& into) {
        for (const auto& [k, v] : part.terms()) {
          Matrix m(rank_, rank_);
          m(i, j) = v;
          into.add(k.first, k.second, m);
        }
      };
      place(t.plus, s.plus);
      place(t.zero, s.zero.current);
      place(t.minus, s.minus);
    }
  }
  return s;
}

bool AffineAlgebra::is_regular(const CurrentElement& x) const {
  check(x);
  for (int i = 0; i < rank_; ++i) {
    for (int j = 0; j < rank_; ++j) {
      KNExpansion f = x.entry(i, j);
      if (f.is_zero()) continue;
      if (reconstruct(geom_, f).order_at(Point::infinity()) < 1) return false;
    }
  }
  return true;
}

}  // namespace kn
