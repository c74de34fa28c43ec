#include "kn/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace kn {

Polynomial::Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

Polynomial::Polynomial(const Rational& constant) {
  if (!kn::is_zero(constant)) coeffs_.push_back(constant);
}

Polynomial Polynomial::monomial(const Rational& c, int degree) {
  if (degree < 0) throw std::invalid_argument("negative monomial degree");
  std::vector<Rational> v(static_cast<size_t>(degree) + 1);
  v.back() = c;
  return Polynomial(std::move(v));
}

Polynomial Polynomial::linear_power(const Rational& root, int power) {
  if (power < 0) throw std::invalid_argument("negative power of linear factor");
  // binomial expansion of (z - a)^k
  std::vector<Rational> v(static_cast<size_t>(power) + 1);
  Rational binom = 1;
  Rational neg = -root;
  for (int i = 0; i <= power; ++i) {
    // coefficient of z^i is C(k, i) (-a)^(k-i)
    v[i] = binom * kn::pow(neg, power - i);
    binom = binom * (power - i) / (i + 1);
  }
  return Polynomial(std::move(v));
}

void Polynomial::trim() {
  while (!coeffs_.empty() && kn::is_zero(coeffs_.back())) coeffs_.pop_back();
}

Rational Polynomial::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(coeffs_.size())) return Rational(0);
  return coeffs_[i];
}

Rational Polynomial::operator()(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Rational> v(coeffs_.size() - 1);
  for (size_t i = 1; i < coeffs_.size(); ++i) v[i - 1] = coeffs_[i] * static_cast<long>(i);
  return Polynomial(std::move(v));
}

Polynomial Polynomial::taylor_shift(const Rational& a) const {
  if (kn::is_zero(a) || coeffs_.size() <= 1) return *this;
  std::vector<Rational> v = coeffs_;
  const int n = degree();
  // repeated synthetic division (Horner scheme)
  for (int i = 0; i < n; ++i) {
    for (int j = n - 1; j >= i; --j) v[j] += a * v[j + 1];
  }
  return Polynomial(std::move(v));
}

Polynomial Polynomial::reversed() const {
  std::vector<Rational> v(coeffs_.rbegin(), coeffs_.rend());
  return Polynomial(std::move(v));
}

Polynomial Polynomial::monic() const {
  if (is_zero()) return {};
  Polynomial p = *this;
  Rational inv = Rational(1) / leading();
  return p *= inv;
}

Polynomial Polynomial::divide_linear(const Rational& a) const {
  if (is_zero()) return {};
  const int n = degree();
  if (n == 0) throw std::domain_error("divide_linear: constant is not divisible");
  std::vector<Rational> q(static_cast<size_t>(n));
  Rational carry = 0;
  for (int i = n; i >= 1; --i) {
    carry = coeffs_[i] + carry * a;
    q[i - 1] = carry;
  }
  if (!kn::is_zero(coeffs_[0] + carry * a)) throw std::domain_error("divide_linear: nonzero remainder");
  return Polynomial(std::move(q));
}

int Polynomial::root_multiplicity(const Rational& a) const {
  if (is_zero()) throw std::domain_error("root multiplicity of the zero polynomial");
  int k = 0;
  Polynomial p = *this;
  while (p.degree() > 0 && kn::is_zero(p(a))) {
    p = p.divide_linear(a);
    ++k;
  }
  return k;
}

std::vector<Rational> Polynomial::taylor_coefficients(const Rational& a, int count) const {
  std::vector<Rational> out;
  out.reserve(static_cast<size_t>(std::max(count, 0)));
  std::vector<Rational> v = coeffs_;
  for (int k = 0; k < count; ++k) {
    if (v.empty()) {
      out.emplace_back(0);
      continue;
    }
    // v(z) = out_k + (z - a) * q(z)
    Rational carry = 0;
    std::vector<Rational> q(v.size() - 1);
    for (size_t i = v.size() - 1; i >= 1; --i) {
      carry = v[i] + carry * a;
      q[i - 1] = carry;
    }
    out.push_back(v[0] + carry * a);
    v = std::move(q);
  }
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (kn::is_zero(c)) {
    coeffs_.clear();
    return *this;
  }
  for (auto& x : coeffs_) x *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> v(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (kn::is_zero(a.coeffs_[i])) continue;
    for (size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return Polynomial(std::move(v));
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& a, const Polynomial& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  if (a.degree() < b.degree()) return {Polynomial{}, a};
  std::vector<Rational> r = a.coeffs_;
  std::vector<Rational> q(static_cast<size_t>(a.degree() - b.degree()) + 1);
  const Rational inv_lead = Rational(1) / b.leading();
  const int db = b.degree();
  for (int i = a.degree(); i >= db; --i) {
    if (kn::is_zero(r[i])) continue;
    Rational c = r[i] * inv_lead;
    q[i - db] = c;
    for (int j = 0; j <= db; ++j) r[i - db + j] -= c * b.coeffs_[j];
  }
  r.resize(static_cast<size_t>(db));
  return {Polynomial(std::move(q)), Polynomial(std::move(r))};
}

Polynomial Polynomial::gcd(Polynomial a, Polynomial b) {
  while (!b.is_zero()) {
    Polynomial r = divmod(a, b).second;
    a = std::move(b);
    b = r.monic();
  }
  return a.monic();
}

namespace {

// Positive divisors by trial division; gives up (returns false) past the limit.
bool divisors(Integer n, std::vector<Integer>& out) {
  n = abs(n);
  out.clear();
  if (n == 0) return false;
  static const Integer kLimit("1000000000000000000");
  if (n > kLimit) return false;
  std::vector<std::pair<Integer, int>> factors;
  Integer m = n;
  for (Integer p = 2; p * p <= m; ++p) {
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    if (e > 0) factors.emplace_back(p, e);
  }
  if (m > 1) factors.emplace_back(m, 1);
  out.push_back(1);
  for (auto& [p, e] : factors) {
    const size_t base = out.size();
    Integer pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  return true;
}

}  // namespace

std::vector<std::pair<Rational, int>> Polynomial::rational_roots(bool* complete) const {
  std::vector<std::pair<Rational, int>> roots;
  if (is_zero()) throw std::domain_error("roots of the zero polynomial");
  Polynomial p = *this;
  // root at zero
  int zero_mult = 0;
  while (p.degree() > 0 && kn::is_zero(p.coeffs_[0])) {
    p = p.divide_linear(Rational(0));
    ++zero_mult;
  }
  if (zero_mult > 0) roots.emplace_back(Rational(0), zero_mult);
  if (p.degree() > 0) {
    Integer l = 1;
    for (auto& c : p.coeffs_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    std::vector<Integer> ic;
    for (auto& c : p.coeffs_) ic.push_back(Integer(c * l));
    std::vector<Integer> dnum, dden;
    if (divisors(ic.front(), dnum) && divisors(ic.back(), dden)) {
      std::vector<Rational> cands;
      for (auto& u : dnum) {
        for (auto& v : dden) {
          Rational c(u, v);
          c.canonicalize();
          cands.push_back(c);
          cands.push_back(-c);
        }
      }
      std::sort(cands.begin(), cands.end());
      cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
      for (auto& c : cands) {
        if (p.degree() == 0) break;
        int k = 0;
        while (p.degree() > 0 && kn::is_zero(p(c))) {
          p = p.divide_linear(c);
          ++k;
        }
        if (k > 0) roots.emplace_back(c, k);
      }
    }
  }
  std::sort(roots.begin(), roots.end(), [](auto& a, auto& b) { return a.first < b.first; });
  if (complete) *complete = p.degree() <= 0;
  return roots;
}

std::vector<Rational> series_divide(std::span<const Rational> a, std::span<const Rational> b, int terms) {
  if (b.empty() || kn::is_zero(b[0])) throw std::domain_error("series_divide: divisor has zero constant term");
  std::vector<Rational> q(static_cast<size_t>(std::max(terms, 0)));
  const Rational inv0 = Rational(1) / b[0];
  for (int i = 0; i < terms; ++i) {
    Rational acc = i < static_cast<int>(a.size()) ? a[i] : Rational(0);
    const int jmax = std::min<int>(i, static_cast<int>(b.size()) - 1);
    for (int j = 1; j <= jmax; ++j) acc -= b[j] * q[i - j];
    q[i] = acc * inv0;
  }
  return q;
}

}  // namespace kn
