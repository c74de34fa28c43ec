#include "kn/rational_function.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>

namespace kn {

std::string Point::to_string() const { return infinite_ ? "inf" : kn::to_string(x_); }

// ---------------------------------------------------------------------------
// construction and canonical form

RationalFunction::RationalFunction(Polynomial p) : num_(std::move(p)), den_(Rational(1)), factored_(true) {}

RationalFunction::RationalFunction(Polynomial num, Polynomial den) {
  if (den.is_zero()) throw std::domain_error("rational function with zero denominator");
  if (num.is_zero()) {
    den_ = Polynomial(Rational(1));
    factored_ = true;
    return;
  }
  Polynomial g = Polynomial::gcd(num, den);
  if (g.degree() > 0) {
    num = Polynomial::divmod(num, g).first;
    den = Polynomial::divmod(den, g).first;
  }
  Rational lead = den.leading();
  num_ = num * (Rational(1) / lead);
  den_ = den.monic();
  try_factor();
}

RationalFunction RationalFunction::from_factored(Polynomial num, Roots roots) {
  std::map<Rational, int> merged;
  for (auto& [r, k] : roots) {
    if (k < 0) throw std::invalid_argument("negative pole multiplicity");
    merged[r] += k;
  }
  RationalFunction f;
  f.num_ = std::move(num);
  f.roots_.clear();
  for (auto& [r, k] : merged) {
    if (k > 0) f.roots_.emplace_back(r, k);
  }
  f.factored_ = true;
  f.cancel_factored();
  return f;
}

RationalFunction RationalFunction::z() { return RationalFunction(Polynomial::monomial(Rational(1), 1)); }

void RationalFunction::try_factor() {
  bool complete = false;
  if (den_.degree() <= 0) {
    roots_.clear();
    factored_ = true;
    return;
  }
  Roots r = den_.rational_roots(&complete);
  factored_ = complete;
  roots_ = complete ? std::move(r) : Roots{};
}

void RationalFunction::rebuild_denominator() {
  Polynomial d(Rational(1));
  for (auto& [r, k] : roots_) d = d * Polynomial::linear_power(r, k);
  den_ = std::move(d);
}

void RationalFunction::cancel_factored() {
  if (num_.is_zero()) {
    roots_.clear();
    den_ = Polynomial(Rational(1));
    return;
  }
  for (auto& [r, k] : roots_) {
    while (k > 0 && num_.degree() > 0 && kn::is_zero(num_(r))) {
      num_ = num_.divide_linear(r);
      --k;
    }
  }
  std::erase_if(roots_, [](const auto& e) { return e.second == 0; });
  rebuild_denominator();
}

const RationalFunction::Roots& RationalFunction::poles() const {
  if (!factored_) throw std::domain_error("rational function has irrational poles");
  return roots_;
}

Rational RationalFunction::operator()(const Rational& x) const {
  Rational d = den_(x);
  if (kn::is_zero(d)) throw std::domain_error("evaluation at a pole");
  return num_(x) / d;
}

// ---------------------------------------------------------------------------
// arithmetic

namespace {

RationalFunction::Roots merge_max(const RationalFunction::Roots& a, const RationalFunction::Roots& b) {
  std::map<Rational, int> m;
  for (auto& [r, k] : a) m[r] = std::max(m[r], k);
  for (auto& [r, k] : b) m[r] = std::max(m[r], k);
  return {m.begin(), m.end()};
}

int multiplicity_in(const RationalFunction::Roots& roots, const Rational& r) {
  for (auto& [x, k] : roots) {
    if (x == r) return k;
  }
  return 0;
}

// prod (z - r)^(target_k - own_k) over the target roots
Polynomial lift_factor(const RationalFunction::Roots& target, const RationalFunction::Roots& own) {
  Polynomial p(Rational(1));
  for (auto& [r, k] : target) {
    int e = k - multiplicity_in(own, r);
    if (e > 0) p = p * Polynomial::linear_power(r, e);
  }
  return p;
}

}  // namespace

RationalFunction& RationalFunction::operator+=(const RationalFunction& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  if (factored_ && o.factored_) {
    Roots target = merge_max(roots_, o.roots_);
    num_ = num_ * lift_factor(target, roots_) + o.num_ * lift_factor(target, o.roots_);
    roots_ = std::move(target);
    cancel_factored();
    return *this;
  }
  *this = RationalFunction(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  return *this;
}

RationalFunction& RationalFunction::operator-=(const RationalFunction& o) { return *this += -o; }

RationalFunction& RationalFunction::operator*=(const Rational& c) {
  if (kn::is_zero(c)) return *this = RationalFunction();
  num_ *= c;
  return *this;
}

RationalFunction& RationalFunction::operator*=(const RationalFunction& o) {
  if (is_zero() || o.is_zero()) return *this = RationalFunction();
  if (factored_ && o.factored_) {
    std::map<Rational, int> m;
    for (auto& [r, k] : roots_) m[r] += k;
    for (auto& [r, k] : o.roots_) m[r] += k;
    num_ = num_ * o.num_;
    roots_.assign(m.begin(), m.end());
    cancel_factored();
    return *this;
  }
  *this = RationalFunction(num_ * o.num_, den_ * o.den_);
  return *this;
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.is_zero()) throw std::domain_error("division by the zero rational function");
  return a * RationalFunction(b.den_, b.num_);
}

RationalFunction RationalFunction::derivative() const {
  if (is_zero()) return {};
  if (factored_) {
    // (n / prod (z-a)^k)' = (n' L - n S) / (prod (z-a)^k * L),  L = prod (z-a),
    // S = sum_a k_a L / (z-a)
    Polynomial L(Rational(1));
    for (auto& [r, k] : roots_) L = L * Polynomial::linear_power(r, 1);
    Polynomial S;
    for (size_t i = 0; i < roots_.size(); ++i) {
      Polynomial term(Rational(roots_[i].second));
      for (size_t j = 0; j < roots_.size(); ++j) {
        if (j != i) term = term * Polynomial::linear_power(roots_[j].first, 1);
      }
      S += term;
    }
    RationalFunction f;
    f.num_ = num_.derivative() * L - num_ * S;
    f.roots_ = roots_;
    for (auto& e : f.roots_) e.second += 1;
    f.factored_ = true;
    f.cancel_factored();
    return f;
  }
  return RationalFunction(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
}

namespace {

std::string poly_to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = p.degree(); i >= 0; --i) {
    Rational c = p.coeff(i);
    if (is_zero(c)) continue;
    bool neg = sgn(c) < 0;
    Rational a = abs(c);
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    std::string mag = a.get_str();
    if (i == 0) {
      os << mag;
    } else {
      if (a != 1) os << mag << "*";
      os << "z";
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

}  // namespace

std::string RationalFunction::to_string() const {
  if (den_.degree() == 0) return poly_to_string(num_);
  return "(" + poly_to_string(num_) + ")/(" + poly_to_string(den_) + ")";
}

// ---------------------------------------------------------------------------
// local analysis

Rational LaurentExpansion::coefficient(int order) const {
  if (identically_zero) return Rational(0);
  if (order >= truncation_order) throw std::out_of_range("Laurent coefficient beyond truncation");
  int i = order - leading_order;
  if (i < 0) return Rational(0);
  return coefficients[static_cast<size_t>(i)];
}

namespace {

int den_multiplicity(const RationalFunction& f, const Rational& a) {
  if (f.has_rational_poles()) return multiplicity_in(f.poles(), a);
  return f.denominator().root_multiplicity(a);
}

}  // namespace

LaurentExpansion laurent_expand(const RationalFunction& f, const Point& at, int terms) {
  if (terms < 1) throw std::invalid_argument("laurent_expand needs at least one term");
  LaurentExpansion e;
  e.at = at;
  if (f.is_zero()) {
    e.identically_zero = true;
    e.leading_order = kPositiveInfinity;
    e.truncation_order = kPositiveInfinity;
    return e;
  }
  const Polynomial& n = f.numerator();
  const Polynomial& d = f.denominator();
  if (at.is_infinity()) {
    // f(1/w) = w^(deg d - deg n) * rev(n)(w) / rev(d)(w)
    e.leading_order = d.degree() - n.degree();
    Polynomial rn = n.reversed();
    Polynomial rd = d.reversed();
    e.coefficients = series_divide(rn.coefficients(), rd.coefficients(), terms);
  } else {
    const Rational& a = at.coordinate();
    int j = n.root_multiplicity(a);
    int k = den_multiplicity(f, a);
    e.leading_order = j - k;
    std::vector<Rational> nt = n.taylor_coefficients(a, j + terms);
    std::vector<Rational> dt = d.taylor_coefficients(a, k + terms);
    nt.erase(nt.begin(), nt.begin() + j);
    dt.erase(dt.begin(), dt.begin() + k);
    e.coefficients = series_divide(nt, dt, terms);
  }
  e.truncation_order = e.leading_order + terms;
  return e;
}

int order_at(const RationalFunction& f, const Point& at) {
  if (f.is_zero()) return kPositiveInfinity;
  if (at.is_infinity()) return f.denominator().degree() - f.numerator().degree();
  const Rational& a = at.coordinate();
  return f.numerator().root_multiplicity(a) - den_multiplicity(f, a);
}

Rational residue_form(const RationalFunction& f, const Point& at) {
  if (f.is_zero()) return Rational(0);
  const Polynomial& n = f.numerator();
  const Polynomial& d = f.denominator();
  if (at.is_infinity()) {
    // residue = -[w^1] f(1/w)
    int lead = d.degree() - n.degree();
    if (lead > 1) return Rational(0);
    int idx = 1 - lead;
    Polynomial rn = n.reversed();
    Polynomial rd = d.reversed();
    std::vector<Rational> s = series_divide(rn.coefficients(), rd.coefficients(), idx + 1);
    return -s[static_cast<size_t>(idx)];
  }
  const Rational& a = at.coordinate();
  int k = den_multiplicity(f, a);
  if (k == 0) return Rational(0);
  // [t^(k-1)] n(a+t) / dtilde(t), with d(a+t) = t^k dtilde(t)
  std::vector<Rational> nt = n.taylor_coefficients(a, k);
  std::vector<Rational> dt = d.taylor_coefficients(a, 2 * k);
  dt.erase(dt.begin(), dt.begin() + k);
  std::vector<Rational> s = series_divide(nt, dt, k);
  return s[static_cast<size_t>(k - 1)];
}

bool residue_sum_check(const RationalFunction& f) {
  Rational total = residue_form(f, Point::infinity());
  for (auto& [r, k] : f.poles()) total += residue_form(f, Point::at(r));
  return is_zero(total);
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  RationalFunction parse() {
    RationalFunction f = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("cannot parse rational function '" + s_ + "': " + why + " at offset " +
                                std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RationalFunction expr() {
    RationalFunction f = term();
    for (;;) {
      if (eat('+')) {
        f += term();
      } else if (eat('-')) {
        f -= term();
      } else {
        return f;
      }
    }
  }
  RationalFunction term() {
    RationalFunction f = unary();
    for (;;) {
      if (eat('*')) {
        f *= unary();
      } else if (eat('/')) {
        f = f / unary();
      } else {
        return f;
      }
    }
  }
  RationalFunction unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  RationalFunction power() {
    RationalFunction base = primary();
    if (!eat('^')) return base;
    bool neg = eat('-');
    skip();
    Integer e = integer();
    if (e > 1000) fail("exponent too large");
    long k = e.get_si();
    RationalFunction out(Rational(1));
    for (long i = 0; i < k; ++i) out *= base;
    return neg ? RationalFunction(Rational(1)) / out : out;
  }
  RationalFunction primary() {
    skip();
    if (eat('(')) {
      RationalFunction f = expr();
      if (!eat(')')) fail("missing ')'");
      return f;
    }
    if (pos_ < s_.size() && s_[pos_] == 'z') {
      ++pos_;
      return RationalFunction::z();
    }
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) return RationalFunction(Rational(integer()));
    fail("expected number, 'z' or '('");
  }
  Integer integer() {
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    return Integer(s_.substr(start, pos_ - start), 10);
  }

  const std::string& s_;
  size_t pos_ = 0;
};

}  // namespace

RationalFunction parse_rational_function(const std::string& text) { return Parser(text).parse(); }

}  // namespace kn
