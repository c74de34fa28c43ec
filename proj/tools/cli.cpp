#include "cli.hpp"

#include "kn/sugawara.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

namespace kncli {

using json = nlohmann::json;
using namespace kn;

namespace {

struct JobConfig {
  std::vector<std::string> punctures{"0"};
  int weight = 0;
  int lo = -2;
  int hi = 2;
  AlgebraTag tag = AlgebraTag::GL1;
  int rank = 1;
  int bundle_rank = 1;
  std::string R = "0";
  std::string T = "0";
  std::vector<std::vector<std::string>> connection;
  int depth = 2;  // samples go down to degree -depth
  json raw;
};

// Rationals cross the boundary as "p/q" strings; plain JSON integers are accepted on input.
Rational rational_of(const json& j, const std::string& what) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(what + ": " + e.what());
    }
  }
  throw ConfigError(what + ": expected a rational string");
}

template <class T>
T field_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + key + "' has the wrong type");
  }
}

const json& required(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("config field '" + key + "' is missing");
  return j.at(key);
}

int int_field(const json& j, const std::string& key) {
  const json& v = required(j, key);
  if (!v.is_number_integer()) throw ConfigError("config field '" + key + "' must be an integer");
  return v.get<int>();
}

void parse_algebra(const std::string& text, JobConfig& c) {
  size_t digits = text.find_first_of("0123456789");
  if (digits == std::string::npos || digits == 0) throw ConfigError("algebra must look like gl1, sl2 or gl2");
  const std::string name = text.substr(0, digits);
  int rank = 0;
  try {
    rank = std::stoi(text.substr(digits));
  } catch (const std::exception&) {
    throw ConfigError("bad algebra rank in '" + text + "'");
  }
  if (name == "gl" && rank == 1) {
    c.tag = AlgebraTag::GL1;
  } else if (name == "gl" && rank >= 2) {
    c.tag = AlgebraTag::GL;
  } else if (name == "sl" && rank >= 2) {
    c.tag = AlgebraTag::SL;
  } else {
    throw ConfigError("unsupported algebra '" + text + "'");
  }
  c.rank = rank;
}

JobConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  JobConfig c;
  c.raw = j;
  c.punctures = field_or(j, "punctures", c.punctures);
  if (c.punctures.empty()) throw ConfigError("at least one puncture is required");
  c.weight = field_or(j, "weight", c.weight);
  if (j.contains("window")) {
    auto w = field_or(j, "window", std::vector<int>{});
    if (w.size() != 2 || w[0] > w[1]) throw ConfigError("window must be [lo, hi] with lo <= hi");
    c.lo = w[0];
    c.hi = w[1];
  }
  parse_algebra(field_or<std::string>(j, "algebra", "gl1"), c);
  c.bundle_rank = field_or(j, "bundle_rank", c.bundle_rank);
  if (c.bundle_rank < 1) throw ConfigError("bundle_rank must be >= 1");
  if (j.contains("dim_v") && field_or(j, "dim_v", 0) != c.rank)
    throw ConfigError("dim_v must equal the rank of the fundamental representation");
  c.R = field_or(j, "R", c.R);
  c.T = field_or(j, "T", c.T);
  c.connection = field_or(j, "connection", c.connection);
  c.depth = field_or(j, "depth", c.depth);
  if (c.depth < 0) throw ConfigError("depth must be >= 0");
  return c;
}

RationalFunction function_of(const std::string& text, const std::string& what) {
  try {
    return parse_rational_function(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

struct Context {
  JobConfig config;
  GeometryPtr geom;
  ProjectiveConnection R;
  AffineConnection T;

  explicit Context(JobConfig c) : config(std::move(c)) {
    try {
      geom = make_geometry(config.punctures);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("punctures: ") + e.what());
    }
    for (size_t i = 0; i < geom->punctures().size(); ++i)
      for (size_t k = 0; k < i; ++k)
        if (geom->punctures()[i] == geom->punctures()[k]) throw ConfigError("punctures must be distinct");
    R.value = function_of(config.R, "R");
    T.value = function_of(config.T, "T");
    try {
      validate(R, *geom);
      validate(T, *geom);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  int N() const { return geom->size(); }

  std::shared_ptr<AffineAlgebra> algebra() const {
    return std::make_shared<AffineAlgebra>(geom, config.tag, config.rank, BilinearForm{}, R, T);
  }

  std::shared_ptr<FermionRep> fermions() const {
    RepresentationData rep = RepresentationData::fundamental(config.tag, config.rank, config.bundle_rank);
    if (!config.connection.empty()) {
      if (static_cast<int>(config.connection.size()) != config.bundle_rank) throw ConfigError("connection must be r x r");
      rep.connection.clear();
      for (const auto& row : config.connection) {
        if (static_cast<int>(row.size()) != config.bundle_rank) throw ConfigError("connection must be r x r");
        std::vector<RationalFunction> fs;
        for (const auto& s : row) fs.push_back(function_of(s, "connection"));
        rep.connection.push_back(std::move(fs));
      }
    }
    try {
      return std::make_shared<FermionRep>(algebra(), std::move(rep));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

json rat(const Rational& q) { return to_string(q); }

json expansion_json(const KNExpansion& x) {
  json terms = json::array();
  for (const auto& [key, c] : x.terms()) terms.push_back({{"n", key.first}, {"p", key.second}, {"coefficient", rat(c)}});
  return terms;
}

json orders_json(const FormElement& f) {
  json o = json::object();
  for (int q = 1; q <= f.geom->size(); ++q) o["P" + std::to_string(q)] = f.order_at(Point::at(f.geom->puncture(q)));
  o["infinity"] = f.order_at(Point::infinity());
  return o;
}

json monomial_json(const WedgeMonomial& m) { return {{"charge", m.charge()}, {"entries", m.entries()}}; }

json vector_json(const WedgeVector& v) {
  json terms = json::array();
  for (const auto& [m, c] : v.terms()) {
    json t = monomial_json(m);
    t["coefficient"] = rat(c);
    t["degree"] = monomial_degree(m);
    terms.push_back(t);
  }
  return terms;
}

FormElement form_of(const Context& ctx, const json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " must be an object");
  const int weight = j.contains("weight") ? int_field(j, "weight") : 0;
  if (j.contains("function")) {
    FormElement f{function_of(field_or<std::string>(j, "function", ""), what), weight, ctx.geom};
    try {
      f.check_support();
    } catch (const std::domain_error& e) {
      throw ConfigError(what + ": " + e.what());
    }
    return f;
  }
  const int p = j.contains("p") ? int_field(j, "p") : 1;
  if (p < 1 || p > ctx.N()) throw ConfigError(what + ": puncture index out of range");
  return make_basis(ctx.geom, weight, int_field(j, "n"), p);
}

WedgeMonomial monomial_of(const json& j) {
  const json& m = required(j, "monomial");
  try {
    return WedgeMonomial(field_or(m, "charge", 0), field_or(m, "entries", std::vector<int>{}));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("monomial: ") + e.what());
  }
}

MatrixElement matrix_of(const Context& ctx, const json& j) {
  if (!j.is_array() || static_cast<int>(j.size()) != ctx.config.rank) throw ConfigError("x must be a rank x rank matrix");
  Matrix m(ctx.config.rank, ctx.config.rank);
  for (int i = 0; i < ctx.config.rank; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != ctx.config.rank)
      throw ConfigError("x must be a rank x rank matrix");
    for (int k = 0; k < ctx.config.rank; ++k) m(i, k) = rational_of(j[i][k], "x");
  }
  MatrixElement x{m, ctx.config.tag};
  try {
    x.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return x;
}

ModeCocycle mixing_modes(const AffineAlgebra& a) {
  return [&a](int k, int m) { return a.mixing_cocycle().value(m, 1, -k, 1); };
}

json casimir_json(const AffineAlgebra& a, int lo, int hi) {
  const CasimirSolution sol = casimir_solve(mixing_modes(a), lo, hi);
  json basis = json::array();
  for (const auto& c : sol.basis) {
    json coeffs = json::array();
    for (const auto& [n, v] : c.coefficients) coeffs.push_back({{"n", n}, {"coefficient", rat(v)}});
    basis.push_back({{"kind", to_string(c.kind)}, {"coefficients", coeffs}, {"window", {c.n_min, c.n_max}}});
  }
  json diag = json::array();
  for (const auto& [k, v] : sol.diagonal) diag.push_back({{"k", k}, {"value", rat(v)}});
  return {{"kernel_dimension", sol.basis.size()}, {"basis", basis}, {"diagonal", diag}, {"non_generic", sol.non_generic}};
}

TableKind table_kind(const std::string& s) {
  if (s == "product") return TableKind::FunctionProduct;
  if (s == "bracket") return TableKind::VectorBracket;
  if (s == "action") return TableKind::FieldOnForm;
  throw ConfigError("table must be product, bracket or action");
}

CocycleKind cocycle_kind(const std::string& s) {
  if (s == "A") return CocycleKind::Function;
  if (s == "L") return CocycleKind::VectorField;
  if (s == "m") return CocycleKind::Mixing;
  throw ConfigError("cocycle kind must be A, L or m");
}

json locality_json(const LocalityWindow& w) {
  return {{"M1", w.M1}, {"M2", w.M2}, {"nonzero", w.nonzero}, {"stable", w.stable}};
}

// ---- commands -------------------------------------------------------------

json cmd_basis(const Context& ctx) {
  json list = json::array();
  for (int n = ctx.config.lo; n <= ctx.config.hi; ++n)
    for (int p = 1; p <= ctx.N(); ++p) {
      FormElement f = make_basis(ctx.geom, ctx.config.weight, n, p);
      list.push_back({{"n", n}, {"p", p}, {"function", f.func.to_string()}, {"orders", orders_json(f)}});
    }
  return {{"weight", ctx.config.weight}, {"basis", list}};
}

json cmd_pair(const Context& ctx) {
  FormElement a = form_of(ctx, required(ctx.config.raw, "left"), "left");
  FormElement b = form_of(ctx, required(ctx.config.raw, "right"), "right");
  if (a.weight + b.weight != 1) throw ConfigError("pairing needs weights adding up to 1");
  return {{"value", rat(kn_pairing(a, b))}};
}

json cmd_mult(const Context& ctx) {
  FormElement a = form_of(ctx, required(ctx.config.raw, "left"), "left");
  FormElement b = form_of(ctx, required(ctx.config.raw, "right"), "right");
  return {{"weight", a.weight + b.weight},
          {"function", form_product(a, b).func.to_string()},
          {"expansion", expansion_json(multiply(a, b))}};
}

json cmd_bracket(const Context& ctx) {
  FormElement e = form_of(ctx, required(ctx.config.raw, "left"), "left");
  FormElement f = form_of(ctx, required(ctx.config.raw, "right"), "right");
  if (e.weight != -1) throw ConfigError("left must be a vector field (weight -1)");
  if (f.weight == -1) return {{"weight", -1}, {"function", form_bracket(e, f).func.to_string()}, {"expansion", expansion_json(bracket(e, f))}};
  return {{"weight", f.weight},
          {"function", form_lie_derivative(e, f).func.to_string()},
          {"expansion", expansion_json(lie_derivative(e, f))}};
}

json cocycle_table_json(const Context& ctx, CocycleKind kind) {
  CocycleTable table(ctx.geom, kind, ctx.R, ctx.T);
  json values = json::array();
  for (int n = ctx.config.lo; n <= ctx.config.hi; ++n)
    for (int p = 1; p <= ctx.N(); ++p)
      for (int m = ctx.config.lo; m <= ctx.config.hi; ++m)
        for (int r = 1; r <= ctx.N(); ++r) {
          const Rational v = table.value(n, p, m, r);
          if (!is_zero(v)) values.push_back({{"n", n}, {"p", p}, {"m", m}, {"r", r}, {"value", rat(v)}});
        }
  BasisPairCocycle g = [&](int n, int p, int m, int r) { return table.value(n, p, m, r); };
  return {{"kind", to_string(kind)},
          {"values", values},
          {"locality", locality_json(check_locality(ctx.geom, g, ctx.config.lo, ctx.config.hi))}};
}

json cmd_cocycle(const Context& ctx) {
  return cocycle_table_json(ctx, cocycle_kind(field_or<std::string>(ctx.config.raw, "kind", "A")));
}

json cmd_wedge_act(const Context& ctx) {
  auto rep = ctx.fermions();
  const WedgeMonomial m = monomial_of(ctx.config.raw);
  const json& el = required(ctx.config.raw, "element");
  BandedOperator op;
  if (el.contains("field")) {
    const json& f = el.at("field");
    op = rep->field_operator(KNExpansion::single(-1, int_field(f, "n"), f.contains("p") ? int_field(f, "p") : 1));
  } else {
    const MatrixElement x = matrix_of(ctx, required(el, "x"));
    const int p = el.contains("p") ? int_field(el, "p") : 1;
    if (p < 1 || p > ctx.N()) throw ConfigError("element: puncture index out of range");
    op = rep->current_operator(current_of(rep->algebra(), x, KNExpansion::single(0, int_field(el, "n"), p)));
  }
  return {{"input", monomial_json(m)}, {"input_degree", monomial_degree(m)}, {"result", vector_json(wedge_apply(op, m))}};
}

json levels_json(const SugawaraContext& s) {
  json parts = json::array();
  for (const auto& p : s.parts()) parts.push_back({{"part", p.name}, {"level", rat(p.level)}, {"kappa", rat(p.kappa)}});
  return parts;
}

json cmd_sugawara(const Context& ctx) {
  auto s = std::make_shared<SugawaraContext>(ctx.fermions());
  const WedgeMonomial m = monomial_of(ctx.config.raw);
  const int k = int_field(ctx.config.raw, "k");
  const int r = ctx.config.raw.contains("r") ? int_field(ctx.config.raw, "r") : 1;
  if (r < 1 || r > ctx.N()) throw ConfigError("r: puncture index out of range");
  return {{"parts", levels_json(*s)}, {"input", monomial_json(m)}, {"result", vector_json(apply_sugawara(*s, k, r, WedgeVector(m)))}};
}

json cmd_casimir(const Context& ctx) { return casimir_json(*ctx.algebra(), ctx.config.lo, ctx.config.hi); }

// ---- verification suites --------------------------------------------------

struct Report {
  json checks = json::array();
  json measurements = json::object();
  bool failed = false;

  void add(const std::string& name, CheckStatus status, const std::string& witness = "") {
    checks.push_back({{"name", name}, {"status", to_string(status)}, {"witness", witness}});
    failed = failed || status == CheckStatus::Fail;
  }
  void add(const std::string& name, bool ok, const std::string& witness = "") {
    add(name, ok ? CheckStatus::Pass : CheckStatus::Fail, ok ? "" : witness);
  }
};

KNExpansion random_expansion(std::mt19937& rng, int weight, int N, int lo, int hi) {
  std::uniform_int_distribution<int> deg(lo, hi), pt(1, N), coef(-3, 3);
  KNExpansion x(weight);
  for (int i = 0; i < 2; ++i) x.add(deg(rng), pt(rng), coef(rng));
  return x;
}

KNExpansion table_apply(const StructureTable& t, const KNExpansion& a, const KNExpansion& b) {
  KNExpansion out(t.result_weight());
  for (const auto& [i, x] : a.terms())
    for (const auto& [j, y] : b.terms()) out += t.entry(i.first, i.second, j.first, j.second) * (x * y);
  return out;
}

void suite_duality(const Context& ctx, Report& rep) {
  for (int lambda = -1; lambda <= 2; ++lambda) {
    std::string witness;
    for (int n = ctx.config.lo; n <= ctx.config.hi && witness.empty(); ++n)
      for (int m = ctx.config.lo; m <= ctx.config.hi && witness.empty(); ++m)
        for (int p = 1; p <= ctx.N(); ++p)
          for (int r = 1; r <= ctx.N(); ++r) {
            const Rational v = kn_pairing(make_basis(ctx.geom, lambda, n, p), make_basis(ctx.geom, 1 - lambda, m, r));
            if (v != ((m == -n && p == r) ? 1 : 0))
              witness = "n=" + std::to_string(n) + " p=" + std::to_string(p) + " m=" + std::to_string(m) +
                        " r=" + std::to_string(r) + " value " + to_string(v);
          }
    rep.add("duality weight " + std::to_string(lambda), witness.empty(), witness);
  }
}

void suite_structure(const Context& ctx, Report& rep) {
  const AlmostGradingBounds b = measure_bounds(ctx.geom, ctx.config.lo, ctx.config.hi);
  rep.measurements["almost_grading"] = {{"K", b.K}, {"L", b.L}, {"M", b.M}, {"stable", b.stable}};
  rep.add("almost-grading bounds stable", b.stable, "bounds change when the window grows");
  StructureTable br(ctx.geom, TableKind::VectorBracket);
  StructureTable pr(ctx.geom, TableKind::FunctionProduct);
  std::mt19937 rng(1);
  bool jacobi = true, assoc = true;
  for (int i = 0; i < 20; ++i) {
    KNExpansion e = random_expansion(rng, -1, ctx.N(), -3, 3), f = random_expansion(rng, -1, ctx.N(), -3, 3),
                g = random_expansion(rng, -1, ctx.N(), -3, 3);
    jacobi = jacobi && (table_apply(br, table_apply(br, e, f), g) + table_apply(br, table_apply(br, f, g), e) +
                        table_apply(br, table_apply(br, g, e), f))
                           .is_zero();
    KNExpansion a = random_expansion(rng, 0, ctx.N(), -3, 3), c = random_expansion(rng, 0, ctx.N(), -3, 3),
                d = random_expansion(rng, 0, ctx.N(), -3, 3);
    assoc = assoc && table_apply(pr, table_apply(pr, a, c), d) == table_apply(pr, a, table_apply(pr, c, d));
  }
  rep.add("vector field Jacobi identity", jacobi, "nonzero Jacobiator");
  rep.add("function algebra associativity", assoc, "nonassociative triple");
}

void suite_cocycles(const Context& ctx, Report& rep) {
  std::mt19937 rng(2);
  DCocycle gamma(ctx.geom, ctx.R, ctx.T);
  std::function<Rational(const DElement&, const DElement&)> g = [&](const DElement& x, const DElement& y) {
    return gamma(x, y);
  };
  std::function<DElement(const DElement&, const DElement&)> br = [&](const DElement& x, const DElement& y) {
    return d_bracket(ctx.geom, x, y);
  };
  std::vector<std::array<DElement, 3>> triples;
  std::vector<DElement> singles;
  for (int i = 0; i < 20; ++i) {
    std::array<DElement, 3> t;
    for (auto& x : t) x = {random_expansion(rng, -1, ctx.N(), -3, 3), random_expansion(rng, 0, ctx.N(), -3, 3)};
    triples.push_back(t);
    singles.push_back(t[0]);
  }
  rep.add("antisymmetry", check_antisymmetry(g, singles), "gamma(x,y) != -gamma(y,x)");
  rep.add("cocycle identity", check_cocycle_identity(g, br, triples), "cyclic sum nonzero");
  for (CocycleKind kind : {CocycleKind::Function, CocycleKind::VectorField, CocycleKind::Mixing}) {
    CocycleTable table(ctx.geom, kind, ctx.R, ctx.T);
    BasisPairCocycle f = [&](int n, int p, int m, int r) { return table.value(n, p, m, r); };
    const LocalityWindow w = check_locality(ctx.geom, f, ctx.config.lo, ctx.config.hi);
    rep.measurements["locality"][to_string(kind)] = locality_json(w);
    rep.add("locality " + to_string(kind), w.stable, "support window not stable");
  }
}

void suite_affine(const Context& ctx, Report& rep) {
  auto a = ctx.algebra();
  const auto basis = standard_basis(ctx.config.tag, ctx.config.rank);
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(basis.size()) - 1), deg(-3, 3), pt(1, ctx.N());
  auto random_element = [&] {
    AffineElement x{a->zero(), 0};
    for (int i = 0; i < 2; ++i) x.current += CurrentElement::single(basis[pick(rng)], deg(rng), pt(rng));
    return x;
  };
  bool jacobi = true, anti = true;
  for (int i = 0; i < 20; ++i) {
    const AffineElement x = random_element(), y = random_element(), z = random_element();
    const AffineElement sum = a->bracket(a->bracket(x, y), z) + a->bracket(a->bracket(y, z), x) + a->bracket(a->bracket(z, x), y);
    jacobi = jacobi && sum.current.is_zero() && is_zero(sum.central);
    anti = anti && a->bracket(x, y) == Rational(-1) * a->bracket(y, x);
  }
  rep.add("affine Jacobi identity", jacobi, "nonzero Jacobiator");
  rep.add("affine antisymmetry", anti, "[x,y] != -[y,x]");
}

std::vector<WedgeVector> samples(int lowest) {
  std::vector<WedgeVector> out;
  for (int d = 0; d >= lowest; --d)
    for (const auto& m : enumerate_monomials(0, d)) out.emplace_back(m);
  return out;
}

void suite_wedge(const Context& ctx, Report& rep) {
  const int p[] = {1, 1, 2, 3, 5, 7, 11};
  std::string counts;
  for (int d = 0; d >= -6; --d)
    if (static_cast<int>(enumerate_monomials(0, d).size()) != p[-d]) counts = "degree " + std::to_string(d);
  rep.add("sector counts are partition numbers", counts.empty(), counts);
  auto f = ctx.fermions();
  const AffineAlgebra& a = f->algebra();
  const auto basis = standard_basis(ctx.config.tag, ctx.config.rank);
  std::optional<Rational> level;
  std::string witness;
  for (const auto& x : basis)
    for (const auto& y : basis)
      for (int n = -2; n <= 2; ++n)
        for (int m = -2; m <= 2; ++m) {
          DgElement X{CurrentElement::single(x, n, 1), KNExpansion(-1), 0}, Y{CurrentElement::single(y, m, ctx.N()), KNExpansion(-1), 0};
          Rational d;
          try {
            d = f->extract_cocycle(X, Y, 0);
          } catch (const std::logic_error& e) {
            witness = e.what();
            continue;
          }
          const Rational base = BilinearForm::trace_form()(x, y) * a.function_cocycle().value(n, 1, m, ctx.N());
          if (is_zero(base)) {
            if (!is_zero(d)) witness = "defect without a central term";
            continue;
          }
          if (!level) level = d / base;
          if (d != *level * base) witness = "level changes between basis pairs";
        }
  if (level) rep.measurements["fermion_level"] = rat(*level);
  rep.add("fermion cocycle is a multiple of the function cocycle", witness.empty() && level.has_value(), witness);
}

void suite_sugawara(const Context& ctx, Report& rep) {
  SugawaraContext s(ctx.fermions());
  rep.measurements["sugawara_parts"] = levels_json(s);
  const auto basis = standard_basis(ctx.config.tag, ctx.config.rank);
  const auto vs = samples(-ctx.config.depth);
  std::string witness;
  for (int n = -1; n <= 1; ++n)
    for (int k = -2; k <= 2; ++k)
      for (const auto& x : {basis.front(), basis.back()})
        if (!check_fundamental(s, KNExpansion::single(-1, n, 1), x, KNExpansion::single(0, k, ctx.N()), vs))
          witness = "e_" + std::to_string(n) + ", A_" + std::to_string(k);
  rep.add("fundamental relation [T[e], x(A)] = x(e.A)", witness.empty(), witness);
}

void suite_casimir(const Context& ctx, Report& rep) {
  auto a = ctx.algebra();
  const json sol = casimir_json(*a, ctx.config.lo, ctx.config.hi);
  rep.measurements["casimir"] = sol;
  std::ostringstream w;
  w << "kernel dimension " << sol["kernel_dimension"].get<int>();
  const auto ng = sol["non_generic"].get<std::vector<int>>();
  if (!ng.empty()) {
    w << "; genericity fails at k =";
    for (int k : ng) w << " " << k;
  }
  // the solution must satisfy every equation of the truncated system
  CasimirSolution s = casimir_solve(mixing_modes(*a), ctx.config.lo, ctx.config.hi);
  bool ok = true;
  for (const auto& c : s.basis)
    for (int k = ctx.config.lo; k <= ctx.config.hi; ++k) {
      if (k == 0) continue;
      Rational row;
      for (const auto& [m, v] : c.coefficients) row += v * mixing_modes(*a)(k, m);
      ok = ok && is_zero(row);
    }
  rep.add("casimir system solved", ok ? CheckStatus::Pass : CheckStatus::Fail, w.str());
}

const std::vector<std::pair<std::string, std::function<void(const Context&, Report&)>>>& suites() {
  static const std::vector<std::pair<std::string, std::function<void(const Context&, Report&)>>> all = {
      {"duality", suite_duality}, {"structure", suite_structure}, {"cocycles", suite_cocycles},
      {"affine", suite_affine},   {"wedge", suite_wedge},         {"sugawara", suite_sugawara},
      {"casimir", suite_casimir}};
  return all;
}

json cmd_verify(const Context& ctx, const std::string& suite, bool& failed) {
  Report rep;
  bool found = false;
  for (const auto& [name, run] : suites()) {
    if (suite != "all" && suite != name) continue;
    found = true;
    Report part;
    run(ctx, part);
    for (auto& c : part.checks) {
      c["name"] = name + ": " + c["name"].get<std::string>();
      rep.checks.push_back(c);
    }
    if (!part.measurements.empty()) rep.measurements[name] = part.measurements;
    rep.failed = rep.failed || part.failed;
  }
  if (!found) throw ConfigError("unknown suite '" + suite + "'");
  failed = rep.failed;
  return {{"suite", suite}, {"checks", rep.checks}, {"measurements", rep.measurements}};
}

json cmd_export(const Context& ctx, const std::string& what) {
  if (what == "structure-table") {
    const TableKind kind = table_kind(field_or<std::string>(ctx.config.raw, "table", "product"));
    StructureTable t(ctx.geom, kind, kind == TableKind::FieldOnForm ? ctx.config.weight : 0);
    json entries = json::array();
    for (int n = ctx.config.lo; n <= ctx.config.hi; ++n)
      for (int p = 1; p <= ctx.N(); ++p)
        for (int m = ctx.config.lo; m <= ctx.config.hi; ++m)
          for (int r = 1; r <= ctx.N(); ++r)
            entries.push_back({{"n", n}, {"p", p}, {"m", m}, {"r", r}, {"result", expansion_json(t.entry(n, p, m, r))}});
    return {{"table", to_string(kind)}, {"entries", entries}};
  }
  if (what == "cocycle-table") return cocycle_table_json(ctx, cocycle_kind(field_or<std::string>(ctx.config.raw, "kind", "A")));
  if (what == "sugawara-coeffs") {
    SugawaraCoefficients l(ctx.geom);
    json entries = json::array();
    for (int k = ctx.config.lo; k <= ctx.config.hi; ++k)
      for (int r = 1; r <= ctx.N(); ++r)
        for (int n = ctx.config.lo; n <= ctx.config.hi; ++n)
          for (int p = 1; p <= ctx.N(); ++p)
            for (int m = ctx.config.lo; m <= ctx.config.hi; ++m)
              for (int s = 1; s <= ctx.N(); ++s) {
                const Rational v = l(k, r, n, p, m, s);
                if (!is_zero(v))
                  entries.push_back({{"k", k}, {"r", r}, {"n", n}, {"p", p}, {"m", m}, {"s", s}, {"value", rat(v)}});
              }
    return {{"coefficients", entries}};
  }
  if (what == "casimir-basis") return casimir_json(*ctx.algebra(), ctx.config.lo, ctx.config.hi);
  throw ConfigError("export target must be structure-table, cocycle-table, sugawara-coeffs or casimir-basis");
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

void emit(const json& j, const std::string& out_path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + out_path + "'");
  f << text;
  if (!f.flush()) throw IoError("write to '" + out_path + "' failed");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Genus-0 multipoint Krichever-Novikov algebras"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_path, suite = "all", what;
  app.add_option("--config", config_path, "JSON job configuration");
  app.add_option("--out", out_path, "write the JSON result here instead of stdout");
  const std::vector<std::string> names = {"basis", "pair", "mult", "bracket", "cocycle", "wedge-act", "sugawara", "casimir", "verify", "export"};
  for (const auto& n : names) app.add_subcommand(n);
  app.get_subcommand("verify")->add_option("--suite", suite, "duality, structure, cocycles, affine, wedge, sugawara, casimir or all");
  app.get_subcommand("export")->add_option("what", what, "structure-table, cocycle-table, sugawara-coeffs or casimir-basis")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    Context ctx(parse_config(load_config(config_path)));
    json result;
    bool failed = false;
    if (cmd == "basis") result = cmd_basis(ctx);
    else if (cmd == "pair") result = cmd_pair(ctx);
    else if (cmd == "mult") result = cmd_mult(ctx);
    else if (cmd == "bracket") result = cmd_bracket(ctx);
    else if (cmd == "cocycle") result = cmd_cocycle(ctx);
    else if (cmd == "wedge-act") result = cmd_wedge_act(ctx);
    else if (cmd == "sugawara") result = cmd_sugawara(ctx);
    else if (cmd == "casimir") result = cmd_casimir(ctx);
    else if (cmd == "verify") result = cmd_verify(ctx, suite, failed);
    else result = cmd_export(ctx, what);
    emit(result, out_path, out);
    return failed ? kCheckFailure : kOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const CriticalLevel& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailure;
  }
}

}  // namespace kncli
