#include "kn/cocycles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace kn;

namespace {

GeometryPtr one_point() { return make_geometry({Rational(0)}); }
GeometryPtr two_points() { return make_geometry({Rational(0), Rational(1)}); }
GeometryPtr three_points() { return make_geometry({Rational(0), Rational(1), Rational(-1, 2)}); }

KNExpansion random_expansion(std::mt19937& rng, int weight, int N) {
  std::uniform_int_distribution<int> count(1, 3), deg(-3, 3), pt(1, N), num(-4, 4);
  KNExpansion x(weight);
  for (int i = count(rng); i > 0; --i) x.add(deg(rng), pt(rng), Rational(num(rng)));
  return x;
}

DElement random_d(std::mt19937& rng, int N) {
  return {random_expansion(rng, -1, N), random_expansion(rng, 0, N)};
}

}  // namespace

TEST(CocycleValues, OnePointExamples) {
  auto g = one_point();
  for (int n = -5; n <= 5; ++n) {
    for (int m = -5; m <= 5; ++m) {
      EXPECT_EQ(cocycle_A(basis_A(g, n, 1), basis_A(g, m, 1)), n + m == 0 ? m : 0);
      EXPECT_EQ(cocycle_L(basis_e(g, n, 1), basis_e(g, m, 1)), n + m == 0 ? n * n * n - n : 0);
      EXPECT_EQ(cocycle_mix(basis_e(g, n, 1), basis_A(g, m, 1)), n + m == 0 ? m * (m - 1) : 0);
    }
    EXPECT_EQ(cocycle_mix(basis_e(g, n, 1), basis_A(g, -n, 1)), n * (n + 1));
  }
  EXPECT_EQ(cocycle_L(basis_e(g, 2, 1), basis_e(g, 3, 1)), 0);
  EXPECT_EQ(cocycle_mix(basis_e(g, 0, 1), basis_A(g, -1, 1)), 0);
}

TEST(CocycleValues, TrivialCases) {
  auto g = two_points();
  FormElement one{RationalFunction(1), 0, g};
  FormElement a{parse_rational_function("(z^2 + 3)/(z^2*(z-1))"), 0, g};
  FormElement e{parse_rational_function("(z^3 - 2)/(z-1)"), -1, g};
  EXPECT_EQ(cocycle_A(a, one), 0);
  EXPECT_EQ(cocycle_A(a, a), 0);
  EXPECT_EQ(cocycle_L(e, e), 0);
  EXPECT_EQ(cocycle_mix(e, one), 0);
  EXPECT_THROW(cocycle_A(a, e), std::invalid_argument);
  EXPECT_THROW(cocycle_A(a, basis_A(one_point(), 0, 1)), std::invalid_argument);
}

TEST(CocycleValues, ConnectionAdmissibility) {
  auto g = two_points();
  EXPECT_NO_THROW(validate(AffineConnection{parse_rational_function("1/z + 1/(z-1)")}, *g));
  EXPECT_THROW(validate(AffineConnection{RationalFunction(1)}, *g), std::invalid_argument);
  EXPECT_THROW(validate(ProjectiveConnection{parse_rational_function("1/(z-3)")}, *g), std::invalid_argument);
  EXPECT_NO_THROW(validate(ProjectiveConnection{parse_rational_function("z^2 + 1/z^2")}, *g));
}

TEST(CocycleTable, SeriesMatchesResidueOracle) {
  ProjectiveConnection R{parse_rational_function("1/(z^2*(z-1)) + z")};
  AffineConnection T{parse_rational_function("2/z - 1/(z-1)")};
  for (auto g : {two_points(), three_points()}) {
    CocycleTable A(g, CocycleKind::Function), L(g, CocycleKind::VectorField, R), M(g, CocycleKind::Mixing, {}, T);
    for (int n = -3; n <= 3; ++n)
      for (int m = -3; m <= 3; ++m)
        for (int p = 1; p <= g->size(); ++p) {
          const int r = 1 + (p + m + 9) % g->size();
          ASSERT_EQ(A.value(n, p, m, r), cocycle_A(basis_A(g, n, p), basis_A(g, m, r)));
          ASSERT_EQ(L.value(n, p, m, r), cocycle_L(basis_e(g, n, p), basis_e(g, m, r), R));
          ASSERT_EQ(M.value(n, p, m, r), cocycle_mix(basis_e(g, n, p), basis_A(g, m, r), T));
        }
  }
}

TEST(CocycleProperties, Antisymmetry) {
  std::mt19937 rng(3);
  for (auto g : {one_point(), two_points()}) {
    DCocycle gamma(g, {parse_rational_function("z")}, {parse_rational_function("1/z")});
    std::vector<DElement> sample;
    for (int i = 0; i < 12; ++i) sample.push_back(random_d(rng, g->size()));
    std::function<Rational(const DElement&, const DElement&)> f = [&](const DElement& x, const DElement& y) {
      return gamma(x, y);
    };
    EXPECT_TRUE(check_antisymmetry(f, sample));
  }
}

TEST(CocycleProperties, CocycleIdentity) {
  std::mt19937 rng(11);
  for (auto g : {one_point(), two_points()}) {
    std::function<DElement(const DElement&, const DElement&)> br = [g](const DElement& x, const DElement& y) {
      return d_bracket(g, x, y);
    };
    std::vector<std::array<DElement, 3>> triples;
    for (int i = 0; i < 100; ++i) triples.push_back({random_d(rng, g->size()), random_d(rng, g->size()), random_d(rng, g->size())});
    const ProjectiveConnection R{parse_rational_function("z^2")};
    const AffineConnection T{parse_rational_function("1/z")};
    for (auto [a, b, c] : {std::tuple{1, 0, 0}, std::tuple{0, 1, 0}, std::tuple{0, 0, 1}, std::tuple{2, -3, 5}}) {
      DCocycle gamma(g, R, T, a, b, c);
      std::function<Rational(const DElement&, const DElement&)> f = [&](const DElement& x, const DElement& y) {
        return gamma(x, y);
      };
      EXPECT_TRUE(check_cocycle_identity(f, br, triples)) << "N=" << g->size() << " " << a << b << c;
    }
  }
}

TEST(CocycleProperties, VirasoroIdentityOnSmallTriples) {
  auto g = one_point();
  CocycleTable L(g, CocycleKind::VectorField);
  StructureTable br(g, TableKind::VectorBracket);
  std::function<Rational(const KNExpansion&, const KNExpansion&)> gamma = [&](const KNExpansion& x,
                                                                             const KNExpansion& y) { return L(x, y); };
  std::function<KNExpansion(const KNExpansion&, const KNExpansion&)> b = [&](const KNExpansion& x,
                                                                            const KNExpansion& y) {
    KNExpansion out(-1);
    for (const auto& [i, c] : x.terms())
      for (const auto& [j, d] : y.terms()) out += br.entry(i.first, i.second, j.first, j.second) * (c * d);
    return out;
  };
  std::vector<std::array<KNExpansion, 3>> triples;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      for (int k = -2; k <= 2; ++k)
        triples.push_back({KNExpansion::single(-1, i, 1), KNExpansion::single(-1, j, 1), KNExpansion::single(-1, k, 1)});
  EXPECT_TRUE(check_cocycle_identity(gamma, b, triples));
}

TEST(Locality, WindowsAreFiniteAndStable) {
  auto g1 = one_point();
  CocycleTable A1(g1, CocycleKind::Function), L1(g1, CocycleKind::VectorField), M1(g1, CocycleKind::Mixing);
  auto fn = [](const CocycleTable& t) -> BasisPairCocycle {
    return [&t](int n, int p, int m, int r) { return t.value(n, p, m, r); };
  };
  for (const CocycleTable* t : {&A1, &L1, &M1}) {
    LocalityWindow w = check_locality(g1, fn(*t), -5, 5);
    EXPECT_TRUE(w.nonzero);
    EXPECT_TRUE(w.stable);
    EXPECT_EQ(w.M1, 0);
    EXPECT_EQ(w.M2, 0);
  }
  for (auto g : {two_points(), three_points()}) {
    CocycleTable A(g, CocycleKind::Function), L(g, CocycleKind::VectorField), M(g, CocycleKind::Mixing);
    for (const CocycleTable* t : {&A, &L, &M}) {
      LocalityWindow w = check_locality(g, fn(*t), -5, 5);
      EXPECT_TRUE(w.nonzero);
      EXPECT_TRUE(w.stable) << to_string(t->kind()) << " N=" << g->size();
      EXPECT_LE(w.M2, w.M1);
    }
  }
}

TEST(Coboundary, ConnectionIndependence) {
  for (auto g : {one_point(), two_points()}) {
    const std::string poles = g->size() == 1 ? "1/z" : "1/z + 2/(z-1)";
    CocycleTable L0(g, CocycleKind::VectorField), LR(g, CocycleKind::VectorField, {parse_rational_function("3 + " + poles)});
    CocycleTable M0(g, CocycleKind::Mixing), MT(g, CocycleKind::Mixing, {}, {parse_rational_function(poles)});
    StructureTable vb(g, TableKind::VectorBracket), act(g, TableKind::FieldOnForm, 0);
    auto fn = [](const CocycleTable& t) -> BasisPairCocycle {
      return [&t](int n, int p, int m, int r) { return t.value(n, p, m, r); };
    };
    auto phi = solve_coboundary(g, table_bracket(vb), fn(L0), fn(LR), -4, 4);
    ASSERT_TRUE(phi.has_value());
    EXPECT_TRUE(coboundary_equivalent(g, table_bracket(vb), fn(L0), fn(LR), *phi, -4, 4));
    EXPECT_FALSE(phi->values.empty());
    auto psi = solve_coboundary(g, table_bracket(act), fn(M0), fn(MT), -4, 4);
    ASSERT_TRUE(psi.has_value());
    EXPECT_TRUE(coboundary_equivalent(g, table_bracket(act), fn(M0), fn(MT), *psi, -4, 4));
  }
}

TEST(Coboundary, OnePointConstantConnection) {
  // γ_0 - γ_R = R (n - m) δ_{n+m,-2} = φ((m - n) e_{n+m}) with φ(e_{-2}) = -R.
  auto g = one_point();
  CocycleTable L0(g, CocycleKind::VectorField), LR(g, CocycleKind::VectorField, {RationalFunction(5)});
  StructureTable vb(g, TableKind::VectorBracket);
  BasisFunctional phi;
  phi.values[{-2, 1}] = -5;
  auto fn = [](const CocycleTable& t) -> BasisPairCocycle {
    return [&t](int n, int p, int m, int r) { return t.value(n, p, m, r); };
  };
  EXPECT_TRUE(coboundary_equivalent(g, table_bracket(vb), fn(L0), fn(LR), phi, -5, 5));
  EXPECT_TRUE(coboundary_equivalent(g, table_bracket(vb), fn(L0), fn(L0), BasisFunctional{}, -5, 5));
}

TEST(Coboundary, NontrivialClassesAreNotRescaled) {
  for (auto g : {one_point(), two_points()}) {
    CocycleTable A(g, CocycleKind::Function), L(g, CocycleKind::VectorField);
    StructureTable vb(g, TableKind::VectorBracket);
    BasisPairBracket abelian = [](int, int, int, int) { return KNExpansion(0); };
    BasisPairCocycle a1 = [&](int n, int p, int m, int r) { return A.value(n, p, m, r); };
    BasisPairCocycle a2 = [&](int n, int p, int m, int r) { return A.value(n, p, m, r) * 2; };
    EXPECT_FALSE(solve_coboundary(g, abelian, a1, a2, -4, 4).has_value());
    BasisPairCocycle l1 = [&](int n, int p, int m, int r) { return L.value(n, p, m, r); };
    BasisPairCocycle l2 = [&](int n, int p, int m, int r) { return L.value(n, p, m, r) * 2; };
    EXPECT_FALSE(solve_coboundary(g, table_bracket(vb), l1, l2, -4, 4).has_value());
  }
}

TEST(LInvariance, DerivationIdentityHolds) {
  std::mt19937 rng(5);
  std::function<Rational(const FormElement&, const FormElement&)> c = [](const FormElement& a, const FormElement& b) {
    return cocycle_A(a, b);
  };
  for (auto g : {one_point(), two_points()}) {
    std::vector<std::array<FormElement, 3>> samples;
    for (int i = 0; i < 40; ++i)
      samples.push_back({reconstruct(g, random_expansion(rng, -1, g->size())),
                         reconstruct(g, random_expansion(rng, 0, g->size())),
                         reconstruct(g, random_expansion(rng, 0, g->size()))});
    LInvarianceReport r = check_L_invariance(c, samples);
    EXPECT_TRUE(r.derivation);
    EXPECT_FALSE(r.literal);

    std::vector<std::array<FormElement, 3>> zero_field;
    for (auto s : samples) zero_field.push_back({FormElement{RationalFunction(), -1, g}, s[1], s[2]});
    LInvarianceReport z = check_L_invariance(c, zero_field);
    EXPECT_TRUE(z.derivation);
    EXPECT_TRUE(z.literal);
  }
}
