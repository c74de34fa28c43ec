#include "kn/sugawara.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace kn;

namespace {

GeometryPtr geometry(int N) {
  std::vector<Rational> pts{Rational(0), Rational(1), Rational(-1, 2)};
  pts.resize(N);
  return make_geometry(pts);
}

std::shared_ptr<SugawaraContext> context(int N, AlgebraTag tag, int r) {
  auto a = std::make_shared<AffineAlgebra>(geometry(N), tag, r);
  auto f = std::make_shared<FermionRep>(a, RepresentationData::fundamental(tag, r));
  return std::make_shared<SugawaraContext>(f);
}

std::vector<WedgeVector> samples(int charge, int lowest) {
  std::vector<WedgeVector> out;
  for (int d = 0; d >= lowest; --d)
    for (const auto& m : enumerate_monomials(charge, d)) out.emplace_back(m);
  return out;
}

KNExpansion e_(int n, int p = 1) { return KNExpansion::single(-1, n, p); }
KNExpansion A_(int n, int p = 1) { return KNExpansion::single(0, n, p); }

// Independent free-fermion currents for gl(1), N = 1: occupied sets with a
// full tail from `top` on, a_n moving ψ_j to ψ_{j+n}, a_0 = 0.
using State = std::map<std::set<int>, Rational>;
constexpr int kWindow = 24;

State as_state(const WedgeMonomial& m) {
  std::set<int> s;
  for (int i = m.charge() - kWindow; i < m.charge() + kWindow; ++i)
    if (m.occupied(i)) s.insert(i);
  return {{s, Rational(1)}};
}

State boson(int n, const State& v, int charge) {
  State out;
  if (n == 0) return out;
  const int top = charge + kWindow;
  for (const auto& [s, c] : v)
    for (int j : s) {
      const int t = j + n;
      if (t >= top || s.count(t)) continue;
      if (t < charge - kWindow) throw std::logic_error("oracle window too small");
      int between = 0;
      for (int x : s) between += x > std::min(j, t) && x < std::max(j, t);
      std::set<int> u = s;
      u.erase(j);
      u.insert(t);
      out[u] += between % 2 ? -c : c;
    }
  for (auto it = out.begin(); it != out.end();) it = is_zero(it->second) ? out.erase(it) : std::next(it);
  return out;
}

}  // namespace

TEST(SugawaraCoeff, ClassicalPairing) {
  auto g = geometry(1);
  for (int k = -4; k <= 4; ++k)
    for (int n = -6; n <= 6; ++n)
      for (int m = -6; m <= 6; ++m) EXPECT_EQ(sugawara_coeff(g, k, 1, n, 1, m, 1), n + m == k ? 1 : 0);
  EXPECT_EQ(sugawara_coeff(g, 20, 1, 1, 1, 2, 1), 0);
}

TEST(SugawaraCoeff, MatchesRationalResidues) {
  std::mt19937 rng(41);
  std::uniform_int_distribution<int> idx(-4, 4);
  for (int N : {2, 3}) {
    auto g = geometry(N);
    std::uniform_int_distribution<int> pt(1, N);
    int nonzero = 0;
    for (int i = 0; i < 150; ++i) {
      const int k = idx(rng), n = idx(rng), r = pt(rng), p = pt(rng), s = pt(rng);
      const int m = k - n + std::uniform_int_distribution<int>(-1, 2)(rng);
      const RationalFunction f = g->basis_function({1, -n, p}) * g->basis_function({1, -m, s}) *
                                 g->basis_function({-1, k, r});
      const Rational oracle = in_point_residue_sum(f, *g);
      ASSERT_EQ(sugawara_coeff(g, k, r, n, p, m, s), oracle) << N << ": " << k << r << " " << n << p << " " << m << s;
      nonzero += !is_zero(oracle);
    }
    EXPECT_GT(nonzero, 20);
  }
}

TEST(SugawaraCoeff, SupportMatchesOrderCounting) {
  for (int N : {1, 2, 3}) {
    auto g = geometry(N);
    SugawaraCoefficients l(g);
    for (int k = -3; k <= 3; ++k)
      for (int r = 1; r <= N; ++r)
        for (int p = 1; p <= N; ++p)
          for (int s = 1; s <= N; ++s) {
            auto [lo, hi] = sugawara_support(*g, k, r, p, s);
            for (int sum = lo - 2; sum <= hi + 2; ++sum) {
              bool any = false;
              for (int n = -8; n <= 8; ++n) any = any || !is_zero(sugawara_coeff(g, k, r, n, p, sum - n, s));
              EXPECT_EQ(any, sum >= lo && sum <= hi) << "N=" << N << " k=" << k << " sum=" << sum;
            }
            EXPECT_EQ(l(k, r, 1, p, k - 1, s), sugawara_coeff(g, k, r, 1, p, k - 1, s));
          }
  }
}

TEST(NormalOrder, StandardOrdering) {
  OrderedModes a = normal_order({1, 1}, {2, 1});
  EXPECT_FALSE(a.swapped);
  EXPECT_EQ(a.left, (ModeLabel{1, 1}));
  EXPECT_EQ(a.right, (ModeLabel{2, 1}));
  OrderedModes b = normal_order({2, 1}, {1, 2});
  EXPECT_TRUE(b.swapped);
  EXPECT_EQ(b.left, (ModeLabel{1, 2}));
  EXPECT_EQ(b.right, (ModeLabel{2, 1}));
  EXPECT_FALSE(normal_order({3, 1}, {3, 2}).swapped);
}

TEST(SugawaraContext, PartsLevelsAndKappa) {
  auto gl1 = context(1, AlgebraTag::GL1, 1);
  ASSERT_EQ(gl1->parts().size(), 1u);
  EXPECT_EQ(gl1->parts()[0].level, 1);
  EXPECT_EQ(gl1->parts()[0].kappa, 0);

  auto sl2 = context(2, AlgebraTag::SL, 2);
  ASSERT_EQ(sl2->parts().size(), 1u);
  EXPECT_EQ(sl2->parts()[0].kappa, 2);
  EXPECT_EQ(sl2->parts()[0].level, 1);

  auto gl3 = context(1, AlgebraTag::GL, 3);
  ASSERT_EQ(gl3->parts().size(), 2u);
  EXPECT_EQ(gl3->parts()[0].dual[0].entries, Matrix::identity(3) * Rational(1, 3));
  EXPECT_EQ(gl3->parts()[1].kappa, 3);
  for (const auto& part : gl3->parts())
    for (size_t i = 0; i < part.basis.size(); ++i)
      for (size_t j = 0; j < part.basis.size(); ++j)
        EXPECT_EQ(BilinearForm::trace_form()(part.basis[i], part.dual[j]), i == j ? 1 : 0);
}

TEST(ApplySugawara, VacuumAndZero) {
  auto ctx = context(1, AlgebraTag::GL1, 1);
  const WedgeVector vac(WedgeMonomial(0));
  for (int k = 1; k <= 4; ++k) EXPECT_TRUE(apply_sugawara(*ctx, k, 1, vac).is_zero());
  EXPECT_TRUE(apply_sugawara(*ctx, 0, 1, vac).is_zero());
  EXPECT_TRUE(apply_sugawara(*ctx, -2, 1, WedgeVector()).is_zero());
  EXPECT_FALSE(apply_sugawara(*ctx, -2, 1, vac).is_zero());
}

TEST(ApplySugawara, EnergyMatchesBilinearBosonSum) {
  auto ctx = context(1, AlgebraTag::GL1, 1);
  for (int q : {0, 2, -1}) {
    for (const auto& v : samples(q, -5)) {
      const WedgeMonomial& m = v.terms().begin()->first;
      // -1/(2c) Σ :a_n a_{-n}: with c = 1 and a_0 = 0
      State acc;
      for (int n = 1; n <= 8; ++n)
        for (const auto& [s, c] : boson(-n, boson(n, as_state(m), q), q)) acc[s] -= c;
      for (auto it = acc.begin(); it != acc.end();) it = is_zero(it->second) ? acc.erase(it) : std::next(it);
      const WedgeVector got = apply_sugawara(*ctx, 0, 1, v);
      State mine;
      for (const auto& [mm, c] : got.terms()) mine[as_state(mm).begin()->first] += c;
      EXPECT_EQ(mine, acc) << to_string(m);
      EXPECT_EQ(got, Rational(monomial_degree(m)) * v);
    }
  }
}

TEST(ApplySugawara, AlmostGraded) {
  for (int N : {1, 2}) {
    auto ctx = context(N, AlgebraTag::SL, 2);
    const int B = ctx->rep().shape().block();
    const int K = default_bounds(ctx->rep().geometry()).K;
    // Each current x(A_n) moves slots by [nB - (B-1), (n+K)B + (B-1)] and n + m <= k + (N > 1).
    const int lo_bound = -2 * (B - 1), hi_bound = ((N > 1) + 2 * K) * B + 2 * (B - 1);
    int lo = 1 << 20, hi = -(1 << 20);
    for (int k = -2; k <= 2; ++k)
      for (int r = 1; r <= N; ++r)
        for (const auto& v : samples(0, -5)) {
          const int d = monomial_degree(v.terms().begin()->first);
          const WedgeVector image = apply_sugawara(*ctx, k, r, v);
          for (const auto& [m, c] : image.terms()) {
            lo = std::min(lo, monomial_degree(m) - d - k * B);
            hi = std::max(hi, monomial_degree(m) - d - k * B);
          }
        }
    EXPECT_GE(lo, lo_bound) << "N=" << N;
    EXPECT_LE(hi, hi_bound) << "N=" << N;
    if (N == 1) EXPECT_EQ(std::make_pair(lo, hi), std::make_pair(0, 0));
  }
}

TEST(ApplySugawara, CriticalLevelRefused) {
  auto a = std::make_shared<AffineAlgebra>(geometry(1), AlgebraTag::SL, 2);
  auto f = std::make_shared<FermionRep>(a, RepresentationData::fundamental(AlgebraTag::SL, 2));
  SugawaraContext critical(f, std::nullopt, Rational(-2));
  EXPECT_THROW(apply_sugawara(critical, 1, 1, WedgeVector(WedgeMonomial(0))), CriticalLevel);
  auto b = std::make_shared<AffineAlgebra>(geometry(1), AlgebraTag::GL1, 1);
  auto h = std::make_shared<FermionRep>(b, RepresentationData::fundamental(AlgebraTag::GL1, 1));
  EXPECT_THROW(apply_sugawara(SugawaraContext(h, Rational(0), std::nullopt), 0, 1, WedgeVector()), CriticalLevel);
}

TEST(TOfField, LinearAndMatchesModes) {
  auto ctx = context(2, AlgebraTag::GL1, 1);
  const auto vs = samples(0, -3);
  for (const auto& v : vs) {
    EXPECT_EQ(apply_T_of_field(*ctx, e_(1, 2), v), apply_sugawara(*ctx, 1, 2, v));
    EXPECT_TRUE(apply_T_of_field(*ctx, KNExpansion(-1), v).is_zero());
  }
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> deg(-2, 2), pt(1, 2), coef(-3, 3);
  for (int i = 0; i < 10; ++i) {
    KNExpansion e(-1), f(-1);
    for (int j = 0; j < 3; ++j) {
      e.add(deg(rng), pt(rng), coef(rng));
      f.add(deg(rng), pt(rng), coef(rng));
    }
    const Rational a = coef(rng), b = coef(rng);
    const WedgeVector& v = vs[static_cast<size_t>(i) % vs.size()];
    EXPECT_EQ(apply_T_of_field(*ctx, e * a + f * b, v),
              a * apply_T_of_field(*ctx, e, v) + b * apply_T_of_field(*ctx, f, v));
  }
}

TEST(Fundamental, Examples) {
  auto ctx = context(1, AlgebraTag::GL1, 1);
  const MatrixElement one{Matrix::identity(1), AlgebraTag::GL1};
  const std::vector<WedgeVector> vac{WedgeVector(WedgeMonomial(0))};
  EXPECT_TRUE(check_fundamental(*ctx, e_(0), one, A_(1), vac));
  EXPECT_TRUE(check_fundamental(*ctx, KNExpansion(-1), one, A_(-2), samples(0, -3)));
  // [T[e_0], x(A_{-1})] = -x(A_{-1}) is nonzero on the vacuum.
  EXPECT_TRUE(check_fundamental(*ctx, e_(0), one, A_(-1), vac));
}

TEST(Fundamental, HoldsForGl1AndSl2) {
  for (int N : {1, 2})
    for (auto [tag, r] : {std::pair{AlgebraTag::GL1, 1}, std::pair{AlgebraTag::SL, 2}, std::pair{AlgebraTag::GL, 2}}) {
      auto ctx = context(N, tag, r);
      const auto vs = samples(0, -3);
      const auto basis = standard_basis(tag, r);
      for (int n = -2; n <= 2; ++n)
        for (int k = -3; k <= 3; ++k)
          for (const auto& x : {basis.front(), basis.back()})
            ASSERT_TRUE(check_fundamental(*ctx, e_(n, 1), x, A_(k, N), vs))
                << to_string(tag) << r << " N=" << N << " e" << n << " A" << k;
    }
}

TEST(Fundamental, WrongLevelSignBreaksIt) {
  // The defect level is -1; feeding it straight into the rescaling fails.
  auto a = std::make_shared<AffineAlgebra>(geometry(1), AlgebraTag::GL1, 1);
  auto f = std::make_shared<FermionRep>(a, RepresentationData::fundamental(AlgebraTag::GL1, 1));
  SugawaraContext flipped(f, Rational(-1), std::nullopt);
  const MatrixElement one{Matrix::identity(1), AlgebraTag::GL1};
  EXPECT_FALSE(check_fundamental(flipped, e_(0), one, A_(-1), samples(0, -2)));
}

TEST(Casimir, GenusZeroMixingSystem) {
  auto g = geometry(1);
  CocycleTable gm(g, CocycleKind::Mixing);
  ModeCocycle gamma = [&](int k, int m) { return gm.value(m, 1, -k, 1); };
  CasimirSolution sol = casimir_solve(gamma, -5, 5);
  for (int k = -5; k <= 5; ++k)
    if (k != 0) EXPECT_EQ(sol.diagonal.at(k), k * (k + 1));
  EXPECT_EQ(sol.non_generic, std::vector<int>{-1});
  ASSERT_EQ(sol.basis.size(), 2u);
  std::set<int> support;
  for (const auto& c : sol.basis) {
    ASSERT_EQ(c.coefficients.size(), 1u);
    support.insert(c.coefficients.begin()->first);
    EXPECT_EQ(c.kind, CandidateKind::Casimir);
  }
  EXPECT_EQ(support, (std::set<int>{-1, 0}));
  EXPECT_TRUE(casimir_solve(gamma, 3, 2).basis.empty());
}

TEST(Casimir, GenericTriangularSystemHasOneDimensionalKernel) {
  std::mt19937 rng(77);
  std::uniform_int_distribution<int> val(-5, 5);
  for (int trial = 0; trial < 20; ++trial) {
    std::map<std::pair<int, int>, Rational> entries;
    for (int k = -6; k <= 6; ++k)
      for (int m = -6; m <= k; ++m) {
        int v = val(rng);
        if (m == k && v == 0) v = 1;
        entries[{k, m}] = v;
      }
    ModeCocycle gamma = [&](int k, int m) {
      auto it = entries.find({k, m});
      return it == entries.end() ? Rational(0) : it->second;
    };
    CasimirSolution sol = casimir_solve(gamma, -6, 6);
    EXPECT_TRUE(sol.non_generic.empty());
    ASSERT_EQ(sol.basis.size(), 1u);
    const auto& a = sol.basis[0].coefficients;
    ASSERT_TRUE(a.count(0));
    for (const auto& [n, c] : a) EXPECT_GE(n, 0);
    for (int k = -6; k <= 6; ++k) {
      if (k == 0) continue;
      Rational row;
      for (const auto& [m, c] : a) row += c * gamma(k, m);
      EXPECT_EQ(row, 0);
    }
  }
}

TEST(GammaExtend, GradedSyntheticAndSingular) {
  auto g = geometry(1);
  CocycleTable gm(g, CocycleKind::Mixing);
  ModeCocycle graded = [&](int k, int m) { return gm.value(m, 1, -k, 1); };
  CasimirCandidate c = gamma_extend({{0, 1}}, graded, 6);
  EXPECT_EQ(c.coefficients, (std::map<int, Rational>{{0, 1}}));
  EXPECT_EQ(c.kind, CandidateKind::SemiCasimir);
  EXPECT_TRUE(gamma_extend({}, graded, 6).coefficients.empty());

  ModeCocycle skew = [](int k, int m) {
    if (k == m) return Rational(k * (k + 1));
    if (k == 2 && m == 0) return Rational(5);
    if (k == 3 && m == 2) return Rational(-1);
    return Rational(0);
  };
  CasimirCandidate s = gamma_extend({{0, 2}, {-1, 7}}, skew, 4);
  // forward substitution: 6 a_2 + 5 a_0 = 0, 12 a_3 - a_2 = 0
  const Rational a2 = Rational(-5, 3), a3 = a2 / 12;
  EXPECT_EQ(s.coefficients, (std::map<int, Rational>{{-1, 7}, {0, 2}, {2, a2}, {3, a3}}));

  ModeCocycle singular = [](int k, int m) { return k == m && k != 3 ? Rational(1) : Rational(0); };
  try {
    gamma_extend({{0, 1}}, singular, 5);
    FAIL() << "expected a singular diagonal";
  } catch (const SingularDiagonal& e) {
    EXPECT_EQ(e.k(), 3);
  }
  EXPECT_THROW(gamma_extend({{1, 1}}, graded, 3), std::invalid_argument);
}

TEST(DeltaCommutation, Examples) {
  auto gl1 = context(1, AlgebraTag::GL1, 1);
  const MatrixElement one{Matrix::identity(1), AlgebraTag::GL1};
  const auto vs = samples(0, -4);
  const Rational mu(-1, 2);

  CasimirCandidate e2 = CasimirCandidate::exact(e_(2));
  CheckReport r = check_delta_commutation(*gl1, e2, one, A_(-2), vs, mu);
  EXPECT_EQ(r.status, CheckStatus::Pass) << r.witness;
  EXPECT_EQ(*r.scalar, -3);
  EXPECT_EQ(check_delta_commutation(*gl1, e2, one, A_(-2), vs, Rational(1, 2)).status, CheckStatus::Fail);

  CocycleTable gm(gl1->rep().geometry(), CocycleKind::Mixing);
  ModeCocycle gamma = [&](int k, int m) { return gm.value(m, 1, -k, 1); };
  CasimirCandidate semi = gamma_extend({{0, 1}}, gamma, 20);
  for (int k = -4; k <= -1; ++k) {
    CheckReport s = check_delta_commutation(*gl1, semi, one, A_(k), vs, mu);
    EXPECT_EQ(s.status, CheckStatus::Pass) << s.witness;
  }
  CasimirCandidate narrow = gamma_extend({{0, 1}}, gamma, 2);
  EXPECT_EQ(check_delta_commutation(*gl1, narrow, one, A_(-2), vs, mu).status, CheckStatus::Inconclusive);
  EXPECT_THROW(check_delta_commutation(*gl1, semi, one, A_(1), vs, mu), std::invalid_argument);

  auto sl2 = context(1, AlgebraTag::SL, 2);
  for (const auto& x : standard_basis(AlgebraTag::SL, 2))
    for (int k = -2; k <= 2; ++k) {
      CheckReport t = check_delta_commutation(*sl2, CasimirCandidate::exact(e_(1) + e_(-2)), x, A_(k), samples(0, -3), mu);
      EXPECT_EQ(t.status, CheckStatus::Pass) << t.witness;
      EXPECT_EQ(*t.scalar, 0);
    }
}

TEST(PairwiseScalar, SharedScalar) {
  auto gl1 = context(1, AlgebraTag::GL1, 1);
  std::vector<WedgeVector> first, second;
  for (const auto& v : samples(0, -7)) (first.size() < 20 ? first : second).push_back(v);
  second.resize(20);
  const auto e0 = CasimirCandidate::exact(e_(0)), e1 = CasimirCandidate::exact(e_(1));
  const auto e2 = CasimirCandidate::exact(e_(2)), em2 = CasimirCandidate::exact(e_(-2));

  CheckReport same = check_pairwise_scalar(*gl1, e2, e2, first);
  EXPECT_EQ(same.status, CheckStatus::Pass);
  EXPECT_EQ(*same.scalar, 0);
  CheckReport a = check_pairwise_scalar(*gl1, e0, e1, first);
  EXPECT_EQ(a.status, CheckStatus::Pass) << a.witness;
  CheckReport b1 = check_pairwise_scalar(*gl1, e2, em2, first);
  CheckReport b2 = check_pairwise_scalar(*gl1, e2, em2, second);
  ASSERT_EQ(b1.status, CheckStatus::Pass) << b1.witness;
  ASSERT_EQ(b2.status, CheckStatus::Pass) << b2.witness;
  EXPECT_EQ(*b1.scalar, *b2.scalar);
  EXPECT_NE(*b1.scalar, 0);

  CocycleTable gm(gl1->rep().geometry(), CocycleKind::Mixing);
  ModeCocycle gamma = [&](int k, int m) { return gm.value(m, 1, -k, 1); };
  EXPECT_EQ(check_pairwise_scalar(*gl1, gamma_extend({{0, 1}}, gamma, 3), e2, first).status, CheckStatus::Inconclusive);
}
