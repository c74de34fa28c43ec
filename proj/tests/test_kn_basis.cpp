#include "kn/basis.hpp"
#include "kn/structure.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace kn;

namespace {

GeometryPtr geom_of(std::vector<Rational> pts) { return make_geometry(std::move(pts)); }

std::vector<GeometryPtr> sweep_geometries() {
  return {geom_of({Rational(0)}), geom_of({Rational(0), Rational(1)}),
          geom_of({Rational(0), Rational(1), Rational(-1, 2)})};
}

// Random element of F^λ: polynomial over a product of powers of (z - P_i).
class RandomForms {
 public:
  RandomForms(GeometryPtr geom, unsigned seed) : geom_(std::move(geom)), rng_(seed) {}

  FormElement next(int weight) {
    std::uniform_int_distribution<int> deg(0, 6), mult(0, 3), num(-5, 5), den(1, 3);
    std::vector<Rational> c(static_cast<size_t>(deg(rng_)) + 1);
    for (auto& x : c) {
      x = Rational(num(rng_), den(rng_));
      x.canonicalize();
    }
    RationalFunction::Roots roots;
    for (auto& p : geom_->punctures()) roots.emplace_back(p, mult(rng_));
    return {RationalFunction::from_factored(Polynomial(c), roots), weight, geom_};
  }

 private:
  GeometryPtr geom_;
  std::mt19937 rng_;
};

}  // namespace

TEST(MakeBasis, LaurentMonomialsForOnePoint) {
  auto g = geom_of({Rational(0)});
  EXPECT_EQ(make_basis(g, 0, 3, 1).func, RationalFunction(Polynomial::monomial(1, 3)));
  FormElement e = make_basis(g, -1, 2, 1);
  EXPECT_EQ(e.func, RationalFunction(Polynomial::monomial(1, 3)));
  EXPECT_EQ(e.order_at(Point::at(0)), 3);
  EXPECT_EQ(basis_omega(g, 2, 1).func, parse_rational_function("1/z^3"));
}

TEST(MakeBasis, TwoPointExample) {
  auto g = geom_of({Rational(0), Rational(1)});
  FormElement a = make_basis(g, 0, 0, 1);
  EXPECT_EQ(a.func, parse_rational_function("1 - z"));
  EXPECT_EQ(a.order_at(Point::at(0)), 0);
  EXPECT_EQ(a.order_at(Point::at(1)), 1);
  EXPECT_EQ(a.order_at(Point::infinity()), -1);
  EXPECT_EQ(laurent_expand(a.func, Point::at(0), 1).coefficients.front(), 1);
}

TEST(MakeBasis, RejectsBadPuncture) {
  auto g = geom_of({Rational(0), Rational(1)});
  EXPECT_THROW(make_basis(g, 0, 0, 0), std::out_of_range);
  EXPECT_THROW(make_basis(g, 0, 0, 3), std::out_of_range);
  EXPECT_THROW(geom_of({Rational(1), Rational(1)}), std::invalid_argument);
}

TEST(MakeBasis, DivisorDegreeIsMinusTwoLambda) {
  for (auto& g : sweep_geometries()) {
    for (int lambda = -1; lambda <= 2; ++lambda) {
      for (int n = -8; n <= 8; ++n) {
        for (int p = 1; p <= g->size(); ++p) {
          FormElement f = make_basis(g, lambda, n, p);
          int total = 0;
          for (auto& pt : g->points()) total += f.order_at(pt);
          EXPECT_EQ(total, -2 * lambda);
        }
      }
    }
  }
}

TEST(KnPairing, OnePointDuality) {
  auto g = geom_of({Rational(0)});
  for (int n = -5; n <= 5; ++n) {
    for (int m = -5; m <= 5; ++m) {
      EXPECT_EQ(kn_pairing(basis_A(g, n, 1), make_basis(g, 1, m, 1)), m == -n ? 1 : 0);
    }
  }
}

TEST(KnPairing, HolomorphicProductAndErrors) {
  auto g = geom_of({Rational(0), Rational(1)});
  FormElement f{parse_rational_function("z^2 + 1"), 0, g};
  FormElement w{parse_rational_function("3"), 1, g};
  EXPECT_EQ(kn_pairing(f, w), 0);
  EXPECT_THROW(kn_pairing(f, f), std::invalid_argument);
  FormElement other{parse_rational_function("1"), 1, geom_of({Rational(0), Rational(2)})};
  EXPECT_THROW(kn_pairing(f, other), std::invalid_argument);
}

TEST(KnPairing, DualitySweep) {
  for (auto& g : sweep_geometries()) {
    for (int lambda = -1; lambda <= 2; ++lambda) {
      for (int n = -8; n <= 8; ++n) {
        for (int m = -8; m <= 8; ++m) {
          for (int p = 1; p <= g->size(); ++p) {
            for (int r = 1; r <= g->size(); ++r) {
              Rational v = kn_pairing(make_basis(g, lambda, n, p), make_basis(g, 1 - lambda, m, r));
              ASSERT_EQ(v, (m == -n && p == r) ? 1 : 0) << "N=" << g->size() << " λ=" << lambda << " n=" << n
                                                          << " m=" << m << " p=" << p << " r=" << r;
            }
          }
        }
      }
    }
  }
}

TEST(ExpandInBasis, WorkedExamples) {
  auto g1 = geom_of({Rational(0)});
  KNExpansion x = expand_in_basis({parse_rational_function("z^2 + z^5"), 0, g1});
  KNExpansion want(0);
  want.add(2, 1, 1);
  want.add(5, 1, 1);
  EXPECT_EQ(x, want);
  EXPECT_EQ(homogeneous_degree_window({parse_rational_function("z + z^2"), 0, g1}), std::make_pair(1, 2));

  auto g2 = geom_of({Rational(0), Rational(1)});
  KNExpansion one = expand_in_basis({RationalFunction(1), 0, g2});
  KNExpansion sum(0);
  sum.add(0, 1, 1);
  sum.add(0, 2, 1);
  EXPECT_EQ(one, sum);

  for (int lambda = -1; lambda <= 2; ++lambda) {
    FormElement b = make_basis(g2, lambda, 3, 2);
    EXPECT_EQ(expand_in_basis(b), KNExpansion::single(lambda, 3, 2));
    EXPECT_EQ(homogeneous_degree_window(b), std::make_pair(3, 3));
  }
  EXPECT_FALSE(homogeneous_degree_window({RationalFunction(), 0, g2}).has_value());
}

TEST(ExpandInBasis, SupportViolation) {
  auto g = geom_of({Rational(0), Rational(1)});
  EXPECT_THROW(expand_in_basis({parse_rational_function("1/(z-2)"), 0, g}), std::domain_error);
  EXPECT_THROW(expand_in_basis({parse_rational_function("1/(z^2-2)"), 0, g}), std::domain_error);
}

TEST(ExpandInBasis, ReconstructionAndPairingOracle) {
  unsigned seed = 17;
  for (auto& g : sweep_geometries()) {
    RandomForms gen(g, seed++);
    for (int i = 0; i < 100; ++i) {
      const int lambda = -1 + i % 4;
      FormElement f = gen.next(lambda);
      KNExpansion x = expand_in_basis(f);
      EXPECT_EQ(reconstruct(g, x).func, f.func);
      if (i % 5 == 0) EXPECT_EQ(x, expand_by_pairing(f));
    }
  }
}

TEST(ExpandInBasis, ProductWindowTwoPoints) {
  auto g = geom_of({Rational(0), Rational(1)});
  KNExpansion x = multiply(basis_A(g, 1, 1), basis_A(g, 1, 2));
  const int K = default_bounds(g).K;
  auto w = x.degree_window();
  ASSERT_TRUE(w.has_value());
  EXPECT_GE(w->first, 2);
  EXPECT_LE(w->second, 2 + K);
  EXPECT_EQ(x.coefficient(2, 1), 0);
  EXPECT_EQ(x.coefficient(2, 2), 0);
}
