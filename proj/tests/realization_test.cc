#include "whf/realization.h"

#include <gtest/gtest.h>

#include "test_util.h"
#include "whf/errors.h"
#include "whf/testgen.h"

namespace whf {
namespace {

using testing::inverse_monomial;
using testing::max_abs;
using testing::monomial;
using testing::random_matrix;
using testing::random_stable;
using testing::scalar;
using testing::shifted_monomial;

double dist(const Matrix& a, Complex v) {
  return static_cast<double>(std::abs(a(0, 0) - v));
}

TwoSidedRealization random_realization(std::mt19937_64& rng, Eigen::Index m,
                                       Eigen::Index np, Eigen::Index nm) {
  TwoSidedRealization r;
  r.R0 = random_matrix(rng, m, m);
  r.A = random_stable(rng, np, 0.7);
  r.B = random_matrix(rng, np, m);
  r.C = random_matrix(rng, m, np);
  r.alpha = random_stable(rng, nm, 0.7);
  r.beta = random_matrix(rng, nm, m);
  r.gamma = random_matrix(rng, m, nm);
  return r;
}

TEST(Validate, IdentityIsValid) {
  const ValidationReport rep =
      validate(TwoSidedRealization::constant(identity(2)));
  EXPECT_NEAR(rep.min_abs_det, 1.0, 1e-15);
  EXPECT_EQ(rep.rho_plus, 0.0);
  EXPECT_EQ(rep.rho_minus, 0.0);
}

TEST(Validate, UnitSpectralRadiusIsRejected) {
  const auto r = TwoSidedRealization::plus_only(scalar(1.0), scalar(1.0),
                                                scalar(1.0), scalar(1.0));
  try {
    validate(r);
    FAIL() << "expected UnstableStateMatrix";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnstableStateMatrix);
    EXPECT_TRUE(is_validation_error(e.code()));
  }
}

TEST(Validate, TwoPlusZ) {
  const ValidationReport rep = validate(shifted_monomial(2.0));
  EXPECT_NEAR(rep.min_abs_det, 1.0, 1e-12);
}

TEST(Validate, ShapeMismatch) {
  TwoSidedRealization r = monomial();
  r.B = Matrix::Zero(2, 1);
  EXPECT_THROW(validate(r), Error);
}

TEST(Evaluate, Monomials) {
  const Complex i(0.0, 1.0);
  EXPECT_LT(dist(evaluate(monomial(), i), i), 1e-15);
  EXPECT_LT(dist(evaluate(inverse_monomial(), 2.0), 0.5), 1e-15);
}

TEST(Evaluate, AdjointOnCircleIsConjugateTranspose) {
  std::mt19937_64 rng(2);
  const TwoSidedRealization r = random_realization(rng, 2, 3, 2);
  for (const Complex z : circle_grid(16)) {
    EXPECT_LT(max_abs(evaluate_adjoint(r, z) - evaluate(r, z).adjoint()),
              1e-15);
  }
  const Complex z(0.3, 0.4);
  EXPECT_LT(max_abs(evaluate_adjoint(r, z) -
                    evaluate(r, Real(1) / std::conj(z)).adjoint()),
            1e-14);
}

TEST(Gramians, ScalarOracle) {
  const auto r = TwoSidedRealization::plus_only(scalar(0.0), scalar(0.5),
                                                scalar(1.0), scalar(1.0));
  const auto [pp, pm] = observability_gramians(r);
  EXPECT_LT(dist(pp, Real(4) / Real(3)), 1e-15);
  EXPECT_EQ(pm.size(), 0);
}

TEST(Gramians, RandomResidual) {
  std::mt19937_64 rng(3);
  const TwoSidedRealization r = random_realization(rng, 2, 5, 5);
  const auto [pp, pm] = observability_gramians(r);
  EXPECT_LT(norm2(pp - r.A.adjoint() * pp * r.A - r.C.adjoint() * r.C),
            1e-12 * (1 + norm2(pp)));
  EXPECT_LT(norm2(pm - r.alpha.adjoint() * pm * r.alpha -
                  r.gamma.adjoint() * r.gamma),
            1e-12 * (1 + norm2(pm)));
}

TEST(ProductData, MonomialExample) {
  const ProductData pd = product_data(monomial());
  EXPECT_LT(dist(pd.Atilde, 0.0), 1e-15);
  EXPECT_LT(dist(pd.Btilde, 0.0), 1e-15);
  EXPECT_LT(dist(pd.Ctilde, 1.0), 1e-15);
  EXPECT_LT(dist(pd.Dtilde, 1.0), 1e-15);
}

TEST(ProductData, TwoPlusZExample) {
  const ProductData pd = product_data(shifted_monomial(2.0));
  EXPECT_LT(dist(pd.Atilde, 0.0), 1e-15);
  EXPECT_LT(dist(pd.Btilde, 2.0), 1e-15);
  EXPECT_LT(dist(pd.Ctilde, 1.0), 1e-15);
  EXPECT_LT(dist(pd.Dtilde, 5.0), 1e-15);
}

TEST(ProductData, MatchesSampledProductOnCircle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const TwoSidedRealization r =
        random_realization(rng, 1 + trial % 3, trial % 4, (trial + 1) % 3);
    const ProductData pd = product_data(r);
    EXPECT_LT(norm2(pd.Dtilde - pd.Dtilde.adjoint()), 1e-14);
    for (const Complex z : circle_grid(32)) {
      const Matrix rz = evaluate(r, z);
      const Matrix lhs = rz.adjoint() * rz;
      EXPECT_LT(norm2(lhs - evaluate_product_data(pd, z)),
                1e-11 * (1 + norm2(lhs)));
    }
  }
}

TEST(Multiply, MonomialTimesInverseIsOne) {
  const TwoSidedRealization h = multiply(monomial(), inverse_monomial());
  const auto one = TwoSidedRealization::constant(identity(1));
  EXPECT_LT(max_deviation(h, one), 1e-12);
}

TEST(Multiply, TwoPlusZTimesInverseMonomial) {
  const TwoSidedRealization h = multiply(shifted_monomial(2.0), inverse_monomial());
  // 2/z + 1.
  const auto expected = TwoSidedRealization::minus_only(
      scalar(1.0), scalar(0.0), scalar(2.0), scalar(1.0));
  EXPECT_LT(max_deviation(h, expected), 1e-12);
}

TEST(Multiply, PointwiseProductAndAssociativity) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_realization(rng, 2, 2, 1);
    const auto g = random_realization(rng, 2, 1, 2);
    const auto h = random_realization(rng, 2, 2, 2);
    const auto fg = multiply(f, g);
    for (const Complex z : circle_grid(16)) {
      const Matrix direct = evaluate(f, z) * evaluate(g, z);
      EXPECT_LT(norm2(evaluate(fg, z) - direct), 1e-11 * (1 + norm2(direct)));
    }
    const auto left = multiply(fg, h);
    const auto right = multiply(f, multiply(g, h));
    double scale = 0.0;
    for (const Complex z : circle_grid(64)) {
      scale = std::max(scale, norm2(evaluate(left, z)));
    }
    EXPECT_LT(max_deviation(left, right), 1e-10 * (1 + scale));
  }
}

TEST(Winding, Examples) {
  EXPECT_EQ(winding_number(monomial()), 1);
  EXPECT_EQ(winding_number(inverse_monomial()), -1);
  EXPECT_EQ(winding_number(TwoSidedRealization::constant(identity(3))), 0);
  EXPECT_EQ(winding_number(shifted_monomial(2.0)), 0);
  EXPECT_EQ(winding_number(shifted_monomial(0.5)), 1);
}

TEST(Winding, AdditiveUnderProductsAndDirectSums) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    ProblemSpec a;
    a.m = 2;
    a.indices = {static_cast<int>(seed % 3) - 1, 2};
    a.state_plus = 2;
    a.state_minus = 1;
    a.seed = seed;
    ProblemSpec b = a;
    b.indices = {-2, static_cast<int>(seed % 2)};
    b.seed = seed + 100;
    const auto f = generate_problem(a).realization;
    const auto g = generate_problem(b).realization;
    const int wf = winding_number(f);
    const int wg = winding_number(g);
    EXPECT_EQ(wf, a.indices[0] + a.indices[1]);
    EXPECT_EQ(winding_number(multiply(f, g)), wf + wg);
    EXPECT_EQ(winding_number(direct_sum(f, g)), wf + wg);
  }
}

TEST(Scale, ScalesValues) {
  const auto r = scale(shifted_monomial(2.0), Complex(0.0, 3.0));
  EXPECT_LT(dist(evaluate(r, 1.0), Complex(0.0, 9.0)), 1e-14);
}

}  // namespace
}  // namespace whf
