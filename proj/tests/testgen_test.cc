#include "whf/testgen.h"

#include <gtest/gtest.h>

#include "test_util.h"
#include "whf/errors.h"

namespace whf {
namespace {

using testing::max_abs;

ProblemSpec spec_of(int m, std::vector<int> indices, int np, int nm,
                    std::uint64_t seed) {
  ProblemSpec spec;
  spec.m = m;
  spec.indices = std::move(indices);
  spec.state_plus = np;
  spec.state_minus = nm;
  spec.seed = seed;
  return spec;
}

TEST(PlusFactor, DeterministicForFixedSeed) {
  const ProblemSpec spec = spec_of(2, {0, 0}, 3, 0, 42);
  const auto a = make_plus_factor(spec);
  const auto b = make_plus_factor(spec);
  EXPECT_EQ(a.A, b.A);
  EXPECT_EQ(a.B, b.B);
  EXPECT_EQ(a.C, b.C);
  EXPECT_EQ(a.R0, b.R0);
  ProblemSpec other = spec;
  other.seed = 43;
  EXPECT_NE(make_plus_factor(other).A, a.A);
}

TEST(PlusFactor, OuterWithStableInverse) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto f = make_plus_factor(spec_of(2, {0, 0}, 3, 0, seed));
    EXPECT_LE(spectral_radius(f.A), 0.6 + 1e-12);
    const Complex rho = f.R0(0, 0);
    EXPECT_LE(spectral_radius(f.A - f.B * f.C / rho), 0.95);
    EXPECT_EQ(winding_number(f), 0);
  }
}

TEST(MinusFactor, MirrorImageHasNoWinding) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto f = make_minus_factor(spec_of(3, {0, 0, 0}, 0, 4, seed));
    EXPECT_EQ(f.n_plus(), 0);
    EXPECT_EQ(f.n_minus(), 4);
    EXPECT_LE(spectral_radius(f.alpha), 0.6 + 1e-12);
    EXPECT_EQ(winding_number(f), 0);
  }
}

TEST(Middle, EvaluatesToDiagonalMonomials) {
  const auto d = make_middle({-1, 0, 2});
  for (const Complex z : circle_grid(16)) {
    Matrix expected = Matrix::Zero(3, 3);
    expected(0, 0) = Real(1) / z;
    expected(1, 1) = 1.0;
    expected(2, 2) = z * z;
    EXPECT_LT(max_abs(evaluate(d, z) - expected), 1e-14);
  }
  EXPECT_EQ(d.n_plus(), 2);
  EXPECT_EQ(d.n_minus(), 1);
  EXPECT_EQ(winding_number(d), 1);
}

TEST(Generate, RecoversPrescribedIndices) {
  const GeneratedProblem p = generate_problem(spec_of(2, {-1, 1}, 2, 2, 7));
  EXPECT_EQ(p.truth, WienerHopfIndices::from_list({-1, 1}));
  EXPECT_EQ(indices_of(p.realization).first, p.truth);
}

TEST(Generate, WindingIsIndexSum) {
  const GeneratedProblem p = generate_problem(spec_of(3, {-2, 0, 1}, 2, 3, 11));
  EXPECT_EQ(winding_number(p.realization), -1);
  EXPECT_EQ(p.truth.total(), -1);
  EXPECT_EQ(p.realization.n_plus(), 2 + 1);
  EXPECT_EQ(p.realization.n_minus(), 3 + 2);
}

TEST(Generate, RejectsInconsistentSpecs) {
  const auto code = [](const ProblemSpec& s) {
    try {
      generate_problem(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kParseError;
  };
  EXPECT_EQ(code(spec_of(2, {1}, 1, 1, 1)), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code(spec_of(0, {}, 1, 1, 1)), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code(spec_of(1, {0}, -1, 1, 1)), ErrorCode::kInvalidArgument);
  ProblemSpec cap = spec_of(1, {0}, 1, 1, 1);
  cap.spectral_cap = 1.0;
  EXPECT_EQ(code(cap), ErrorCode::kInvalidArgument);
}

TEST(Ensemble, SpecsAreReproducibleAndInRange) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const ProblemSpec a = ensemble_spec(seed);
    const ProblemSpec b = ensemble_spec(seed);
    EXPECT_EQ(a.indices, b.indices);
    EXPECT_GE(a.m, 1);
    EXPECT_LE(a.m, 4);
    EXPECT_EQ(static_cast<int>(a.indices.size()), a.m);
    for (const int k : a.indices) {
      EXPECT_GE(k, -3);
      EXPECT_LE(k, 3);
    }
    EXPECT_GE(a.state_plus, 0);
    EXPECT_LE(a.state_plus, 6);
    EXPECT_NO_THROW(check_spec(a));
  }
}

}  // namespace
}  // namespace whf
