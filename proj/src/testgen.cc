#include "whf/testgen.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "whf/errors.h"

namespace whf {

namespace {

constexpr double kInverseCap = 0.95;
constexpr int kMaxDoublings = 60;

Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

struct Factor {
  Matrix A, B, C, D;
};

// Random (A, B, C) with rho(A) <= cap and a scalar D = rho I large enough
// that A - B D^{-1} C is stable with margin.
Factor random_factor(const ProblemSpec& spec, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                    static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::mt19937_64 rng(seq);
  const int n = stream == 1 ? spec.state_plus : spec.state_minus;
  Factor f;
  f.A = gaussian(rng, n, n);
  f.B = gaussian(rng, n, spec.m);
  f.C = gaussian(rng, spec.m, n);
  const double rho_a = spectral_radius(f.A);
  if (rho_a > 0.0) f.A *= spec.spectral_cap / rho_a;

  double rho = 1.0;
  for (int k = 0; k <= kMaxDoublings; ++k, rho *= 2.0) {
    if (spectral_radius(f.A - f.B * f.C / rho) <= kInverseCap) {
      f.D = rho * identity(spec.m);
      return f;
    }
  }
  throw Error(ErrorCode::kGrowthExhausted,
              "constant term grew past 2^60 without an outer inverse");
}

}  // namespace

void check_spec(const ProblemSpec& spec) {
  if (spec.m < 1) {
    throw Error(ErrorCode::kInvalidArgument, "m must be positive");
  }
  if (static_cast<int>(spec.indices.size()) != spec.m) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(spec.m) + " indices, got " +
                    std::to_string(spec.indices.size()));
  }
  if (spec.state_plus < 0 || spec.state_minus < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "state dimensions must be nonnegative");
  }
  if (!(spec.spectral_cap > 0.0 && spec.spectral_cap < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "spectral cap must lie in (0, 1)");
  }
}

TwoSidedRealization make_plus_factor(const ProblemSpec& spec) {
  check_spec(spec);
  const Factor f = random_factor(spec, 1);
  return TwoSidedRealization::plus_only(f.D, f.A, f.B, f.C);
}

TwoSidedRealization make_minus_factor(const ProblemSpec& spec) {
  check_spec(spec);
  const Factor f = random_factor(spec, 2);
  return TwoSidedRealization::minus_only(f.D, f.A, f.B, f.C);
}

TwoSidedRealization make_middle(const std::vector<int>& indices) {
  TwoSidedRealization out = TwoSidedRealization::constant(Matrix(0, 0));
  for (const int k : indices) {
    const int n = std::abs(k);
    Matrix shift = Matrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) shift(i + 1, i) = 1.0;
    Matrix first = Matrix::Zero(n, 1);
    Matrix last = Matrix::Zero(1, n);
    if (n > 0) {
      first(0, 0) = 1.0;
      last(0, n - 1) = 1.0;
    }
    TwoSidedRealization scalar;
    if (k > 0) {
      scalar = TwoSidedRealization::plus_only(Matrix::Zero(1, 1), shift, first,
                                              last);
    } else if (k < 0) {
      scalar = TwoSidedRealization::minus_only(Matrix::Zero(1, 1), shift,
                                               first, last);
    } else {
      scalar = TwoSidedRealization::constant(Matrix::Identity(1, 1));
    }
    out = direct_sum(out, scalar);
  }
  return out;
}

GeneratedProblem generate_problem(const ProblemSpec& spec) {
  check_spec(spec);
  std::vector<int> sorted = spec.indices;
  std::sort(sorted.begin(), sorted.end());
  const TwoSidedRealization minus = make_minus_factor(spec);
  const TwoSidedRealization plus = make_plus_factor(spec);
  const TwoSidedRealization middle = make_middle(sorted);
  GeneratedProblem out;
  out.realization = multiply(multiply(minus, middle), plus);
  out.truth = WienerHopfIndices::from_list(sorted);
  return out;
}

ProblemSpec ensemble_spec(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 7919ULL);
  ProblemSpec spec;
  spec.m = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < spec.m; ++i) {
    spec.indices.push_back(static_cast<int>(rng() % 7) - 3);
  }
  spec.state_plus = static_cast<int>(rng() % 7);
  spec.state_minus = static_cast<int>(rng() % 7);
  spec.seed = seed;
  return spec;
}

}  // namespace whf
