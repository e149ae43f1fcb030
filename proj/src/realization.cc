#include "whf/realization.h"

#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "whf/errors.h"
#include "whf/solvers.h"

namespace whf {

TwoSidedRealization TwoSidedRealization::constant(const Matrix& value) {
  const Eigen::Index m = value.rows();
  return {value,          Matrix(0, 0), Matrix(0, m), Matrix(m, 0),
          Matrix(0, 0),   Matrix(0, m), Matrix(m, 0)};
}

TwoSidedRealization TwoSidedRealization::plus_only(const Matrix& value,
                                                   const Matrix& a,
                                                   const Matrix& b,
                                                   const Matrix& c) {
  TwoSidedRealization r = constant(value);
  r.A = a;
  r.B = b;
  r.C = c;
  check_shapes(r);
  return r;
}

TwoSidedRealization TwoSidedRealization::minus_only(const Matrix& value,
                                                    const Matrix& a,
                                                    const Matrix& b,
                                                    const Matrix& g) {
  TwoSidedRealization r = constant(value);
  r.alpha = a;
  r.beta = b;
  r.gamma = g;
  check_shapes(r);
  return r;
}

void check_shapes(const TwoSidedRealization& r) {
  const Eigen::Index m = r.R0.rows();
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kShapeMismatch, what);
  };
  if (r.R0.cols() != m) fail("R0 must be square");
  const Eigen::Index np = r.A.rows();
  if (r.A.cols() != np) fail("A must be square");
  if (r.B.rows() != np || r.B.cols() != m) fail("B must be n+ x m");
  if (r.C.rows() != m || r.C.cols() != np) fail("C must be m x n+");
  const Eigen::Index nm = r.alpha.rows();
  if (r.alpha.cols() != nm) fail("alpha must be square");
  if (r.beta.rows() != nm || r.beta.cols() != m) fail("beta must be n- x m");
  if (r.gamma.rows() != m || r.gamma.cols() != nm) {
    fail("gamma must be m x n-");
  }
}

ValidationReport validate(const TwoSidedRealization& r, int samples) {
  check_shapes(r);
  ValidationReport rep;
  rep.rho_plus = spectral_radius(r.A);
  rep.rho_minus = spectral_radius(r.alpha);
  if (rep.rho_plus > 1.0 - kStabilityMargin) {
    throw Error(ErrorCode::kUnstableStateMatrix,
                "spectral radius of A is " + std::to_string(rep.rho_plus));
  }
  if (rep.rho_minus > 1.0 - kStabilityMargin) {
    throw Error(ErrorCode::kUnstableStateMatrix,
                "spectral radius of alpha is " +
                    std::to_string(rep.rho_minus));
  }
  rep.samples = samples;
  rep.min_abs_det = std::numeric_limits<double>::infinity();
  if (r.m() == 0) {
    rep.min_abs_det = 1.0;
    return rep;
  }
  for (const Complex z : circle_grid(samples)) {
    rep.min_abs_det =
        std::min(rep.min_abs_det,
                 static_cast<double>(std::abs(evaluate(r, z).determinant())));
  }
  return rep;
}

namespace {

Matrix resolvent_solve(const Matrix& lhs, const Matrix& rhs,
                       const char* what) {
  Eigen::PartialPivLU<Matrix> lu(lhs);
  if (!(lu.rcond() > 1e-14)) {
    throw Error(ErrorCode::kSingularResolvent, what);
  }
  return lu.solve(rhs);
}

}  // namespace

Matrix evaluate(const TwoSidedRealization& r, Complex z) {
  Matrix value = r.R0;
  if (r.n_plus() > 0) {
    const Matrix lhs = identity(r.n_plus()) - z * r.A;
    value += z * r.C * resolvent_solve(lhs, r.B, "I - zA is singular");
  }
  if (r.n_minus() > 0) {
    const Matrix lhs = z * identity(r.n_minus()) - r.alpha;
    value += r.gamma * resolvent_solve(lhs, r.beta, "zI - alpha is singular");
  }
  return value;
}

Matrix evaluate_adjoint(const TwoSidedRealization& r, Complex z) {
  const double modulus = std::abs(z);
  const Complex w =
      std::abs(modulus - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()
          ? z
          : Real(1) / std::conj(z);
  return evaluate(r, w).adjoint();
}

std::pair<Matrix, Matrix> observability_gramians(
    const TwoSidedRealization& r) {
  Matrix pp = solve_stein(r.A.adjoint(), r.A, r.C.adjoint() * r.C);
  Matrix pm =
      solve_stein(r.alpha.adjoint(), r.alpha, r.gamma.adjoint() * r.gamma);
  return {Real(0.5) * (pp + pp.adjoint()), Real(0.5) * (pm + pm.adjoint())};
}

ProductData product_data(const TwoSidedRealization& r) {
  check_shapes(r);
  ProductData pd;
  std::tie(pd.Pplus, pd.Pminus) = observability_gramians(r);
  const Matrix& pp = pd.Pplus;
  const Matrix& pm = pd.Pminus;
  pd.Atilde = block2x2(r.A.adjoint(), r.C.adjoint() * r.gamma,
                       Matrix::Zero(r.n_minus(), r.n_plus()), r.alpha);
  pd.Btilde = vcat(r.C.adjoint() * r.R0 + r.A.adjoint() * pp * r.B, r.beta);
  pd.Ctilde = hcat(r.B.adjoint(),
                   r.R0.adjoint() * r.gamma + r.beta.adjoint() * pm * r.alpha);
  Matrix dt = r.R0.adjoint() * r.R0 + r.B.adjoint() * pp * r.B +
              r.beta.adjoint() * pm * r.beta;
  pd.Dtilde = Real(0.5) * (dt + dt.adjoint());
  return pd;
}

Matrix evaluate_product_data(const ProductData& pd, Complex z) {
  Matrix value = pd.Dtilde;
  const Eigen::Index n = pd.Atilde.rows();
  if (n > 0) {
    value += pd.Ctilde * resolvent_solve(z * identity(n) - pd.Atilde,
                                         pd.Btilde, "zI - Atilde is singular");
    value += z * pd.Btilde.adjoint() *
             resolvent_solve(identity(n) - z * pd.Atilde.adjoint(),
                             pd.Ctilde.adjoint(),
                             "I - z Atilde^* is singular");
  }
  return value;
}

TwoSidedRealization multiply(const TwoSidedRealization& f,
                             const TwoSidedRealization& g) {
  check_shapes(f);
  check_shapes(g);
  if (f.m() != g.m()) {
    throw Error(ErrorCode::kShapeMismatch, "multiply: sizes differ");
  }
  // Cross terms: plus_f * minus_g and minus_f * plus_g.
  const Matrix m_cross = solve_stein(f.A, g.alpha, f.B * g.gamma);
  const Matrix n_cross = solve_stein(f.alpha, g.A, f.beta * g.C);

  TwoSidedRealization h;
  h.R0 = f.R0 * g.R0 + f.C * m_cross * g.beta + f.gamma * n_cross * g.B;

  // Plus cascade (R0f + plus_f)(R0g + plus_g) plus the split-off pieces.
  h.A = block2x2(f.A, f.B * g.C, Matrix::Zero(g.n_plus(), f.n_plus()), g.A);
  h.B = vcat(f.B * g.R0 + f.A * m_cross * g.beta, g.B);
  h.C = hcat(f.C, f.R0 * g.C + f.gamma * n_cross * g.A);

  // Minus cascade (R0f + minus_f)(R0g + minus_g) plus the split-off pieces.
  h.alpha = block2x2(f.alpha, f.beta * g.gamma,
                     Matrix::Zero(g.n_minus(), f.n_minus()), g.alpha);
  h.beta = vcat(f.beta * g.R0 + f.alpha * n_cross * g.B, g.beta);
  h.gamma = hcat(f.gamma, f.R0 * g.gamma + f.C * m_cross * g.alpha);
  return h;
}

TwoSidedRealization direct_sum(const TwoSidedRealization& f,
                               const TwoSidedRealization& g) {
  check_shapes(f);
  check_shapes(g);
  TwoSidedRealization h;
  h.R0 = whf::direct_sum(f.R0, g.R0);
  h.A = whf::direct_sum(f.A, g.A);
  h.B = whf::direct_sum(f.B, g.B);
  h.C = whf::direct_sum(f.C, g.C);
  h.alpha = whf::direct_sum(f.alpha, g.alpha);
  h.beta = whf::direct_sum(f.beta, g.beta);
  h.gamma = whf::direct_sum(f.gamma, g.gamma);
  return h;
}

TwoSidedRealization scale(const TwoSidedRealization& r, Complex c) {
  TwoSidedRealization out = r;
  out.R0 *= c;
  out.C *= c;
  out.gamma *= c;
  return out;
}

int winding_number(const TwoSidedRealization& r, int samples) {
  if (samples < 256) {
    throw Error(ErrorCode::kInvalidArgument,
                "winding number needs at least 256 samples");
  }
  if (r.m() == 0) return 0;
  constexpr int kMaxSamples = 1 << 20;
  for (int n = samples; n <= kMaxSamples; n *= 2) {
    const auto grid = circle_grid(n);
    Complex previous = evaluate(r, grid.front()).determinant();
    const Complex first = previous;
    double total = 0.0;
    bool refine = previous == Complex(0.0);
    for (int k = 1; k <= n && !refine; ++k) {
      const Complex current =
          k == n ? first : Complex(evaluate(r, grid[k]).determinant());
      if (current == Complex(0.0)) {
        refine = true;
        break;
      }
      const double step = std::arg(current / previous);
      if (std::abs(step) >= std::numbers::pi / 2) refine = true;
      total += step;
      previous = current;
    }
    if (!refine) {
      return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
    }
  }
  throw Error(ErrorCode::kPhaseStepTooLarge,
              "arg det R still jumps by pi/2 at 2^20 samples");
}

double max_deviation(const TwoSidedRealization& f,
                     const TwoSidedRealization& g, int samples) {
  double worst = 0.0;
  for (const Complex z : circle_grid(samples)) {
    worst = std::max(worst, norm2(evaluate(f, z) - evaluate(g, z)));
  }
  return worst;
}

}  // namespace whf
