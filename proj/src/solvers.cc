#include "whf/solvers.h"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "whf/errors.h"

namespace whf {
namespace {

struct Schur {
  Matrix u;
  Matrix t;
};

Schur schur(const Matrix& m) {
  if (m.size() == 0) return {Matrix(0, 0), Matrix(0, 0)};
  Eigen::ComplexSchur<Matrix> cs(m);
  if (cs.info() != Eigen::Success) {
    throw Error(ErrorCode::kSpectralRadiusViolation,
                "complex Schur decomposition did not converge");
  }
  return {cs.matrixU(), cs.matrixT()};
}

void check_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + " not square");
  }
}

// Y - Ta Y Tb = F with Ta, Tb upper triangular.
Matrix stein_triangular(const Matrix& ta, const Matrix& tb, const Matrix& f) {
  const Eigen::Index n = ta.rows();
  const Eigen::Index k = tb.rows();
  Matrix y(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Vector rhs = f.col(j);
    if (j > 0) rhs += ta * (y.leftCols(j) * tb.col(j).head(j));
    const Matrix lhs = identity(n) - tb(j, j) * ta;
    y.col(j) = lhs.triangularView<Eigen::Upper>().solve(rhs);
  }
  return y;
}

// Ta Y - Y Tb = F with Ta, Tb upper triangular.
Matrix sylvester_triangular(const Matrix& ta, const Matrix& tb,
                            const Matrix& f) {
  const Eigen::Index n = ta.rows();
  const Eigen::Index k = tb.rows();
  Matrix y(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Vector rhs = f.col(j);
    if (j > 0) rhs += y.leftCols(j) * tb.col(j).head(j);
    const Matrix lhs = ta - tb(j, j) * identity(n);
    y.col(j) = lhs.triangularView<Eigen::Upper>().solve(rhs);
  }
  return y;
}

// Smallest singular value of P -> Ta P - P Tb.
double triangular_separation(const Matrix& ta, const Matrix& tb) {
  const Eigen::Index n = ta.rows();
  const Eigen::Index k = tb.rows();
  if (n * k > 1600) return std::numeric_limits<double>::infinity();
  Matrix op = Matrix::Zero(n * k, n * k);
  for (Eigen::Index j = 0; j < k; ++j) {
    op.block(j * n, j * n, n, n) = ta;
    for (Eigen::Index i = 0; i < k; ++i) {
      op.block(j * n, i * n, n, n) -= tb(i, j) * identity(n);
    }
  }
  Eigen::BDCSVD<Matrix> svd(op);
  return svd.singularValues().minCoeff();
}

double triangular_radius(const Matrix& t) {
  return t.size() == 0 ? 0.0 : t.diagonal().cwiseAbs().maxCoeff();
}

}  // namespace

Matrix solve_stein(const Matrix& a, const Matrix& b, const Matrix& c) {
  check_square(a, "Stein coefficient A");
  check_square(b, "Stein coefficient B");
  if (c.rows() != a.rows() || c.cols() != b.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "Stein right-hand side");
  }
  if (a.size() == 0 || b.size() == 0) return Matrix(a.rows(), b.rows());

  const Schur sa = schur(a);
  const Schur sb = schur(b);
  const double rho = triangular_radius(sa.t) * triangular_radius(sb.t);
  if (!(rho < 1.0)) {
    throw Error(ErrorCode::kSpectralRadiusViolation,
                "rho(A) rho(B) = " + std::to_string(rho));
  }
  auto solve = [&](const Matrix& rhs) {
    const Matrix f = sa.u.adjoint() * rhs * sb.u;
    return Matrix(sa.u * stein_triangular(sa.t, sb.t, f) * sb.u.adjoint());
  };
  Matrix x = solve(c);
  // One step of iterative refinement.
  const Matrix r = c - (x - a * x * b);
  x += solve(r);
  return x;
}

double sylvester_separation(const Matrix& a, const Matrix& b) {
  check_square(a, "Sylvester coefficient A");
  check_square(b, "Sylvester coefficient B");
  if (a.size() == 0 || b.size() == 0) {
    return std::numeric_limits<double>::infinity();
  }
  return triangular_separation(schur(a).t, schur(b).t);
}

Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& c) {
  check_square(a, "Sylvester coefficient A");
  check_square(b, "Sylvester coefficient B");
  if (c.rows() != a.rows() || c.cols() != b.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "Sylvester right-hand side");
  }
  if (a.size() == 0 || b.size() == 0) return Matrix(a.rows(), b.rows());

  const Schur sa = schur(a);
  const Schur sb = schur(b);
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < sa.t.rows(); ++i) {
    for (Eigen::Index j = 0; j < sb.t.rows(); ++j) {
      gap = std::min(gap, static_cast<double>(std::abs(sa.t(i, i) - sb.t(j, j))));
    }
  }
  const double scale = norm2(a) + norm2(b);
  if (!(gap > 1e-8 * scale)) {
    throw Error(ErrorCode::kSpectraNotDisjoint,
                "minimum eigenvalue gap " + std::to_string(gap));
  }
  // A defective common eigenvalue splits under rounding into a cluster whose
  // eigenvalue gap looks healthy; the separation does not.
  const double sep = triangular_separation(sa.t, sb.t);
  if (!(sep > 1e-8 * scale)) {
    throw Error(ErrorCode::kSpectraNotDisjoint,
                "separation " + std::to_string(sep) +
                    " (minimum eigenvalue gap " + std::to_string(gap) + ")");
  }
  auto solve = [&](const Matrix& rhs) {
    const Matrix f = sa.u.adjoint() * rhs * sb.u;
    return Matrix(sa.u * sylvester_triangular(sa.t, sb.t, f) *
                  sb.u.adjoint());
  };
  Matrix p = solve(c);
  const Matrix r = c - (a * p - p * b);
  p += solve(r);
  return p;
}

namespace {

Matrix hermitian_part(const Matrix& m) { return Real(0.5) * (m + m.adjoint()); }

Matrix riccati_rhs_minus_q(const ProductData& pd, const Matrix& q) {
  const Matrix& at = pd.Atilde;
  const Matrix l = pd.Btilde - at * q * pd.Ctilde.adjoint();
  const Matrix d2 = pd.Dtilde - pd.Ctilde * q * pd.Ctilde.adjoint();
  return at * q * at.adjoint() +
         l * d2.partialPivLu().solve(l.adjoint()) - q;
}

// Minimum eigenvalue of the Hermitian part, +inf for empty input.
double min_hermitian_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

// Structure-preserving doubling on the cross-term-free form of the
// equation in X = -Q. Returns false on breakdown or non-convergence.
bool doubling(const ProductData& pd, const DareOptions& opt, Matrix& q,
              int& iterations) {
  const Eigen::Index n = pd.Atilde.rows();
  const Matrix dinv = pd.Dtilde.inverse();
  Matrix a = pd.Atilde.adjoint() - pd.Ctilde.adjoint() * dinv *
                                       pd.Btilde.adjoint();
  Matrix g = pd.Ctilde.adjoint() * dinv * pd.Ctilde;
  Matrix h = -(pd.Btilde * dinv * pd.Btilde.adjoint());
  g = hermitian_part(g);
  h = hermitian_part(h);

  for (int k = 1; k <= opt.max_iterations; ++k) {
    iterations = k;
    const Matrix w = identity(n) + g * h;
    Eigen::PartialPivLU<Matrix> lu(w);
    if (!(lu.rcond() > 1e-14)) return false;
    const Matrix w_inv_a = lu.solve(a);
    const Matrix w_inv_g = lu.solve(g);
    const Matrix a_next = a * w_inv_a;
    const Matrix g_next = hermitian_part(g + a * w_inv_g * a.adjoint());
    const Matrix h_next =
        hermitian_part(h + a.adjoint() * h * w_inv_a);
    if (!all_finite(a_next) || !all_finite(g_next) || !all_finite(h_next)) {
      return false;
    }
    const double change = norm2(h_next - h);
    a = a_next;
    g = g_next;
    h = h_next;
    if (change <= opt.convergence * (1.0 + norm2(h))) {
      q = -h;
      return true;
    }
  }
  return false;
}

struct Derived {
  Matrix d2, c0, a0;
};

Derived derive(const ProductData& pd, const Matrix& q) {
  Derived out;
  out.d2 = hermitian_part(pd.Dtilde - pd.Ctilde * q * pd.Ctilde.adjoint());
  out.c0 = pd.Btilde.adjoint() - pd.Ctilde * q * pd.Atilde.adjoint();
  out.a0 = pd.Atilde.adjoint() -
           pd.Ctilde.adjoint() * out.d2.partialPivLu().solve(out.c0);
  return out;
}

// Direct fixed point Q <- At Q A0(Q) + Bt D(Q)^{-2} C0(Q), which expands to
// the Riccati recursion and increases monotonically from Q = 0 towards the
// stabilizing solution.
bool stein_fixed_point(const ProductData& pd, const DareOptions& opt,
                       Matrix& q, int& iterations) {
  const Eigen::Index n = pd.Atilde.rows();
  q = Matrix::Zero(n, n);
  // Linear convergence at rate rho(A0)^2, so this path gets a larger budget
  // than the doubling iteration.
  const int budget = 25 * opt.max_iterations;
  for (int k = 1; k <= budget; ++k) {
    iterations = k;
    const Derived d = derive(pd, q);
    if (!(min_hermitian_eigenvalue(d.d2) > 0.0)) return false;
    const Matrix next = hermitian_part(
        pd.Atilde * q * d.a0 + pd.Btilde * d.d2.partialPivLu().solve(d.c0));
    if (!all_finite(next)) return false;
    const double change = norm2(next - q);
    q = next;
    if (change <= opt.convergence * (1.0 + norm2(q))) return true;
  }
  return false;
}

}  // namespace

double dare_residual(const ProductData& pd, const Matrix& q) {
  if (q.size() == 0) return 0.0;
  return norm2(riccati_rhs_minus_q(pd, q));
}

DareSolution solve_dare(const ProductData& pd, const DareOptions& options) {
  const Eigen::Index n = pd.Atilde.rows();
  const Eigen::Index m = pd.Dtilde.rows();
  if (pd.Atilde.cols() != n || pd.Btilde.rows() != n ||
      pd.Btilde.cols() != m || pd.Ctilde.rows() != m ||
      pd.Ctilde.cols() != n || pd.Dtilde.cols() != m) {
    throw Error(ErrorCode::kShapeMismatch, "product data blocks");
  }
  const double dscale = norm2(pd.Dtilde);
  if (norm2(pd.Dtilde - pd.Dtilde.adjoint()) > 1e-12 * dscale) {
    throw Error(ErrorCode::kNotHermitian, "Dtilde");
  }
  if (!(spectral_radius(pd.Atilde) < 1.0)) {
    throw Error(ErrorCode::kSpectralRadiusViolation, "Atilde is not stable");
  }
  if (!(min_hermitian_eigenvalue(pd.Dtilde) > 0.0)) {
    throw Error(ErrorCode::kIndefiniteSchurComplement,
                "Dtilde is not positive definite");
  }

  DareSolution sol;
  Matrix q = Matrix::Zero(n, n);
  if (n > 0) {
    bool ok = false;
    if (!options.force_fallback) {
      ok = doubling(pd, options, q, sol.iterations);
    }
    if (!ok) {
      sol.used_fallback = true;
      int fallback_iterations = 0;
      ok = stein_fixed_point(pd, options, q, fallback_iterations);
      sol.iterations += fallback_iterations;
    }
    if (!ok) {
      throw Error(ErrorCode::kNotStabilizable,
                  "Riccati iteration did not converge after " +
                      std::to_string(sol.iterations) + " iterations");
    }

    // Newton polish around the closed-loop matrix; kept only while the
    // residual decreases.
    double res = dare_residual(pd, q);
    for (int k = 0; k < options.newton_polish_steps && res > 0.0; ++k) {
      const Derived d = derive(pd, q);
      if (!(min_hermitian_eigenvalue(d.d2) > 0.0)) break;
      if (!(spectral_radius(d.a0) < 1.0)) break;
      Matrix step;
      try {
        step = solve_stein(d.a0.adjoint(), d.a0, riccati_rhs_minus_q(pd, q));
      } catch (const Error&) {
        break;
      }
      const Matrix candidate = hermitian_part(q + step);
      const double cres = dare_residual(pd, candidate);
      if (!(cres < res)) break;
      q = candidate;
      res = cres;
    }
  }
  sol.Q = hermitian_part(q);

  const Derived d = derive(pd, sol.Q);
  const double lambda_min = min_hermitian_eigenvalue(d.d2);
  if (!(lambda_min > 1e-12 * dscale)) {
    throw Error(ErrorCode::kIndefiniteSchurComplement,
                "Dtilde - Ctilde Q Ctilde^* has eigenvalue " +
                    std::to_string(lambda_min));
  }
  sol.D = hermitian_sqrt_psd(d.d2);
  sol.C0 = d.c0;
  sol.B0 = pd.Ctilde.adjoint();
  sol.A0 = d.a0;
  sol.rho_A0 = spectral_radius(sol.A0);
  if (!(sol.rho_A0 < 1.0 - options.stability_margin)) {
    throw Error(ErrorCode::kNotStabilizable,
                "closed-loop spectral radius " + std::to_string(sol.rho_A0));
  }
  sol.residual = dare_residual(pd, sol.Q);
  const double qscale = 1.0 + norm2(sol.Q);
  if (n > 0) {
    sol.stein_residual = norm2(sol.Q - pd.Atilde * sol.Q * sol.A0 -
                               pd.Btilde * d.d2.partialPivLu().solve(sol.C0));
  }
  if (!(sol.residual <= 1e-10 * qscale) ||
      !(sol.stein_residual <= 1e-10 * qscale)) {
    throw Error(ErrorCode::kNotStabilizable,
                "Riccati residual " + std::to_string(sol.residual) +
                    ", Stein-form residual " +
                    std::to_string(sol.stein_residual));
  }
  return sol;
}

}  // namespace whf
