#include "whf/linalg.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "whf/errors.h"

namespace whf {

RankResult rank_and_kernel(const Matrix& m, double tol, double scale_floor) {
  RankResult out;
  const Eigen::Index cols = m.cols();
  if (cols == 0) {
    out.kernel_basis = Matrix(0, 0);
    out.singular_values.resize(0);
    return out;
  }
  if (m.rows() == 0) {
    out.kernel_basis = identity(cols);
    out.singular_values.resize(0);
    return out;
  }

  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  const auto& sv = out.singular_values;
  const double sigma1 = sv.size() > 0 ? sv(0) : 0.0;
  const double scale = std::max(sigma1, scale_floor);
  out.threshold =
      tol * scale * static_cast<double>(std::max(m.rows(), m.cols()));

  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > out.threshold) ++rank;
  }
  out.rank = rank;

  if (rank < sv.size()) {
    const double lower = sv(rank);
    const double upper = rank > 0 ? sv(rank - 1) : scale;
    out.gap_ratio = lower > 0.0 ? upper / lower
                                : std::numeric_limits<double>::infinity();
  }
  out.kernel_basis = svd.matrixV().rightCols(cols - rank);
  return out;
}

Matrix orthonormal_range(const Matrix& m, double tol, double scale_floor) {
  if (m.rows() == 0 || m.cols() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double scale =
      std::max(sv.size() > 0 ? static_cast<double>(sv(0)) : 0.0, scale_floor);
  const double threshold =
      tol * scale * static_cast<double>(std::max(m.rows(), m.cols()));
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

Matrix hermitian_sqrt_psd(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "square root of a non-square matrix");
  }
  if (m.size() == 0) return Matrix(0, 0);
  const double scale = norm2(m);
  if (norm2(m - m.adjoint()) > tol * scale) {
    throw Error(ErrorCode::kNotHermitian,
                "asymmetry " + std::to_string(norm2(m - m.adjoint())));
  }
  const Matrix herm = Real(0.5) * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  RealVector lambda = es.eigenvalues();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -tol * scale) {
      throw Error(ErrorCode::kNotPositiveSemidefinite,
                  "eigenvalue " + std::to_string(lambda(i)));
    }
    lambda(i) = std::sqrt(std::max(lambda(i), Real(0)));
  }
  const Matrix& u = es.eigenvectors();
  Matrix s = u * lambda.cast<Complex>().asDiagonal() * u.adjoint();
  return Real(0.5) * (s + s.adjoint());
}

Matrix unitary_completion(const Matrix& f, double tol) {
  const Eigen::Index n = f.rows();
  const Eigen::Index k = f.cols();
  if (n < k) {
    throw Error(ErrorCode::kNotIsometric, "more columns than rows");
  }
  if (isometry_defect(f) > tol) {
    throw Error(ErrorCode::kNotIsometric,
                "F^*F - I has norm " + std::to_string(isometry_defect(f)));
  }

  Matrix basis(n, n);
  basis.leftCols(k) = f;
  for (Eigen::Index j = k; j < n; ++j) {
    const auto q = basis.leftCols(j);
    const Matrix residual = identity(n) - q * q.adjoint();
    Eigen::Index pick = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = residual.col(i).norm();
      if (r > best * (1.0 + 1e-12)) {
        best = r;
        pick = i;
      }
    }
    Vector v = residual.col(pick);
    v -= q * (q.adjoint() * v);
    v /= v.norm();
    basis.col(j) = v;
  }

  Matrix g = basis.rightCols(n - k);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    Eigen::Index pick = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(g(i, j));
      if (a > best * (1.0 + 1e-12)) {
        best = a;
        pick = i;
      }
    }
    const Complex phase = std::conj(g(pick, j)) / std::abs(g(pick, j));
    g.col(j) *= phase;
    g(pick, j) = Complex(std::abs(g(pick, j)), 0.0);
  }
  return g;
}

Vector eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "eigenvalues of a non-square matrix");
  }
  if (m.size() == 0) return Vector(0);
  Eigen::ComplexEigenSolver<Matrix> es(m, false);
  return es.eigenvalues();
}

double spectral_radius(const Matrix& m) {
  const Vector ev = eigenvalues(m);
  return ev.size() == 0 ? 0.0 : ev.cwiseAbs().maxCoeff();
}

double min_eigenvalue_gap(const Matrix& a, const Matrix& b) {
  const Vector ea = eigenvalues(a);
  const Vector eb = eigenvalues(b);
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ea.size(); ++i) {
    for (Eigen::Index j = 0; j < eb.size(); ++j) {
      gap = std::min(gap, static_cast<double>(std::abs(ea(i) - eb(j))));
    }
  }
  return gap;
}

double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double isometry_defect(const Matrix& m) {
  if (m.cols() == 0) return 0.0;
  return norm2(m.adjoint() * m - identity(m.cols()));
}

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

Matrix block2x2(const Matrix& a, const Matrix& b, const Matrix& c,
                const Matrix& d) {
  if (a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() ||
      b.cols() != d.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "block2x2 blocks not conformable");
  }
  Matrix out(a.rows() + c.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.topRightCorner(b.rows(), b.cols()) = b;
  out.bottomLeftCorner(c.rows(), c.cols()) = c;
  out.bottomRightCorner(d.rows(), d.cols()) = d;
  return out;
}

Matrix hcat(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "hcat row mismatch");
  }
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

Matrix vcat(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "vcat column mismatch");
  }
  Matrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

Matrix direct_sum(const Matrix& a, const Matrix& b) {
  return block2x2(a, Matrix::Zero(a.rows(), b.cols()),
                  Matrix::Zero(b.rows(), a.cols()), b);
}

Matrix checked_inverse(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string("inverse of non-square ") + what);
  }
  if (m.size() == 0) return Matrix(0, 0);
  Eigen::PartialPivLU<Matrix> lu(m);
  if (!(lu.rcond() > 1e-14)) {
    throw Error(ErrorCode::kSingularResolvent,
                std::string(what) + " is numerically singular");
  }
  return lu.inverse();
}

std::vector<Complex> circle_grid(int count) {
  std::vector<Complex> z;
  z.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    z.push_back(std::polar(Real(1), 2 * std::numbers::pi_v<Real> * k / count));
  }
  return z;
}

}  // namespace whf
