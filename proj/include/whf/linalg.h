#pragma once

#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace whf {

// All numerics run in extended precision: the unitary factors amplify the
// rounding error of the data by the inverse of the smallest Hankel singular
// value, and double leaves too little headroom for 1e-9 residuals.
using Real = long double;
using Complex = std::complex<Real>;
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

inline constexpr double kDefaultTolerance = 1e-9;

/// Outcome of a rank decision. `gap_ratio` is sigma_rank / sigma_{rank+1};
/// it is +inf when there is no trailing singular value or it is exactly 0.
struct RankResult {
  int rank = 0;
  Matrix kernel_basis;
  RealVector singular_values;
  double gap_ratio = std::numeric_limits<double>::infinity();
  double threshold = 0.0;
};

/// Rank and orthonormal null-space basis of `m`.
///
/// A singular value counts towards the rank when it exceeds
/// tol * max(sigma_1, scale_floor) * max(rows, cols). With the default
/// floor of 0 the decision is purely relative to sigma_1. Callers that know
/// the natural scale of the data (unitary realizations, for instance) pass a
/// floor so that a block made entirely of rounding noise is rank 0.
RankResult rank_and_kernel(const Matrix& m, double tol,
                           double scale_floor = 0.0);

/// Orthonormal basis of the column space under the same rank rule.
Matrix orthonormal_range(const Matrix& m, double tol, double scale_floor = 0.0);

/// Positive-semidefinite Hermitian square root. Eigenvalues in
/// [-tol*|M|, 0) are clipped to zero; anything more negative throws
/// NotPositiveSemidefinite.
Matrix hermitian_sqrt_psd(const Matrix& m, double tol = kDefaultTolerance);

/// Completes the isometry `f` to a unitary [f g].
///
/// Deterministic: the complement is built by pivoted Gram-Schmidt on
/// I - [f g][f g]^*, always taking the canonical basis vector with the
/// largest residual (lowest index on ties), then each column of g is
/// rotated so that its largest-magnitude entry is real and positive.
Matrix unitary_completion(const Matrix& f, double tol = 1e-10);

double spectral_radius(const Matrix& m);

Vector eigenvalues(const Matrix& m);

/// Smallest |lambda_i(a) - mu_j(b)|; +inf when either matrix is empty.
double min_eigenvalue_gap(const Matrix& a, const Matrix& b);

/// Largest singular value; 0 for empty matrices.
double norm2(const Matrix& m);

/// |M^*M - I|_2, 0 for matrices without columns.
double isometry_defect(const Matrix& m);

Matrix identity(Eigen::Index n);

/// [[a, b], [c, d]] with the usual conformity rules; zero-sized blocks are
/// allowed.
Matrix block2x2(const Matrix& a, const Matrix& b, const Matrix& c,
                const Matrix& d);
Matrix hcat(const Matrix& a, const Matrix& b);
Matrix vcat(const Matrix& a, const Matrix& b);
Matrix direct_sum(const Matrix& a, const Matrix& b);

/// Inverse of a square matrix through a full-pivot LU. Throws
/// SingularResolvent when the matrix is numerically singular.
Matrix checked_inverse(const Matrix& m, const char* what);

/// `count` points exp(2 pi i k / count), k = 0..count-1.
std::vector<Complex> circle_grid(int count);

}  // namespace whf
