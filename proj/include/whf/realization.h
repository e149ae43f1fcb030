#pragma once

#include <utility>
#include <vector>

#include "whf/linalg.h"

namespace whf {

/// R(z) = R0 + z C (I - z A)^{-1} B + gamma (z I - alpha)^{-1} beta.
///
/// The "plus" triple (A, B, C) carries the poles outside the closed unit
/// disc (including infinity when A is nilpotent), the "minus" triple
/// (alpha, beta, gamma) carries the poles inside the open disc. Either part
/// may have state dimension zero.
struct TwoSidedRealization {
  Matrix R0;
  Matrix A, B, C;
  Matrix alpha, beta, gamma;

  Eigen::Index m() const { return R0.rows(); }
  Eigen::Index n_plus() const { return A.rows(); }
  Eigen::Index n_minus() const { return alpha.rows(); }

  /// The constant function `value` with empty state parts.
  static TwoSidedRealization constant(const Matrix& value);
  /// value + z c (I - z a)^{-1} b.
  static TwoSidedRealization plus_only(const Matrix& value, const Matrix& a,
                                       const Matrix& b, const Matrix& c);
  /// value + g (z I - a)^{-1} b.
  static TwoSidedRealization minus_only(const Matrix& value, const Matrix& a,
                                        const Matrix& b, const Matrix& g);
};

/// Three-term representation of R^*(z) R(z) =
///   Dtilde + Ctilde (zI - Atilde)^{-1} Btilde
///          + z Btilde^* (I - z Atilde^*)^{-1} Ctilde^*.
struct ProductData {
  Matrix Atilde, Btilde, Ctilde, Dtilde;
  Matrix Pplus, Pminus;
};

struct ValidationReport {
  double rho_plus = 0.0;
  double rho_minus = 0.0;
  double min_abs_det = 0.0;
  int samples = 0;
};

inline constexpr double kStabilityMargin = 1e-8;

/// Shape check only; throws ShapeMismatch.
void check_shapes(const TwoSidedRealization& r);

/// Shapes, stability margins of A and alpha, and a sampled |det R| on the
/// circle as a zero-proximity heuristic.
ValidationReport validate(const TwoSidedRealization& r, int samples = 1024);

Matrix evaluate(const TwoSidedRealization& r, Complex z);

/// R^*(z) = R(1/conj(z))^*. On the unit circle the reflection is skipped so
/// the result equals evaluate(r, z)^* exactly.
Matrix evaluate_adjoint(const TwoSidedRealization& r, Complex z);

/// (P+, P-) with P+ - A^* P+ A = C^* C and P- - alpha^* P- alpha =
/// gamma^* gamma.
std::pair<Matrix, Matrix> observability_gramians(const TwoSidedRealization& r);

ProductData product_data(const TwoSidedRealization& r);

/// Evaluates the three-term representation held in `pd` at z.
Matrix evaluate_product_data(const ProductData& pd, Complex z);

/// Realization of f(z) g(z) in two-sided form. Plus/minus cross terms are
/// split through the Stein equations M - A_f M alpha_g = B_f gamma_g and
/// N - alpha_f N A_g = beta_f C_g.
TwoSidedRealization multiply(const TwoSidedRealization& f,
                             const TwoSidedRealization& g);

/// Block-diagonal realization of diag(f, g).
TwoSidedRealization direct_sum(const TwoSidedRealization& f,
                               const TwoSidedRealization& g);

/// c * R(z).
TwoSidedRealization scale(const TwoSidedRealization& r, Complex c);

/// Winding number of det R(e^{i theta}). The grid doubles until every phase
/// step is below pi/2, up to 2^20 points.
int winding_number(const TwoSidedRealization& r, int samples = 1024);

/// max over the grid of |F(z) - G(z)|_2 for two realizations of equal size.
double max_deviation(const TwoSidedRealization& f,
                     const TwoSidedRealization& g, int samples = 64);

}  // namespace whf
