#pragma once

#include "whf/linalg.h"
#include "whf/realization.h"

namespace whf {

/// Unique X with X - A X B = C. Requires rho(A) rho(B) < 1, otherwise
/// throws SpectralRadiusViolation. Both coefficient matrices are reduced
/// to complex Schur form and the triangular system is solved column by
/// column.
Matrix solve_stein(const Matrix& a, const Matrix& b, const Matrix& c);

/// Unique P with A P - P B = C. Throws SpectraNotDisjoint when the
/// smallest eigenvalue gap, or the separation, is below 1e-8 (|A| + |B|).
Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& c);

/// sep(A, B): smallest singular value of P -> A P - P B (+inf when either
/// matrix is empty or the operator has more than 1600 unknowns).
double sylvester_separation(const Matrix& a, const Matrix& b);

/// Stabilizing solution of
///   Q - At Q At^* = (Bt - At Q Ct^*)(Dt - Ct Q Ct^*)^{-1}(Bt^* - Ct Q At^*)
/// together with the outer-factor data derived from it.
struct DareSolution {
  Matrix Q;
  Matrix D;   // (Dt - Ct Q Ct^*)^{1/2}
  Matrix C0;  // Bt^* - Ct Q At^*
  Matrix B0;  // Ct^*
  Matrix A0;  // At^* - Ct^* D^{-2} C0
  int iterations = 0;
  double residual = 0.0;        // Riccati residual
  double stein_residual = 0.0;  // Q - At Q A0 - Bt D^{-2} C0
  double rho_A0 = 0.0;
  bool used_fallback = false;
};

struct DareOptions {
  /// Doubling steps; the fixed-point fallback may take 25 times as many.
  int max_iterations = 200;
  double convergence = 1e-13;
  int newton_polish_steps = 3;
  /// Stabilizing certificate: rho(A0) must stay below 1 - margin.
  double stability_margin = 1e-6;
  /// Disables the doubling iteration so the fallback path can be tested.
  bool force_fallback = false;
};

DareSolution solve_dare(const ProductData& pd, const DareOptions& options = {});

/// Residual norm of the Riccati equation at Q.
double dare_residual(const ProductData& pd, const Matrix& q);

}  // namespace whf
