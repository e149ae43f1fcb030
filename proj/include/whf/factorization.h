#pragma once

#include <optional>
#include <string>
#include <vector>

#include "whf/linalg.h"
#include "whf/realization.h"
#include "whf/solvers.h"

namespace whf {

inline constexpr int kCheckSamples = 64;

/// Invertible outer factor Psi(z) = D + z D^{-1} C0 (I - z At^*)^{-1} B0 of
/// R^*(z) R(z), with inverse D^{-1} - z D^{-2} C0 (I - z A0)^{-1} B0 D^{-1}.
struct OuterFactor {
  Matrix D;
  Matrix Cout;        // D^{-1} C0
  Matrix AtildeStar;  // state matrix of Psi
  Matrix B0;
  Matrix A0;          // state matrix of Psi^{-1}
  Matrix C0;
  DareSolution dare;
  /// max over the grid of |R^*R - Psi^*Psi| / (1 + |R|^2).
  double spectral_residual = 0.0;
  /// max over the grid of |Psi Psi^{-1} - I|.
  double inverse_residual = 0.0;

  TwoSidedRealization psi() const;
  TwoSidedRealization psi_inverse() const;
};

OuterFactor outer_factor(const TwoSidedRealization& r,
                         const DareOptions& options = {});

/// Same, from an already solved Riccati equation for product_data(r).
OuterFactor outer_factor(const TwoSidedRealization& r, const ProductData& pd,
                         const DareSolution& dare);

/// Sizes removed by minimal_reduce together with the Hankel singular values
/// that drove each decision.
struct ReductionLog {
  Eigen::Index plus_before = 0, plus_after = 0;
  Eigen::Index minus_before = 0, minus_after = 0;
  Eigen::VectorXd plus_hsv, minus_hsv;
  double plus_gap_ratio = std::numeric_limits<double>::infinity();
  double minus_gap_ratio = std::numeric_limits<double>::infinity();
};

/// Left unitary factor
///   Xi(z) = Xi0 + gamma (zI - alpha)^{-1} beta1 + z C1 (I - z A0)^{-1} B1
/// with B1 = B0 D^{-1}.
struct UnitaryFactorRealization {
  Matrix Xi0;
  Matrix alpha, beta1, gamma;
  Matrix A0, B1, C1;
  Matrix Y;  // solution of Y - alpha Y A0 = alpha beta D^{-2} C0; empty after reduction
  Matrix D;
  double unitarity_residual = 0.0;  // max |Xi^* Xi - I| on the grid
  double product_residual = 0.0;    // max |R - Xi Psi| / (1 + |R|)
  std::optional<ReductionLog> reduction;

  Eigen::Index m() const { return Xi0.rows(); }
  TwoSidedRealization realization() const;
};

UnitaryFactorRealization left_unitary_factor(const TwoSidedRealization& r,
                                             const OuterFactor& psi);

/// Removes the uncontrollable and unobservable parts of both the plus
/// triple (C1, A0, B1) and the minus triple (gamma, alpha, beta1).
///
/// Each triple is balanced from finite Krylov factors of its gramians and the
/// states whose Hankel singular values fall under
/// tol * max(1, sigma_1) * n are dropped. The kept part is the exact minimal
/// realization when the dropped values are exactly zero.
UnitaryFactorRealization minimal_reduce(const UnitaryFactorRealization& xi,
                                        double tol = kDefaultTolerance);

/// Realization D + z C (I - z A)^{-1} B of a bi-inner function.
struct BiInnerRealization {
  Matrix A, B, C, D;
  bool systemMatrixUnitary = false;

  Matrix system_matrix() const;
  double unitarity_defect() const;
  TwoSidedRealization realization() const;
  /// W^*(z) = D^* + B^* (zI - A^*)^{-1} C^*.
  TwoSidedRealization adjoint_realization() const;
};

/// Similarity x -> s^{-1} x: (A, B, C, D) -> (s^{-1} A s, s^{-1} B, C s, D).
BiInnerRealization transform(const BiInnerRealization& g, const Matrix& s);

/// How W was obtained.
enum class WRoute {
  /// D_W^* = D_V^* Xi0 + B_V^* P0 B1, B_W^* = D_V^* gamma + B_V^* P1.
  kCoupling,
  /// Unitary completion of (beta1^*, alpha^*) aligned by one constant
  /// unitary so that V W^* = Xi; used when A0^* and alpha share eigenvalues.
  kAlignment,
};

std::string_view to_string(WRoute route);

struct DssOptions {
  /// Right unitary applied to the completion [B_V; D_V]. Any unitary gives
  /// another valid DSS factorization (V U, W U).
  std::optional<Matrix> completion_twist;
  /// Throw SpectraNotDisjoint instead of falling back to the alignment route.
  bool require_disjoint_spectra = false;
};

struct DssFactorization {
  BiInnerRealization V, W;  // normalized: unitary system matrices
  Matrix X;                 // X - A_V X A_W^* = B_V B_W^*
  Matrix X_original;        // same equation in the coordinates of Xi
  Matrix P0;
  std::optional<Matrix> P1;
  Matrix S;  // P0^{1/2}: coordinates of Xi -> unitary coordinates of V
  Matrix T;  // G^{1/2}: same for W
  WRoute route = WRoute::kCoupling;
  double spectral_gap = std::numeric_limits<double>::infinity();
  UnitaryFactorRealization xi;

  double product_residual = 0.0;  // max |Xi - V W^*| on the grid
  double x_residual = 0.0;        // Stein residual of X
  /// |P0^{-1} P1 - X_original| / (1 + |X_original|); empty without P1.
  std::optional<double> coupling_identity_residual;
};

/// Douglas-Shapiro-Shields factorization Xi = V W^* of a minimal Xi.
/// Without a completion twist, a W without state is rotated to W = I.
DssFactorization dss_factorize(const UnitaryFactorRealization& xi,
                               double tol = kDefaultTolerance,
                               const DssOptions& options = {});

struct UnitaryIdentityReport {
  double first = 0.0;
  double second = 0.0;
  /// Divided by max(1, |D|); empty when (alpha, beta1) is not controllable.
  std::optional<double> third;
};

/// Residuals of the three unitarity identities for a minimal Xi with
/// spectra of A0^* and alpha disjoint (SpectraNotDisjoint otherwise).
UnitaryIdentityReport verify_unitary_identities(
    const UnitaryFactorRealization& xi, double tol = kDefaultTolerance);

/// B_R = B_V D_W^* + A_V X C_W^*, C_R = D_V B_W^* + C_V X A_W^*.
struct CouplingRealization {
  Matrix Xi0, BR, CR;
};

CouplingRealization coupling_realization(const DssFactorization& dss);

/// Xi rebuilt as Xi0 + C_R (zI - A_W^*)^{-1} C_W^* + z C_V (I - z A_V)^{-1} B_R.
TwoSidedRealization coupled_xi(const DssFactorization& dss);

/// Max deviation on the grid between the coupling form and the realization
/// of Xi held by `dss`.
double reconstruct_from_coupling(const DssFactorization& dss,
                                 int samples = kCheckSamples);

struct ControllabilityReport {
  int controllable_rank = 0;  // rank of the Krylov block of (A_V, B_R)
  int observable_rank = 0;    // rank of the Krylov block of (C_R, A_W^*)
  int nV = 0, nW = 0;
  bool passed = false;
};

ControllabilityReport controllability_observability(
    const DssFactorization& dss, double tol = kDefaultTolerance);

/// Gamma_V^* T_Xi Gamma_W with the block Toeplitz operator of Xi, truncated
/// once the geometric tails drop below 1e-16. An independent route to X for
/// unitary realizations of V and W.
Matrix coupling_via_toeplitz(const BiInnerRealization& v,
                             const BiInnerRealization& w,
                             const TwoSidedRealization& xi);

}  // namespace whf
