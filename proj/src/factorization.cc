#include "whf/factorization.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "whf/errors.h"

namespace whf {

namespace {

template <typename F>
double max_over_grid(int samples, F&& f) {
  double worst = 0.0;
  for (const Complex z : circle_grid(samples)) worst = std::max(worst, f(z));
  return worst;
}

// Closest unitary in the Frobenius sense.
Matrix polar_unitary(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// Rank of [B, AB, ..., A^{n-1} B].
int krylov_rank(const Matrix& a, const Matrix& b, double tol) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 0;
  Matrix k(n, n * b.cols());
  Matrix block = b;
  for (Eigen::Index j = 0; j < n; ++j) {
    k.middleCols(j * b.cols(), b.cols()) = block;
    block = a * block;
  }
  return rank_and_kernel(k, tol, 1.0).rank;
}

struct Reduced {
  Matrix A, B, C;
  RealVector hsv;
  double gap_ratio = std::numeric_limits<double>::infinity();
};

// Upper triangular factor R of a tall matrix with R^* R = M^* M.
Matrix triangular_factor(const Matrix& m, Eigen::Index n) {
  Matrix padded = m;
  if (padded.rows() < n) {
    padded.conservativeResize(n, Eigen::NoChange);
    padded.bottomRows(n - m.rows()).setZero();
  }
  Eigen::HouseholderQR<Matrix> qr(padded);
  return qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
}

constexpr Eigen::Index kMaxKrylovTail = 2000;

// Coupling-route error above which the aligned W is tried as well.
constexpr double kCouplingSlack = 1e-12;

// Number of powers after which rho^k drops below 1e-17; 0 when that takes
// more than kMaxKrylovTail steps.
Eigen::Index krylov_steps(const Matrix& a) {
  const Eigen::Index n = a.rows();
  const double rho = std::max(spectral_radius(a), 1e-3);
  if (!(rho < 1.0)) return 0;
  const double tail = std::ceil(std::log(1e-17) / std::log(rho));
  if (tail > static_cast<double>(kMaxKrylovTail)) return 0;
  return n + std::max<Eigen::Index>(static_cast<Eigen::Index>(tail), 1);
}

// Triangular R with R^* R = sum_k (A^*)^k C^* C A^k, the observability
// gramian of (C, A), from a QR of the stacked observability matrix. Empty
// when the series converges too slowly for a finite stack.
Matrix observability_factor(const Matrix& c, const Matrix& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index steps = krylov_steps(a);
  if (steps == 0) return Matrix(0, 0);
  Matrix lo(steps * c.rows(), n);
  Matrix ck = c;
  for (Eigen::Index k = 0; k < steps; ++k) {
    lo.middleRows(k * c.rows(), c.rows()) = ck;
    ck = ck * a;
  }
  return triangular_factor(lo, n);
}

struct GramianRoot {
  Matrix gramian, root, inverse_root;
};

// Hermitian square root of the observability gramian of (C, A) and its
// inverse. The root comes from the singular values of the triangular
// factor, which keeps small eigenvalues accurate to working precision.
GramianRoot gramian_root(const Matrix& c, const Matrix& a, ErrorCode code,
                         const std::string& what) {
  const Eigen::Index n = a.rows();
  GramianRoot g;
  if (n == 0) {
    g.gramian = g.root = g.inverse_root = Matrix(0, 0);
    return g;
  }
  RealVector s;
  Matrix v;
  const Matrix r = observability_factor(c, a);
  if (r.size() > 0) {
    Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeFullV);
    s = svd.singularValues();
    v = svd.matrixV();
  } else {
    Matrix p = solve_stein(a.adjoint(), a, c.adjoint() * c);
    Eigen::SelfAdjointEigenSolver<Matrix> es(Real(0.5) * (p + p.adjoint()));
    s = es.eigenvalues().cwiseMax(Real(0)).cwiseSqrt();
    v = es.eigenvectors();
  }
  const Real smax = s.maxCoeff();
  const Real smin = s.minCoeff();
  if (!(smin * smin > Real(1e-13) * std::max(Real(1), smax * smax))) {
    throw Error(code, what + " is singular (smallest eigenvalue " +
                          std::to_string(static_cast<double>(smin * smin)) +
                          ")");
  }
  const Vector sc = s.cast<Complex>();
  g.root = v * sc.asDiagonal() * v.adjoint();
  g.inverse_root = v * sc.cwiseInverse().asDiagonal() * v.adjoint();
  g.gramian = v * sc.cwiseAbs2().asDiagonal() * v.adjoint();
  return g;
}

// Square-root balanced truncation of z C (I - zA)^{-1} B (or of the minus
// part, which has the same Markov parameters C A^k B). Keeps the states with
// nonzero Hankel singular values and returns them in balanced coordinates.
Reduced balanced_reduce(const Matrix& a, const Matrix& b, const Matrix& c,
                        double tol) {
  const Eigen::Index n = a.rows();
  Reduced out;
  out.A = a;
  out.B = b;
  out.C = c;
  out.hsv.resize(0);
  if (n == 0) return out;
  Matrix ro = observability_factor(c, a);
  Matrix rc = observability_factor(b.adjoint(), a.adjoint());
  if (ro.size() == 0 || rc.size() == 0) {
    // Too slowly decaying for a finite stack: fall back on gramian roots.
    Matrix po = solve_stein(a.adjoint(), a, c.adjoint() * c);
    Matrix pc = solve_stein(a, a.adjoint(), b * b.adjoint());
    ro = hermitian_sqrt_psd(Real(0.5) * (po + po.adjoint()), 1e-6);
    rc = hermitian_sqrt_psd(Real(0.5) * (pc + pc.adjoint()), 1e-6);
  }
  Eigen::JacobiSVD<Matrix> svd(ro * rc.adjoint(),
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.hsv = svd.singularValues();
  const double threshold =
      tol * std::max(out.hsv.size() ? static_cast<double>(out.hsv(0)) : 0.0,
                     1.0) *
      static_cast<double>(n);
  Eigen::Index r = 0;
  while (r < out.hsv.size() && out.hsv(r) > threshold) ++r;
  if (r < out.hsv.size() && r > 0 && out.hsv(r) > 0.0) {
    out.gap_ratio = out.hsv(r - 1) / out.hsv(r);
  }
  const RealVector inv_root =
      out.hsv.head(r).cwiseSqrt().cwiseInverse();
  const Matrix tl = inv_root.cast<Complex>().asDiagonal() *
                    svd.matrixU().leftCols(r).adjoint() * ro;
  const Matrix tr = rc.adjoint() * svd.matrixV().leftCols(r) *
                    inv_root.cast<Complex>().asDiagonal();
  out.A = tl * a * tr;
  out.B = tl * b;
  out.C = c * tr;
  return out;
}

BiInnerRealization normalized(const Matrix& a, const Matrix& b,
                              const Matrix& c, const Matrix& d) {
  BiInnerRealization g{a, b, c, d, false};
  g.systemMatrixUnitary = g.unitarity_defect() <= 1e-9;
  return g;
}

double dss_residual(const BiInnerRealization& v, const BiInnerRealization& w,
                    const TwoSidedRealization& xi) {
  const TwoSidedRealization vr = v.realization();
  const TwoSidedRealization wa = w.adjoint_realization();
  return max_over_grid(kCheckSamples, [&](Complex z) {
    return norm2(evaluate(xi, z) - evaluate(vr, z) * evaluate(wa, z));
  });
}

}  // namespace

TwoSidedRealization OuterFactor::psi() const {
  return TwoSidedRealization::plus_only(D, AtildeStar, B0, Cout);
}

TwoSidedRealization OuterFactor::psi_inverse() const {
  const Matrix dinv = checked_inverse(D, "D is singular");
  return TwoSidedRealization::plus_only(dinv, A0, B0 * dinv,
                                        -dinv * dinv * C0);
}

OuterFactor outer_factor(const TwoSidedRealization& r,
                         const DareOptions& options) {
  const ProductData pd = product_data(r);
  return outer_factor(r, pd, solve_dare(pd, options));
}

OuterFactor outer_factor(const TwoSidedRealization& r, const ProductData& pd,
                         const DareSolution& dare) {
  OuterFactor out;
  out.dare = dare;
  out.D = out.dare.D;
  out.C0 = out.dare.C0;
  out.B0 = out.dare.B0;
  out.A0 = out.dare.A0;
  out.AtildeStar = pd.Atilde.adjoint();
  out.Cout = checked_inverse(out.D, "D is singular") * out.C0;

  const TwoSidedRealization psi = out.psi();
  const TwoSidedRealization psi_inv = out.psi_inverse();
  out.spectral_residual = max_over_grid(kCheckSamples, [&](Complex z) {
    const Matrix rz = evaluate(r, z);
    const Matrix pz = evaluate(psi, z);
    const double scale = norm2(rz);
    return norm2(rz.adjoint() * rz - pz.adjoint() * pz) /
           (1.0 + scale * scale);
  });
  out.inverse_residual = max_over_grid(kCheckSamples, [&](Complex z) {
    return norm2(evaluate(psi, z) * evaluate(psi_inv, z) -
                 identity(r.m()));
  });
  return out;
}

TwoSidedRealization UnitaryFactorRealization::realization() const {
  return TwoSidedRealization{Xi0, A0, B1, C1, alpha, beta1, gamma};
}

UnitaryFactorRealization left_unitary_factor(const TwoSidedRealization& r,
                                             const OuterFactor& psi) {
  const Matrix dinv = checked_inverse(psi.D, "D is singular");
  const Matrix dinv2 = dinv * dinv;
  const Matrix& a0 = psi.A0;
  const Matrix& b0 = psi.B0;
  const Matrix& c0 = psi.C0;

  UnitaryFactorRealization xi;
  xi.D = psi.D;
  xi.alpha = r.alpha;
  xi.gamma = r.gamma;
  xi.A0 = a0;
  xi.B1 = b0 * dinv;
  xi.Y = solve_stein(r.alpha, a0, r.alpha * r.beta * dinv2 * c0);

  const Matrix gy = r.gamma * xi.Y;
  const Matrix gbc = r.gamma * r.beta * dinv2 * c0;
  xi.Xi0 = r.R0 * dinv - gy * a0 * b0 * dinv - gbc * b0 * dinv;
  xi.C1 = hcat(r.C, Matrix::Zero(r.m(), r.n_minus())) - r.R0 * dinv2 * c0 -
          gy * a0 * a0 - gbc * a0;
  xi.beta1 = (r.beta - xi.Y * b0) * dinv;

  const TwoSidedRealization xr = xi.realization();
  const TwoSidedRealization pr = psi.psi();
  const Matrix eye = identity(r.m());
  xi.unitarity_residual = max_over_grid(kCheckSamples, [&](Complex z) {
    const Matrix v = evaluate(xr, z);
    return norm2(v.adjoint() * v - eye);
  });
  xi.product_residual = max_over_grid(kCheckSamples, [&](Complex z) {
    const Matrix rz = evaluate(r, z);
    return norm2(rz - evaluate(xr, z) * evaluate(pr, z)) / (1.0 + norm2(rz));
  });
  if (xi.unitarity_residual > 1e-8) {
    throw Error(ErrorCode::kUnitarityCheckFailed,
                "Xi^* Xi deviates from I by " +
                    std::to_string(xi.unitarity_residual));
  }
  return xi;
}

UnitaryFactorRealization minimal_reduce(const UnitaryFactorRealization& xi,
                                        double tol) {
  UnitaryFactorRealization out = xi;
  ReductionLog log;
  log.plus_before = xi.A0.rows();
  log.minus_before = xi.alpha.rows();

  const Reduced plus = balanced_reduce(xi.A0, xi.B1, xi.C1, tol);
  const Reduced minus = balanced_reduce(xi.alpha, xi.beta1, xi.gamma, tol);
  out.A0 = plus.A;
  out.B1 = plus.B;
  out.C1 = plus.C;
  out.alpha = minus.A;
  out.beta1 = minus.B;
  out.gamma = minus.C;
  if (plus.A.rows() != xi.A0.rows() || minus.A.rows() != xi.alpha.rows()) {
    out.Y.resize(0, 0);
  }

  log.plus_after = out.A0.rows();
  log.minus_after = out.alpha.rows();
  log.plus_hsv = plus.hsv.cast<double>();
  log.minus_hsv = minus.hsv.cast<double>();
  log.plus_gap_ratio = plus.gap_ratio;
  log.minus_gap_ratio = minus.gap_ratio;
  out.reduction = log;
  return out;
}

Matrix BiInnerRealization::system_matrix() const {
  return block2x2(A, B, C, D);
}

double BiInnerRealization::unitarity_defect() const {
  return isometry_defect(system_matrix());
}

TwoSidedRealization BiInnerRealization::realization() const {
  return TwoSidedRealization::plus_only(D, A, B, C);
}

TwoSidedRealization BiInnerRealization::adjoint_realization() const {
  return TwoSidedRealization::minus_only(D.adjoint(), A.adjoint(),
                                         C.adjoint(), B.adjoint());
}

BiInnerRealization transform(const BiInnerRealization& g, const Matrix& s) {
  const Matrix sinv = checked_inverse(s, "similarity is singular");
  BiInnerRealization out{sinv * g.A * s, sinv * g.B, g.C * s, g.D, false};
  out.systemMatrixUnitary = out.unitarity_defect() <= 1e-9;
  return out;
}

std::string_view to_string(WRoute route) {
  switch (route) {
    case WRoute::kCoupling:
      return "coupling";
    case WRoute::kAlignment:
      return "alignment";
  }
  return "unknown";
}

DssFactorization dss_factorize(const UnitaryFactorRealization& xi, double tol,
                               const DssOptions& options) {
  (void)tol;
  const Eigen::Index m = xi.m();
  const Eigen::Index n = xi.A0.rows();
  const Eigen::Index nm = xi.alpha.rows();

  DssFactorization out;
  out.xi = xi;
  const TwoSidedRealization xr = xi.realization();

  // V from the observability gramian of (C1, A0).
  const GramianRoot v_root =
      gramian_root(xi.C1, xi.A0, ErrorCode::kNonInvertibleP0, "P0");
  const Matrix& p0 = v_root.gramian;
  const Matrix& p0h = v_root.root;
  const Matrix& p0hinv = v_root.inverse_root;
  out.P0 = p0;
  out.S = p0h;

  const Matrix av = p0h * xi.A0 * p0hinv;
  const Matrix cv = xi.C1 * p0hinv;
  Matrix completion = unitary_completion(vcat(av, cv));
  if (options.completion_twist) {
    const Matrix& u = *options.completion_twist;
    if (u.rows() != m || u.cols() != m) {
      throw Error(ErrorCode::kShapeMismatch, "completion twist must be m x m");
    }
    completion = completion * u;
  }
  out.V = normalized(av, completion.topRows(n), cv, completion.bottomRows(m));
  const Matrix bv_orig = p0hinv * out.V.B;

  // W lives on the controllability gramian G of (alpha, beta1), which is
  // the observability gramian of (beta1^*, alpha^*).
  const GramianRoot w_root =
      gramian_root(xi.beta1.adjoint(), xi.alpha.adjoint(),
                   ErrorCode::kNonInvertibleP0,
                   "controllability gramian of (alpha, beta1)");
  const Matrix& gh = w_root.root;
  const Matrix& ghinv = w_root.inverse_root;
  out.T = gh;
  const Matrix aw = gh * xi.alpha.adjoint() * ghinv;
  const Matrix cw = xi.beta1.adjoint() * ghinv;

  out.spectral_gap = min_eigenvalue_gap(xi.A0.adjoint(), xi.alpha);
  bool coupled = false;
  double coupling_error = std::numeric_limits<double>::infinity();
  try {
    out.P1 = solve_sylvester(xi.A0.adjoint(), xi.alpha,
                             -xi.C1.adjoint() * xi.gamma);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSpectraNotDisjoint ||
        options.require_disjoint_spectra) {
      throw;
    }
  }
  if (out.P1) {
    const Matrix dw_star =
        out.V.D.adjoint() * xi.Xi0 + bv_orig.adjoint() * p0 * xi.B1;
    const Matrix bw_star =
        out.V.D.adjoint() * xi.gamma + bv_orig.adjoint() * *out.P1;
    out.W = normalized(aw, gh * bw_star.adjoint(), cw, dw_star.adjoint());
    out.route = WRoute::kCoupling;
    coupling_error =
        std::max(out.W.unitarity_defect(), dss_residual(out.V, out.W, xr));
    coupled = coupling_error <= 1e-9;
  }
  if (!coupled && options.require_disjoint_spectra) {
    throw Error(ErrorCode::kUnitarityCheckFailed,
                "coupling formula for W does not reproduce Xi");
  }
  // The coupling formula inherits the conditioning of P0 and P1; when it is
  // not clearly at rounding level, the aligned completion may do better.
  if (!coupled || coupling_error > kCouplingSlack) {
    // Any unitary completion of (C_W, A_W) equals W up to one constant
    // unitary on the right, which V^* Xi W0 recovers.
    const Matrix cw_completion = unitary_completion(vcat(aw, cw));
    const BiInnerRealization w0 =
        normalized(aw, cw_completion.topRows(nm), cw, cw_completion.bottomRows(m));
    const TwoSidedRealization vr = out.V.realization();
    const TwoSidedRealization w0r = w0.realization();
    Matrix acc = Matrix::Zero(m, m);
    for (const Complex z : circle_grid(kCheckSamples)) {
      acc += evaluate(vr, z).adjoint() * evaluate(xr, z) * evaluate(w0r, z);
    }
    const Matrix u = polar_unitary(acc);
    BiInnerRealization aligned =
        normalized(aw, w0.B * u.adjoint(), cw, w0.D * u.adjoint());
    const double aligned_error =
        std::max(aligned.unitarity_defect(), dss_residual(out.V, aligned, xr));
    if (!coupled || aligned_error < coupling_error) {
      out.W = std::move(aligned);
      out.route = WRoute::kAlignment;
    }
  }

  // A stateless W is a constant unitary; rotating it into V gives W = I.
  if (nm == 0 && !options.completion_twist) {
    const Matrix u = out.W.D.adjoint();
    out.V.B = out.V.B * u;
    out.V.D = out.V.D * u;
    out.W.D = identity(m);
    out.V.systemMatrixUnitary = out.V.unitarity_defect() <= 1e-9;
    out.W.systemMatrixUnitary = out.W.unitarity_defect() <= 1e-9;
  }

  out.X = solve_stein(out.V.A, out.W.A.adjoint(), out.V.B * out.W.B.adjoint());
  out.x_residual = norm2(out.X - out.V.A * out.X * out.W.A.adjoint() -
                         out.V.B * out.W.B.adjoint());
  const Matrix bw_orig = ghinv * out.W.B;
  out.X_original =
      solve_stein(xi.A0, xi.alpha, bv_orig * bw_orig.adjoint());
  if (out.P1) {
    const Matrix ratio = n > 0 ? Matrix(p0.ldlt().solve(*out.P1))
                               : Matrix(0, nm);
    out.coupling_identity_residual =
        norm2(ratio - out.X_original) / (1.0 + norm2(out.X_original));
  }
  out.product_residual = dss_residual(out.V, out.W, xr);
  return out;
}

UnitaryIdentityReport verify_unitary_identities(
    const UnitaryFactorRealization& xi, double tol) {
  const Matrix p1 = solve_sylvester(xi.A0.adjoint(), xi.alpha,
                                    -xi.C1.adjoint() * xi.gamma);
  Matrix p0 = solve_stein(xi.A0.adjoint(), xi.A0, xi.C1.adjoint() * xi.C1);
  Matrix pm =
      solve_stein(xi.alpha.adjoint(), xi.alpha, xi.gamma.adjoint() * xi.gamma);
  p0 = Real(0.5) * (p0 + p0.adjoint());
  pm = Real(0.5) * (pm + pm.adjoint());

  UnitaryIdentityReport rep;
  rep.first = norm2(xi.Xi0.adjoint() * xi.Xi0 +
                    xi.B1.adjoint() * p0 * xi.B1 +
                    xi.beta1.adjoint() * pm * xi.beta1 - identity(xi.m()));
  rep.second = norm2(xi.C1.adjoint() * xi.Xi0 +
                     xi.A0.adjoint() * p0 * xi.B1 - p1 * xi.beta1);
  if (krylov_rank(xi.alpha, xi.beta1, tol) == xi.alpha.rows()) {
    // Every term carries a left factor D^*; the residual is reported
    // relative to |D| so that it does not grow with the scale of R.
    const Matrix b0 = xi.B1 * xi.D;
    rep.third = norm2(xi.D.adjoint() * xi.Xi0.adjoint() * xi.gamma +
                      xi.D.adjoint() * xi.beta1.adjoint() * pm * xi.alpha +
                      b0.adjoint() * p1) /
                std::max(1.0, norm2(xi.D));
  }
  return rep;
}

CouplingRealization coupling_realization(const DssFactorization& dss) {
  const BiInnerRealization& v = dss.V;
  const BiInnerRealization& w = dss.W;
  CouplingRealization c;
  c.Xi0 = v.D * w.D.adjoint() + v.C * dss.X * w.C.adjoint();
  c.BR = v.B * w.D.adjoint() + v.A * dss.X * w.C.adjoint();
  c.CR = v.D * w.B.adjoint() + v.C * dss.X * w.A.adjoint();
  return c;
}

TwoSidedRealization coupled_xi(const DssFactorization& dss) {
  const CouplingRealization c = coupling_realization(dss);
  return TwoSidedRealization{c.Xi0,          dss.V.A,          c.BR,
                             dss.V.C,        dss.W.A.adjoint(), dss.W.C.adjoint(),
                             c.CR};
}

double reconstruct_from_coupling(const DssFactorization& dss, int samples) {
  return max_deviation(coupled_xi(dss), dss.xi.realization(), samples);
}

ControllabilityReport controllability_observability(
    const DssFactorization& dss, double tol) {
  const CouplingRealization c = coupling_realization(dss);
  ControllabilityReport rep;
  rep.nV = static_cast<int>(dss.V.A.rows());
  rep.nW = static_cast<int>(dss.W.A.rows());
  rep.controllable_rank = krylov_rank(dss.V.A, c.BR, tol);
  // Observability of (C_R, A_W^*) is controllability of (A_W, C_R^*).
  rep.observable_rank = krylov_rank(dss.W.A, c.CR.adjoint(), tol);
  rep.passed = rep.controllable_rank == rep.nV && rep.observable_rank == rep.nW;
  return rep;
}

Matrix coupling_via_toeplitz(const BiInnerRealization& v,
                             const BiInnerRealization& w,
                             const TwoSidedRealization& xi) {
  const Eigen::Index nv = v.A.rows();
  const Eigen::Index nw = w.A.rows();
  Matrix x = Matrix::Zero(nv, nw);
  if (nv == 0 || nw == 0) return x;
  const double rho = std::max({spectral_radius(v.A), spectral_radius(w.A),
                               spectral_radius(xi.A), spectral_radius(xi.alpha),
                               1e-3});
  const int steps = std::min(
      4000, static_cast<int>(std::ceil(std::log(1e-16) / std::log(rho))) + 1 +
                static_cast<int>(std::max(nv, nw)));

  // Fourier coefficients Xi_k for |k| < steps.
  std::vector<Matrix> pos(steps), neg(steps);
  pos[0] = xi.R0;
  neg[0] = xi.R0;
  Matrix bk = xi.B;
  Matrix beta_k = xi.beta;
  for (int k = 1; k < steps; ++k) {
    pos[k] = xi.n_plus() ? Matrix(xi.C * bk) : Matrix::Zero(xi.m(), xi.m());
    neg[k] = xi.n_minus() ? Matrix(xi.gamma * beta_k)
                          : Matrix::Zero(xi.m(), xi.m());
    if (xi.n_plus()) bk = xi.A * bk;
    if (xi.n_minus()) beta_k = xi.alpha * beta_k;
  }
  auto coeff = [&](int k) -> const Matrix& {
    return k >= 0 ? pos[k] : neg[-k];
  };

  std::vector<Matrix> gw(steps);
  Matrix cw = w.C;
  for (int j = 0; j < steps; ++j) {
    gw[j] = cw;
    cw = cw * w.A;
  }
  Matrix cv = v.C;
  for (int i = 0; i < steps; ++i) {
    Matrix row = Matrix::Zero(xi.m(), nw);
    for (int j = 0; j < steps; ++j) {
      const int k = i - j;
      if (k >= steps || -k >= steps) continue;
      row += coeff(k) * gw[j];
    }
    x += cv.adjoint() * row;
    cv = cv * v.A;
  }
  return x;
}

}  // namespace whf
