#include "whf/indices.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

#include "whf/errors.h"

namespace whf {

double DimensionSequence::min_gap_ratio() const {
  double g = std::numeric_limits<double>::infinity();
  for (const double x : gap_ratios) g = std::min(g, x);
  return g;
}

DimensionSequence kernel_sequence(const Matrix& c, const Matrix& a, double tol,
                                  double scale_floor) {
  const Eigen::Index n = a.rows();
  DimensionSequence seq;
  seq.dims.push_back(static_cast<int>(n));
  seq.gap_ratios.push_back(std::numeric_limits<double>::infinity());
  Matrix stacked(0, n);
  Matrix block = c;
  for (Eigen::Index k = 1; k <= n; ++k) {
    stacked = vcat(stacked, block);
    const RankResult rr = rank_and_kernel(stacked, tol, scale_floor);
    const int dim = static_cast<int>(n) - rr.rank;
    const int previous = seq.dims.back();
    seq.dims.push_back(dim);
    seq.gap_ratios.push_back(rr.gap_ratio);
    if (dim == 0 || dim == previous) break;
    block = block * a;
  }
  return seq;
}

DimensionSequence image_sequence(const Matrix& a, const Matrix& b, double tol,
                                 double scale_floor) {
  const Eigen::Index n = a.rows();
  DimensionSequence seq;
  seq.dims.push_back(0);
  seq.gap_ratios.push_back(std::numeric_limits<double>::infinity());
  Matrix stacked(n, 0);
  Matrix block = b;
  for (Eigen::Index k = 1; k <= n; ++k) {
    stacked = hcat(stacked, block);
    const RankResult rr = rank_and_kernel(stacked, tol, scale_floor);
    const int previous = seq.dims.back();
    seq.dims.push_back(rr.rank);
    seq.gap_ratios.push_back(rr.gap_ratio);
    if (rr.rank == n || rr.rank == previous) break;
    block = a * block;
  }
  return seq;
}

int WienerHopfIndices::m() const {
  return static_cast<int>(negatives.size() + positives.size()) + zeros;
}

int WienerHopfIndices::total() const {
  return std::accumulate(positives.begin(), positives.end(), 0) -
         std::accumulate(negatives.begin(), negatives.end(), 0);
}

std::vector<int> WienerHopfIndices::sorted() const {
  std::vector<int> out;
  for (const int a : negatives) out.push_back(-a);
  out.insert(out.end(), zeros, 0);
  out.insert(out.end(), positives.begin(), positives.end());
  std::sort(out.begin(), out.end());
  return out;
}

WienerHopfIndices WienerHopfIndices::from_list(std::vector<int> indices) {
  WienerHopfIndices w;
  for (const int k : indices) {
    if (k < 0) w.negatives.push_back(-k);
    else if (k == 0) ++w.zeros;
    else w.positives.push_back(k);
  }
  std::sort(w.negatives.rbegin(), w.negatives.rend());
  std::sort(w.positives.rbegin(), w.positives.rend());
  return w;
}

std::string to_string(const WienerHopfIndices& w) {
  std::ostringstream os;
  os << "(";
  const auto all = w.sorted();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i) os << ", ";
    os << all[i];
  }
  os << ")";
  return os.str();
}

namespace {

// #{k >= 1 : |dims[k] - dims[k-1]| >= j} for j = 1..count.
std::vector<int> counts_from_steps(const std::vector<int>& dims, int count) {
  std::vector<int> out;
  for (int j = 1; j <= count; ++j) {
    int c = 0;
    for (std::size_t k = 1; k < dims.size(); ++k) {
      if (std::abs(dims[k] - dims[k - 1]) >= j) ++c;
    }
    out.push_back(c);
  }
  return out;
}

void log_sequence(const DimensionSequence& seq, const std::string& prefix,
                  std::vector<RankDecision>& log) {
  for (std::size_t k = 1; k < seq.dims.size(); ++k) {
    log.push_back({prefix + "_" + std::to_string(k), seq.dims[k],
                   seq.gap_ratios[k]});
  }
}

}  // namespace

IndexComputation wiener_hopf_indices(const DssFactorization& dss,
                                     Eigen::Index m, double tol) {
  constexpr double kFloor = 1.0;  // unitary realizations have unit scale
  const BiInnerRealization& v = dss.V;
  const BiInnerRealization& w = dss.W;
  const Matrix& x = dss.X;

  IndexComputation out;
  const RankResult rx = rank_and_kernel(x, tol, kFloor);
  const Matrix mw = vcat(w.B.adjoint(), x * w.A.adjoint());
  const RankResult rmw = rank_and_kernel(mw, tol, kFloor);
  const Matrix mv = hcat(v.B, v.A * x);
  const RankResult rmv = rank_and_kernel(mv, tol, kFloor);
  out.decisions.push_back({"rank X", rx.rank, rx.gap_ratio});
  out.decisions.push_back({"rank [B_W^*; X A_W^*]", rmw.rank, rmw.gap_ratio});
  out.decisions.push_back({"rank [B_V, A_V X]", rmv.rank, rmv.gap_ratio});

  // dim Ker X - dim Ker M = rank M - rank X (both act on the W state space).
  out.s = rmw.rank - rx.rank;
  out.t = rmv.rank - rx.rank;
  out.kernel = kernel_sequence(mw, w.A.adjoint(), tol, kFloor);
  out.image = image_sequence(v.A, mv, tol, kFloor);
  log_sequence(out.kernel, "Ker", out.decisions);
  log_sequence(out.image, "Im", out.decisions);

  out.indices.negatives = counts_from_steps(out.kernel.dims, std::max(out.s, 0));
  out.indices.positives = counts_from_steps(out.image.dims, std::max(out.t, 0));
  out.indices.zeros = static_cast<int>(m) - out.s - out.t;
  if (out.s < 0 || out.t < 0 || out.indices.zeros < 0) {
    out.partition_mismatch = true;
    out.indices.zeros = std::max(out.indices.zeros, 0);
  }
  for (const RankDecision& d : out.decisions) {
    if (d.gap_ratio < kAmbiguousGapRatio) out.ambiguous = true;
  }
  return out;
}

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) {
    return !c.applicable || c.passed;
  });
}

const Check* VerificationReport::find(std::string_view name) const {
  for (const Check& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw e.with_stage(name);
  }
}

void add(VerificationReport& rep, std::string name, std::string stage_name,
         double value, double threshold) {
  Check c;
  c.name = std::move(name);
  c.stage = std::move(stage_name);
  c.value = value;
  c.threshold = threshold;
  c.passed = std::isfinite(value) && value <= threshold;
  rep.checks.push_back(std::move(c));
}

void add_skipped(VerificationReport& rep, std::string name,
                 std::string stage_name, std::string note) {
  Check c;
  c.name = std::move(name);
  c.stage = std::move(stage_name);
  c.applicable = false;
  c.passed = true;
  c.value = std::numeric_limits<double>::quiet_NaN();
  c.note = std::move(note);
  rep.checks.push_back(std::move(c));
}

}  // namespace

void verify_factorization(const PipelineResult& res, VerificationReport& rep,
                          double tol) {
  const DssFactorization& dss = res.dss;
  const Matrix& x = dss.X;
  const double x_res = norm2(x - dss.V.A * x * dss.W.A.adjoint() -
                             dss.V.B * dss.W.B.adjoint());
  add(rep, "x_stein", "dss_factorize", x_res, 1e-10 * (1.0 + norm2(x)));

  if (dss.P1) {
    // X in the coordinates of Xi, recovered from the stored X.
    const Matrix s_inv = checked_inverse(dss.S, "S is singular");
    const Matrix t_inv = checked_inverse(dss.T, "T is singular");
    const Matrix x_orig = s_inv * x * t_inv;
    const Matrix ratio = dss.P0.rows() > 0
                             ? Matrix(dss.P0.ldlt().solve(*dss.P1))
                             : Matrix(0, dss.P1->cols());
    add(rep, "x_coupling_identity", "dss_factorize",
        norm2(ratio - x_orig) / (1.0 + norm2(x_orig)), 1e-9);
  } else {
    add_skipped(rep, "x_coupling_identity", "dss_factorize",
                "spectra of A0^* and alpha intersect");
  }

  const UnitaryFactorRealization& xi = res.xi_reduced;
  if (dss.P1) {
    const UnitaryIdentityReport ids = verify_unitary_identities(xi, tol);
    add(rep, "unitary_identity_1", "verify", ids.first, 1e-9);
    add(rep, "unitary_identity_2", "verify", ids.second, 1e-9);
    if (ids.third) {
      add(rep, "unitary_identity_3", "verify", *ids.third, 1e-9);
    } else {
      add_skipped(rep, "unitary_identity_3", "verify",
                  "(alpha, beta1) is not controllable");
    }
  } else {
    for (const char* name :
         {"unitary_identity_1", "unitary_identity_2", "unitary_identity_3"}) {
      add_skipped(rep, name, "verify", "spectra of A0^* and alpha intersect");
    }
  }

  const ControllabilityReport cr = controllability_observability(dss, tol);
  Check c;
  c.name = "controllability_observability";
  c.stage = "verify";
  c.value = (cr.nV - cr.controllable_rank) + (cr.nW - cr.observable_rank);
  c.threshold = 0.0;
  c.passed = cr.passed;
  c.note = "ranks " + std::to_string(cr.controllable_rank) + "/" +
           std::to_string(cr.nV) + ", " + std::to_string(cr.observable_rank) +
           "/" + std::to_string(cr.nW);
  rep.checks.push_back(c);

  add(rep, "coupling_reconstruction", "verify",
      reconstruct_from_coupling(dss), 1e-9);
}

PipelineResult run_pipeline(const TwoSidedRealization& r,
                            const PipelineOptions& opt) {
  if (!(opt.tol > 0.0 && opt.tol < 1e-2)) {
    throw Error(ErrorCode::kInvalidArgument, "tolerance must lie in (0, 1e-2)",
                "validate");
  }
  PipelineResult res;
  res.validation = stage("validate", [&] { return validate(r, opt.samples); });
  const ProductData pd = stage("product_data", [&] { return product_data(r); });
  const DareSolution dare =
      stage("solve_dare", [&] { return solve_dare(pd, opt.dare); });
  res.outer = stage("outer_factor", [&] { return outer_factor(r, pd, dare); });
  res.xi = stage("left_unitary_factor",
                 [&] { return left_unitary_factor(r, res.outer); });
  res.xi_reduced =
      stage("minimal_reduce", [&] { return minimal_reduce(res.xi, opt.tol); });
  res.dss = stage("dss_factorize", [&] {
    return dss_factorize(res.xi_reduced, opt.tol, opt.dss);
  });
  res.computation = stage("wiener_hopf_indices", [&] {
    return wiener_hopf_indices(res.dss, r.m(), opt.tol);
  });
  res.indices = res.computation.indices;

  VerificationReport& rep = res.report;
  add(rep, "spectral_factor", "outer_factor", res.outer.spectral_residual,
      1e-9);
  add(rep, "outer_inverse", "outer_factor", res.outer.inverse_residual, 1e-10);
  add(rep, "xi_unitary", "left_unitary_factor", res.xi.unitarity_residual,
      1e-9);
  add(rep, "xi_product", "left_unitary_factor", res.xi.product_residual, 1e-9);
  // Dropping Hankel singular values that sit above rounding level moves Xi
  // by up to twice their sum; that a-priori bound widens the tolerance.
  double truncation_bound = 0.0;
  if (const auto& log = res.xi_reduced.reduction) {
    truncation_bound =
        2.0 * (log->plus_hsv.tail(log->plus_hsv.size() - log->plus_after).sum() +
               log->minus_hsv.tail(log->minus_hsv.size() - log->minus_after)
                   .sum());
  }
  add(rep, "reduction_preserves_xi", "minimal_reduce",
      max_deviation(res.xi.realization(), res.xi_reduced.realization(),
                    kCheckSamples),
      1e-10 + truncation_bound);
  if (truncation_bound > 1e-10) {
    rep.checks.back().note = "tolerance includes the balanced truncation bound";
  }
  add(rep, "dss_product", "dss_factorize", res.dss.product_residual, 1e-9);
  add(rep, "v_unitary", "dss_factorize", res.dss.V.unitarity_defect(), 1e-9);
  add(rep, "w_unitary", "dss_factorize", res.dss.W.unitarity_defect(), 1e-9);
  add(rep, "v_stable", "dss_factorize", spectral_radius(res.dss.V.A),
      1.0 - 1e-12);
  add(rep, "w_stable", "dss_factorize", spectral_radius(res.dss.W.A),
      1.0 - 1e-12);
  if (opt.full_verification) {
    stage("verify", [&] {
      verify_factorization(res, rep, opt.tol);
      return 0;
    });
  }

  rep.winding = stage("winding_number",
                      [&] { return winding_number(r, opt.samples); });
  add(rep, "winding_sum_rule", "winding_number",
      std::abs(res.indices.total() - rep.winding), 0.0);

  if (res.computation.ambiguous) rep.flags.push_back("AmbiguousRank");
  if (res.computation.partition_mismatch) {
    rep.flags.push_back("PartitionMismatch");
  }
  if (res.indices.total() != rep.winding) rep.flags.push_back("WindingMismatch");
  return res;
}

std::pair<WienerHopfIndices, VerificationReport> indices_of(
    const TwoSidedRealization& r, double tol) {
  PipelineOptions opt;
  opt.tol = tol;
  PipelineResult res = run_pipeline(r, opt);
  return {std::move(res.indices), std::move(res.report)};
}

}  // namespace whf
