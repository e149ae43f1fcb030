#pragma once

#include <optional>
#include <string>
#include <vector>

#include "whf/factorization.h"
#include "whf/linalg.h"
#include "whf/realization.h"

namespace whf {

inline constexpr double kAmbiguousGapRatio = 1e3;

/// dims[k] for k = 0, 1, ... until the sequence stops changing. gap_ratios[k]
/// is the gap of the rank decision behind dims[k] (inf for k = 0).
struct DimensionSequence {
  std::vector<int> dims;
  std::vector<double> gap_ratios;

  double min_gap_ratio() const;
};

/// dim of the intersection of Ker C A^j over j < k.
DimensionSequence kernel_sequence(const Matrix& c, const Matrix& a, double tol,
                                  double scale_floor = 0.0);

/// rank of [B, AB, ..., A^{k-1} B].
DimensionSequence image_sequence(const Matrix& a, const Matrix& b, double tol,
                                 double scale_floor = 0.0);

/// Right Wiener-Hopf indices. `negatives` holds the exponents alpha_j of the
/// indices -alpha_j, largest first; `positives` holds omega_j, largest first.
struct WienerHopfIndices {
  std::vector<int> negatives;
  int zeros = 0;
  std::vector<int> positives;

  int m() const;
  /// Sum of all indices.
  int total() const;
  /// All m indices in increasing order.
  std::vector<int> sorted() const;
  static WienerHopfIndices from_list(std::vector<int> indices);

  bool operator==(const WienerHopfIndices&) const = default;
};

std::string to_string(const WienerHopfIndices& w);

struct RankDecision {
  std::string label;
  int rank = 0;
  double gap_ratio = std::numeric_limits<double>::infinity();
};

struct IndexComputation {
  WienerHopfIndices indices;
  int s = 0;
  int t = 0;
  DimensionSequence kernel;  // of ([B_W^*; X A_W^*], A_W^*)
  DimensionSequence image;   // of (A_V, [B_V, A_V X])
  std::vector<RankDecision> decisions;
  bool ambiguous = false;
  bool partition_mismatch = false;
};

/// Index counts from the unitary realizations of V and W and the coupling
/// matrix X. Rank decisions use the unit scale of unitary realizations as
/// their floor.
IndexComputation wiener_hopf_indices(const DssFactorization& dss,
                                     Eigen::Index m,
                                     double tol = kDefaultTolerance);

struct Check {
  std::string name;
  std::string stage;
  double value = 0.0;
  double threshold = 0.0;
  bool applicable = true;
  bool passed = true;
  std::string note;
};

struct VerificationReport {
  std::vector<Check> checks;
  int winding = 0;
  std::vector<std::string> flags;

  bool all_passed() const;
  const Check* find(std::string_view name) const;
};

struct PipelineOptions {
  double tol = kDefaultTolerance;
  int samples = 1024;
  DareOptions dare;
  DssOptions dss;
  /// Also run the identity checks (Stein residuals, unitarity identities,
  /// controllability, coupling form). The sampled factor checks and the
  /// winding sum rule always run.
  bool full_verification = true;
};

struct PipelineResult {
  WienerHopfIndices indices;
  IndexComputation computation;
  VerificationReport report;
  ValidationReport validation;
  OuterFactor outer;
  UnitaryFactorRealization xi;          // before reduction
  UnitaryFactorRealization xi_reduced;  // input of the DSS step
  DssFactorization dss;
};

/// Full pipeline. Errors carry the name of the stage that raised them.
PipelineResult run_pipeline(const TwoSidedRealization& r,
                            const PipelineOptions& options = {});

/// Appends the identity checks for an existing factorization to `report`.
void verify_factorization(const PipelineResult& result,
                          VerificationReport& report, double tol);

std::pair<WienerHopfIndices, VerificationReport> indices_of(
    const TwoSidedRealization& r, double tol = kDefaultTolerance);

}  // namespace whf
