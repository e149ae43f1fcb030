#pragma once

#include <cstdint>
#include <vector>

#include "whf/indices.h"
#include "whf/realization.h"

namespace whf {

struct ProblemSpec {
  int m = 1;
  std::vector<int> indices;  // one prescribed index per column
  int state_plus = 0;
  int state_minus = 0;
  std::uint64_t seed = 0;
  double spectral_cap = 0.6;
};

/// Throws InvalidArgument for inconsistent specs.
void check_spec(const ProblemSpec& spec);

/// W+(z) = rho I + z C (I - zA)^{-1} B with rho(A) <= cap and
/// rho(A - B C / rho) <= 0.95; rho doubles from 1 until the second bound holds.
TwoSidedRealization make_plus_factor(const ProblemSpec& spec);

/// W-(z) = rho I + gamma (zI - alpha)^{-1} beta, the mirror image.
TwoSidedRealization make_minus_factor(const ProblemSpec& spec);

/// diag(z^{k_1}, ..., z^{k_m}) with nilpotent shifts for the powers.
TwoSidedRealization make_middle(const std::vector<int>& indices);

struct GeneratedProblem {
  TwoSidedRealization realization;
  WienerHopfIndices truth;
};

/// W-(z) D(z) W+(z) together with the prescribed indices.
GeneratedProblem generate_problem(const ProblemSpec& spec);

/// Member `seed` of the standard random ensemble: m in {1..4}, indices in
/// {-3..3}, factor state dimensions in {0..6}, all drawn from the seed.
ProblemSpec ensemble_spec(std::uint64_t seed);

}  // namespace whf
