// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. The random ensemble is seeds 1..100 of ensemble_spec.

#include <sys/wait.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "whf/errors.h"
#include "whf/indices.h"
#include "whf/json_io.h"
#include "whf/testgen.h"

namespace fs = std::filesystem;
using namespace whf;

namespace {

constexpr int kEnsembleSize = 100;
constexpr double kTol = 1e-9;

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::string error;
  bool indices_exact = false;
  std::string got, want;
  double spectral = 0.0;
  double xi_unitary = 0.0;
  double dss_product = 0.0;
  double v_defect = 0.0, w_defect = 0.0;
  std::optional<double> coupling;  // |P0^{-1}P1 - X| / (1 + |X|)
  std::optional<double> id1, id2, id3;
  bool id3_skipped = false;
  bool ids_skipped = false;
  int winding = 0, index_sum = 0;
  bool controllable = false;
  double similarity = 0.0;  // relative error of the X transformation law
  double unitary_similarity = 0.0;
  double twist = 0.0;  // worst of the two-point twist checks
};

Matrix gaussian(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

Matrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rng, n, n));
  return qr.householderQ() * identity(n);
}

double rel(const Matrix& got, const Matrix& want) {
  return norm2(got - want) / (1.0 + norm2(want));
}

// X transformation law under S, T: X' = S^{-1} X T^{-*}.
void similarity_checks(const DssFactorization& dss, std::mt19937_64& rng,
                       SeedOutcome& o) {
  const Eigen::Index nv = dss.V.A.rows(), nw = dss.W.A.rows();
  if (nv == 0 || nw == 0) return;
  const Matrix s =
      identity(nv) + Real(0.3 / std::sqrt(double(nv))) * gaussian(rng, nv, nv);
  const Matrix t =
      identity(nw) + Real(0.3 / std::sqrt(double(nw))) * gaussian(rng, nw, nw);
  const BiInnerRealization v1 = transform(dss.V, s);
  const BiInnerRealization w1 = transform(dss.W, t);
  const Matrix x1 = solve_stein(v1.A, w1.A.adjoint(), v1.B * w1.B.adjoint());
  o.similarity =
      rel(x1, checked_inverse(s, "S") * dss.X *
                  checked_inverse(t, "T").adjoint());

  // Unitary coordinates keep the realizations unitary, so the Toeplitz
  // route applies to the transformed pair as well.
  const Matrix su = random_unitary(rng, nv);
  const Matrix tu = random_unitary(rng, nw);
  const Matrix x2 = coupling_via_toeplitz(transform(dss.V, su),
                                          transform(dss.W, tu),
                                          dss.xi.realization());
  o.unitary_similarity = rel(x2, su.adjoint() * dss.X * tu);
}

void twist_check(const PipelineResult& res, std::mt19937_64& rng,
                 SeedOutcome& o) {
  const Eigen::Index m = res.xi_reduced.m();
  DssOptions opt;
  const Matrix u = random_unitary(rng, m);
  opt.completion_twist = u;
  const DssFactorization twisted =
      dss_factorize(res.xi_reduced, kDefaultTolerance, opt);
  const Complex z0 = std::polar(Real(1), Real(0.7));
  const Complex z1 = std::polar(Real(1), Real(-2.3));
  const auto v = res.dss.V.realization(), v1 = twisted.V.realization();
  const auto w = res.dss.W.realization(), w1 = twisted.W.realization();
  const Matrix recovered = checked_inverse(evaluate(v, z0), "V(z0)") *
                           evaluate(v1, z0);
  o.twist = std::max({isometry_defect(recovered),
                      norm2(evaluate(v, z1) * recovered - evaluate(v1, z1)),
                      norm2(evaluate(w, z1) * recovered - evaluate(w1, z1)),
                      norm2(evaluate(w, z0) * recovered - evaluate(w1, z0)),
                      twisted.product_residual});
}

SeedOutcome run_seed(std::uint64_t seed) {
  SeedOutcome o;
  o.seed = seed;
  try {
    const GeneratedProblem p = generate_problem(ensemble_spec(seed));
    PipelineOptions opt;
    opt.tol = kTol;
    const PipelineResult res = run_pipeline(p.realization, opt);
    o.indices_exact = res.indices == p.truth;
    o.got = to_string(res.indices);
    o.want = to_string(p.truth);
    o.spectral = res.outer.spectral_residual;
    o.xi_unitary = res.xi.unitarity_residual;
    o.dss_product = res.dss.product_residual;
    o.v_defect = res.dss.V.unitarity_defect();
    o.w_defect = res.dss.W.unitarity_defect();
    o.coupling = res.dss.coupling_identity_residual;
    const auto grab = [&](const char* name, std::optional<double>& slot,
                          bool& skipped) {
      const Check* c = res.report.find(name);
      if (!c || !c->applicable) {
        skipped = true;
        return;
      }
      slot = c->value;
    };
    grab("unitary_identity_1", o.id1, o.ids_skipped);
    grab("unitary_identity_2", o.id2, o.ids_skipped);
    grab("unitary_identity_3", o.id3, o.id3_skipped);
    o.winding = winding_number(p.realization, 4096);
    o.index_sum = res.indices.total();
    o.controllable = controllability_observability(res.dss, kTol).passed;
    std::mt19937_64 rng(seed * 31 + 7);
    similarity_checks(res.dss, rng, o);
    twist_check(res, rng, o);
  } catch (const std::exception& e) {
    o.error = e.what();
  }
  return o;
}

bool g_all_passed = true;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::cout << "criterion " << id << ": " << (ok ? "PASS" : "FAIL") << "  "
            << what;
  if (!detail.empty()) std::cout << "  [" << detail << "]";
  std::cout << std::endl;
  g_all_passed = g_all_passed && ok;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

int cli_exit(const std::string& args) {
  const std::string cmd = std::string(WHF_CLI_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Matrix one(Complex v) { return Matrix::Constant(1, 1, v); }

}  // namespace

int main() {
  // Ensemble, in parallel.
  std::vector<SeedOutcome> outcomes(kEnsembleSize);
  const auto start = std::chrono::steady_clock::now();
  {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int i = next++; i < kEnsembleSize; i = next++) {
        outcomes[i] = run_seed(static_cast<std::uint64_t>(i + 1));
      }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < std::min(hw, 8u); ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  for (const SeedOutcome& o : outcomes) {
    if (!o.error.empty()) {
      std::cout << "  seed " << o.seed << " raised: " << o.error << '\n';
    } else if (!o.indices_exact) {
      std::cout << "  seed " << o.seed << " got " << o.got << " want " << o.want
                << '\n';
    }
  }

  // 1. Index recovery.
  {
    int exact = 0;
    for (const auto& o : outcomes) exact += o.error.empty() && o.indices_exact;
    report(1, exact == kEnsembleSize && seconds < 60.0,
           "index recovery on the 100-seed ensemble",
           std::to_string(exact) + "/100 exact, ensemble wall time " +
               sci(seconds) + " s");
  }

  // 2. Worked scalar pipelines.
  {
    bool ok = true;
    std::ostringstream d;
    const auto z = TwoSidedRealization::plus_only(one(0.0), one(0.0), one(1.0),
                                                  one(1.0));
    const auto zinv = TwoSidedRealization::minus_only(one(0.0), one(0.0),
                                                      one(1.0), one(1.0));
    const auto two_z = TwoSidedRealization::plus_only(one(2.0), one(0.0),
                                                      one(1.0), one(1.0));
    const auto eye = TwoSidedRealization::constant(identity(3));
    try {
      const auto rz = run_pipeline(z);
      const auto rzinv = run_pipeline(zinv);
      const auto r2 = run_pipeline(two_z);
      const auto ri = run_pipeline(eye);
      ok = ok && rz.indices == WienerHopfIndices::from_list({1});
      ok = ok && rzinv.indices == WienerHopfIndices::from_list({-1});
      ok = ok && r2.indices == WienerHopfIndices::from_list({0});
      ok = ok && ri.indices == WienerHopfIndices::from_list({0, 0, 0});
      const auto& dare = r2.outer.dare;
      const double eq = std::abs(static_cast<double>(dare.Q(0, 0).real()) - 1.0) +
                        std::abs(static_cast<double>(dare.Q(0, 0).imag()));
      const double ed = static_cast<double>(std::abs(dare.D(0, 0) - Complex(2.0)));
      const double ea = static_cast<double>(std::abs(dare.A0(0, 0) - Complex(-0.5)));
      ok = ok && eq <= 1e-12 && ed <= 1e-12 && ea <= 1e-12;
      ok = ok && rz.report.all_passed() && rzinv.report.all_passed() &&
           r2.report.all_passed() && ri.report.all_passed();
      d << "z " << to_string(rz.indices) << ", 1/z " << to_string(rzinv.indices)
        << ", 2+z " << to_string(r2.indices) << ", I3 " << to_string(ri.indices)
        << "; |Q-1| " << sci(eq) << " |D-2| " << sci(ed) << " |A0+1/2| "
        << sci(ea);
    } catch (const std::exception& e) {
      ok = false;
      d << e.what();
    }
    report(2, ok, "worked scalar pipelines", d.str());
  }

  const auto worst = [&](auto get) {
    double w = 0.0;
    for (const auto& o : outcomes) {
      if (o.error.empty()) w = std::max(w, get(o));
    }
    return w;
  };
  int failed_seeds = 0;
  for (const auto& o : outcomes) failed_seeds += !o.error.empty();
  const std::string ensemble_note =
      failed_seeds ? std::to_string(failed_seeds) + " seeds raised; " : "";

  // 3. Spectral factor identity.
  {
    const double w = worst([](const SeedOutcome& o) { return o.spectral; });
    report(3, failed_seeds == 0 && w <= 1e-9, "spectral-factor identity",
           ensemble_note + "max " + sci(w));
  }

  // 4. Unitarity.
  {
    const double xi = worst([](const SeedOutcome& o) { return o.xi_unitary; });
    const double prod = worst([](const SeedOutcome& o) { return o.dss_product; });
    const double vw = worst([](const SeedOutcome& o) {
      return std::max(o.v_defect, o.w_defect);
    });
    report(4, failed_seeds == 0 && xi <= 1e-9 && prod <= 1e-9 && vw <= 1e-9,
           "unitarity of Xi, Xi = V W^*, unitary system matrices",
           ensemble_note + "Xi " + sci(xi) + ", VW^* " + sci(prod) + ", V/W " +
               sci(vw));
  }

  // 5. P0^{-1} P1 = X.
  {
    int applicable = 0;
    double w = 0.0;
    for (const auto& o : outcomes) {
      if (o.error.empty() && o.coupling) {
        ++applicable;
        w = std::max(w, *o.coupling);
      }
    }
    report(5, failed_seeds == 0 && w <= 1e-9,
           "coupling matrix from the gramians equals the Stein solution",
           ensemble_note + std::to_string(applicable) + " applicable, max " +
               sci(w));
  }

  // 6. Unitarity identities.
  {
    int skipped3 = 0, skipped_all = 0;
    double w = 0.0;
    for (const auto& o : outcomes) {
      if (!o.error.empty()) continue;
      skipped_all += o.ids_skipped;
      skipped3 += o.id3_skipped;
      for (const auto& v : {o.id1, o.id2, o.id3}) {
        if (v) w = std::max(w, *v);
      }
    }
    report(6, failed_seeds == 0 && w <= 1e-9, "three unitarity identities",
           ensemble_note + "max " + sci(w) + ", third n/a on " +
               std::to_string(skipped3) + ", spectra not disjoint on " +
               std::to_string(skipped_all));
  }

  // 7. Winding sum rule at 4096 samples.
  {
    int mismatches = 0;
    for (const auto& o : outcomes) {
      if (o.error.empty() && o.winding != o.index_sum) ++mismatches;
    }
    bool worked_ok = true;
    const std::vector<std::pair<TwoSidedRealization, int>> worked = {
        {TwoSidedRealization::plus_only(one(0.0), one(0.0), one(1.0), one(1.0)), 1},
        {TwoSidedRealization::minus_only(one(0.0), one(0.0), one(1.0), one(1.0)), -1},
        {TwoSidedRealization::plus_only(one(2.0), one(0.0), one(1.0), one(1.0)), 0},
        {TwoSidedRealization::constant(identity(3)), 0}};
    for (const auto& [r, total] : worked) {
      try {
        const auto [w, rep] = indices_of(r);
        worked_ok = worked_ok && winding_number(r, 4096) == w.total() &&
                    w.total() == total;
      } catch (const std::exception&) {
        worked_ok = false;
      }
    }
    report(7, failed_seeds == 0 && mismatches == 0 && worked_ok,
           "winding sum rule",
           ensemble_note + std::to_string(mismatches) +
               " ensemble mismatches, worked cases " +
               (worked_ok ? "agree" : "disagree"));
  }

  // 8. Coupling realization and change of coordinates.
  {
    int uncontrollable = 0;
    for (const auto& o : outcomes) {
      if (o.error.empty() && !o.controllable) ++uncontrollable;
    }
    const double sim = worst([](const SeedOutcome& o) { return o.similarity; });
    const double usim =
        worst([](const SeedOutcome& o) { return o.unitary_similarity; });
    const double tw = worst([](const SeedOutcome& o) { return o.twist; });
    report(8,
           failed_seeds == 0 && uncontrollable == 0 && sim <= 1e-9 &&
               usim <= 1e-9 && tw <= 1e-9,
           "minimal coupling realization, X transformation law, twist uniqueness",
           ensemble_note + std::to_string(uncontrollable) +
               " not minimal, similarity " + sci(sim) + ", unitary " +
               sci(usim) + ", twist " + sci(tw));
  }

  // 9. Negative controls.
  {
    bool ok = true;
    std::ostringstream d;
    const auto one_plus_z = TwoSidedRealization::plus_only(
        one(1.0), one(0.0), one(1.0), one(1.0));
    const auto unstable = TwoSidedRealization::plus_only(
        one(1.0), one(1.0), one(1.0), one(1.0));
    const ErrorCode dare_code =
        code_of([&] { solve_dare(product_data(one_plus_z)); });
    ok = ok && (dare_code == ErrorCode::kIndefiniteSchurComplement ||
                dare_code == ErrorCode::kNotStabilizable);
    std::string stage;
    try {
      run_pipeline(one_plus_z);
    } catch (const Error& e) {
      stage = e.stage();
    }
    ok = ok && stage == "solve_dare";
    const ErrorCode val_code = code_of([&] { validate(unstable); });
    ok = ok && val_code == ErrorCode::kUnstableStateMatrix;

    const fs::path dir = fs::temp_directory_path() / "whf_acceptance";
    fs::create_directories(dir);
    save_realization(dir / "one_plus_z.json", one_plus_z);
    save_realization(dir / "unstable.json", unstable);
    const int e1 = cli_exit("indices " + (dir / "one_plus_z.json").string());
    const int e2 = cli_exit("indices " + (dir / "unstable.json").string());
    fs::remove_all(dir);
    ok = ok && e1 == 3 && e2 == 2;
    d << "1+z: " << to_string(dare_code) << " at " << stage << ", exit " << e1
      << "; rho=1: " << to_string(val_code) << ", exit " << e2;
    report(9, ok, "negative controls", d.str());
  }

  std::cout << (g_all_passed ? "all criteria passed" : "some criteria failed")
            << std::endl;
  return g_all_passed ? 0 : 1;
}
