#include "whf/cli.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "whf/errors.h"
#include "whf/indices.h"
#include "whf/json_io.h"
#include "whf/testgen.h"

namespace fs = std::filesystem;

namespace whf {

namespace {

struct RunConfig {
  double tolerance = kDefaultTolerance;
  int samples = 1024;
  bool json = false;
  int jobs = 1;
};

void check_config(const RunConfig& cfg) {
  if (!(cfg.tolerance > 0.0 && cfg.tolerance < 1e-2)) {
    throw Error(ErrorCode::kInvalidArgument, "--tol must lie in (0, 1e-2)");
  }
  if (cfg.samples < 256) {
    throw Error(ErrorCode::kInvalidArgument, "--samples must be >= 256");
  }
  if (cfg.jobs < 1) {
    throw Error(ErrorCode::kInvalidArgument, "--jobs must be positive");
  }
}

int exit_code_for(const Error& e) {
  return is_validation_error(e.code()) ? kExitValidation : kExitNumerical;
}

int exit_code_for(const VerificationReport& rep) {
  if (!rep.all_passed()) return kExitNumerical;
  if (!rep.flags.empty()) return kExitFlagged;
  return kExitClean;
}

Json error_json(const Error& e) {
  Json j;
  j["error"] = std::string(to_string(e.code()));
  j["stage"] = e.stage();
  j["message"] = e.detail();
  return j;
}

PipelineOptions pipeline_options(const RunConfig& cfg, bool full) {
  PipelineOptions opt;
  opt.tol = cfg.tolerance;
  opt.samples = cfg.samples;
  opt.full_verification = full;
  return opt;
}

Json result_json(const PipelineResult& res, const RunConfig& cfg) {
  Json j = indices_to_json(res.indices);
  j["winding"] = res.report.winding;
  j["flags"] = res.report.flags;
  j["residuals"] = report_residuals(res.report);
  j["tolerance"] = cfg.tolerance;
  j["samples"] = cfg.samples;
  return j;
}

std::string format_list(const std::vector<int>& v) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << "]";
  return os.str();
}

void print_result(std::ostream& out, const PipelineResult& res,
                  const RunConfig& cfg) {
  if (cfg.json) {
    out << result_json(res, cfg).dump() << '\n';
    return;
  }
  const WienerHopfIndices& w = res.indices;
  out << "indices    " << to_string(w) << '\n'
      << "negatives  " << format_list(w.negatives) << '\n'
      << "zeros      " << w.zeros << '\n'
      << "positives  " << format_list(w.positives) << '\n'
      << "winding    " << res.report.winding << '\n'
      << "tolerance  " << cfg.tolerance << '\n';
  out << "flags      ";
  if (res.report.flags.empty()) out << "none";
  for (std::size_t i = 0; i < res.report.flags.size(); ++i) {
    out << (i ? ", " : "") << res.report.flags[i];
  }
  out << '\n';
  for (const Check& c : res.report.checks) {
    if (c.applicable && !c.passed) {
      out << "FAILED     " << c.name << " = " << c.value << " > "
          << c.threshold << '\n';
    }
  }
}

void print_error(std::ostream& out, std::ostream& err, const Error& e,
                 const RunConfig& cfg) {
  if (cfg.json) out << error_json(e).dump() << '\n';
  err << "error: " << e.what() << '\n';
}

int indices_one(const fs::path& file, const RunConfig& cfg, std::ostream& out,
                std::ostream& err) {
  try {
    const TwoSidedRealization r = load_realization(file);
    const PipelineResult res = run_pipeline(r, pipeline_options(cfg, false));
    print_result(out, res, cfg);
    return exit_code_for(res.report);
  } catch (const Error& e) {
    print_error(out, err, e, cfg);
    return exit_code_for(e);
  }
}

int cmd_indices(const fs::path& path, const RunConfig& cfg, std::ostream& out,
                std::ostream& err) {
  if (!fs::is_directory(path)) return indices_one(path, cfg, out, err);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    const fs::path& p = entry.path();
    if (entry.is_regular_file() && p.extension() == ".json" &&
        p.filename() != "truth.json" &&
        p.filename().string().find(".truth.") == std::string::npos) {
      files.push_back(p);
    }
  }
  std::sort(files.begin(), files.end());

  // One pipeline per worker; outputs are buffered per file and printed in
  // directory order.
  std::vector<std::string> outs(files.size()), errs(files.size());
  std::vector<int> codes(files.size(), kExitClean);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      std::ostringstream o, e;
      codes[i] = indices_one(files[i], cfg, o, e);
      outs[i] = o.str();
      errs[i] = e.str();
    }
  };
  const int jobs =
      std::max(1, std::min<int>(cfg.jobs, static_cast<int>(files.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int worst = kExitClean;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (cfg.json) {
      out << "{\"file\":" << Json(files[i].filename().string()).dump()
          << ",\"exit\":" << codes[i] << ",\"result\":";
      std::string body = outs[i];
      while (!body.empty() && body.back() == '\n') body.pop_back();
      out << (body.empty() ? "null" : body) << "}\n";
    } else {
      out << "== " << files[i].filename().string() << " (exit " << codes[i]
          << ")\n"
          << outs[i];
    }
    err << errs[i];
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

Json with_residuals(Json j, Json residuals) {
  j["residuals"] = std::move(residuals);
  return j;
}

int cmd_factor(const fs::path& file, const fs::path& dir, const RunConfig& cfg,
               std::ostream& out, std::ostream& err) {
  try {
    const TwoSidedRealization r = load_realization(file);
    const PipelineResult res = run_pipeline(r, pipeline_options(cfg, true));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "cannot create output directory " + dir.string());
    }
    auto residual = [&](const char* name) -> Json {
      const Check* c = res.report.find(name);
      if (!c || !c->applicable) return nullptr;
      return c->value;
    };

    const OuterFactor& o = res.outer;
    Json psi = realization_to_json(o.psi());
    psi["D"] = matrix_to_json(o.D);
    psi["C0"] = matrix_to_json(o.C0);
    psi["B0"] = matrix_to_json(o.B0);
    psi["A0"] = matrix_to_json(o.A0);
    psi["Q"] = matrix_to_json(o.dare.Q);
    psi["inverse"] = realization_to_json(o.psi_inverse());
    write_json_file(dir / "psi.json",
                    with_residuals(psi, {{"spectral_factor", residual("spectral_factor")},
                                         {"outer_inverse", residual("outer_inverse")},
                                         {"riccati", o.dare.residual},
                                         {"stein_rewrite", o.dare.stein_residual},
                                         {"rho_A0", o.dare.rho_A0}}));

    const UnitaryFactorRealization& xr = res.xi_reduced;
    Json xi = realization_to_json(xr.realization());
    xi["D"] = matrix_to_json(xr.D);
    if (xr.reduction) {
      const ReductionLog& log = *xr.reduction;
      xi["reduction"] = {{"plus_before", log.plus_before},
                         {"plus_after", log.plus_after},
                         {"minus_before", log.minus_before},
                         {"minus_after", log.minus_after}};
    }
    write_json_file(dir / "xi.json",
                    with_residuals(xi, {{"xi_unitary", residual("xi_unitary")},
                                        {"xi_product", residual("xi_product")},
                                        {"reduction_preserves_xi",
                                         residual("reduction_preserves_xi")}}));

    const DssFactorization& dss = res.dss;
    write_json_file(
        dir / "v.json",
        with_residuals(bi_inner_to_json(dss.V),
                       {{"unitarity_defect", dss.V.unitarity_defect()},
                        {"spectral_radius", spectral_radius(dss.V.A)}}));
    Json w = bi_inner_to_json(dss.W);
    w["route"] = std::string(to_string(dss.route));
    write_json_file(
        dir / "w.json",
        with_residuals(w, {{"unitarity_defect", dss.W.unitarity_defect()},
                           {"spectral_radius", spectral_radius(dss.W.A)},
                           {"dss_product", residual("dss_product")}}));

    Json x;
    x["X"] = matrix_to_json(dss.X);
    x["X_original"] = matrix_to_json(dss.X_original);
    x["P0"] = matrix_to_json(dss.P0);
    x["P1"] = dss.P1 ? matrix_to_json(*dss.P1) : Json(nullptr);
    x["S"] = matrix_to_json(dss.S);
    x["T"] = matrix_to_json(dss.T);
    write_json_file(
        dir / "x.json",
        with_residuals(x, {{"x_stein", residual("x_stein")},
                           {"x_coupling_identity",
                            residual("x_coupling_identity")}}));

    if (cfg.json) {
      Json j = result_json(res, cfg);
      j["out"] = dir.string();
      out << j.dump() << '\n';
    } else {
      print_result(out, res, cfg);
      out << "wrote      psi.json xi.json v.json w.json x.json to "
          << dir.string() << '\n';
    }
    return exit_code_for(res.report);
  } catch (const Error& e) {
    print_error(out, err, e, cfg);
    return exit_code_for(e);
  }
}

int cmd_verify(const fs::path& file, const std::string& factors,
               const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const TwoSidedRealization r = load_realization(file);
    PipelineResult res =
        run_pipeline(r, pipeline_options(cfg, factors.empty()));
    if (!factors.empty()) {
      const Json x = read_json_file(fs::path(factors) / "x.json");
      if (!x.contains("X")) {
        throw Error(ErrorCode::kParseError, "x.json has no field \"X\"");
      }
      res.dss.X = matrix_from_json(x["X"], res.dss.V.A.rows(),
                                   res.dss.W.A.rows(), "x.json X");
      try {
        verify_factorization(res, res.report, cfg.tolerance);
      } catch (const Error& e) {
        if (!e.stage().empty()) throw;
        throw e.with_stage("verify");
      }
    }
    const VerificationReport& rep = res.report;
    if (cfg.json) {
      Json checks = Json::array();
      for (const Check& c : rep.checks) {
        Json jc;
        jc["name"] = c.name;
        jc["stage"] = c.stage;
        jc["value"] = c.applicable ? Json(c.value) : Json(nullptr);
        jc["threshold"] = c.threshold;
        jc["status"] = !c.applicable ? "n/a" : (c.passed ? "pass" : "fail");
        if (!c.note.empty()) jc["note"] = c.note;
        checks.push_back(std::move(jc));
      }
      Json j = result_json(res, cfg);
      j["checks"] = std::move(checks);
      j["passed"] = rep.all_passed();
      out << j.dump() << '\n';
    } else {
      out << std::left << std::setw(32) << "check" << std::setw(14) << "value"
          << std::setw(14) << "threshold" << "status\n";
      for (const Check& c : rep.checks) {
        std::ostringstream value;
        if (c.applicable) value << std::setprecision(3) << c.value;
        else value << "-";
        std::ostringstream threshold;
        threshold << std::setprecision(3) << c.threshold;
        out << std::left << std::setw(32) << c.name << std::setw(14)
            << value.str() << std::setw(14) << threshold.str()
            << (!c.applicable ? "n/a" : (c.passed ? "pass" : "FAIL"));
        if (!c.note.empty()) out << "  (" << c.note << ")";
        out << '\n';
      }
      out << "indices " << to_string(res.indices) << ", winding "
          << rep.winding << '\n';
      out << (rep.all_passed() ? "all checks passed" : "verification failed")
          << '\n';
    }
    return exit_code_for(rep);
  } catch (const Error& e) {
    print_error(out, err, e, cfg);
    return exit_code_for(e);
  }
}

std::vector<int> parse_index_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--indices: '" + item + "' is not an integer");
    }
    out.push_back(value);
  }
  return out;
}

int cmd_generate(const ProblemSpec& spec, const std::string& indices,
                 const fs::path& dir, const RunConfig& cfg, std::ostream& out,
                 std::ostream& err) {
  try {
    ProblemSpec s = spec;
    s.indices = parse_index_list(indices);
    const GeneratedProblem g = generate_problem(s);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "cannot create output directory " + dir.string());
    }
    save_realization(dir / "problem.json", g.realization);
    Json truth;
    truth["indices"] = g.truth.sorted();
    write_json_file(dir / "truth.json", truth);
    if (cfg.json) {
      Json j;
      j["problem"] = (dir / "problem.json").string();
      j["truth"] = (dir / "truth.json").string();
      j["indices"] = g.truth.sorted();
      j["n_plus"] = g.realization.n_plus();
      j["n_minus"] = g.realization.n_minus();
      out << j.dump() << '\n';
    } else {
      out << "wrote " << (dir / "problem.json").string() << " and "
          << (dir / "truth.json").string() << '\n';
    }
    return kExitClean;
  } catch (const Error& e) {
    print_error(out, err, e, cfg);
    return exit_code_for(e);
  }
}

int cmd_winding(const fs::path& file, const RunConfig& cfg, std::ostream& out,
                std::ostream& err) {
  try {
    const TwoSidedRealization r = load_realization(file);
    validate(r, cfg.samples);
    const int w = winding_number(r, cfg.samples);
    if (cfg.json) {
      Json j;
      j["winding"] = w;
      j["samples"] = cfg.samples;
      out << j.dump() << '\n';
    } else {
      out << w << '\n';
    }
    return kExitClean;
  } catch (const Error& e) {
    print_error(out, err, e, cfg);
    return exit_code_for(e);
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Right Wiener-Hopf indices of rational matrix functions", "whf"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--tol", cfg.tolerance, "rank and reduction tolerance")
      ->capture_default_str();
  app.add_option("--samples", cfg.samples, "circle samples for det/winding")
      ->capture_default_str();
  app.add_flag("--json", cfg.json, "machine-readable output");
  app.add_option("--jobs", cfg.jobs, "parallel pipelines for a directory")
      ->capture_default_str();

  std::string file;
  auto* indices = app.add_subcommand("indices", "compute the indices");
  indices->add_option("file", file, "problem file or directory")->required();

  std::string factor_out;
  auto* factor = app.add_subcommand("factor", "export all factors");
  factor->add_option("file", file, "problem file")->required();
  factor->add_option("--out", factor_out, "output directory")->required();

  std::string factors_dir;
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("file", file, "problem file")->required();
  verify->add_option("--factors", factors_dir,
                     "re-check the coupling matrix stored in DIR/x.json");

  ProblemSpec spec;
  std::string index_text;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "write a random problem");
  generate->add_option("--m", spec.m, "size")->required();
  generate->add_option("--indices", index_text, "comma separated, e.g. -1,0,2")
      ->required()
      ->allow_extra_args(false);
  generate->add_option("--state-plus", spec.state_plus)->capture_default_str();
  generate->add_option("--state-minus", spec.state_minus)
      ->capture_default_str();
  generate->add_option("--seed", spec.seed)->capture_default_str();
  generate->add_option("--spectral-cap", spec.spectral_cap)
      ->capture_default_str();
  generate->add_option("--out", gen_out, "output directory")->required();

  auto* winding = app.add_subcommand("winding", "winding number of det R");
  winding->add_option("file", file, "problem file")->required();

  // Negative index lists such as "-1,0,2" must not be taken for flags.
  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i + 1] == "--indices" && !args[i].empty() && args[i][0] == '-') {
      args[i + 1] = "--indices=" + args[i];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }

  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitClean;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    check_config(cfg);
  } catch (const Error& e) {
    print_error(out, err, e, cfg);
    return kExitValidation;
  }

  if (*indices) return cmd_indices(file, cfg, out, err);
  if (*factor) return cmd_factor(file, factor_out, cfg, out, err);
  if (*verify) return cmd_verify(file, factors_dir, cfg, out, err);
  if (*generate) return cmd_generate(spec, index_text, gen_out, cfg, out, err);
  if (*winding) return cmd_winding(file, cfg, out, err);
  return kExitValidation;
}

}  // namespace whf
