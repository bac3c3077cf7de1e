// Command-line front end: solve / verify / normalize for packing-covering
// SDP instances. Exit codes: 0 success, 1 usage, 2 validation, 3 certificate
// failure, 4 numerical failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcsdp/instance_io.hpp"
#include "pcsdp/log_potential.hpp"
#include "pcsdp/mwu.hpp"
#include "pcsdp/verification.hpp"

namespace {

using nlohmann::json;
using namespace pcsdp;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << text;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json normalized_json(const NormalizedInstance& norm) {
  json doc;
  doc["variant"] = norm.variant == Variant::TypeI ? "type1" : "type2";
  doc["dim"] = norm.dim;
  if (!norm.family.is_robust()) {
    json mats = json::array();
    for (const SymMat& a : norm.matrices()) mats.push_back(matrix_json(a.mat()));
    doc["matrices"] = std::move(mats);
  } else {
    doc["robust_family_size"] = norm.family.size();
  }
  doc["initial_support"] = norm.initial_support;
  json record;
  record["L"] = matrix_json(norm.record.L);
  record["D"] = vector_json(norm.record.D_delta);
  record["positive_columns"] = norm.record.positive_columns;
  record["delta"] = norm.record.delta;
  record["kept_constraints"] = norm.record.kept_constraints;
  record["shift"] = norm.record.shift;
  record["beta_prime"] = norm.record.beta_prime;
  record["eps"] = norm.record.eps;
  record["scale_b"] = vector_json(norm.record.scale_b);
  json witnesses = json::array();
  for (const DropWitness& w : norm.record.drop_witnesses) {
    witnesses.push_back({{"index", w.index},
                         {"x", vector_json(w.x)},
                         {"quad", w.quad}});
  }
  record["drop_witnesses"] = std::move(witnesses);
  doc["record"] = std::move(record);
  doc["warnings"] = norm.warnings;
  return doc;
}

void write_log_trace(const PotentialTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open trace file: " + path);
  for (const TraceRecord& rec : trace.records) {
    json line = {{"t", rec.t},         {"s", rec.s},
                 {"eps_s", rec.eps_s}, {"theta", rec.theta},
                 {"nu", rec.nu},       {"oracle_index", rec.oracle_index},
                 {"phi", rec.phi}};
    out << line.dump() << "\n";
  }
}

void write_mwu_trace(const MwuTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open trace file: " + path);
  for (const MwuTraceRecord& rec : trace.records) {
    json line = {{"t", rec.t},
                 {"M", rec.M},
                 {"L_running", rec.L_running},
                 {"delta", rec.delta},
                 {"oracle_index", rec.oracle_index}};
    out << line.dump() << "\n";
  }
}

// Dual weights reported to the user are for the original right-hand side:
// y_i = u_i / b_i for the internal (b = 1) weights u.
void unscale_duals(PrimalDualPair& pair, const Vector& original_b) {
  std::map<int, double> unscaled;
  for (const auto& [idx, w] : pair.yhat) unscaled[idx] = w / original_b[idx];
  pair.yhat = std::move(unscaled);
  for (DualAtom& atom : pair.dual_atoms) {
    atom.weight /= original_b[atom.index];
  }
}

PrimalDualPair rescale_duals(const PrimalDualPair& pair,
                             const Vector& original_b) {
  PrimalDualPair scaled = pair;
  scaled.yhat.clear();
  for (const auto& [idx, w] : pair.yhat) {
    scaled.yhat[idx] = w * original_b[idx];
  }
  for (DualAtom& atom : scaled.dual_atoms) {
    atom.weight *= original_b[atom.index];
  }
  return scaled;
}

int run_solve(const std::string& input, const std::string& output,
              double eps, const std::string& solver, std::uint64_t seed,
              const std::string& trace_path, bool dense_init,
              const std::string& theta_mode) {
  PackCoverInstance instance = load_instance(read_file(input));

  if (solver == "mwu" && instance.variant != Variant::TypeII) {
    std::cerr << "error: the MWU solver handles type2 instances only\n";
    return 1;
  }

  NormalizedInstance norm;
  if (instance.variant == Variant::TypeI) {
    norm = normalize_type1(instance, eps);
  } else if (!instance.constraints.is_robust()) {
    norm = normalize_type2(instance, eps, seed);
  } else {
    norm = normalize_passthrough(instance);
  }
  for (const std::string& w : norm.warnings) std::cerr << "warning: " << w << "\n";

  PrimalDualPair pair;
  if (solver == "mwu") {
    MwuResult result = solve_mwu(norm, eps);
    pair = std::move(result.pair);
    if (!trace_path.empty()) write_mwu_trace(result.trace, trace_path);
  } else {
    SolverConfig config;
    config.eps = eps;
    config.seed = seed;
    config.dense_init = dense_init;
    config.theta_strategy = theta_mode == "direct" ? ThetaStrategy::DirectRoot
                                                   : ThetaStrategy::BinarySearch;
    config.compute_phi = !trace_path.empty();
    SolveResult result = solve(norm, config);
    pair = std::move(result.pair);
    if (!trace_path.empty()) write_log_trace(result.trace, trace_path);
  }

  // Pull the solution back to the original instance.
  auto [x, y] = instance.variant == Variant::TypeI
                    ? pull_back_type1(norm.record, pair.Xhat, pair.yhat)
                    : pull_back_type2(norm.record, pair.Xhat, pair.yhat,
                                      norm.record.drop_witnesses);
  pair.Xhat = std::move(x);
  pair.yhat = std::move(y);
  pair.primal_objective = instance.C.dot(pair.Xhat);
  pair.dual_objective = 0.0;
  for (const auto& [idx, w] : pair.yhat) pair.dual_objective += w;

  Certificate cert = certify(instance, pair, eps, &norm.record);

  const double e = pair.eps_final;
  if (pair.solver == SolverKind::Mwu) {
    const double ratio = std::log1p(e) / e - e;
    std::cerr << "realized guarantee: primal/dual <= " << 1.0 / ratio
              << " (MWU ratio bound " << ratio << " at eps " << e << ")\n";
  } else if (pair.variant == Variant::TypeI) {
    const double c = (1.0 - e) / (1.0 + e);
    std::cerr << "realized guarantee: primal/dual >= " << c * c
              << " at working eps " << e << "\n";
  } else {
    const double c = (1.0 + e) / ((1.0 - 2.0 * e) * (1.0 - 2.0 * e));
    std::cerr << "realized guarantee: primal/dual <= " << c
              << " at working eps " << e << "\n";
  }
  std::cerr << "iterations " << pair.iterations << ", phases " << pair.phases
            << ", support " << pair.support_size() << ", gap "
            << cert.gap_ratio << "\n";

  unscale_duals(pair, instance.original_b);
  SolutionCertSummary summary{cert.max_primal_violation,
                              cert.dual_extreme_eig, cert.gap_ratio};
  write_output(save_solution(pair, summary), output);

  if (!cert.pass()) {
    std::cerr << "error: certificate failed (violation "
              << cert.max_primal_violation << ", residual "
              << cert.dual_spectral_residual << ", gap " << cert.gap_ratio
              << ")\n";
    return 3;
  }
  return 0;
}

int run_verify(const std::string& input, const std::string& solution_path,
               const std::string& output, double eps) {
  PackCoverInstance instance = load_instance(read_file(input));
  PrimalDualPair pair = parse_solution(read_file(solution_path));
  PrimalDualPair internal = rescale_duals(pair, instance.original_b);
  internal.dual_objective = 0.0;
  for (const auto& [idx, w] : internal.yhat) internal.dual_objective += w;

  // Solutions arrive through the normalization pipeline; widen the gap
  // window by its worst-case losses. Feasibility stays at 1e-7 regardless.
  TransformRecord surrogate;
  surrogate.kind = internal.variant;
  surrogate.eps = eps;
  surrogate.shift = internal.variant == Variant::TypeII ? 1.0 : 0.0;
  Certificate cert = certify(instance, internal, eps, &surrogate);
  json doc = {{"max_primal_violation", cert.max_primal_violation},
              {"dual_spectral_residual", cert.dual_spectral_residual},
              {"dual_extreme_eig", cert.dual_extreme_eig},
              {"gap_ratio", cert.gap_ratio},
              {"support_size", cert.support_size},
              {"iter_bound_satisfied", cert.iter_bound_satisfied},
              {"feasibility_pass", cert.feasibility_pass},
              {"gap_pass", cert.gap_pass},
              {"pass", cert.pass()}};
  write_output(doc.dump(2) + "\n", output);
  return cert.pass() ? 0 : 3;
}

int run_normalize(const std::string& input, const std::string& output,
                  double eps, std::uint64_t seed) {
  PackCoverInstance instance = load_instance(read_file(input));
  NormalizedInstance norm;
  if (instance.variant == Variant::TypeI) {
    norm = normalize_type1(instance, eps);
  } else if (!instance.constraints.is_robust()) {
    norm = normalize_type2(instance, eps, seed);
  } else {
    norm = normalize_passthrough(instance);
  }
  write_output(normalized_json(norm).dump(2) + "\n", output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"packing/covering SDP solver with sparse duals"};
  app.require_subcommand(1);

  std::string input, output, solution, trace;
  double eps = 0.1;
  std::string solver = "log";
  std::string theta_mode = "grid";
  std::uint64_t seed = 0;
  bool dense_init = false;

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve an instance");
  solve_cmd->add_option("--input", input, "instance JSON")->required();
  solve_cmd->add_option("--output", output, "solution JSON path");
  solve_cmd->add_option("--eps", eps, "target accuracy in (0, 0.5)");
  solve_cmd->add_option("--solver", solver, "log | mwu")
      ->check(CLI::IsMember({"log", "mwu"}));
  solve_cmd->add_option("--theta", theta_mode, "grid | direct root finding")
      ->check(CLI::IsMember({"grid", "direct"}));
  solve_cmd->add_option("--seed", seed, "64-bit seed");
  solve_cmd->add_option("--trace", trace, "iteration trace path (NDJSON)");
  solve_cmd->add_flag("--dense-init", dense_init,
                      "uniform dual start over all constraints");

  CLI::App* verify_cmd = app.add_subcommand("verify", "check a solution");
  verify_cmd->add_option("--input", input, "instance JSON")->required();
  verify_cmd->add_option("--solution", solution, "solution JSON")->required();
  verify_cmd->add_option("--output", output, "certificate JSON path");
  verify_cmd->add_option("--eps", eps, "accuracy the solution targets");

  CLI::App* norm_cmd = app.add_subcommand("normalize", "emit normalized form");
  norm_cmd->add_option("--input", input, "instance JSON")->required();
  norm_cmd->add_option("--output", output, "normalized JSON path");
  norm_cmd->add_option("--eps", eps, "target accuracy in (0, 0.5)");
  norm_cmd->add_option("--seed", seed, "64-bit seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (!(eps > 0.0 && eps < 0.5)) {
    std::cerr << "error: eps must lie in (0, 0.5)\n";
    return 1;
  }

  try {
    if (solve_cmd->parsed()) {
      return run_solve(input, output, eps, solver, seed, trace, dense_init,
                       theta_mode);
    }
    if (verify_cmd->parsed()) {
      return run_verify(input, solution, output, eps);
    }
    return run_normalize(input, output, eps, seed);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidMatrix& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NotPSD& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidUncertaintySet& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EmptyFamily& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const AssumptionB1Violated& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EmptyAfterSupportFilter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const TooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
