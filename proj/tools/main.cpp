#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sparsesr/io.hpp"
#include "sparsesr/networks.hpp"
#include "sparsesr/solver.hpp"
#include "sparsesr/verify.hpp"

namespace fs = std::filesystem;
using namespace sparsesr;

namespace {

enum Exit : int {
  kValid = 0,
  kInvalid = 2,
  kNoMinimum = 3,
  kUsage = 64,
  kUnstable = 65,
  kFailure = 70,
};

struct SolverFlags {
  std::string mode = "newton";
  std::string step_rule = "backtracking";
  double w = 100.0;
  double eps = 1e-6;
  int starts = 50;
  std::uint64_t seed = 0;
  int max_iters = 500;
  double grad_tol = 1e-9;
  double max_w = 1e4;
  bool exact_hessian = false;
  bool omega_zero = false;
  int jobs = 0;

  SolverConfig config() const {
    SolverConfig c;
    c.mode = parse_descent_mode(mode);
    c.step_rule = parse_step_rule(step_rule);
    c.w = w;
    c.eps = eps;
    c.multistart_count = starts;
    c.seed = seed;
    c.max_iters = max_iters;
    c.grad_tol = grad_tol;
    c.continuation_max_w = max_w;
    c.exact_hessian = exact_hessian;
    c.omega_zero_mode = omega_zero;
    c.jobs = jobs;
    c.validate();
    return c;
  }
};

void add_solver_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("--mode", f.mode, "Descent direction")
      ->check(CLI::IsMember({"newton", "gradient"}))
      ->capture_default_str();
  app->add_option("--step-rule", f.step_rule, "Line search rule")
      ->check(CLI::IsMember({"backtracking", "armijo"}))
      ->capture_default_str();
  app->add_option("--w", f.w, "Penalty weight on forced-zero entries")->capture_default_str();
  app->add_option("--eps", f.eps, "Hessian regularization")->capture_default_str();
  app->add_option("--starts", f.starts, "Number of multistart initializers")->capture_default_str();
  app->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  app->add_option("--max-iters", f.max_iters, "Iteration cap per descent")->capture_default_str();
  app->add_option("--grad-tol", f.grad_tol, "Relative gradient tolerance")->capture_default_str();
  app->add_option("--max-w", f.max_w, "Largest penalty weight reached by continuation (<= w disables)")
      ->capture_default_str();
  app->add_flag("--exact-hessian", f.exact_hessian, "Use the full Hessian when it is positive definite");
  app->add_flag("--omega-zero", f.omega_zero, "Also search for real crossings at omega = 0");
  app->add_option("--jobs", f.jobs, "Worker threads (0: all cores)")->capture_default_str();
}

void add_threshold_flags(CLI::App* app, VerifyThresholds& t) {
  app->add_option("--stationarity-tol", t.stationarity, "Stationarity residual threshold")
      ->capture_default_str();
  app->add_option("--realness-tol", t.realness, "|Im(l^T x)| threshold")->capture_default_str();
  app->add_option("--alpha-tol", t.alpha, "Spectral abscissa threshold")->capture_default_str();
  app->add_option("--eig-tol", t.eig_tol_scale,
                  "Eigenvalue match tolerance relative to 1 + ||A(Delta)||_F")
      ->capture_default_str();
  app->add_option("--pd-tol", t.pd_tol, "Relative positivity margin for the projected Hessian")
      ->capture_default_str();
  app->add_option("--rank-tol", t.rank_tol, "Relative singular value cutoff for J_b")
      ->capture_default_str();
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

void write_manifest(const fs::path& dir, const std::string& subcommand,
                    const std::vector<std::string>& inputs, const std::vector<std::string>& args,
                    std::uint64_t seed, const KeyValues& settings) {
  nlohmann::ordered_json m;
  m["tool"] = "sparsesr";
  m["version"] = SPARSESR_VERSION;
  m["subcommand"] = subcommand;
  m["inputs"] = inputs;
  m["seed"] = seed;
  m["output_dir"] = dir.string();
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : settings) cfg[k] = v;
  m["config"] = cfg;
  m["args"] = args;
  write_text_file(dir / "manifest.json", m.dump(2) + "\n");
}

KeyValues solver_settings(const SolverFlags& f) {
  return {{"mode", f.mode},
          {"step_rule", f.step_rule},
          {"w", format_number(f.w)},
          {"eps", format_number(f.eps)},
          {"starts", std::to_string(f.starts)},
          {"max_iters", std::to_string(f.max_iters)},
          {"grad_tol", format_number(f.grad_tol)},
          {"max_w", format_number(f.max_w)},
          {"exact_hessian", f.exact_hessian ? "true" : "false"},
          {"omega_zero", f.omega_zero ? "true" : "false"},
          {"jobs", std::to_string(f.jobs)}};
}

template <typename Fn>
void write_stream(const fs::path& path, Fn&& fn) {
  std::ostringstream os;
  fn(os);
  write_text_file(path, os.str());
}

KeyValues result_summary(const SolveResult& r) {
  KeyValues kv{{"omega", format_number(r.omega)},
               {"delta_fnorm", format_number(r.fnorm)},
               {"delta_fnorm_sparse", format_number(r.fnorm_sparse)},
               {"sparsity_error", format_number(r.sparsity_error)},
               {"alpha", format_number(r.alpha)},
               {"alpha_sparse", format_number(r.alpha_sparse)},
               {"eig_residual", format_number(r.eig_residual)},
               {"cost", format_number(r.cost)},
               {"grad_norm", format_number(r.grad_norm)},
               {"final_w", format_number(r.final_weight)},
               {"columns", std::to_string(r.columns)},
               {"converged", r.converged ? "true" : "false"},
               {"valid_local_min", r.valid_local_min ? "true" : "false"},
               {"termination", to_string(r.termination)},
               {"iterations", std::to_string(r.iterations)},
               {"continuation_iterations", std::to_string(r.continuation_iterations)}};
  for (Eigen::Index i = 0; i < r.eigvec.size(); ++i) {
    kv.emplace_back("x" + std::to_string(i + 1),
                    format_number(r.eigvec(i).real()) + "," + format_number(r.eigvec(i).imag()));
  }
  for (Eigen::Index j = 0; j < r.delta_sparse.cols(); ++j) {
    for (Eigen::Index i = 0; i < r.delta_sparse.rows(); ++i) {
      kv.emplace_back("delta(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")",
                      format_number(r.delta_sparse(i, j)));
    }
  }
  return kv;
}

void write_report(const fs::path& path, const OptimalityReport& rep) {
  write_stream(path, [&](std::ostream& os) { write_key_values(os, rep.entries()); });
}

int cmd_solve(const std::string& problem, const SolverFlags& flags, const std::vector<double>& g0,
              std::optional<double> omega0, const fs::path& out,
              const std::vector<std::string>& args) {
  const ProblemInstance inst = load_problem(problem);
  const SolverConfig cfg = flags.config();
  write_manifest(out, "solve", {problem}, args, flags.seed, solver_settings(flags));

  std::vector<SolveResult> results;
  std::optional<std::size_t> best;
  KeyValues head;
  if (!g0.empty()) {
    const auto gv = Eigen::Map<const RealVector>(g0.data(), static_cast<Eigen::Index>(g0.size()));
    if (gv.size() == inst.m()) {
      results.push_back(solve_omega_zero(inst, cfg, gv));
    } else {
      if (!omega0) throw Error("--omega0 is required with a two-column --g0");
      results.push_back(solve(inst, cfg, gv, *omega0));
    }
    if (results[0].valid_local_min) best = 0;
    head.emplace_back("starts", "1");
  } else {
    MultistartResult ms = multistart(inst, cfg);
    head.emplace_back("starts", std::to_string(cfg.multistart_count));
    head.emplace_back("runs", std::to_string(ms.runs));
    head.emplace_back("failures", std::to_string(ms.failures.size()));
    for (const StartFailure& f : ms.failures) {
      std::cerr << "start " << f.start << ": " << f.message << "\n";
    }
    results = std::move(ms.distinct);
    best = ms.best;
  }
  head.emplace_back("distinct", std::to_string(results.size()));

  write_stream(out / "results.csv", [&](std::ostream& os) { write_results_csv(os, results); });

  int code = kValid;
  std::string status = "valid";
  if (!best) {
    const bool stationary_invalid = std::any_of(results.begin(), results.end(), [&](const auto& r) {
      return r.converged && !r.raw_valid;
    });
    code = stationary_invalid ? kInvalid : kNoMinimum;
    status = stationary_invalid ? "stationary point is not a valid local minimum"
                                : "no valid minimum";
  }
  head.emplace(head.begin(), "status", status);
  head.insert(head.begin() + 1, {"radius", best ? format_number(results[*best].fnorm_sparse)
                                                : std::string("inf")});

  // The reported point: the certified minimum, otherwise the lowest-norm result.
  const SolveResult* shown = best ? &results[*best] : (results.empty() ? nullptr : &results[0]);
  KeyValues summary = head;
  if (shown) {
    const KeyValues rs = result_summary(*shown);
    summary.insert(summary.end(), rs.begin(), rs.end());
    write_stream(out / "trace.csv", [&](std::ostream& os) { write_trace_csv(os, shown->trace); });
    write_text_file(out / "delta.json", delta_to_json(shown->delta_sparse));
    try {
      write_report(out / "report.txt", certify(inst, shown->delta, shown->omega));
    } catch (const NotBoundaryPointError& e) {
      write_text_file(out / "report.txt", std::string("error = ") + e.what() + "\n");
    }
  }
  write_stream(out / "summary.txt", [&](std::ostream& os) { write_key_values(os, summary); });

  if (code == kValid) {
    std::cerr << "r_C = " << format_number(results[*best].fnorm_sparse)
              << " at omega = " << format_number(results[*best].omega) << "\n";
  } else {
    std::cerr << status << "\n";
  }
  return code;
}

int cmd_verify(const std::string& problem, const std::string& delta_file, double omega,
               const VerifyThresholds& tol, bool no_sparsify, const fs::path& out,
               const std::vector<std::string>& args) {
  const ProblemInstance inst = load_problem(problem);
  const RealMatrix delta = load_delta(delta_file);
  if (delta.rows() != inst.m() || delta.cols() != inst.p()) {
    throw ParseError(delta_file + ": Delta is " + std::to_string(delta.rows()) + "x" +
                     std::to_string(delta.cols()) + ", expected " + std::to_string(inst.m()) +
                     "x" + std::to_string(inst.p()));
  }
  write_manifest(out, "verify", {problem, delta_file}, args, 0,
                 {{"omega", format_number(omega)},
                  {"stationarity_tol", format_number(tol.stationarity)},
                  {"realness_tol", format_number(tol.realness)},
                  {"alpha_tol", format_number(tol.alpha)},
                  {"eig_tol", format_number(tol.eig_tol_scale)},
                  {"pd_tol", format_number(tol.pd_tol)},
                  {"rank_tol", format_number(tol.rank_tol)},
                  {"sparsify", no_sparsify ? "false" : "true"}});
  try {
    const OptimalityReport rep = certify(inst, delta, omega, tol, !no_sparsify);
    write_report(out / "report.txt", rep);
    if (!rep.pass()) {
      std::cerr << "optimality checks failed\n";
      return kInvalid;
    }
    std::cerr << "all optimality checks passed\n";
    return kValid;
  } catch (const NotBoundaryPointError& e) {
    write_text_file(out / "report.txt", std::string("error = ") + e.what() + "\n");
    std::cerr << "not a boundary point: " << e.what() << "\n";
    return kInvalid;
  }
}

int cmd_sweep(const std::string& problem, const SolverFlags& flags,
              const std::vector<double>& weights, const fs::path& out,
              const std::vector<std::string>& args) {
  const ProblemInstance inst = load_problem(problem);
  const SolverConfig cfg = flags.config();
  KeyValues settings = solver_settings(flags);
  settings.emplace_back("weights", join(weights));
  write_manifest(out, "sweep-weights", {problem}, args, flags.seed, settings);
  const std::vector<SweepRow> rows = weight_sweep(inst, cfg, weights);
  write_stream(out / "sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, rows); });
  bool all = true;
  for (const SweepRow& r : rows) {
    if (!r.result) {
      all = false;
      std::cerr << "w = " << format_number(r.w) << ": " << r.error << "\n";
    }
  }
  return all ? kValid : kNoMinimum;
}

int cmd_spectral(const std::string& problem, double eta, const SamplingOptions& opts,
                 const fs::path& out, const std::vector<std::string>& args) {
  const ProblemInstance inst = load_problem(problem);
  write_manifest(out, "spectral-set", {problem}, args, opts.seed,
                 {{"eta", format_number(eta)},
                  {"strategy", to_string(opts.strategy)},
                  {"samples", std::to_string(opts.samples)},
                  {"jobs", std::to_string(opts.jobs)}});
  const SpectralCloud cloud = sample_spectral_set(inst, eta, opts);
  write_stream(out / "cloud.csv", [&](std::ostream& os) { write_cloud_csv(os, cloud); });
  write_stream(out / "summary.txt", [&](std::ostream& os) {
    write_key_values(os, {{"eta", format_number(eta)},
                          {"perturbations", std::to_string(cloud.perturbations)},
                          {"points", std::to_string(cloud.points.size())},
                          {"max_real", format_number(cloud.max_real())}});
  });
  return kValid;
}

int cmd_network(const std::string& topology, const NetworkSpec& base, const EdgePatternQuery& q,
                const std::string& entry_class, double tie_tol, const SolverFlags& flags,
                const fs::path& out, const std::vector<std::string>& args) {
  NetworkSpec spec = base;
  spec.topology = parse_topology(topology);
  EdgePatternQuery query = q;
  query.entry_class = parse_edge_class(entry_class);
  const SolverConfig cfg = flags.config();
  KeyValues settings = solver_settings(flags);
  settings.insert(settings.begin(),
                  {{"topology", topology},
                   {"nodes", std::to_string(spec.nodes)},
                   {"self_weight", format_number(spec.self_weight)},
                   {"edge_weight", format_number(spec.edge_weight)},
                   {"budget", std::to_string(query.budget)},
                   {"class", to_string(query.entry_class)},
                   {"tie_tol", format_number(tie_tol)}});
  write_manifest(out, "network", {}, args, flags.seed, settings);
  const std::vector<PatternResult> ranking = rank_critical_edges(spec, query, cfg, tie_tol);
  write_stream(out / "ranking.csv", [&](std::ostream& os) { write_ranking_csv(os, ranking); });
  for (const PatternResult& r : ranking) {
    if (!r.found()) std::cerr << format_entries(r.entries) << ": " << r.error << "\n";
  }
  if (ranking.empty() || !ranking.front().found()) {
    std::cerr << "no valid minimum for any pattern\n";
    return kNoMinimum;
  }
  std::cerr << "most critical: " << format_entries(ranking.front().entries)
            << " SR = " << format_number(ranking.front().sr) << "\n";
  return kValid;
}

int run(const std::vector<std::string>& args);

int cmd_replay(const std::string& manifest, const std::string& out_override) {
  const std::string text = read_text_file(manifest);
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest + ": " + e.what());
  }
  if (!m.contains("args") || !m["args"].is_array()) throw ParseError(manifest + ": missing \"args\"");
  std::vector<std::string> args = m["args"].get<std::vector<std::string>>();
  if (!args.empty() && args[0] == "replay") throw ParseError(manifest + ": cannot replay a replay");
  if (!out_override.empty()) {
    args.erase(std::remove_if(args.begin(), args.end(),
                              [](const std::string& a) { return a.rfind("--out=", 0) == 0; }),
               args.end());
    args.push_back("--out=" + out_override);
  }
  return run(args);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Sparse real stability radius of A + B Delta C", "sparsesr"};
  app.set_version_flag("--version", std::string(SPARSESR_VERSION));
  app.require_subcommand(1);

  std::string problem;
  std::string out = "sparsesr-out";
  SolverFlags flags;

  auto* solve_cmd = app.add_subcommand("solve", "Compute the sparse stability radius");
  std::vector<double> g0;
  std::optional<double> omega0;
  solve_cmd->add_option("problem", problem, "Problem file")->required()->check(CLI::ExistingFile);
  add_solver_flags(solve_cmd, flags);
  solve_cmd->add_option("--g0", g0, "Single-start initializer vec(G), comma separated")
      ->delimiter(',');
  solve_cmd->add_option("--omega0", omega0, "Initial frequency for --g0");
  solve_cmd->add_option("--out", out, "Output directory")->capture_default_str();

  auto* verify_cmd = app.add_subcommand("verify", "Check optimality conditions at (Delta, omega)");
  std::string delta_file;
  double omega = 0.0;
  VerifyThresholds thresholds;
  bool no_sparsify = false;
  verify_cmd->add_option("problem", problem, "Problem file")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--delta", delta_file, "Perturbation file")
      ->required()
      ->check(CLI::ExistingFile);
  verify_cmd->add_option("--omega", omega, "Crossing frequency")->required();
  verify_cmd->add_flag("--no-sparsify", no_sparsify, "Check Delta as given instead of S o Delta");
  add_threshold_flags(verify_cmd, thresholds);
  verify_cmd->add_option("--out", out, "Output directory")->capture_default_str();

  auto* sweep_cmd = app.add_subcommand("sweep-weights", "Solve over a list of penalty weights");
  std::vector<double> weights;
  sweep_cmd->add_option("problem", problem, "Problem file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--weights", weights, "Comma separated weights")
      ->required()
      ->delimiter(',');
  add_solver_flags(sweep_cmd, flags);
  sweep_cmd->add_option("--out", out, "Output directory")->capture_default_str();

  auto* spectral_cmd = app.add_subcommand("spectral-set", "Sample the spectral value set");
  double eta = 0.0;
  std::string strategy = "random";
  SamplingOptions sampling;
  spectral_cmd->add_option("problem", problem, "Problem file")->required()->check(CLI::ExistingFile);
  spectral_cmd->add_option("--eta", eta, "Perturbation norm bound")->required();
  spectral_cmd->add_option("--strategy", strategy, "grid, random or sphere")
      ->check(CLI::IsMember({"grid", "random", "sphere"}))
      ->capture_default_str();
  spectral_cmd->add_option("--samples", sampling.samples,
                           "Samples (grid: points per axis)")->capture_default_str();
  spectral_cmd->add_option("--seed", sampling.seed, "Random seed")->capture_default_str();
  spectral_cmd->add_option("--jobs", sampling.jobs, "Worker threads (0: all cores)")
      ->capture_default_str();
  spectral_cmd->add_option("--out", out, "Output directory")->capture_default_str();

  auto* network_cmd = app.add_subcommand("network", "Rank critical edges of a line or circle network");
  std::string topology;
  NetworkSpec net;
  EdgePatternQuery query;
  std::string entry_class = "self";
  double tie_tol = 1e-6;
  network_cmd->add_option("topology", topology, "line or circle")
      ->required()
      ->check(CLI::IsMember({"line", "circle"}));
  network_cmd->add_option("--n", net.nodes, "Number of nodes")->capture_default_str();
  network_cmd->add_option("--budget", query.budget, "Entries perturbed together")
      ->capture_default_str();
  network_cmd->add_option("--class", entry_class, "self, offdiag or any")
      ->check(CLI::IsMember({"self", "offdiag", "any", "self_loops", "off_diagonal"}))
      ->capture_default_str();
  network_cmd->add_option("--self-weight", net.self_weight, "Diagonal entries")
      ->capture_default_str();
  network_cmd->add_option("--edge-weight", net.edge_weight, "Edge entries")->capture_default_str();
  network_cmd->add_option("--tie-tol", tie_tol, "SR tolerance for tie groups")->capture_default_str();
  add_solver_flags(network_cmd, flags);
  network_cmd->add_option("--out", out, "Output directory")->capture_default_str();

  auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  std::string manifest;
  std::string replay_out;
  replay_cmd->add_option("manifest", manifest, "manifest.json")
      ->required()
      ->check(CLI::ExistingFile);
  replay_cmd->add_option("--out", replay_out, "Output directory (default: as recorded)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  // Normalize --out so a manifest replays into the directory it records.
  std::vector<std::string> recorded;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    recorded.push_back(args[i]);
  }
  recorded.push_back("--out=" + out);
  const fs::path out_dir(out);

  if (*solve_cmd) return cmd_solve(problem, flags, g0, omega0, out_dir, recorded);
  if (*verify_cmd) {
    return cmd_verify(problem, delta_file, omega, thresholds, no_sparsify, out_dir, recorded);
  }
  if (*sweep_cmd) return cmd_sweep(problem, flags, weights, out_dir, recorded);
  if (*spectral_cmd) {
    sampling.strategy = parse_sampling_strategy(strategy);
    return cmd_spectral(problem, eta, sampling, out_dir, recorded);
  }
  if (*network_cmd) {
    return cmd_network(topology, net, query, entry_class, tie_tol, flags, out_dir, recorded);
  }
  return cmd_replay(manifest, replay_out);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const StabilityAssumptionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnstable;
  } catch (const RankAssumptionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNoMinimum;
  } catch (const SolveFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNoMinimum;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
