// Command-line driver: steady-state sweeps, oracle cross-checks, single-run
// tracking and SDP dumps.
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "lrkf/errors.hpp"
#include "lrkf/harness.hpp"
#include "lrkf/scalar_reconfig.hpp"
#include "lrkf/sdp.hpp"
#include "lrkf/steady_state.hpp"
#include "lrkf/vector_reconfig.hpp"

namespace {

using namespace lrkf;

enum ExitCode { kOk = 0, kUsage = 1, kOracle = 2, kSolver = 3 };

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
};

ExperimentConfig load(const Common& common) {
  ExperimentConfig cfg = common.config.empty() ? default_config() : load_config(common.config);
  if (common.seed) cfg.seed = *common.seed;
  return cfg;
}

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--config", common.config, "config file (key = value)");
  cmd->add_option("--seed", common.seed, "override the config seed");
}

std::string complex_text(const cdouble& z) {
  std::ostringstream out;
  out << std::setprecision(6) << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag())
      << "i";
  return out.str();
}

void print_matrix(std::ostream& out, const char* name, const CMat& m) {
  out << name << " (" << m.rows() << "x" << m.cols() << ")\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << " ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << "  " << complex_text(m(i, j));
    out << '\n';
  }
}

const char* convergence_name(Convergence kind) {
  switch (kind) {
    case Convergence::fixed_point: return "fixed point";
    case Convergence::cycle_average: return "cycle average";
    case Convergence::none: break;
  }
  return "not converged";
}

int run_sweep_cmd(const Common& common, const std::string& p_grid, const std::string& policies,
                  const std::string& out_csv, const std::string& out_svg,
                  std::optional<int> threads) {
  ExperimentConfig cfg = load(common);
  if (!p_grid.empty()) cfg.p_grid = parse_double_list(p_grid);
  if (!policies.empty()) cfg.policies = parse_name_list(policies);
  if (!out_csv.empty()) cfg.out_csv = out_csv;
  if (!out_svg.empty()) cfg.out_svg = out_svg;
  if (threads) cfg.threads = *threads;
  validate_config(cfg);

  const auto rows = run_sweep(cfg);
  for (const auto& r : rows) {
    if (!r.converged) {
      std::cerr << "warning: P=" << r.P << " policy=" << r.policy << " seed=" << r.seed
                << " did not reach a steady state\n";
    }
  }
  if (cfg.out_csv.empty()) {
    std::cout << format_csv(rows);
  } else {
    emit_csv(rows, cfg.out_csv);
  }
  if (!cfg.out_svg.empty()) emit_svg(rows, cfg.out_svg);
  return kOk;
}

int run_oracle_cmd(const Common& common) {
  const auto checks = run_oracles(load(common));
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  deviation=" << c.deviation
              << "  tolerance=" << c.tolerance << '\n';
    ok = ok && c.pass;
  }
  return ok ? kOk : kOracle;
}

int run_track_cmd(const Common& common, const std::string& policy, double P) {
  const ExperimentConfig cfg = load(common);
  const PolicyKind kind = parse_policy(policy);
  if (kind == PolicyKind::fixed) throw ConfigError("track: the fixed policy needs a matrix");
  const bool scalar = kind == PolicyKind::scalar_minsum || kind == PolicyKind::scalar_minmax;
  const SystemModel model =
      generate_system(cfg, scalar ? ObservationMode::scalar : ObservationMode::vector, cfg.seed);

  SteadyStateOptions options;
  options.tol = cfg.tol;
  options.max_iters = cfg.max_iters;
  options.window = cfg.window;
  options.cycle_tol = cfg.cycle_tol;
  const SteadyState ss = run_to_steady_state(model, ReconfigPolicy::of(kind), P, options);

  std::cout << std::setprecision(10);
  std::cout << "policy        " << policy_name(kind) << "\n"
            << "seed          " << cfg.seed << "\n"
            << "P             " << P << "\n"
            << "iterations    " << ss.iterations << "\n"
            << "convergence   " << convergence_name(ss.kind) << "\n"
            << "sum_mse       " << ss.sum_mse() << "\n"
            << "max_mse       " << ss.max_mse() << "\n";
  const ReconfigResult& r = ss.last;
  std::cout << "last step\n"
            << "  objective_lower     " << r.objective_lower << "\n"
            << "  objective_achieved  " << r.objective_achieved << "\n"
            << "  gamma               " << r.gamma << "\n"
            << "  pseudo_inverse      " << (r.pseudo_inverse ? "yes" : "no") << "\n";
  if (r.a_star.size() > 0) print_matrix(std::cout, "a*", r.a_star);
  if (r.c_realized.size() > 0) print_matrix(std::cout, "C", r.c_realized);
  print_matrix(std::cout, "M_{n|n}", ss.belief.m_post);
  return kOk;
}

int run_dump_cmd(const Common& common, const std::string& problem, double P, double t,
                 const std::string& out_path) {
  const ExperimentConfig cfg = load(common);
  const bool scalar = problem == "scalar-minmax";
  const SystemModel model =
      generate_system(cfg, scalar ? ObservationMode::scalar : ObservationMode::vector, cfg.seed);
  // First-step prediction MSE from M_{0|0} = I.
  const CMat m_pred = predict_mse(CMat::Identity(model.M, model.M), model);

  SdpProblem sdp;
  if (problem == "minsum") {
    sdp = build_minsum_problem(m_pred, model.sigma_v_sq, P);
  } else if (problem == "minmax") {
    sdp = build_minmax_problem(m_pred, model.sigma_v_sq, P);
  } else if (scalar) {
    sdp = build_minmax_feasibility_problem(m_pred, model.G, model.sigma_v_sq, P, t);
  } else {
    throw ConfigError("unknown problem '" + problem + "' (minsum, minmax, scalar-minmax)");
  }

  if (out_path.empty()) {
    dump_problem(sdp, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    dump_problem(sdp, out);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linearly reconfigurable Kalman filter experiments"};
  app.require_subcommand(1);

  Common common;
  std::string p_grid, policies, out_csv, out_svg;
  std::optional<int> threads;
  auto* sweep = app.add_subcommand("sweep", "steady-state MSE over a grid of power budgets");
  add_common(sweep, common);
  sweep->add_option("--p-grid", p_grid, "comma-separated power budgets");
  sweep->add_option("--policies", policies, "comma-separated policy names");
  sweep->add_option("--out-csv", out_csv, "CSV output path (stdout if omitted)");
  sweep->add_option("--out-svg", out_svg, "SVG chart output path");
  sweep->add_option("--threads", threads, "worker threads");

  auto* oracle = app.add_subcommand("oracle", "cross-check solvers against independent oracles");
  add_common(oracle, common);

  std::string policy = "vec-minsum";
  double P = 1.0;
  auto* track = app.add_subcommand("track", "run one policy to steady state and summarize");
  add_common(track, common);
  track->add_option("--policy", policy, "policy name")->capture_default_str();
  track->add_option("-P,--power", P, "power budget")->capture_default_str();

  std::string problem = "minsum";
  double t = 0.0;
  std::string out_path;
  auto* dump = app.add_subcommand("dump-sdp", "write the first-step SDP in text form");
  add_common(dump, common);
  dump->add_option("--problem", problem, "minsum, minmax or scalar-minmax")->capture_default_str();
  dump->add_option("-P,--power", P, "power budget")->capture_default_str();
  dump->add_option("-t,--threshold", t, "max-MSE level for scalar-minmax feasibility");
  dump->add_option("-o,--out", out_path, "output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sweep) return run_sweep_cmd(common, p_grid, policies, out_csv, out_svg, threads);
    if (*oracle) return run_oracle_cmd(common);
    if (*track) return run_track_cmd(common, policy, P);
    if (*dump) return run_dump_cmd(common, problem, P, t, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
