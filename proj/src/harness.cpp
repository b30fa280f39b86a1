#include "lrkf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "lrkf/errors.hpp"
#include "lrkf/oracles.hpp"
#include "lrkf/rng.hpp"
#include "lrkf/scalar_reconfig.hpp"
#include "lrkf/steady_state.hpp"
#include "lrkf/vector_reconfig.hpp"

namespace lrkf {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("not a number: '" + t + "'");
  }
  return value;
}

std::int64_t parse_int(const std::string& text) {
  const std::string t = trim(text);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("not an integer: '" + t + "'");
  }
  return value;
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

int to_dim(std::int64_t v, const char* key) {
  if (v < 1 || v > 1000) throw ConfigError(std::string(key) + " must be between 1 and 1000");
  return static_cast<int>(v);
}

}  // namespace

std::vector<double> default_p_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 8; ++k) grid.push_back(0.5 * std::pow(2.0, k / 2.0));
  return grid;
}

const std::vector<std::string>& all_sweep_policies() {
  static const std::vector<std::string> names = {"vec-minsum", "vec-minmax", "scalar-minsum",
                                                 "scalar-minmax", "lower-bound"};
  return names;
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.p_grid = default_p_grid();
  cfg.policies = all_sweep_policies();
  cfg.rng = std::string(Rng::kAlgorithm);
  return cfg;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_double(item));
  }
  return out;
}

std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string name = trim(item);
    if (!name.empty()) out.push_back(name);
  }
  return out;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg = default_config();
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "seed") {
        const auto v = parse_int(value);
        if (v < 0) throw ConfigError("seed must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(v);
      } else if (key == "M") {
        cfg.M = to_dim(parse_int(value), "M");
      } else if (key == "L") {
        cfg.L = to_dim(parse_int(value), "L");
      } else if (key == "N") {
        cfg.N = to_dim(parse_int(value), "N");
      } else if (key == "sigma_v_sq") {
        cfg.sigma_v_sq = parse_double(value);
      } else if (key == "spectral_radius_target") {
        cfg.spectral_radius_target = parse_double(value);
      } else if (key == "p_grid") {
        cfg.p_grid = parse_double_list(value);
      } else if (key == "policies") {
        cfg.policies = parse_name_list(value);
      } else if (key == "num_seeds") {
        cfg.num_seeds = to_dim(parse_int(value), "num_seeds");
      } else if (key == "rng") {
        cfg.rng = value;
      } else if (key == "tol") {
        cfg.tol = parse_double(value);
      } else if (key == "max_iters") {
        cfg.max_iters = static_cast<int>(parse_int(value));
      } else if (key == "window") {
        cfg.window = to_dim(parse_int(value), "window");
      } else if (key == "cycle_tol") {
        cfg.cycle_tol = parse_double(value);
      } else if (key == "threads") {
        cfg.threads = to_dim(parse_int(value), "threads");
      } else if (key == "out_csv") {
        cfg.out_csv = value;
      } else if (key == "out_svg") {
        cfg.out_svg = value;
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.M < 1 || cfg.L < 1 || cfg.N < 1) throw ConfigError("dimensions must be at least 1");
  if (!(cfg.sigma_v_sq > 0.0)) throw ConfigError("sigma_v_sq must be positive");
  if (!(cfg.spectral_radius_target > 0.0 && cfg.spectral_radius_target < 1.0)) {
    throw ConfigError("spectral_radius_target must lie in (0, 1)");
  }
  if (cfg.p_grid.empty()) throw ConfigError("p_grid is empty");
  for (std::size_t k = 0; k < cfg.p_grid.size(); ++k) {
    if (!(cfg.p_grid[k] >= 0.0) || !std::isfinite(cfg.p_grid[k])) {
      throw ConfigError("p_grid values must be finite and nonnegative");
    }
    if (k > 0 && !(cfg.p_grid[k] > cfg.p_grid[k - 1])) {
      throw ConfigError("p_grid must be strictly increasing");
    }
  }
  if (cfg.policies.empty()) throw ConfigError("policy list is empty");
  for (const auto& name : cfg.policies) {
    const auto& known = all_sweep_policies();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw ConfigError("unknown policy '" + name + "'");
    }
  }
  if (cfg.rng != Rng::kAlgorithm) {
    throw ConfigError("rng '" + cfg.rng + "' is not supported; expected " +
                      std::string(Rng::kAlgorithm));
  }
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
  if (cfg.max_iters < 1) throw ConfigError("max_iters must be at least 1");
  if (cfg.window < 1) throw ConfigError("window must be at least 1");
  if (!(cfg.cycle_tol > 0.0)) throw ConfigError("cycle_tol must be positive");
  if (cfg.num_seeds < 1) throw ConfigError("num_seeds must be at least 1");
}

SystemModel generate_system(const ExperimentConfig& cfg, ObservationMode mode,
                            std::uint64_t seed) {
  Rng rng(seed);
  CMat F = rng.complex_normal_matrix(cfg.M, cfg.M);
  CMat g_vector = rng.complex_normal_matrix(Eigen::Index{cfg.L} * cfg.M, cfg.N);
  CMat g_scalar = rng.complex_normal_matrix(cfg.M, cfg.N);

  const Eigen::ComplexEigenSolver<CMat> eig(F, false);
  const double radius = eig.eigenvalues().cwiseAbs().maxCoeff();
  F *= cfg.spectral_radius_target / radius;

  const CMat Q = CMat::Identity(cfg.M, cfg.M);
  if (mode == ObservationMode::vector) {
    return make_system_model(std::move(F), Q, cfg.sigma_v_sq, std::move(g_vector), cfg.L, mode);
  }
  return make_system_model(std::move(F), Q, cfg.sigma_v_sq, std::move(g_scalar), 1, mode);
}

namespace {

struct Task {
  std::uint64_t seed;
  double P;
};

std::vector<SweepRow> run_task(const ExperimentConfig& cfg, const Task& task) {
  SteadyStateOptions options;
  options.tol = cfg.tol;
  options.max_iters = cfg.max_iters;
  options.window = cfg.window;
  options.cycle_tol = cfg.cycle_tol;
  const SystemModel vector_model = generate_system(cfg, ObservationMode::vector, task.seed);
  const SystemModel scalar_model = generate_system(cfg, ObservationMode::scalar, task.seed);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  double lower_sum = nan;
  double lower_max = nan;
  bool lower_converged = false;
  double lower_time = 0.0;
  if (cfg.L >= cfg.M) {
    const auto start = std::chrono::steady_clock::now();
    const SteadyState lb_sum = run_to_steady_state(
        vector_model, ReconfigPolicy::of(PolicyKind::lower_bound_sum), task.P, options);
    const SteadyState lb_max = run_to_steady_state(
        vector_model, ReconfigPolicy::of(PolicyKind::lower_bound_max), task.P, options);
    lower_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    lower_sum = lb_sum.sum_mse();
    lower_max = lb_max.max_mse();
    lower_converged = lb_sum.converged && lb_max.converged;
  }

  std::vector<SweepRow> rows;
  for (const auto& name : cfg.policies) {
    SweepRow row;
    row.P = task.P;
    row.policy = name;
    row.seed = task.seed;
    row.lower_sum = lower_sum;
    row.lower_max = lower_max;
    if (name == "lower-bound") {
      row.sum_mse = lower_sum;
      row.max_mse = lower_max;
      row.converged = lower_converged;
      row.wall_time = lower_time;
    } else {
      const PolicyKind kind = parse_policy(name);
      const bool scalar = kind == PolicyKind::scalar_minsum || kind == PolicyKind::scalar_minmax;
      const auto start = std::chrono::steady_clock::now();
      const SteadyState ss = run_to_steady_state(scalar ? scalar_model : vector_model,
                                                 ReconfigPolicy::of(kind), task.P, options);
      row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      row.sum_mse = ss.sum_mse();
      row.max_mse = ss.max_mse();
      row.converged = ss.converged;
      row.steps = ss.iterations;
      row.rank_one_steps = ss.rank_one_steps;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<Task> tasks;
  for (int s = 0; s < cfg.num_seeds; ++s) {
    for (double P : cfg.p_grid) tasks.push_back({cfg.seed + static_cast<std::uint64_t>(s), P});
  }

  std::vector<std::vector<SweepRow>> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      try {
        results[k] = run_task(cfg, tasks[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(tasks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<SweepRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

std::string format_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "P,policy,sum_mse,max_mse,lower_sum,lower_max,converged,seed\n";
  for (const auto& r : rows) {
    out << format_double(r.P) << ',' << r.policy << ',' << format_double(r.sum_mse) << ','
        << format_double(r.max_mse) << ',' << format_double(r.lower_sum) << ','
        << format_double(r.lower_max) << ',' << (r.converged ? 1 : 0) << ',' << r.seed << '\n';
  }
  return out.str();
}

std::vector<SweepRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "P,policy,sum_mse,max_mse,lower_sum,lower_max,converged,seed") {
    throw ConfigError("CSV header does not match the sweep schema");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 8) throw ConfigError("CSV row with " + std::to_string(fields.size()) + " fields");
    SweepRow r;
    auto number = [](const std::string& f) {
      if (f == "nan") return std::numeric_limits<double>::quiet_NaN();
      return parse_double(f);
    };
    r.P = number(fields[0]);
    r.policy = fields[1];
    r.sum_mse = number(fields[2]);
    r.max_mse = number(fields[3]);
    r.lower_sum = number(fields[4]);
    r.lower_max = number(fields[5]);
    r.converged = fields[6] == "1";
    r.seed = static_cast<std::uint64_t>(parse_int(fields[7]));
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  if (rows.empty()) throw ConfigError("no sweep rows to write");
  write_file(path, format_csv(rows));
}

std::string format_svg(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw ConfigError("no sweep rows to plot");

  // Median over seeds for each (policy, P).
  std::vector<std::string> policies;
  std::map<std::string, std::map<double, std::pair<std::vector<double>, std::vector<double>>>> data;
  for (const auto& r : rows) {
    if (std::find(policies.begin(), policies.end(), r.policy) == policies.end()) {
      policies.push_back(r.policy);
    }
    auto& cell = data[r.policy][r.P];
    cell.first.push_back(r.sum_mse);
    cell.second.push_back(r.max_mse);
  }

  constexpr double kWidth = 460.0;
  constexpr double kHeight = 340.0;
  constexpr double kLeft = 60.0;
  constexpr double kTop = 40.0;
  constexpr double kPlotW = 360.0;
  constexpr double kPlotH = 240.0;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#8c564b", "#e377c2"};

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * kWidth << "\" height=\""
      << kHeight + 20.0 * static_cast<double>(policies.size()) << "\">\n";

  for (int chart = 0; chart < 2; ++chart) {
    double p_min = std::numeric_limits<double>::infinity();
    double p_max = -p_min;
    double y_min = p_min;
    double y_max = -p_min;
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    for (const auto& name : policies) {
      for (const auto& [P, cell] : data[name]) {
        const double y = median(chart == 0 ? cell.first : cell.second);
        if (!std::isfinite(y)) continue;
        series[name].emplace_back(P, y);
        p_min = std::min(p_min, P);
        p_max = std::max(p_max, P);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
    }
    if (!(p_max > p_min)) p_max = p_min + 1.0;
    if (!(y_max > y_min)) y_max = y_min + 1.0;
    const double ox = chart * kWidth;
    auto sx = [&](double P) { return ox + kLeft + (P - p_min) / (p_max - p_min) * kPlotW; };
    auto sy = [&](double y) { return kTop + kPlotH - (y - y_min) / (y_max - y_min) * kPlotH; };

    svg << "<g class=\"chart\" id=\"" << (chart == 0 ? "sum-mse" : "max-mse") << "\">\n";
    svg << "<text x=\"" << ox + kLeft << "\" y=\"24\" font-size=\"14\">"
        << (chart == 0 ? "Sum MSE vs. P" : "Maximum MSE vs. P") << "</text>\n";
    svg << "<rect x=\"" << ox + kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW
        << "\" height=\"" << kPlotH << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double P = p_min + (p_max - p_min) * k / 4.0;
      const double y = y_min + (y_max - y_min) * k / 4.0;
      svg << "<text x=\"" << sx(P) << "\" y=\"" << kTop + kPlotH + 16 << "\" font-size=\"10\" "
          << "text-anchor=\"middle\">" << format_double(std::round(P * 1000) / 1000) << "</text>\n";
      svg << "<text x=\"" << ox + kLeft - 4 << "\" y=\"" << sy(y) + 3 << "\" font-size=\"10\" "
          << "text-anchor=\"end\">" << format_double(std::round(y * 1000) / 1000) << "</text>\n";
    }
    svg << "<text x=\"" << ox + kLeft + kPlotW / 2 << "\" y=\"" << kTop + kPlotH + 34
        << "\" font-size=\"12\" text-anchor=\"middle\">P</text>\n";
    for (std::size_t i = 0; i < policies.size(); ++i) {
      const auto& name = policies[i];
      const char* color = kColors[i % std::size(kColors)];
      svg << "<polyline data-policy=\"" << name << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [P, y] : series[name]) svg << sx(P) << ',' << sy(y) << ' ';
      svg << "\"/>\n";
      const double ly = kTop + kPlotH + 50 + 16.0 * static_cast<double>(i);
      svg << "<line x1=\"" << ox + kLeft << "\" y1=\"" << ly << "\" x2=\"" << ox + kLeft + 20
          << "\" y2=\"" << ly << "\" stroke=\"" << color << "\"/>";
      svg << "<text x=\"" << ox + kLeft + 26 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">"
          << name << "</text>\n";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_svg(const std::vector<SweepRow>& rows, const std::string& path) {
  write_file(path, format_svg(rows));
}

std::vector<OracleCheck> run_oracles(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (cfg.M > 4 || cfg.N > 3) throw ConfigError("oracle checks are sized for M <= 4, N <= 3");
  std::vector<OracleCheck> checks;
  Rng rng(cfg.seed);

  // Min-sum SDP vs. water-filling on diagonal prediction MSEs.
  {
    OracleCheck check{"minsum-sdp-vs-waterfilling", 0.0, 1e-4, true};
    for (int k = 0; k < 10; ++k) {
      RVec diag(cfg.M);
      for (int i = 0; i < cfg.M; ++i) diag(i) = 0.5 + 4.5 * rng.uniform();
      const double P = cfg.p_grid[k % cfg.p_grid.size()];
      const CMat m_pred = diag.cast<cdouble>().asDiagonal();
      const double sdp = minsum_sdp(m_pred, cfg.sigma_v_sq, P).trace_lower;
      const double oracle = oracle::waterfill_sum_mse(diag, cfg.sigma_v_sq, P);
      check.deviation = std::max(check.deviation, std::abs(sdp - oracle));
    }
    check.pass = check.deviation <= check.tolerance;
    checks.push_back(check);
  }

  // Scalar min-sum vs. the 2-D grid.
  {
    CMat m_pred = CMat::Zero(2, 2);
    m_pred(0, 0) = 2.0;
    m_pred(1, 1) = 1.0;
    const double achieved = minsum_scalar(m_pred, CMat::Identity(2, 2), 1.0, 1.0).achieved_sum_mse;
    const double grid = oracle::scalar_minsum_grid_2d(2.0, 1.0, 1.0, 1.0);
    const double deviation = std::abs(achieved - grid);
    checks.push_back({"scalar-minsum-vs-grid", deviation, 1e-6, deviation <= 1e-6});
  }

  // Scalar min-sum vs. projected gradient on random instances.
  {
    OracleCheck check{"scalar-minsum-vs-projected-gradient", 0.0, 1e-3, true};
    const SystemModel model = generate_system(cfg, ObservationMode::scalar, cfg.seed);
    for (int k = 0; k < 5; ++k) {
      const CMat w = rng.complex_normal_matrix(cfg.M, cfg.M);
      const CMat m_pred = hermitianize(w * w.adjoint() + CMat::Identity(cfg.M, cfg.M));
      const double P = cfg.p_grid[k % cfg.p_grid.size()];
      if (P == 0.0) continue;
      const double achieved = minsum_scalar(m_pred, model.G, cfg.sigma_v_sq, P).achieved_sum_mse;
      const double reference = oracle::projected_gradient_minsum_scalar(m_pred, model.G,
                                                                        cfg.sigma_v_sq, P);
      check.deviation = std::max(check.deviation, std::abs(achieved - reference) / reference);
    }
    check.pass = check.deviation <= check.tolerance;
    checks.push_back(check);
  }

  // Scalar min-max bisection vs. the one-dimensional closed form.
  {
    const CMat m_pred = CMat::Identity(1, 1);
    const CMat g = CMat::Identity(1, 1);
    const ScalarMinMaxReport report = minmax_scalar_bisection(m_pred, g, 1.0, 1.0);
    const double closed = oracle::scalar_minmax_threshold_1d(1.0, 1.0, 1.0, 1.0);
    const double deviation = std::abs(report.t_star - closed);
    checks.push_back({"scalar-minmax-bisection-vs-closed-form", deviation, 1e-6, deviation <= 1e-6});
  }

  // Random feasible Ct never beat the SDP optimum.
  {
    OracleCheck check{"random-feasible-dominance", 0.0, 1e-6, true};
    const SystemModel model = generate_system(cfg, ObservationMode::vector, cfg.seed);
    const CMat m_pred = predict_mse(CMat::Identity(cfg.M, cfg.M), model);
    for (double P : cfg.p_grid) {
      const double sdp = minsum_sdp(m_pred, cfg.sigma_v_sq, P).trace_lower;
      const double sampled =
          oracle::random_feasible_min_trace(m_pred, cfg.sigma_v_sq, P, 100, cfg.seed + 17);
      // Deviation is how far below the SDP optimum a random point got.
      check.deviation = std::max(check.deviation, sdp - sampled);
    }
    check.pass = check.deviation <= check.tolerance;
    check.deviation = std::max(check.deviation, 0.0);
    checks.push_back(check);
  }
  return checks;
}

}  // namespace lrkf
