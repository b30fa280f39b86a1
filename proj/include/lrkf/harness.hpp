#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lrkf/kalman.hpp"

namespace lrkf {

/// Settings of a sweep. Mirrors the flat `key = value` config file; see
/// configs/default.cfg for the annotated format.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  int M = 4;
  int L = 4;
  int N = 3;
  double sigma_v_sq = 0.5;
  double spectral_radius_target = 0.9;
  std::vector<double> p_grid;
  std::vector<std::string> policies;
  int num_seeds = 1;
  std::string rng;
  double tol = 1e-8;
  int max_iters = 1000;
  int window = 100;
  double cycle_tol = 1e-3;
  int threads = 1;
  std::string out_csv;
  std::string out_svg;
};

/// 0.5, 0.5 sqrt(2), ..., 8.
std::vector<double> default_p_grid();
const std::vector<std::string>& all_sweep_policies();

/// Default sizes: M = 4, L = 4, N = 3, sigma_v^2 = 0.5, radius 0.9.
ExperimentConfig default_config();

/// Parses `key = value` lines ('#' starts a comment) on top of the defaults.
/// Throws ConfigError naming the offending line.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

std::vector<double> parse_double_list(const std::string& text);
std::vector<std::string> parse_name_list(const std::string& text);

/// Draws F (M x M), then the vector-mode G ((L M) x N), then the scalar-mode
/// G (M x N) from one Rng(seed) stream, all i.i.d. CN(0, 1). F is rescaled to
/// the target spectral radius and Q = I. Both modes share F.
SystemModel generate_system(const ExperimentConfig& cfg, ObservationMode mode, std::uint64_t seed);

struct SweepRow {
  double P = 0.0;
  std::string policy;
  double sum_mse = 0.0;
  double max_mse = 0.0;
  double lower_sum = 0.0;
  double lower_max = 0.0;
  bool converged = false;
  std::uint64_t seed = 0;
  // Diagnostics, not written to CSV.
  double wall_time = 0.0;  // seconds
  int steps = 0;
  int rank_one_steps = 0;
};

/// Steady-state sum and max MSE for every (seed, P, policy). lower_sum and
/// lower_max come from the unstructured min-sum and min-max SDP optima run
/// to their own steady states; the `lower-bound` row reports those values.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

/// Header `P,policy,sum_mse,max_mse,lower_sum,lower_max,converged,seed`,
/// doubles in shortest round-trip form.
std::string format_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_csv(const std::string& text);

/// Throws ConfigError for empty input, std::runtime_error naming the path
/// when the file cannot be written.
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);
void emit_svg(const std::vector<SweepRow>& rows, const std::string& path);
std::string format_svg(const std::vector<SweepRow>& rows);

struct OracleCheck {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

std::vector<OracleCheck> run_oracles(const ExperimentConfig& cfg);

}  // namespace lrkf
