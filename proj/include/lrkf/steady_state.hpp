#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lrkf/kalman.hpp"
#include "lrkf/reconfig.hpp"

namespace lrkf {

enum class PolicyKind {
  vec_minsum,
  vec_minmax,
  scalar_minsum,
  scalar_minmax,
  lower_bound_sum,  // unstructured C* from the min-sum SDP
  lower_bound_max,  // unstructured C* from the min-max SDP
  fixed,            // caller-supplied observation matrix
};

struct ReconfigPolicy {
  PolicyKind kind = PolicyKind::vec_minsum;
  CMat fixed_c;  // used by PolicyKind::fixed

  static ReconfigPolicy of(PolicyKind kind) { return {kind, {}}; }
  static ReconfigPolicy fixed(CMat c) { return {PolicyKind::fixed, std::move(c)}; }
};

std::string_view policy_name(PolicyKind kind);
/// Throws ConfigError for unknown names.
PolicyKind parse_policy(std::string_view name);

/// Picks the observation for one step from M_{n|n-1} and returns the
/// resulting posterior MSE in m_achieved.
ReconfigResult choose_observation(const CMat& m_pred, const SystemModel& model,
                                  const ReconfigPolicy& policy, double P);

struct SteadyStateOptions {
  double tol = 1e-8;
  int max_iters = 1000;
  // Greedy per-step reconfiguration can settle into a periodic or
  // quasi-periodic orbit instead of a fixed point. Such runs are judged on
  // the mean of M_{n|n} over consecutive windows of this many steps.
  int window = 100;
  double cycle_tol = 1e-3;
};

enum class Convergence { none, fixed_point, cycle_average };

struct SteadyState {
  BeliefState belief;
  ReconfigResult last;
  bool converged = false;
  Convergence kind = Convergence::none;
  int iterations = 0;
  int rank_one_steps = 0;  // steps whose ReconfigResult::rank_one was set
  // Steady-state MSE: M_{n|n} at a fixed point, otherwise the mean over the
  // last full window (or over all steps if no window completed).
  CMat m_steady;
  double sum_mse() const;
  double max_mse() const;
};

/// Iterates predict -> choose -> update from M_{0|0} = I until the relative
/// change of tr M_{n|n} drops to tol, two consecutive window means agree to
/// cycle_tol, or max_iters steps.
SteadyState run_to_steady_state(const SystemModel& model, const ReconfigPolicy& policy, double P,
                                const SteadyStateOptions& options = {});

struct SimTrace {
  std::uint64_t seed = 0;
  std::vector<CVec> states;        // theta_n, n = 1..horizon
  std::vector<CVec> observations;  // y_n
  std::vector<CVec> process_noise; // u_{n-1}
  std::vector<CVec> observation_noise;  // v_n
  std::vector<CVec> estimates;     // filtered estimate of theta_n
  std::vector<double> squared_errors;
  std::vector<double> mse_trace;   // tr M_{n|n}
};

/// Draws theta_0 ~ CN(0, I), then per step u (M draws) followed by v
/// (rows of C draws) and runs the filter with the policy's observation.
SimTrace simulate_trace(const SystemModel& model, const ReconfigPolicy& policy, double P,
                        int horizon, std::uint64_t seed);

}  // namespace lrkf
