#include "lrkf/steady_state.hpp"

#include <cmath>

#include "lrkf/errors.hpp"
#include "lrkf/rng.hpp"
#include "lrkf/scalar_reconfig.hpp"
#include "lrkf/vector_reconfig.hpp"

namespace lrkf {

namespace {

struct NamedPolicy {
  PolicyKind kind;
  std::string_view name;
};

constexpr NamedPolicy kPolicyNames[] = {
    {PolicyKind::vec_minsum, "vec-minsum"},
    {PolicyKind::vec_minmax, "vec-minmax"},
    {PolicyKind::scalar_minsum, "scalar-minsum"},
    {PolicyKind::scalar_minmax, "scalar-minmax"},
    {PolicyKind::lower_bound_sum, "lower-bound-sum"},
    {PolicyKind::lower_bound_max, "lower-bound-max"},
    {PolicyKind::fixed, "fixed"},
};

ReconfigResult apply_observation(const CMat& m_pred, const SystemModel& model, CMat c) {
  ReconfigResult out;
  out.m_achieved = model.mode == ObservationMode::scalar
                       ? update_mse_scalar(m_pred, c.adjoint().col(0), model.sigma_v_sq)
                       : update_mse(m_pred, c, model.sigma_v_sq);
  out.m_lower_bound = out.m_achieved;
  out.c_realized = std::move(c);
  return out;
}

ReconfigResult scalar_result(const SystemModel& model, const CVec& a,
                             const CMat& m_achieved, Objective objective) {
  ReconfigResult out;
  out.a_star = a;
  out.c_realized = (model.G * a).adjoint();
  out.m_achieved = m_achieved;
  out.m_lower_bound = m_achieved;
  out.objective_achieved = objective_value(m_achieved, objective);
  out.objective_lower = out.objective_achieved;
  return out;
}

}  // namespace

std::string_view policy_name(PolicyKind kind) {
  for (const auto& entry : kPolicyNames) {
    if (entry.kind == kind) return entry.name;
  }
  return "unknown";
}

PolicyKind parse_policy(std::string_view name) {
  for (const auto& entry : kPolicyNames) {
    if (entry.name == name) return entry.kind;
  }
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

ReconfigResult choose_observation(const CMat& m_pred, const SystemModel& model,
                                  const ReconfigPolicy& policy, double P) {
  if (!(P >= 0.0)) throw ConfigError("power budget P must be nonnegative");
  const bool scalar_policy =
      policy.kind == PolicyKind::scalar_minsum || policy.kind == PolicyKind::scalar_minmax;
  if (scalar_policy != (model.mode == ObservationMode::scalar) && policy.kind != PolicyKind::fixed) {
    throw ConfigError("policy '" + std::string(policy_name(policy.kind)) +
                      "' does not match the observation mode of the model");
  }

  if (policy.kind == PolicyKind::fixed) return apply_observation(m_pred, model, policy.fixed_c);

  if (P == 0.0) {
    const Eigen::Index rows = model.mode == ObservationMode::scalar ? 1 : model.L;
    ReconfigResult out = apply_observation(m_pred, model, CMat::Zero(rows, model.M));
    out.a_star = CVec::Zero(model.N);
    return out;
  }

  switch (policy.kind) {
    case PolicyKind::vec_minsum: return reconfigure(m_pred, model, P, Objective::sum);
    case PolicyKind::vec_minmax: return reconfigure(m_pred, model, P, Objective::max);
    case PolicyKind::lower_bound_sum: return unstructured_optimum(m_pred, model, P, Objective::sum);
    case PolicyKind::lower_bound_max: return unstructured_optimum(m_pred, model, P, Objective::max);
    case PolicyKind::scalar_minsum: {
      const RayleighSolution s = minsum_scalar(m_pred, model.G, model.sigma_v_sq, P);
      return scalar_result(model, s.a_star, s.m_achieved, Objective::sum);
    }
    case PolicyKind::scalar_minmax: {
      const ScalarMinMaxReport r = minmax_scalar_bisection(m_pred, model.G, model.sigma_v_sq, P);
      ReconfigResult out = scalar_result(model, r.a_star, r.m_achieved, Objective::max);
      out.objective_lower = r.t_star;
      out.rank_one = r.rank_one;
      return out;
    }
    case PolicyKind::fixed: break;
  }
  throw ConfigError("unhandled policy");
}

double SteadyState::sum_mse() const { return trace_real(m_steady); }
double SteadyState::max_mse() const { return max_diagonal(m_steady); }

SteadyState run_to_steady_state(const SystemModel& model, const ReconfigPolicy& policy, double P,
                                const SteadyStateOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("steady-state tolerance must be positive");
  if (options.max_iters < 1) throw ConfigError("steady-state max_iters must be at least 1");
  if (options.window < 1) throw ConfigError("steady-state window must be at least 1");
  if (!(options.cycle_tol > 0.0)) throw ConfigError("steady-state cycle tolerance must be positive");
  SteadyState out;
  CMat m_post = CMat::Identity(model.M, model.M);
  CMat window_sum = CMat::Zero(model.M, model.M);
  CMat total_sum = CMat::Zero(model.M, model.M);
  CMat previous_mean;
  double previous = std::nan("");
  for (int k = 1; k <= options.max_iters; ++k) {
    const CMat m_pred = predict_mse(m_post, model);
    out.last = choose_observation(m_pred, model, policy, P);
    m_post = out.last.m_achieved;
    out.belief = {m_pred, m_post, k};
    out.iterations = k;
    if (out.last.rank_one) ++out.rank_one_steps;
    const double trace = trace_real(m_post);
    if (k > 1 && std::abs(trace - previous) <= options.tol * trace) {
      out.converged = true;
      out.kind = Convergence::fixed_point;
      out.m_steady = m_post;
      return out;
    }
    previous = trace;

    window_sum += m_post;
    total_sum += m_post;
    if (k % options.window == 0) {
      CMat mean = window_sum / static_cast<double>(options.window);
      window_sum.setZero();
      if (previous_mean.size() > 0) {
        const double now = trace_real(mean);
        const double before = trace_real(previous_mean);
        if (std::abs(now - before) <= options.cycle_tol * now) {
          out.converged = true;
          out.kind = Convergence::cycle_average;
          out.m_steady = std::move(mean);
          return out;
        }
      }
      previous_mean = std::move(mean);
    }
  }
  out.m_steady = previous_mean.size() > 0 ? previous_mean
                                          : CMat(total_sum / static_cast<double>(out.iterations));
  return out;
}

SimTrace simulate_trace(const SystemModel& model, const ReconfigPolicy& policy, double P,
                        int horizon, std::uint64_t seed) {
  if (horizon < 1) throw ConfigError("simulate_trace: horizon must be at least 1");
  Rng rng(seed);
  SimTrace trace;
  trace.seed = seed;
  const CMat q_root = psd_sqrt(model.Q);
  const double v_scale = std::sqrt(model.sigma_v_sq);

  CMat m_post = CMat::Identity(model.M, model.M);
  CVec theta = rng.complex_normal_vector(CMat::Identity(model.M, model.M));
  CVec estimate = CVec::Zero(model.M);
  for (int n = 1; n <= horizon; ++n) {
    const CVec u = rng.complex_normal_vector(q_root);
    theta = model.F * theta + u;

    const CMat m_pred = predict_mse(m_post, model);
    const ReconfigResult chosen = choose_observation(m_pred, model, policy, P);
    const CMat& c = chosen.c_realized;
    CVec v(c.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = v_scale * rng.complex_normal();
    const CVec y = c * theta + v;

    const CVec predicted = model.F * estimate;
    const CMat gain = kalman_gain(m_pred, c, model.sigma_v_sq);
    estimate = predicted + gain * (y - c * predicted);
    m_post = chosen.m_achieved;

    trace.process_noise.push_back(u);
    trace.observation_noise.push_back(v);
    trace.states.push_back(theta);
    trace.observations.push_back(y);
    trace.estimates.push_back(estimate);
    trace.squared_errors.push_back((theta - estimate).squaredNorm());
    trace.mse_trace.push_back(trace_real(m_post));
  }
  return trace;
}

}  // namespace lrkf
