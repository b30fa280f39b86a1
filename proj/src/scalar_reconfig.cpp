#include "lrkf/scalar_reconfig.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "lrkf/errors.hpp"
#include "lrkf/rng.hpp"

namespace lrkf {

namespace {

CVec rescale_to_power(const CVec& x, const CMat& G, double P) {
  const double power = (G * x).squaredNorm();
  if (!(power > 0.0)) throw DegenerateError("direction lies in the null space of G");
  return x * std::sqrt(P / power);
}

double max_mse_for(const CVec& a, const CMat& G, const CMat& m_pred, double sigma_v_sq) {
  return max_diagonal(update_mse_scalar(m_pred, G * a, sigma_v_sq));
}

}  // namespace

RayleighSolution minsum_scalar(const CMat& m_pred, const CMat& G, double sigma_v_sq, double P) {
  if (!(P > 0.0)) throw ContractViolation("minsum_scalar: P must be positive");
  if (G.rows() != m_pred.rows()) throw ContractViolation("minsum_scalar: G must have M rows");

  const CMat gram = G.adjoint() * G;
  const CMat mg = m_pred * G;
  RayleighSolution out;
  out.b_matrix = hermitianize((sigma_v_sq / P) * gram + G.adjoint() * mg);
  const CMat b_inv_sqrt = psd_inv_sqrt(out.b_matrix);
  const CMat numerator = hermitianize(mg.adjoint() * mg);  // G^H M^2 G
  const HermitianEig eig = hermitian_eig(hermitianize(b_inv_sqrt * numerator * b_inv_sqrt));
  out.top_eigvec = eig.vectors.col(eig.vectors.cols() - 1);

  out.a_star = rescale_to_power(b_inv_sqrt * out.top_eigvec, G, P);
  out.m_achieved = update_mse_scalar(m_pred, G * out.a_star, sigma_v_sq);
  out.achieved_sum_mse = trace_real(out.m_achieved);
  return out;
}

CMat build_E_i(const CMat& m_pred, const CMat& G, int i, double t) {
  if (i < 0 || i >= m_pred.rows()) throw ContractViolation("build_E_i: index out of range");
  const CVec column = m_pred.col(i);
  const double diag = m_pred(i, i).real();
  const CMat inner = column * column.adjoint() - (diag - t) * m_pred;
  return hermitianize(G.adjoint() * inner * G);
}

SdpProblem build_minmax_feasibility_problem(const CMat& m_pred, const CMat& G, double sigma_v_sq,
                                            double P, double t) {
  const int n = static_cast<int>(G.cols());
  SdpProblem problem;
  const int a = problem.add_block("A", n, Field::complex_hermitian);
  for (int i = 0; i < m_pred.rows(); ++i) {
    const double lhs = (m_pred(i, i).real() - t) * sigma_v_sq;
    problem.add_constraint({{a, build_E_i(m_pred, G, i, t)}}, Relation::greater_equal, lhs);
  }
  problem.add_constraint({{a, hermitianize(G.adjoint() * G)}}, Relation::less_equal, P);
  return problem;
}

MinMaxFeasibility minmax_feasible(const CMat& m_pred, const CMat& G, double sigma_v_sq, double P,
                                  double t, double tol) {
  const SdpProblem problem = build_minmax_feasibility_problem(m_pred, G, sigma_v_sq, P, t);
  // Only the sign of s* relative to tol matters here.
  SdpOptions options;
  options.gap_tol = 1e-9;
  options.feas_tol = 1e-9;
  const FeasibilityResult result = check_feasibility(problem, tol, options);
  if (result.status != SdpStatus::optimal) {
    std::ostringstream msg;
    msg << "minmax_feasible: phase-I solve ended with " << to_string(result.status) << " at t = "
        << t;
    throw SolverError(msg.str());
  }
  return {result.feasible, result.witness[0], result.margin};
}

RankOneReconstruction rank_one_reconstruct(const CMat& a_matrix, const CMat& G, double P,
                                           const CMat& m_pred, double sigma_v_sq,
                                           int randomizations, std::uint64_t seed) {
  const HermitianEig eig = hermitian_eig(hermitianize(a_matrix));
  const Eigen::Index n = eig.values.size();
  const double lambda1 = eig.values(n - 1);
  if (!(lambda1 > 1e-14) && P > 0.0) {
    throw DegenerateError("rank_one_reconstruct: A* is numerically zero");
  }
  const double lambda2 = n > 1 ? std::max(eig.values(n - 2), 0.0) : 0.0;
  const CVec principal = std::sqrt(lambda1) * eig.vectors.col(n - 1);

  RankOneReconstruction out;
  out.rank_one = lambda2 / lambda1 <= 1e-6;
  out.a_star = rescale_to_power(principal, G, P);
  out.achieved_max_mse = max_mse_for(out.a_star, G, m_pred, sigma_v_sq);
  if (out.rank_one) return out;

  Rng rng(seed);
  const RVec clamped = eig.values.cwiseMax(0.0).cwiseSqrt();
  const CMat root = eig.vectors * clamped.asDiagonal() * eig.vectors.adjoint();
  for (int k = 0; k < randomizations; ++k) {
    const CVec x = rng.complex_normal_vector(root);
    if ((G * x).squaredNorm() == 0.0) continue;
    const CVec candidate = rescale_to_power(x, G, P);
    const double value = max_mse_for(candidate, G, m_pred, sigma_v_sq);
    if (value < out.achieved_max_mse) {
      out.achieved_max_mse = value;
      out.a_star = candidate;
    }
  }
  return out;
}

ScalarMinMaxReport minmax_scalar_bisection(const CMat& m_pred, const CMat& G, double sigma_v_sq,
                                           double P, const BisectionOptions& options) {
  if (!(options.eps > 0.0)) throw ContractViolation("minmax_scalar_bisection: eps must be positive");
  if (!(P > 0.0)) throw ContractViolation("minmax_scalar_bisection: P must be positive");

  double lo = 0.0;
  double hi = max_diagonal(m_pred);
  MinMaxFeasibility top = minmax_feasible(m_pred, G, sigma_v_sq, P, hi, options.feasibility_tol);
  if (!top.feasible) {
    throw SolverError("minmax_scalar_bisection: upper end of the bracket is infeasible");
  }

  ScalarMinMaxReport report;
  const double range = hi - lo;
  const int iterations =
      range > options.eps ? static_cast<int>(std::ceil(std::log2(range / options.eps))) : 0;
  for (int k = 0; k < iterations; ++k) {
    const double mid = 0.5 * (lo + hi);
    const MinMaxFeasibility probe =
        minmax_feasible(m_pred, G, sigma_v_sq, P, mid, options.feasibility_tol);
    report.probes.emplace_back(mid, probe.feasible);
    if (probe.feasible) {
      hi = mid;
      top = probe;
    } else {
      lo = mid;
    }
  }
  report.bisection_iters = iterations;
  report.t_star = 0.5 * (lo + hi);

  // Once feasible at t, every larger probe must be feasible as well.
  double lowest_feasible = std::numeric_limits<double>::infinity();
  for (const auto& [t, feasible] : report.probes) {
    if (feasible) lowest_feasible = std::min(lowest_feasible, t);
  }
  for (const auto& [t, feasible] : report.probes) {
    if (!feasible && t > lowest_feasible) {
      std::ostringstream msg;
      msg << "minmax_scalar_bisection: infeasible at t = " << t << " above feasible t = "
          << lowest_feasible;
      throw ConsistencyError(msg.str());
    }
  }

  // A* at the smallest feasible level: the least-power point of the relaxed
  // feasible set. Falls back to the phase-I witness.
  report.a_matrix = top.a_matrix;
  SdpProblem least_power = build_minmax_feasibility_problem(m_pred, G, sigma_v_sq, P, hi);
  least_power.add_objective(0, hermitianize(G.adjoint() * G));
  const SdpSolution solution = solve(least_power);
  if (solution.status == SdpStatus::optimal &&
      solution.max_violation <= 1e-7 * (1.0 + P)) {
    report.a_matrix = solution.blocks[0];
  }

  const RankOneReconstruction rebuilt =
      rank_one_reconstruct(report.a_matrix, G, P, m_pred, sigma_v_sq);
  report.a_star = rebuilt.a_star;
  report.rank_one = rebuilt.rank_one;
  report.achieved_max_mse = rebuilt.achieved_max_mse;
  report.m_achieved = update_mse_scalar(m_pred, G * report.a_star, sigma_v_sq);
  return report;
}

}  // namespace lrkf
