#include "lrkf/vector_reconfig.hpp"

#include <cmath>
#include <sstream>

#include "lrkf/errors.hpp"

namespace lrkf {

double objective_value(const CMat& mse, Objective objective) {
  return objective == Objective::sum ? trace_real(mse) : max_diagonal(mse);
}

namespace {

void check_power(double P) {
  if (!(P >= 0.0)) throw ConfigError("power budget P must be nonnegative");
}

// Pins the Hermitian sub-block of `lmi` starting at (offset, offset) to
// info + c_tilde / sigma^2.
void pin_information_block(SdpProblem& problem, int lmi, int lmi_size, int offset, int c_tilde,
                           const CMat& info, double sigma_v_sq) {
  const int m = static_cast<int>(info.rows());
  for (int q = 0; q < m; ++q) {
    for (int r = 0; r <= q; ++r) {
      problem.add_constraint({{lmi, entry_re(lmi_size, offset + r, offset + q)},
                              {c_tilde, -entry_re(m, r, q) / sigma_v_sq}},
                             Relation::equal, info(r, q).real());
      if (r != q) {
        problem.add_constraint({{lmi, entry_im(lmi_size, offset + r, offset + q)},
                                {c_tilde, -entry_im(m, r, q) / sigma_v_sq}},
                               Relation::equal, info(r, q).imag());
      }
    }
  }
}

void require_optimal(const SdpSolution& solution, const char* what) {
  if (solution.status != SdpStatus::optimal) {
    std::ostringstream msg;
    msg << what << ": SDP solver returned " << to_string(solution.status) << " after "
        << solution.iterations << " iterations";
    throw SolverError(msg.str());
  }
}

CMat clamp_psd(const CMat& h) {
  const HermitianEig eig = hermitian_eig(hermitianize(h));
  const RVec clamped = eig.values.cwiseMax(0.0);
  return hermitianize(eig.vectors * clamped.asDiagonal() * eig.vectors.adjoint());
}

}  // namespace

SdpProblem build_minsum_problem(const CMat& m_pred, double sigma_v_sq, double P) {
  check_power(P);
  const int m = static_cast<int>(m_pred.rows());
  const CMat info = hpd_inverse(m_pred);

  SdpProblem problem;
  const int c_tilde = problem.add_block("c_tilde", m, Field::complex_hermitian);
  const int lmi = problem.add_block("lmi", 2 * m, Field::complex_hermitian);

  CMat trace_d = CMat::Zero(2 * m, 2 * m);
  trace_d.bottomRightCorner(m, m).setIdentity();
  problem.add_objective(lmi, trace_d);

  pin_information_block(problem, lmi, 2 * m, 0, c_tilde, info, sigma_v_sq);
  // Off-diagonal block is the identity.
  for (int q = 0; q < m; ++q) {
    for (int r = 0; r < m; ++r) {
      problem.add_constraint({{lmi, entry_re(2 * m, r, m + q)}}, Relation::equal,
                             r == q ? 1.0 : 0.0);
      problem.add_constraint({{lmi, entry_im(2 * m, r, m + q)}}, Relation::equal, 0.0);
    }
  }
  problem.add_constraint({{c_tilde, CMat::Identity(m, m)}}, Relation::less_equal, P);
  return problem;
}

SdpProblem build_minmax_problem(const CMat& m_pred, double sigma_v_sq, double P) {
  check_power(P);
  const int m = static_cast<int>(m_pred.rows());
  const CMat info = hpd_inverse(m_pred);

  SdpProblem problem;
  const int c_tilde = problem.add_block("c_tilde", m, Field::complex_hermitian);
  const int t = problem.add_block("t", 1, Field::real_symmetric);
  problem.add_objective(t, CMat::Identity(1, 1));

  for (int i = 0; i < m; ++i) {
    const int size = m + 1;
    const int lmi = problem.add_block("lmi_" + std::to_string(i), size, Field::complex_hermitian);
    problem.add_constraint({{lmi, entry_re(size, 0, 0)}, {t, -CMat::Identity(1, 1)}},
                           Relation::equal, 0.0);
    for (int k = 0; k < m; ++k) {
      problem.add_constraint({{lmi, entry_re(size, 0, 1 + k)}}, Relation::equal,
                             k == i ? 1.0 : 0.0);
      problem.add_constraint({{lmi, entry_im(size, 0, 1 + k)}}, Relation::equal, 0.0);
    }
    pin_information_block(problem, lmi, size, 1, c_tilde, info, sigma_v_sq);
  }
  problem.add_constraint({{c_tilde, CMat::Identity(m, m)}}, Relation::less_equal, P);
  return problem;
}

MinSumSdp minsum_sdp(const CMat& m_pred, double sigma_v_sq, double P) {
  check_power(P);
  const int m = static_cast<int>(m_pred.rows());
  if (P == 0.0) {
    return {CMat::Zero(m, m), hermitianize(m_pred), trace_real(m_pred)};
  }
  const SdpSolution solution = solve(build_minsum_problem(m_pred, sigma_v_sq, P));
  require_optimal(solution, "minsum_sdp");

  MinSumSdp out;
  out.c_tilde = clamp_psd(solution.blocks[0]);
  out.d = hermitianize(solution.blocks[1].bottomRightCorner(m, m));
  out.trace_lower = trace_real(out.d);

  // At the optimum the Schur-complement inequality is tight.
  const CMat implied = hpd_inverse(hpd_inverse(m_pred) + out.c_tilde / sigma_v_sq);
  const double mismatch = (out.d - implied).norm();
  if (mismatch > 1e-6) {
    std::ostringstream msg;
    msg << "minsum_sdp: D* differs from (M^-1 + Ct*/sigma^2)^-1 by " << mismatch;
    throw ConsistencyError(msg.str());
  }
  return out;
}

MinMaxSdp minmax_sdp(const CMat& m_pred, double sigma_v_sq, double P) {
  check_power(P);
  const int m = static_cast<int>(m_pred.rows());
  if (P == 0.0) return {CMat::Zero(m, m), max_diagonal(m_pred)};

  const SdpSolution solution = solve(build_minmax_problem(m_pred, sigma_v_sq, P));
  require_optimal(solution, "minmax_sdp");

  MinMaxSdp out;
  out.c_tilde = clamp_psd(solution.blocks[0]);
  out.t = solution.blocks[1](0, 0).real();

  const CMat implied = hpd_inverse(hpd_inverse(m_pred) + out.c_tilde / sigma_v_sq);
  const double mismatch = std::abs(out.t - max_diagonal(implied));
  if (mismatch > 1e-6) {
    std::ostringstream msg;
    msg << "minmax_sdp: t* differs from the largest diagonal MSE by " << mismatch;
    throw ConsistencyError(msg.str());
  }
  return out;
}

CMat factor_ctilde(const CMat& c_tilde, int L) {
  const int m = static_cast<int>(c_tilde.rows());
  if (L < m) {
    std::ostringstream msg;
    msg << "factor_ctilde: L = " << L << " rows cannot reproduce a rank-" << m << " Ct";
    throw ConfigError(msg.str());
  }
  const HermitianEig eig = hermitian_eig(hermitianize(c_tilde));
  CMat c_star = CMat::Zero(L, m);
  // Row r holds the r-th largest eigenpair.
  for (int r = 0; r < m; ++r) {
    const int k = m - 1 - r;
    const double root = std::sqrt(std::max(eig.values(k), 0.0));
    c_star.row(r) = root * eig.vectors.col(k).adjoint();
  }
  return c_star;
}

Projection project_to_parameters(const CMat& c_star, const CMat& G, double P) {
  check_power(P);
  const CVec target = vec(c_star);
  if (G.rows() != target.size()) {
    throw ContractViolation("project_to_parameters: G rows do not match vec(C*)");
  }
  Projection out;
  if (P == 0.0) {
    out.a = CVec::Zero(G.cols());
    return out;
  }

  Eigen::JacobiSVD<CMat> svd(G);
  svd.setThreshold(1e-12);
  CVec direction;
  if (svd.rank() == G.cols()) {
    const CMat gram = G.adjoint() * G;
    direction = gram.llt().solve(G.adjoint() * target);
  } else {
    direction = Eigen::CompleteOrthogonalDecomposition<CMat>(G).solve(target);
    out.pseudo_inverse = true;
  }
  // vec(C*)^H G (G^H G)^{-1} G^H vec(C*) = ||G direction||^2
  const double denom = (G * direction).squaredNorm();
  if (denom <= 1e-14 * std::max(1.0, target.squaredNorm())) {
    throw DegenerateError("project_to_parameters: vec(C*) is orthogonal to the range of G");
  }
  out.gamma = std::sqrt(P / denom);
  out.a = out.gamma * direction;
  return out;
}

ReconfigResult unstructured_optimum(const CMat& m_pred, const SystemModel& model, double P,
                                    Objective objective) {
  if (model.mode != ObservationMode::vector) {
    throw ConfigError("unstructured_optimum: model must be in vector mode");
  }
  ReconfigResult out;
  CMat c_tilde;
  if (objective == Objective::sum) {
    const MinSumSdp sdp = minsum_sdp(m_pred, model.sigma_v_sq, P);
    c_tilde = sdp.c_tilde;
    out.objective_lower = sdp.trace_lower;
  } else {
    const MinMaxSdp sdp = minmax_sdp(m_pred, model.sigma_v_sq, P);
    c_tilde = sdp.c_tilde;
    out.objective_lower = sdp.t;
  }
  out.c_realized = factor_ctilde(c_tilde, model.L);
  out.m_lower_bound = update_mse(m_pred, out.c_realized, model.sigma_v_sq);
  out.m_achieved = out.m_lower_bound;
  out.objective_achieved = objective_value(out.m_achieved, objective);
  return out;
}

ReconfigResult reconfigure(const CMat& m_pred, const SystemModel& model, double P,
                           Objective objective) {
  if (model.mode != ObservationMode::vector) {
    throw ConfigError("reconfigure: model must be in vector mode");
  }
  check_power(P);
  if (P == 0.0) {
    ReconfigResult out;
    out.a_star = CVec::Zero(model.N);
    out.c_realized = CMat::Zero(model.L, model.M);
    out.m_lower_bound = hermitianize(m_pred);
    out.m_achieved = out.m_lower_bound;
    out.objective_lower = objective_value(m_pred, objective);
    out.objective_achieved = out.objective_lower;
    return out;
  }

  ReconfigResult out = unstructured_optimum(m_pred, model, P, objective);
  const Projection projection = project_to_parameters(out.c_realized, model.G, P);
  out.a_star = projection.a;
  out.gamma = projection.gamma;
  out.pseudo_inverse = projection.pseudo_inverse;
  out.c_realized = unvec(model.G * projection.a, model.L, model.M);
  out.m_achieved = update_mse(m_pred, out.c_realized, model.sigma_v_sq);
  out.objective_achieved = objective_value(out.m_achieved, objective);
  return out;
}

}  // namespace lrkf
