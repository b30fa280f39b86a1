#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lrkf/kalman.hpp"
#include "lrkf/reconfig.hpp"
#include "lrkf/sdp.hpp"

namespace lrkf {

struct RayleighSolution {
  CVec a_star;
  CMat b_matrix;     // (sigma^2 / P) G^H G + G^H M G
  CVec top_eigvec;   // u
  CMat m_achieved;
  double achieved_sum_mse = 0.0;
};

/// Scalar min-sum: a* along B^{-1/2} u, where u is the top eigenvector of
/// B^{-1/2} G^H M^2 G B^{-1/2}, rescaled so that a*^H G^H G a* = P.
/// Requires P > 0; throws SingularityError if B is singular.
RayleighSolution minsum_scalar(const CMat& m_pred, const CMat& G, double sigma_v_sq, double P);

/// E_i(t) = G^H (m_i m_i^H - ([M]_ii - t) M) G with m_i the i-th column of M.
CMat build_E_i(const CMat& m_pred, const CMat& G, int i, double t);

/// find A PSD with ([M]_ii - t) sigma^2 <= tr(A E_i(t)) for every i and
/// tr(A G^H G) <= P.
SdpProblem build_minmax_feasibility_problem(const CMat& m_pred, const CMat& G, double sigma_v_sq,
                                            double P, double t);

struct MinMaxFeasibility {
  bool feasible = false;
  CMat a_matrix;  // witness (meaningful when feasible)
  double margin = 0.0;
};

MinMaxFeasibility minmax_feasible(const CMat& m_pred, const CMat& G, double sigma_v_sq, double P,
                                  double t, double tol = 1e-7);

struct RankOneReconstruction {
  CVec a_star;
  double achieved_max_mse = 0.0;
  bool rank_one = false;
};

/// Rank-one A*: scaled principal eigenvector. Otherwise the best of the
/// principal eigenvector and `randomizations` draws x ~ CN(0, A*), each
/// rescaled to a^H G^H G a = P and scored by the true max diagonal MSE.
/// Throws DegenerateError if A* is numerically zero.
RankOneReconstruction rank_one_reconstruct(const CMat& a_matrix, const CMat& G, double P,
                                           const CMat& m_pred, double sigma_v_sq,
                                           int randomizations = 100,
                                           std::uint64_t seed = 0x5eedULL);

struct ScalarMinMaxReport {
  double t_star = 0.0;
  CVec a_star;
  double achieved_max_mse = 0.0;
  CMat a_matrix;
  bool rank_one = false;
  int bisection_iters = 0;
  CMat m_achieved;
  /// Every bisection probe (t, feasible) in visiting order.
  std::vector<std::pair<double, bool>> probes;
};

struct BisectionOptions {
  double eps = 1e-6;
  double feasibility_tol = 1e-7;
};

/// Bisection on t over [0, max_i [M]_ii]. t* is the midpoint of the final
/// bracket; A* minimizes tr(A G^H G) over the relaxed feasible set at the
/// smallest feasible probe. Throws SolverError if the upper end of the
/// bracket is reported infeasible and ConsistencyError if the verdicts are
/// not monotone in t.
ScalarMinMaxReport minmax_scalar_bisection(const CMat& m_pred, const CMat& G, double sigma_v_sq,
                                           double P, const BisectionOptions& options = {});

}  // namespace lrkf
