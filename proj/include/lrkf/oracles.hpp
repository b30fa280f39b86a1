#pragma once

#include <cstdint>

#include "lrkf/matrix.hpp"

// Independent reference computations used by the test suites and the
// `oracle` subcommand. Nothing here calls the SDP solver or the
// reconfiguration pipelines.
namespace lrkf::oracle {

/// min sum_i (1/m_i + p_i/sigma^2)^{-1} over p >= 0, sum p = P, by bisection
/// on the water level. Optionally returns the allocation.
double waterfill_sum_mse(const RVec& m_diag, double sigma_v_sq, double P, RVec* powers = nullptr);

/// min over p in [0, P] of max((1/m1 + p/s2)^{-1}, (1/m2 + (P-p)/s2)^{-1}):
/// uniform grid followed by ternary refinement of the best cell.
double two_axis_minmax(double m1, double m2, double sigma_v_sq, double P, int grid = 4001);

/// tr(M) - c^H M^2 c / (sigma^2 + c^H M c).
double scalar_sum_mse(const CMat& m_pred, const CVec& c, double sigma_v_sq);

/// G = I_2, M = diag(m1, m2): grid over the power placed on the first axis.
double scalar_minsum_grid_2d(double m1, double m2, double sigma_v_sq, double P, int grid = 100001);

/// Multi-start projected gradient ascent of the Rayleigh objective
/// a^H G^H M^2 G a / (sigma^2 + a^H G^H M G a) on a^H G^H G a = P;
/// returns the smallest sum MSE found.
double projected_gradient_minsum_scalar(const CMat& m_pred, const CMat& G, double sigma_v_sq,
                                        double P, int starts = 20, int iterations = 3000,
                                        std::uint64_t seed = 7);

/// Scalar state (M = 1): the max-MSE level reachable with power P,
/// m - m^2 P |g|^2 / (sigma^2 + m P |g|^2).
double scalar_minmax_threshold_1d(double m, double g_abs_sq, double sigma_v_sq, double P);

/// Solution of M = F M F^H + Q via the Kronecker linear system.
CMat lyapunov_solve(const CMat& F, const CMat& Q);

/// Smallest tr((M^{-1} + Ct/sigma^2)^{-1}) over `count` random PSD Ct with
/// tr(Ct) <= P.
double random_feasible_min_trace(const CMat& m_pred, double sigma_v_sq, double P, int count,
                                 std::uint64_t seed);

}  // namespace lrkf::oracle
