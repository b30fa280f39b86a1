#pragma once

#include "lrkf/matrix.hpp"

namespace lrkf {

enum class ObservationMode { vector, scalar };

/// theta_{n+1} = F theta_n + u_n,  u_n ~ CN(0, Q)
/// vector mode: y_n = C theta_n + v_n,  vec(C) = G a,  G is (L M) x N
/// scalar mode: y_n = c^H theta_n + v_n,  c = G a,     G is M x N
struct SystemModel {
  CMat F;
  CMat Q;
  double sigma_v_sq = 1.0;
  CMat G;
  int M = 0;
  int L = 0;
  int N = 0;
  ObservationMode mode = ObservationMode::vector;
  /// False when G lost column rank; projections then fall back to the
  /// minimum-norm pseudo-inverse.
  bool g_full_rank = true;
};

/// Validates shapes, Q PSD and sigma_v_sq > 0, and records the rank of G.
/// L is ignored (set to 1) in scalar mode. Throws ConfigError.
SystemModel make_system_model(CMat F, CMat Q, double sigma_v_sq, CMat G, int L,
                              ObservationMode mode);

struct BeliefState {
  CMat m_pred;  // M_{n|n-1}
  CMat m_post;  // M_{n|n}
  int step = 0;
};

/// F M F^H + Q, re-Hermitianized.
CMat predict_mse(const CMat& m_post_prev, const SystemModel& model);

/// M C^H (sigma^2 I + C M C^H)^{-1}.
CMat kalman_gain(const CMat& m_pred, const CMat& c, double sigma_v_sq);

/// Posterior MSE for observation matrix C. Evaluates the gain form
/// (I - K C) M and the information form (M^{-1} + C^H C / sigma^2)^{-1},
/// throws ConsistencyError if they differ by more than 1e-9 ||M||_F, and
/// returns the information form.
CMat update_mse(const CMat& m_pred, const CMat& c, double sigma_v_sq);

/// Rank-one downdate for y = c^H theta + v:
/// M - M c c^H M / (sigma^2 + c^H M c).
CMat update_mse_scalar(const CMat& m_pred, const CVec& c, double sigma_v_sq);

double max_diagonal(const CMat& m);
double trace_real(const CMat& m);

}  // namespace lrkf
