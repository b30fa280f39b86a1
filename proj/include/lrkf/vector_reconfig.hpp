#pragma once

#include "lrkf/kalman.hpp"
#include "lrkf/reconfig.hpp"
#include "lrkf/sdp.hpp"

namespace lrkf {

/// min tr(D)  s.t.  [[M^{-1} + Ct / sigma^2, I], [I, D]] PSD,  tr(Ct) <= P,  Ct PSD.
/// Blocks: "c_tilde" (M x M) and "lmi" (2M x 2M); the lmi block's lower-right
/// corner is D.
SdpProblem build_minsum_problem(const CMat& m_pred, double sigma_v_sq, double P);

/// min t  s.t.  [[t, e_i^T], [e_i, M^{-1} + Ct / sigma^2]] PSD for i = 1..M,
///              tr(Ct) <= P,  Ct PSD.
/// Blocks: "c_tilde", "t" (1 x 1 real) and one "lmi_i" of size M + 1 per i.
SdpProblem build_minmax_problem(const CMat& m_pred, double sigma_v_sq, double P);

struct MinSumSdp {
  CMat c_tilde;
  CMat d;
  double trace_lower = 0.0;
};

struct MinMaxSdp {
  CMat c_tilde;
  double t = 0.0;
};

/// Throws ConfigError for P < 0, SolverError if the SDP is not solved and
/// ConsistencyError if D* is not (M^{-1} + Ct*/sigma^2)^{-1} to 1e-6.
MinSumSdp minsum_sdp(const CMat& m_pred, double sigma_v_sq, double P);

/// Same error behaviour; checks t* against the largest diagonal entry of
/// (M^{-1} + Ct*/sigma^2)^{-1}.
MinMaxSdp minmax_sdp(const CMat& m_pred, double sigma_v_sq, double P);

/// C* = Sigma^{1/2} U^H from Ct* = U Sigma U^H with eigenvalues in
/// descending order, padded with zero rows up to L. Throws ConfigError if L < M.
CMat factor_ctilde(const CMat& c_tilde, int L);

struct Projection {
  CVec a;
  double gamma = 0.0;
  bool pseudo_inverse = false;
};

/// a* = gamma (G^H G)^{-1} G^H vec(C*), gamma chosen so a*^H G^H G a* = P.
/// Rank-deficient G falls back to the minimum-norm pseudo-inverse and sets
/// the flag. Throws DegenerateError when vec(C*) is orthogonal to range(G).
Projection project_to_parameters(const CMat& c_star, const CMat& G, double P);

/// SDP stage -> factorization -> projection -> achieved MSE.
ReconfigResult reconfigure(const CMat& m_pred, const SystemModel& model, double P,
                           Objective objective);

/// The unstructured optimum C* used directly as the observation matrix.
ReconfigResult unstructured_optimum(const CMat& m_pred, const SystemModel& model, double P,
                                    Objective objective);

}  // namespace lrkf
