#pragma once

#include "lrkf/matrix.hpp"

namespace lrkf {

enum class Objective { sum, max };

/// Outcome of one reconfiguration step.
///
/// For the vector pipelines the lower bound is the SDP-stage optimum (the
/// MSE reachable by an unstructured C with ||C||_F^2 <= P). For scalar
/// min-sum the closed form is exact, so lower equals achieved; for scalar
/// min-max objective_lower is the relaxation bound t*.
struct ReconfigResult {
  CVec a_star;          // N x 1 (empty for unstructured observation policies)
  CMat c_realized;      // observation matrix actually applied: L x M, or 1 x M (= c^H) in scalar mode
  CMat m_lower_bound;   // MSE obtained with the unstructured optimum C*
  CMat m_achieved;      // MSE obtained with c_realized
  double objective_lower = 0.0;
  double objective_achieved = 0.0;
  double gamma = 0.0;
  bool pseudo_inverse = false;
  bool rank_one = true;  // scalar min-max: whether the relaxed A* was numerically rank one
};

double objective_value(const CMat& mse, Objective objective);

}  // namespace lrkf
