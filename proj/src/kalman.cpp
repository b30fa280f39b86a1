#include "lrkf/kalman.hpp"

#include <sstream>

#include "lrkf/errors.hpp"

namespace lrkf {

SystemModel make_system_model(CMat F, CMat Q, double sigma_v_sq, CMat G, int L,
                              ObservationMode mode) {
  if (F.rows() != F.cols() || F.rows() == 0) throw ConfigError("F must be square and nonempty");
  const int m = static_cast<int>(F.rows());
  if (Q.rows() != m || Q.cols() != m) throw ConfigError("Q must match the dimension of F");
  if (!is_hermitian(Q) || min_eigenvalue(Q) < -1e-8 * (1.0 + Q.norm())) {
    throw ConfigError("Q must be Hermitian PSD");
  }
  if (!(sigma_v_sq > 0.0)) throw ConfigError("sigma_v_sq must be positive");
  if (mode == ObservationMode::scalar) L = 1;
  if (L < 1) throw ConfigError("L must be at least 1");
  const Eigen::Index expected_rows = mode == ObservationMode::vector ? Eigen::Index{L} * m : m;
  if (G.rows() != expected_rows || G.cols() < 1) {
    std::ostringstream msg;
    msg << "G must have " << expected_rows << " rows and at least one column";
    throw ConfigError(msg.str());
  }

  SystemModel model;
  model.M = m;
  model.L = L;
  model.N = static_cast<int>(G.cols());
  model.mode = mode;
  model.sigma_v_sq = sigma_v_sq;
  Eigen::JacobiSVD<CMat> svd(G);
  svd.setThreshold(1e-12);
  model.g_full_rank = svd.rank() == G.cols();
  model.F = std::move(F);
  model.Q = hermitianize(Q);
  model.G = std::move(G);
  return model;
}

CMat predict_mse(const CMat& m_post_prev, const SystemModel& model) {
  return hermitianize(model.F * m_post_prev * model.F.adjoint() + model.Q);
}

CMat kalman_gain(const CMat& m_pred, const CMat& c, double sigma_v_sq) {
  const Eigen::Index l = c.rows();
  const CMat inner = hermitianize(sigma_v_sq * CMat::Identity(l, l) + c * m_pred * c.adjoint());
  const CMat mch = m_pred * c.adjoint();
  // K = M C^H S^{-1}  <=>  S K^H = C M
  return inner.llt().solve(mch.adjoint()).adjoint();
}

CMat update_mse(const CMat& m_pred, const CMat& c, double sigma_v_sq) {
  const Eigen::Index m = m_pred.rows();
  const CMat gain = kalman_gain(m_pred, c, sigma_v_sq);
  const CMat gain_form = hermitianize((CMat::Identity(m, m) - gain * c) * m_pred);
  const CMat information = hpd_inverse(hpd_inverse(m_pred) + c.adjoint() * c / sigma_v_sq);

  const double diff = (gain_form - information).norm();
  if (diff > 1e-9 * m_pred.norm()) {
    std::ostringstream msg;
    msg << "update_mse: gain and information forms differ by " << diff;
    throw ConsistencyError(msg.str());
  }
  return information;
}

CMat update_mse_scalar(const CMat& m_pred, const CVec& c, double sigma_v_sq) {
  const CVec mc = m_pred * c;
  const double denom = sigma_v_sq + c.dot(mc).real();
  return hermitianize(m_pred - mc * mc.adjoint() / denom);
}

double max_diagonal(const CMat& m) { return m.diagonal().real().maxCoeff(); }

double trace_real(const CMat& m) { return m.trace().real(); }

}  // namespace lrkf
