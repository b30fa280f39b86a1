#include "lrkf/oracles.hpp"

#include <cmath>
#include <limits>

#include "lrkf/rng.hpp"

namespace lrkf::oracle {

double waterfill_sum_mse(const RVec& m_diag, double sigma_v_sq, double P, RVec* powers) {
  // KKT: p_i = sigma^2 (nu - 1/m_i)^+, pick nu so that sum p_i = P.
  auto allocation = [&](double nu) {
    RVec p(m_diag.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      p(i) = sigma_v_sq * std::max(nu - 1.0 / m_diag(i), 0.0);
    }
    return p;
  };
  double lo = 0.0;
  double hi = 1.0 / m_diag.minCoeff() + P / sigma_v_sq + 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (allocation(mid).sum() > P) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  RVec p = allocation(0.5 * (lo + hi));
  if (p.sum() > 0.0) p *= P / p.sum();
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) total += 1.0 / (1.0 / m_diag(i) + p(i) / sigma_v_sq);
  if (powers != nullptr) *powers = p;
  return total;
}

double two_axis_minmax(double m1, double m2, double sigma_v_sq, double P, int grid) {
  auto value = [&](double p) {
    const double e1 = 1.0 / (1.0 / m1 + p / sigma_v_sq);
    const double e2 = 1.0 / (1.0 / m2 + (P - p) / sigma_v_sq);
    return std::max(e1, e2);
  };
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid; ++k) {
    const double v = value(P * k / grid);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  double lo = P * std::max(best - 1, 0) / grid;
  double hi = P * std::min(best + 1, grid) / grid;
  for (int k = 0; k < 200; ++k) {
    const double a = lo + (hi - lo) / 3.0;
    const double b = hi - (hi - lo) / 3.0;
    if (value(a) <= value(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return std::min(best_value, value(0.5 * (lo + hi)));
}

double scalar_sum_mse(const CMat& m_pred, const CVec& c, double sigma_v_sq) {
  const CVec mc = m_pred * c;
  const double num = mc.squaredNorm();
  const double den = sigma_v_sq + c.dot(mc).real();
  return m_pred.trace().real() - num / den;
}

double scalar_minsum_grid_2d(double m1, double m2, double sigma_v_sq, double P, int grid) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid; ++k) {
    const double x = P * k / grid;  // power on the first axis
    const double gain = (m1 * m1 * x + m2 * m2 * (P - x)) / (sigma_v_sq + m1 * x + m2 * (P - x));
    best = std::min(best, m1 + m2 - gain);
  }
  return best;
}

double projected_gradient_minsum_scalar(const CMat& m_pred, const CMat& G, double sigma_v_sq,
                                        double P, int starts, int iterations, std::uint64_t seed) {
  // a = R^{-1} x sqrt(P) with G^H G = R^H R and ||x|| = 1.
  const CMat gram = G.adjoint() * G;
  const Eigen::LLT<CMat> llt(gram);
  const CMat r = llt.matrixU();
  const CMat r_inv = r.triangularView<Eigen::Upper>().solve(CMat::Identity(r.rows(), r.cols()));
  const CMat mg = m_pred * G;
  const CMat num = r_inv.adjoint() * (mg.adjoint() * mg) * r_inv * P;
  const CMat den = r_inv.adjoint() * (G.adjoint() * mg) * r_inv * P;

  auto objective = [&](const CVec& x) {
    return (x.dot(num * x)).real() / (sigma_v_sq + (x.dot(den * x)).real());
  };

  Rng rng(seed);
  double best_gain = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    CVec x(r.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.complex_normal();
    x.normalize();
    double step = 1.0;
    double f = objective(x);
    for (int k = 0; k < iterations && step > 1e-14; ++k) {
      const double d = sigma_v_sq + (x.dot(den * x)).real();
      const CVec grad = (num * x - f * (den * x)) * (2.0 / d);
      const CVec tangent = grad - x * x.dot(grad);
      CVec trial = (x + step * tangent).normalized();
      const double f_trial = objective(trial);
      if (f_trial >= f) {
        x = trial;
        f = f_trial;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    best_gain = std::max(best_gain, f);
  }
  return m_pred.trace().real() - best_gain;
}

double scalar_minmax_threshold_1d(double m, double g_abs_sq, double sigma_v_sq, double P) {
  return m - m * m * P * g_abs_sq / (sigma_v_sq + m * P * g_abs_sq);
}

CMat lyapunov_solve(const CMat& F, const CMat& Q) {
  // vec(F M F^H) = (conj(F) kron F) vec(M), column-major.
  const Eigen::Index n = F.rows();
  CMat kron(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) kron.block(i * n, j * n, n, n) = std::conj(F(i, j)) * F;
  }
  CVec q(n * n);
  for (Eigen::Index j = 0; j < n; ++j) q.segment(j * n, n) = Q.col(j);
  const CMat system = CMat::Identity(n * n, n * n) - kron;
  const CVec m = system.fullPivLu().solve(q);
  CMat out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) out.col(j) = m.segment(j * n, n);
  return out;
}

double random_feasible_min_trace(const CMat& m_pred, double sigma_v_sq, double P, int count,
                                 std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index n = m_pred.rows();
  const CMat info = m_pred.inverse();
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < count; ++k) {
    const CMat w = rng.complex_normal_matrix(n, 1 + k % n);
    CMat ct = w * w.adjoint();
    ct *= P * rng.uniform() / ct.trace().real();
    const CMat mse = (info + ct / sigma_v_sq).inverse();
    best = std::min(best, mse.trace().real());
  }
  return best;
}

}  // namespace lrkf::oracle
