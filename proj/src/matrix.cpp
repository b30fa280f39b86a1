#include "lrkf/matrix.hpp"

#include <cmath>
#include <sstream>

#include "lrkf/errors.hpp"

namespace lrkf {

bool is_hermitian(const CMat& h) {
  if (h.rows() != h.cols()) return false;
  const double tol = 1e-10 * (1.0 + h.norm());
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

CMat hermitianize(const CMat& h) { return 0.5 * (h + h.adjoint()); }

HermitianEig hermitian_eig(const CMat& h) {
  if (!is_hermitian(h)) {
    throw ContractViolation("hermitian_eig: input is not Hermitian");
  }
  const Eigen::SelfAdjointEigenSolver<CMat> solver(hermitianize(h));
  if (solver.info() != Eigen::Success) {
    throw ContractViolation("hermitian_eig: eigensolver did not converge");
  }
  HermitianEig out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
    auto col = out.vectors.col(j);
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      // Strict comparison with a small slack keeps the lowest index on ties.
      const double a = std::abs(col(i));
      if (a > best_abs * (1.0 + 1e-12)) {
        best_abs = a;
        best = i;
      }
    }
    if (best_abs > 0.0) col *= std::conj(col(best)) / best_abs;
    col(best) = cdouble(col(best).real(), 0.0);
  }
  return out;
}

double min_eigenvalue(const CMat& h) {
  const Eigen::SelfAdjointEigenSolver<CMat> solver(hermitianize(h), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double max_eigenvalue(const CMat& h) {
  const Eigen::SelfAdjointEigenSolver<CMat> solver(hermitianize(h), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(solver.eigenvalues().size() - 1);
}

CMat psd_sqrt(const CMat& h) {
  const HermitianEig eig = hermitian_eig(h);
  const double floor = -1e-8 * (1.0 + h.norm());
  RVec root(eig.values.size());
  for (Eigen::Index i = 0; i < root.size(); ++i) {
    const double lambda = eig.values(i);
    if (lambda < floor) {
      std::ostringstream msg;
      msg << "psd_sqrt: matrix is not PSD (eigenvalue " << lambda << ")";
      throw ContractViolation(msg.str());
    }
    root(i) = std::sqrt(std::max(lambda, 0.0));
  }
  return hermitianize(eig.vectors * root.asDiagonal() * eig.vectors.adjoint());
}

CMat psd_inv_sqrt(const CMat& h) {
  const HermitianEig eig = hermitian_eig(h);
  const double n = static_cast<double>(h.rows());
  const double threshold = 1e-12 * std::abs(h.trace().real()) / n;
  const double lambda_min = eig.values(0);
  if (!(lambda_min >= threshold) || lambda_min <= 0.0) {
    std::ostringstream msg;
    msg << "psd_inv_sqrt: singular matrix, smallest eigenvalue " << lambda_min;
    throw SingularityError(msg.str(), lambda_min);
  }
  const RVec inv_root = eig.values.cwiseSqrt().cwiseInverse();
  return hermitianize(eig.vectors * inv_root.asDiagonal() * eig.vectors.adjoint());
}

CMat hpd_inverse(const CMat& h) {
  const Eigen::LLT<CMat> llt(hermitianize(h));
  if (llt.info() != Eigen::Success) {
    const double lambda = min_eigenvalue(h);
    std::ostringstream msg;
    msg << "hpd_inverse: matrix is not positive definite (eigenvalue " << lambda << ")";
    throw SingularityError(msg.str(), lambda);
  }
  return hermitianize(llt.solve(CMat::Identity(h.rows(), h.cols())));
}

CVec vec(const CMat& c) {
  CVec out(c.size());
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) out(j * c.rows() + i) = c(i, j);
  }
  return out;
}

CMat unvec(const CVec& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) {
    throw ContractViolation("unvec: length does not match rows * cols");
  }
  CMat out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = v(j * rows + i);
  }
  return out;
}

RMat complex_to_real_embed(const CMat& h) {
  const Eigen::Index n = h.rows();
  RMat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  out.bottomRightCorner(n, n) = h.real();
  return out;
}

CMat real_to_complex(const RMat& s) {
  const Eigen::Index n = s.rows() / 2;
  const RMat re = 0.5 * (s.topLeftCorner(n, n) + s.bottomRightCorner(n, n));
  const RMat im = 0.5 * (s.bottomLeftCorner(n, n) - s.topRightCorner(n, n));
  CMat out(n, n);
  out.real() = re;
  out.imag() = im;
  return out;
}

double frobenius_norm_sq(const CMat& c) { return c.squaredNorm(); }

}  // namespace lrkf
