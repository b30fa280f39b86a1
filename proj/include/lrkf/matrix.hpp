#pragma once

#include <Eigen/Dense>
#include <complex>

namespace lrkf {

using cdouble = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

struct HermitianEig {
  RVec values;   // ascending
  CMat vectors;  // columns, unitary
};

/// True when max_ij |H_ij - conj(H_ji)| <= 1e-10 (1 + ||H||_F).
bool is_hermitian(const CMat& h);

/// (H + H^H) / 2.
CMat hermitianize(const CMat& h);

/// Eigendecomposition of a Hermitian matrix. Eigenvalues ascend; each
/// eigenvector is rotated so its largest-magnitude entry is real positive
/// (ties go to the lowest index).
/// Throws ContractViolation on non-Hermitian input.
HermitianEig hermitian_eig(const CMat& h);

double min_eigenvalue(const CMat& h);
double max_eigenvalue(const CMat& h);

/// Principal square root of a PSD matrix. Eigenvalues in
/// [-1e-8 (1 + ||H||_F), 0) are clamped to zero; anything more negative is a
/// contract violation.
CMat psd_sqrt(const CMat& h);

/// H^{-1/2} for PD H. Throws SingularityError when the smallest eigenvalue is
/// below 1e-12 * trace / size.
CMat psd_inv_sqrt(const CMat& h);

/// Inverse of a Hermitian PD matrix via Cholesky, re-Hermitianized.
CMat hpd_inverse(const CMat& h);

/// Column-major stacking: entry (i, j) of an L x M matrix lands at j * L + i.
CVec vec(const CMat& c);
CMat unvec(const CVec& v, Eigen::Index rows, Eigen::Index cols);

/// [[Re H, -Im H], [Im H, Re H]].
RMat complex_to_real_embed(const CMat& h);

/// Inverse of complex_to_real_embed for arbitrary real symmetric input:
/// averages the diagonal blocks and antisymmetrizes the off-diagonal ones.
CMat real_to_complex(const RMat& s);

double frobenius_norm_sq(const CMat& c);

}  // namespace lrkf
