#include "lrkf/rng.hpp"

#include <cmath>
#include <numbers>

namespace lrkf {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

cdouble Rng::complex_normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-std::log(u1));
  const double phase = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phase), r * std::sin(phase)};
}

CMat Rng::complex_normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  CMat out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = complex_normal();
  }
  return out;
}

CVec Rng::complex_normal_vector(const CMat& cov_sqrt) {
  CVec z(cov_sqrt.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = complex_normal();
  return cov_sqrt * z;
}

}  // namespace lrkf
