#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "lrkf/matrix.hpp"

namespace lrkf {

/// Seeded source of the Gaussian draws used by the harness.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distributions are implemented here rather than through
/// <random>, whose normal_distribution differs between standard libraries:
///
///   uniform(): (engine() >> 11) * 2^-53, in [0, 1)
///   complex_normal(): u1 = 1 - uniform(), u2 = uniform(),
///                     sqrt(-ln u1) * (cos(2 pi u2) + i sin(2 pi u2))   ~ CN(0, 1)
///   normal(): sqrt(-2 ln u1) cos(2 pi u2)                              ~ N(0, 1)
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/box-muller-v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();
  cdouble complex_normal();

  /// rows x cols matrix of i.i.d. CN(0, 1) entries, filled column by column.
  CMat complex_normal_matrix(Eigen::Index rows, Eigen::Index cols);

  /// Draw from CN(0, cov) as cov^{1/2} z.
  CVec complex_normal_vector(const CMat& cov_sqrt);

 private:
  std::mt19937_64 engine_;
};

}  // namespace lrkf
