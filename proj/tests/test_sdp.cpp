#include <sstream>

#include "doctest.h"
#include "lrkf/errors.hpp"
#include "lrkf/sdp.hpp"
#include "lrkf/vector_reconfig.hpp"
#include "test_util.hpp"

using namespace lrkf;
using lrkf::testing::diag_mat;

namespace {

// The invariants every optimal solution must meet.
void check_optimal(const SdpProblem& p, const SdpSolution& s) {
  REQUIRE(s.status == SdpStatus::optimal);
  for (const auto& x : s.blocks) CHECK(min_eigenvalue(x) >= -1e-8);
  for (std::size_t i = 0; i < p.constraints().size(); ++i) {
    const double lhs = p.evaluate_constraint(i, s.blocks);
    const double rhs = p.constraints()[i].rhs;
    const double tol = 1e-7 * (1.0 + std::abs(rhs));
    switch (p.constraints()[i].relation) {
      case Relation::equal: CHECK(std::abs(lhs - rhs) <= tol); break;
      case Relation::less_equal: CHECK(lhs <= rhs + tol); break;
      case Relation::greater_equal: CHECK(lhs >= rhs - tol); break;
    }
  }
  CHECK(s.gap >= -1e-9);
  CHECK(s.gap <= 1e-6 * (1.0 + std::abs(s.objective)));
}

}  // namespace

TEST_CASE("1x1 block: min tr X with tr X = 1") {
  SdpProblem p;
  const int x = p.add_block("x", 1, Field::real_symmetric);
  p.add_objective(x, CMat::Identity(1, 1));
  p.add_constraint({{x, CMat::Identity(1, 1)}}, Relation::equal, 1.0);
  const auto s = solve(p);
  check_optimal(p, s);
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.blocks[0](0, 0).real() == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("min tr(diag(1,2) X) with tr X = 1 picks e1 e1^T") {
  for (Field f : {Field::real_symmetric, Field::complex_hermitian}) {
    SdpProblem p;
    const int x = p.add_block("x", 2, f);
    p.add_objective(x, diag_mat({1.0, 2.0}));
    p.add_constraint({{x, CMat::Identity(2, 2)}}, Relation::equal, 1.0);
    const auto s = solve(p);
    check_optimal(p, s);
    CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-7));
    CHECK((s.blocks[0] - diag_mat({1.0, 0.0})).norm() < 1e-6);
  }
}

TEST_CASE("complex coefficients: minimize Re X01 + ... through entry_re / entry_im") {
  // min tr(H X) with tr X = 1 over complex Hermitian X: optimum is lambda_min(H).
  Rng rng(31);
  for (int rep = 0; rep < 5; ++rep) {
    const CMat h = lrkf::testing::random_hermitian(rng, 3);
    SdpProblem p;
    const int x = p.add_block("x", 3, Field::complex_hermitian);
    p.add_objective(x, h);
    p.add_constraint({{x, CMat::Identity(3, 3)}}, Relation::equal, 1.0);
    const auto s = solve(p);
    check_optimal(p, s);
    CHECK(s.objective == doctest::Approx(min_eigenvalue(h)).epsilon(1e-6));
    // Objective reported by the solver matches direct complex-domain evaluation.
    CHECK(std::abs(s.objective - (h * s.blocks[0]).trace().real()) < 1e-7);
  }
}

TEST_CASE("entry selectors pick real and imaginary parts") {
  CMat x(3, 3);
  x << 1.0, cdouble(2, 3), 0.0, cdouble(2, -3), 4.0, cdouble(5, -6), 0.0, cdouble(5, 6), 7.0;
  CHECK((entry_re(3, 0, 1) * x).trace().real() == doctest::Approx(2.0));
  CHECK((entry_im(3, 0, 1) * x).trace().real() == doctest::Approx(3.0));
  CHECK((entry_im(3, 1, 2) * x).trace().real() == doctest::Approx(-6.0));
  CHECK((entry_re(3, 2, 2) * x).trace().real() == doctest::Approx(7.0));
  CHECK(is_hermitian(entry_im(3, 0, 2)));
}

TEST_CASE("Eq-6 style min-sum instance with identity prediction") {
  const SdpProblem p = build_minsum_problem(CMat::Identity(4, 4), 0.5, 2.0);
  const auto s = solve(p);
  check_optimal(p, s);
  CHECK(s.objective == doctest::Approx(2.0).epsilon(1e-6));
  CHECK((s.blocks[0] - 0.5 * CMat::Identity(4, 4)).norm() < 1e-5);
}

TEST_CASE("solve is deterministic") {
  const SdpProblem p = build_minmax_problem(diag_mat({2.0, 1.0, 1.5}), 0.5, 1.0);
  const auto a = solve(p);
  const auto b = solve(p);
  CHECK(a.objective == b.objective);
  CHECK(a.iterations == b.iterations);
  for (std::size_t j = 0; j < a.blocks.size(); ++j) CHECK(a.blocks[j] == b.blocks[j]);
}

TEST_CASE("infeasible problem is reported") {
  SdpProblem p;
  const int x = p.add_block("x", 2, Field::real_symmetric);
  p.add_objective(x, CMat::Identity(2, 2));
  p.add_constraint({{x, CMat::Identity(2, 2)}}, Relation::less_equal, 1.0);
  p.add_constraint({{x, CMat::Identity(2, 2)}}, Relation::greater_equal, 2.0);
  CHECK(solve(p).status == SdpStatus::infeasible);
}

TEST_CASE("check_feasibility") {
  SUBCASE("tr X <= 1 is feasible with X = 0 as a witness") {
    SdpProblem p;
    const int x = p.add_block("x", 2, Field::complex_hermitian);
    p.add_constraint({{x, CMat::Identity(2, 2)}}, Relation::less_equal, 1.0);
    const auto r = check_feasibility(p);
    CHECK(r.feasible);
    CHECK(r.margin <= 1e-7);
    REQUIRE(r.witness.size() == 1);
    CHECK(p.max_violation(r.witness) <= 1e-7);
    CHECK(min_eigenvalue(r.witness[0]) >= -1e-7);
  }
  SUBCASE("contradictory traces are infeasible") {
    SdpProblem p;
    const int x = p.add_block("x", 2, Field::real_symmetric);
    p.add_constraint({{x, CMat::Identity(2, 2)}}, Relation::less_equal, 1.0);
    p.add_constraint({{x, CMat::Identity(2, 2)}}, Relation::greater_equal, 2.0);
    const auto r = check_feasibility(p);
    CHECK_FALSE(r.feasible);
    CHECK(r.margin > 1e-3);
  }
  SUBCASE("loosening a bound never flips feasible to infeasible") {
    bool seen_feasible = false;
    for (double b : {0.5, 0.9, 0.99, 1.0, 1.01, 1.5, 3.0}) {
      SdpProblem p;
      const int x = p.add_block("x", 2, Field::real_symmetric);
      p.add_constraint({{x, diag_mat({1.0, 2.0})}}, Relation::greater_equal, 1.0);
      p.add_constraint({{x, CMat::Identity(2, 2)}}, Relation::less_equal, b);
      const bool feasible = check_feasibility(p).feasible;
      if (seen_feasible) CHECK(feasible);
      seen_feasible = seen_feasible || feasible;
    }
    CHECK(seen_feasible);
  }
}

TEST_CASE("construction errors") {
  SdpProblem p;
  const int x = p.add_block("x", 2, Field::real_symmetric);
  CHECK_THROWS_AS(p.add_objective(x, CMat::Identity(3, 3)), ContractViolation);
  CHECK_THROWS_AS(p.add_objective(5, CMat::Identity(2, 2)), ContractViolation);
  CMat nonherm = CMat::Zero(2, 2);
  nonherm(0, 1) = 1.0;
  CHECK_THROWS_AS(p.add_constraint({{x, nonherm}}, Relation::equal, 0.0), ContractViolation);
  CMat imag = CMat::Zero(2, 2);
  imag(0, 1) = cdouble(0, 1);
  imag(1, 0) = cdouble(0, -1);
  CHECK_THROWS_AS(p.add_objective(x, imag), ContractViolation);  // complex coeff on a real block
  CHECK_THROWS_AS(p.add_block("bad", 0, Field::real_symmetric), ContractViolation);
}

TEST_CASE("dump_problem format") {
  SdpProblem p;
  const int x = p.add_block("x", 2, Field::complex_hermitian);
  p.add_objective(x, diag_mat({1.0, 2.0}));
  p.add_constraint({{x, CMat::Identity(2, 2)}}, Relation::equal, 1.0);
  std::ostringstream out;
  dump_problem(p, out);
  const std::string text = out.str();
  CHECK(text.rfind("lrkf-sdp 1\n", 0) == 0);
  CHECK(text.find("blocks 1\n0 x complex 2\n") != std::string::npos);
  CHECK(text.find("constraint 0 eq 1 2\n") != std::string::npos);
  CHECK(text.size() >= 4);
  CHECK(text.substr(text.size() - 4) == "end\n");
}
