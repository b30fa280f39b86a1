#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lrkf/matrix.hpp"

namespace lrkf {

enum class Field { complex_hermitian, real_symmetric };
enum class Relation { less_equal, equal, greater_equal };

struct SdpBlock {
  std::string name;
  int size = 0;
  Field field = Field::complex_hermitian;
};

/// tr(coeff * X_block). coeff must be Hermitian (real symmetric for real
/// blocks); the term contributes Re tr(coeff X).
struct SdpTerm {
  int block = 0;
  CMat coeff;
};

struct SdpConstraint {
  std::vector<SdpTerm> terms;
  Relation relation = Relation::equal;
  double rhs = 0.0;
};

/// minimize   sum_j tr(C_j X_j)
/// subject to sum_j tr(A_ij X_j) (<= | = | >=) b_i,   X_j PSD.
///
/// Affine LMIs are written by declaring the whole LMI matrix as a block and
/// pinning its entries with equality constraints (see entry_re / entry_im).
/// A 1 x 1 real block is a nonnegative scalar.
class SdpProblem {
 public:
  int add_block(std::string name, int size, Field field);
  void add_objective(int block, CMat coeff);
  void add_constraint(std::vector<SdpTerm> terms, Relation relation, double rhs);

  const std::vector<SdpBlock>& blocks() const { return blocks_; }
  const std::vector<SdpTerm>& objective() const { return objective_; }
  const std::vector<SdpConstraint>& constraints() const { return constraints_; }

  /// Sum of the objective terms evaluated at the given block values.
  double evaluate_objective(const std::vector<CMat>& x) const;
  /// Left-hand side of constraint i at the given block values.
  double evaluate_constraint(std::size_t i, const std::vector<CMat>& x) const;
  /// Largest violation of any trace constraint (0 when all hold).
  double max_violation(const std::vector<CMat>& x) const;

 private:
  void check_term(const SdpTerm& term) const;

  std::vector<SdpBlock> blocks_;
  std::vector<SdpTerm> objective_;
  std::vector<SdpConstraint> constraints_;
};

/// Coefficient selecting Re X(p, q) of an n x n Hermitian block.
CMat entry_re(int n, int p, int q);
/// Coefficient selecting Im X(p, q) of an n x n Hermitian block (p != q).
CMat entry_im(int n, int p, int q);

enum class SdpStatus { optimal, infeasible, max_iterations };

const char* to_string(SdpStatus status);

struct SdpSolution {
  SdpStatus status = SdpStatus::max_iterations;
  std::vector<CMat> blocks;
  double objective = 0.0;
  double dual_objective = 0.0;
  /// <X, Z> at the returned iterate; nonnegative.
  double gap = 0.0;
  double max_violation = 0.0;
  int iterations = 0;
};

struct SdpOptions {
  double gap_tol = 1e-12;
  double feas_tol = 1e-11;
  int max_iters = 200;
  double step_fraction = 0.95;
};

/// Infeasible-start primal-dual path following (HKM direction with a
/// Mehrotra corrector) on the real embedding of the problem. Deterministic.
SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

struct FeasibilityResult {
  bool feasible = false;
  /// Optimal phase-I shift s*; the constraint set is feasible iff s* <= tol.
  double margin = 0.0;
  /// Block values satisfying the constraints up to max(s*, 0).
  std::vector<CMat> witness;
  SdpStatus status = SdpStatus::max_iterations;
};

/// Phase I: minimize s subject to the constraints with every cone relaxed to
/// X_j + s I PSD and every inequality slack relaxed to slack >= -s, s >= -1.
/// The objective of the problem (if any) is ignored.
FeasibilityResult check_feasibility(const SdpProblem& problem, double tol = 1e-7,
                                    const SdpOptions& options = {});

/// Plain-text dump for cross-checking against another solver:
///
///   lrkf-sdp 1
///   blocks <count>
///   <index> <name> <complex|real> <size>
///   objective <term count>
///   <block> <row> <col> <re> <im>          one line per nonzero, row <= col
///   constraints <count>
///   constraint <i> <le|eq|ge> <rhs> <nonzero count>
///   <block> <row> <col> <re> <im>
///   end
///
/// Coefficients are Hermitian, so only the upper triangle is written.
void dump_problem(const SdpProblem& problem, std::ostream& out);

}  // namespace lrkf
