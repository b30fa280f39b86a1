#include "lrkf/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "lrkf/errors.hpp"

namespace lrkf {

// ---------------------------------------------------------------------------
// Problem construction

int SdpProblem::add_block(std::string name, int size, Field field) {
  if (size < 1) throw ContractViolation("SdpProblem: block size must be positive");
  blocks_.push_back({std::move(name), size, field});
  return static_cast<int>(blocks_.size()) - 1;
}

void SdpProblem::check_term(const SdpTerm& term) const {
  if (term.block < 0 || term.block >= static_cast<int>(blocks_.size())) {
    throw ContractViolation("SdpProblem: term references unknown block");
  }
  const SdpBlock& block = blocks_[term.block];
  if (term.coeff.rows() != block.size || term.coeff.cols() != block.size) {
    std::ostringstream msg;
    msg << "SdpProblem: coefficient for block '" << block.name << "' is " << term.coeff.rows()
        << "x" << term.coeff.cols() << ", expected " << block.size << "x" << block.size;
    throw ContractViolation(msg.str());
  }
  if (!is_hermitian(term.coeff)) {
    throw ContractViolation("SdpProblem: coefficient matrix is not Hermitian");
  }
  if (block.field == Field::real_symmetric && term.coeff.imag().cwiseAbs().maxCoeff() > 0.0) {
    throw ContractViolation("SdpProblem: complex coefficient on a real block");
  }
}

void SdpProblem::add_objective(int block, CMat coeff) {
  SdpTerm term{block, std::move(coeff)};
  check_term(term);
  objective_.push_back(std::move(term));
}

void SdpProblem::add_constraint(std::vector<SdpTerm> terms, Relation relation, double rhs) {
  if (terms.empty()) throw ContractViolation("SdpProblem: constraint without terms");
  for (const auto& term : terms) check_term(term);
  constraints_.push_back({std::move(terms), relation, rhs});
}

namespace {

double term_value(const SdpTerm& term, const std::vector<CMat>& x) {
  return (term.coeff * x[term.block]).trace().real();
}

}  // namespace

double SdpProblem::evaluate_objective(const std::vector<CMat>& x) const {
  double sum = 0.0;
  for (const auto& term : objective_) sum += term_value(term, x);
  return sum;
}

double SdpProblem::evaluate_constraint(std::size_t i, const std::vector<CMat>& x) const {
  double sum = 0.0;
  for (const auto& term : constraints_.at(i).terms) sum += term_value(term, x);
  return sum;
}

double SdpProblem::max_violation(const std::vector<CMat>& x) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const double lhs = evaluate_constraint(i, x);
    const double rhs = constraints_[i].rhs;
    double v = 0.0;
    switch (constraints_[i].relation) {
      case Relation::less_equal: v = lhs - rhs; break;
      case Relation::greater_equal: v = rhs - lhs; break;
      case Relation::equal: v = std::abs(lhs - rhs); break;
    }
    worst = std::max(worst, v);
  }
  return worst;
}

CMat entry_re(int n, int p, int q) {
  CMat a = CMat::Zero(n, n);
  if (p == q) {
    a(p, p) = 1.0;
  } else {
    a(p, q) = 0.5;
    a(q, p) = 0.5;
  }
  return a;
}

CMat entry_im(int n, int p, int q) {
  if (p == q) throw ContractViolation("entry_im: diagonal entries of a Hermitian block are real");
  // tr(A X) = (X(p,q) - X(q,p)) / (2i) = Im X(p,q)
  CMat a = CMat::Zero(n, n);
  a(q, p) = cdouble(0.0, -0.5);
  a(p, q) = cdouble(0.0, 0.5);
  return a;
}

const char* to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::infeasible: return "infeasible";
    case SdpStatus::max_iterations: return "max-iterations";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Real block-diagonal core:
//   min <C, X>  s.t.  <A_i, X> = b_i,  X = diag(X_1, ..., X_k, diag(x)) PSD

namespace {

struct Entry {
  int block;
  int row;
  int col;
  double value;  // coefficient at (row, col); mirrored to (col, row) when row != col
};

struct CoreRow {
  std::vector<Entry> entries;                 // row <= col
  std::vector<std::pair<int, double>> lp;     // nonnegative scalars
};

struct CoreProblem {
  std::vector<int> sizes;
  int lp_size = 0;
  std::vector<RMat> cost;
  RVec cost_lp;
  std::vector<CoreRow> rows;
  RVec rhs;
};

struct CoreIterate {
  std::vector<RMat> X;
  std::vector<RMat> Z;
  RVec x;
  RVec z;
  RVec y;
};

struct CoreResult {
  SdpStatus status = SdpStatus::max_iterations;
  CoreIterate point;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

double inner(const CoreRow& row, const std::vector<RMat>& X, const RVec& x) {
  double sum = 0.0;
  for (const Entry& e : row.entries) {
    const double v = X[e.block](e.row, e.col);
    sum += e.row == e.col ? e.value * v : 2.0 * e.value * v;
  }
  for (const auto& [k, a] : row.lp) sum += a * x(k);
  return sum;
}

double frob_inner(const std::vector<RMat>& A, const RVec& a, const std::vector<RMat>& B,
                  const RVec& b) {
  double sum = a.dot(b);
  for (std::size_t j = 0; j < A.size(); ++j) sum += A[j].cwiseProduct(B[j]).sum();
  return sum;
}

void add_adjoint(const CoreProblem& p, const RVec& y, std::vector<RMat>& S, RVec& s) {
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const double yi = y(static_cast<Eigen::Index>(i));
    for (const Entry& e : p.rows[i].entries) {
      S[e.block](e.row, e.col) += yi * e.value;
      if (e.row != e.col) S[e.block](e.col, e.row) += yi * e.value;
    }
    for (const auto& [k, a] : p.rows[i].lp) s(k) += yi * a;
  }
}

// Largest alpha with X + alpha dX PSD (infinity if unbounded).
double max_step_psd(const RMat& X, const RMat& dX) {
  const Eigen::LLT<RMat> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const RMat L = llt.matrixL();
  const RMat half = L.triangularView<Eigen::Lower>().solve(dX);
  const RMat w = L.triangularView<Eigen::Lower>().solve(half.transpose());
  const Eigen::SelfAdjointEigenSolver<RMat> eig(0.5 * (w + w.transpose()), Eigen::EigenvaluesOnly);
  const double lambda = eig.eigenvalues()(0);
  return lambda < 0.0 ? -1.0 / lambda : std::numeric_limits<double>::infinity();
}

double max_step_lp(const RVec& x, const RVec& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (dx(k) < 0.0) alpha = std::min(alpha, -x(k) / dx(k));
  }
  return alpha;
}

struct Direction {
  std::vector<RMat> dX;
  std::vector<RMat> dZ;
  RVec dx;
  RVec dz;
  RVec dy;
};

class CoreSolver {
 public:
  CoreSolver(const CoreProblem& problem, const SdpOptions& options)
      : p_(problem), opt_(options), m_(static_cast<Eigen::Index>(problem.rows.size())) {
    nu_ = p_.lp_size;
    for (int n : p_.sizes) nu_ += n;
    build_expanded_rows();
  }

  CoreResult run() {
    CoreIterate it = initial_point();
    CoreResult best;
    double best_score = std::numeric_limits<double>::infinity();
    CoreResult out;
    out.point = it;

    const double b_norm = p_.rhs.norm();
    double c_norm = p_.cost_lp.squaredNorm();
    for (const auto& c : p_.cost) c_norm += c.squaredNorm();
    c_norm = std::sqrt(c_norm);

    int stalls = 0;
    for (int iter = 0; iter <= opt_.max_iters; ++iter) {
      // Residuals
      RVec rp(m_);
      for (Eigen::Index i = 0; i < m_; ++i) rp(i) = p_.rhs(i) - inner(p_.rows[i], it.X, it.x);
      std::vector<RMat> Rd = p_.cost;
      RVec rd = p_.cost_lp;
      {
        std::vector<RMat> S = zero_blocks();
        RVec s = RVec::Zero(p_.lp_size);
        add_adjoint(p_, it.y, S, s);
        for (std::size_t j = 0; j < Rd.size(); ++j) Rd[j] -= S[j] + it.Z[j];
        rd -= s + it.z;
      }
      double rd_norm = rd.squaredNorm();
      for (const auto& r : Rd) rd_norm += r.squaredNorm();
      rd_norm = std::sqrt(rd_norm);

      const double primal = frob_inner(p_.cost, p_.cost_lp, it.X, it.x);
      const double dual = p_.rhs.dot(it.y);
      const double xz = frob_inner(it.X, it.x, it.Z, it.z);
      const double scale = 1.0 + std::abs(primal) + std::abs(dual);
      const double pinf = rp.norm() / (1.0 + b_norm);
      const double dinf = rd_norm / (1.0 + c_norm);
      const double gap_rel = std::max(xz, std::abs(primal - dual)) / scale;

      out.point = it;
      out.primal = primal;
      out.dual = dual;
      out.gap = xz;
      out.iterations = iter;

      // Loose acceptance for the best-iterate fallback.
      const double score = std::max({pinf / 1e-7, dinf / 1e-7, gap_rel / 1e-6});
      if (score < best_score) {
        best_score = score;
        best = out;
      }

      if (pinf <= opt_.feas_tol && dinf <= opt_.feas_tol && gap_rel <= opt_.gap_tol) {
        out.status = SdpStatus::optimal;
        return out;
      }
      if (iter == opt_.max_iters) break;

      // Divergence of the primal or dual iterate signals infeasibility.
      double x_norm = it.x.lpNorm<Eigen::Infinity>();
      for (const auto& X : it.X) x_norm = std::max(x_norm, X.cwiseAbs().maxCoeff());
      if (it.y.lpNorm<Eigen::Infinity>() > 1e10 || x_norm > 1e10) {
        out.status = SdpStatus::infeasible;
        return out;
      }

      const double mu = xz / nu_;
      if (!factorize(it)) break;

      // Predictor
      Direction aff;
      if (!direction(it, rp, Rd, rd, 0.0, nullptr, aff)) break;
      const double ap_aff = std::min(1.0, primal_step(it, aff));
      const double ad_aff = std::min(1.0, dual_step(it, aff));
      double mu_aff = 0.0;
      {
        std::vector<RMat> Xa = it.X;
        std::vector<RMat> Za = it.Z;
        for (std::size_t j = 0; j < Xa.size(); ++j) {
          Xa[j] += ap_aff * aff.dX[j];
          Za[j] += ad_aff * aff.dZ[j];
        }
        const RVec xa = it.x + ap_aff * aff.dx;
        const RVec za = it.z + ad_aff * aff.dz;
        mu_aff = frob_inner(Xa, xa, Za, za) / nu_;
      }
      const double ratio = std::clamp(mu_aff / mu, 0.0, 1.0);
      const double sigma = ratio * ratio * ratio;

      // Corrector
      Direction dir;
      if (!direction(it, rp, Rd, rd, sigma * mu, &aff, dir)) break;
      const double ap = std::min(1.0, opt_.step_fraction * primal_step(it, dir));
      const double ad = std::min(1.0, opt_.step_fraction * dual_step(it, dir));
      if (ap < 1e-12 && ad < 1e-12) {
        if (++stalls > 3) break;
      }
      for (std::size_t j = 0; j < it.X.size(); ++j) {
        it.X[j] += ap * dir.dX[j];
        it.X[j] = 0.5 * (it.X[j] + it.X[j].transpose()).eval();
        it.Z[j] += ad * dir.dZ[j];
        it.Z[j] = 0.5 * (it.Z[j] + it.Z[j].transpose()).eval();
      }
      it.x += ap * dir.dx;
      it.z += ad * dir.dz;
      it.y += ad * dir.dy;
    }

    // Stalled or out of iterations: report the best iterate, and call it
    // optimal if it meets the published accuracy (1e-7 feasibility, 1e-6 gap).
    best.status = best_score <= 1.0 ? SdpStatus::optimal : SdpStatus::max_iterations;
    return best;
  }

 private:
  struct Expanded {
    int row;
    int col;
    double value;
  };

  void build_expanded_rows() {
    expanded_.assign(p_.rows.size(), std::vector<std::vector<Expanded>>(p_.sizes.size()));
    for (std::size_t i = 0; i < p_.rows.size(); ++i) {
      for (const Entry& e : p_.rows[i].entries) {
        expanded_[i][e.block].push_back({e.row, e.col, e.value});
        if (e.row != e.col) expanded_[i][e.block].push_back({e.col, e.row, e.value});
      }
    }
  }

  std::vector<RMat> zero_blocks() const {
    std::vector<RMat> out;
    out.reserve(p_.sizes.size());
    for (int n : p_.sizes) out.push_back(RMat::Zero(n, n));
    return out;
  }

  CoreIterate initial_point() const {
    double max_a = 0.0;
    double ratio = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      double a2 = 0.0;
      for (const Entry& e : p_.rows[i].entries) {
        a2 += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
      }
      for (const auto& lp : p_.rows[i].lp) a2 += lp.second * lp.second;
      const double a = std::sqrt(a2);
      max_a = std::max(max_a, a);
      ratio = std::max(ratio, (1.0 + std::abs(p_.rhs(i))) / (1.0 + a));
    }
    double c_norm = p_.cost_lp.norm();
    for (const auto& c : p_.cost) c_norm = std::max(c_norm, c.norm());
    const double n = static_cast<double>(nu_);
    const double xi = std::max({10.0, std::sqrt(n), n * ratio});
    const double eta = std::max({10.0, std::sqrt(n), max_a, c_norm});

    CoreIterate it;
    for (int size : p_.sizes) {
      it.X.push_back(xi * RMat::Identity(size, size));
      it.Z.push_back(eta * RMat::Identity(size, size));
    }
    it.x = RVec::Constant(p_.lp_size, xi);
    it.z = RVec::Constant(p_.lp_size, eta);
    it.y = RVec::Zero(m_);
    return it;
  }

  // Cholesky of Z for Z^{-1} and the Schur complement matrix
  //   H_ik = tr(A_i X A_k Z^{-1}) + sum_l a_il (x_l / z_l) a_kl.
  bool factorize(const CoreIterate& it) {
    z_inv_.resize(p_.sizes.size());
    for (std::size_t j = 0; j < p_.sizes.size(); ++j) {
      const Eigen::LLT<RMat> llt(it.Z[j]);
      if (llt.info() != Eigen::Success) return false;
      z_inv_[j] = llt.solve(RMat::Identity(p_.sizes[j], p_.sizes[j]));
    }
    RMat H = RMat::Zero(m_, m_);
    for (std::size_t j = 0; j < p_.sizes.size(); ++j) {
      const int n = p_.sizes[j];
      const RMat& X = it.X[j];
      const RMat& Zi = z_inv_[j];
      RMat V(n, n);
      for (Eigen::Index k = 0; k < m_; ++k) {
        const auto& bk = expanded_[k][j];
        if (bk.empty()) continue;
        // V = X A_k Z^{-1}
        V.setZero();
        for (const Expanded& e : bk) V.noalias() += e.value * X.col(e.row) * Zi.row(e.col);
        for (Eigen::Index i = 0; i <= k; ++i) {
          const auto& ai = expanded_[i][j];
          double sum = 0.0;
          for (const Expanded& e : ai) sum += e.value * V(e.col, e.row);
          H(i, k) += sum;
        }
      }
    }
    if (p_.lp_size > 0) {
      const RVec w = it.x.cwiseQuotient(it.z);
      for (Eigen::Index k = 0; k < m_; ++k) {
        for (const auto& [lk, ak] : p_.rows[k].lp) {
          for (Eigen::Index i = 0; i <= k; ++i) {
            for (const auto& [li, ai] : p_.rows[i].lp) {
              if (li == lk) H(i, k) += ai * w(lk) * ak;
            }
          }
        }
      }
    }
    H = H.selfadjointView<Eigen::Upper>();
    schur_llt_.compute(H);
    if (schur_llt_.info() != Eigen::Success) {
      const double shift = 1e-14 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
      H.diagonal().array() += shift;
      schur_llt_.compute(H);
      if (schur_llt_.info() != Eigen::Success) return false;
    }
    return true;
  }

  // Solves the Newton system for the target X Z = target I - corr.
  bool direction(const CoreIterate& it, const RVec& rp, const std::vector<RMat>& Rd,
                 const RVec& rd, double target, const Direction* corr, Direction& out) const {
    // T = (target I - corr) Z^{-1} - X - X Rd Z^{-1}; then dX = T + X A*(dy) Z^{-1}.
    std::vector<RMat> T(p_.sizes.size());
    for (std::size_t j = 0; j < p_.sizes.size(); ++j) {
      const RMat& X = it.X[j];
      const RMat& Zi = z_inv_[j];
      RMat rc = target * RMat::Identity(p_.sizes[j], p_.sizes[j]);
      if (corr != nullptr) rc -= corr->dX[j] * corr->dZ[j];
      const RMat t = rc * Zi - X - X * Rd[j] * Zi;
      T[j] = 0.5 * (t + t.transpose());
    }
    RVec t_lp(p_.lp_size);
    for (int k = 0; k < p_.lp_size; ++k) {
      double rc = target;
      if (corr != nullptr) rc -= corr->dx(k) * corr->dz(k);
      t_lp(k) = rc / it.z(k) - it.x(k) - it.x(k) * rd(k) / it.z(k);
    }

    RVec rhs(m_);
    for (Eigen::Index i = 0; i < m_; ++i) rhs(i) = rp(i) - inner(p_.rows[i], T, t_lp);
    out.dy = schur_llt_.solve(rhs);
    if (!out.dy.allFinite()) return false;
    assemble(it, Rd, rd, T, t_lp, out);

    // Near the optimum X and Z are badly conditioned and the Schur solve
    // loses digits; refine dy against the exact primal residual.
    double last = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 10; ++round) {
      RVec resid(m_);
      for (Eigen::Index i = 0; i < m_; ++i) resid(i) = rp(i) - inner(p_.rows[i], out.dX, out.dx);
      const double size = resid.norm();
      if (size <= 1e-15 * (1.0 + rp.norm() + rhs.norm()) || size >= 0.5 * last) break;
      last = size;
      const RVec delta = schur_llt_.solve(resid);
      if (!delta.allFinite()) break;
      out.dy += delta;
      assemble(it, Rd, rd, T, t_lp, out);
    }
    return true;
  }

  // dZ = Rd - A*(dy), dX = sym(T + X A*(dy) Z^{-1}) and the LP analogues.
  void assemble(const CoreIterate& it, const std::vector<RMat>& Rd, const RVec& rd,
                const std::vector<RMat>& T, const RVec& t_lp, Direction& out) const {
    std::vector<RMat> S = zero_blocks();
    RVec s = RVec::Zero(p_.lp_size);
    add_adjoint(p_, out.dy, S, s);
    out.dZ.resize(p_.sizes.size());
    out.dX.resize(p_.sizes.size());
    for (std::size_t j = 0; j < p_.sizes.size(); ++j) {
      out.dZ[j] = Rd[j] - S[j];
      const RMat d = T[j] + it.X[j] * S[j] * z_inv_[j];
      out.dX[j] = 0.5 * (d + d.transpose());
    }
    out.dz = rd - s;
    out.dx.resize(p_.lp_size);
    for (int k = 0; k < p_.lp_size; ++k) {
      out.dx(k) = t_lp(k) + it.x(k) * s(k) / it.z(k);
    }
  }

  double primal_step(const CoreIterate& it, const Direction& d) const {
    double alpha = max_step_lp(it.x, d.dx);
    for (std::size_t j = 0; j < it.X.size(); ++j) alpha = std::min(alpha, max_step_psd(it.X[j], d.dX[j]));
    return alpha;
  }

  double dual_step(const CoreIterate& it, const Direction& d) const {
    double alpha = max_step_lp(it.z, d.dz);
    for (std::size_t j = 0; j < it.Z.size(); ++j) alpha = std::min(alpha, max_step_psd(it.Z[j], d.dZ[j]));
    return alpha;
  }

  const CoreProblem& p_;
  SdpOptions opt_;
  Eigen::Index m_;
  int nu_ = 0;
  std::vector<std::vector<std::vector<Expanded>>> expanded_;
  std::vector<RMat> z_inv_;
  Eigen::LLT<RMat> schur_llt_;
};

// ---------------------------------------------------------------------------
// Lowering of the user problem onto the real core.

struct Lowered {
  CoreProblem core;
  // Slack index of each user constraint (-1 for equalities) and its sign in
  // the row: +1 for <=, -1 for >=.
  std::vector<int> slack;
  std::vector<double> slack_sign;
};

// Real-symmetric image of a term coefficient, scaled so that
// <image, embed(X)> = Re tr(coeff X).
RMat lower_coeff(const SdpBlock& block, const CMat& coeff) {
  if (block.field == Field::real_symmetric) return coeff.real();
  return 0.5 * complex_to_real_embed(coeff);
}

int lowered_size(const SdpBlock& block) {
  return block.field == Field::real_symmetric ? block.size : 2 * block.size;
}

void append_entries(const RMat& a, int block, std::vector<Entry>& out) {
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    for (Eigen::Index r = 0; r <= c; ++r) {
      const double v = 0.5 * (a(r, c) + a(c, r));
      if (v != 0.0) out.push_back({block, static_cast<int>(r), static_cast<int>(c), v});
    }
  }
}

Lowered lower(const SdpProblem& problem) {
  Lowered out;
  CoreProblem& core = out.core;
  for (const auto& block : problem.blocks()) {
    const int n = lowered_size(block);
    core.sizes.push_back(n);
    core.cost.push_back(RMat::Zero(n, n));
  }
  for (const auto& term : problem.objective()) {
    core.cost[term.block] += lower_coeff(problem.blocks()[term.block], term.coeff);
  }
  for (const auto& c : problem.constraints()) {
    CoreRow row;
    // Merge terms hitting the same block before extracting nonzeros.
    std::vector<RMat> dense(problem.blocks().size());
    for (const auto& term : c.terms) {
      RMat a = lower_coeff(problem.blocks()[term.block], term.coeff);
      if (dense[term.block].size() == 0) {
        dense[term.block] = std::move(a);
      } else {
        dense[term.block] += a;
      }
    }
    for (std::size_t j = 0; j < dense.size(); ++j) {
      if (dense[j].size() != 0) append_entries(dense[j], static_cast<int>(j), row.entries);
    }
    if (c.relation == Relation::equal) {
      out.slack.push_back(-1);
      out.slack_sign.push_back(0.0);
    } else {
      const double sign = c.relation == Relation::less_equal ? 1.0 : -1.0;
      row.lp.emplace_back(core.lp_size, sign);
      out.slack.push_back(core.lp_size);
      out.slack_sign.push_back(sign);
      ++core.lp_size;
    }
    core.rows.push_back(std::move(row));
  }
  core.cost_lp = RVec::Zero(core.lp_size);
  core.rhs.resize(static_cast<Eigen::Index>(problem.constraints().size()));
  for (std::size_t i = 0; i < problem.constraints().size(); ++i) {
    core.rhs(static_cast<Eigen::Index>(i)) = problem.constraints()[i].rhs;
  }
  return out;
}

std::vector<CMat> lift(const SdpProblem& problem, const std::vector<RMat>& X) {
  std::vector<CMat> out;
  out.reserve(X.size());
  for (std::size_t j = 0; j < X.size(); ++j) {
    if (problem.blocks()[j].field == Field::real_symmetric) {
      out.push_back(CMat(0.5 * (X[j] + X[j].transpose())).cast<cdouble>());
    } else {
      out.push_back(hermitianize(real_to_complex(X[j])));
    }
  }
  return out;
}

void check_nonempty(const SdpProblem& problem) {
  if (problem.blocks().empty()) throw ContractViolation("SdpProblem: no blocks");
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
  check_nonempty(problem);
  const Lowered lowered = lower(problem);
  CoreSolver solver(lowered.core, options);
  const CoreResult result = solver.run();

  SdpSolution out;
  out.status = result.status;
  out.blocks = lift(problem, result.point.X);
  out.objective = problem.evaluate_objective(out.blocks);
  out.dual_objective = result.dual;
  out.gap = std::max(result.gap, 0.0);
  out.max_violation = problem.max_violation(out.blocks);
  out.iterations = result.iterations;
  return out;
}

FeasibilityResult check_feasibility(const SdpProblem& problem, double tol,
                                    const SdpOptions& options) {
  check_nonempty(problem);
  Lowered lowered = lower(problem);
  CoreProblem& core = lowered.core;

  // Substitute X_j = Y_j - s I, slack = slack' - s, s = w - 1 (w >= 0):
  // row i gains kappa_i w on the left and kappa_i on the right, with
  // kappa_i = -(sum_j tr A_ij + sum_l a_il).
  const int w_index = core.lp_size++;
  for (Eigen::Index i = 0; i < core.rhs.size(); ++i) {
    CoreRow& row = core.rows[i];
    double kappa = 0.0;
    for (const Entry& e : row.entries) {
      if (e.row == e.col) kappa -= e.value;
    }
    for (const auto& lp : row.lp) kappa -= lp.second;
    if (kappa != 0.0) row.lp.emplace_back(w_index, kappa);
    core.rhs(i) += kappa;
  }
  for (auto& c : core.cost) c.setZero();
  core.cost_lp = RVec::Zero(core.lp_size);
  core.cost_lp(w_index) = 1.0;

  CoreSolver solver(core, options);
  const CoreResult result = solver.run();

  FeasibilityResult out;
  out.status = result.status;
  const double s = result.point.x(w_index) - 1.0;
  out.margin = s;
  std::vector<RMat> X = result.point.X;
  for (auto& x : X) x.diagonal().array() -= s;
  out.witness = lift(problem, X);
  out.feasible = result.status == SdpStatus::optimal && s <= tol;
  return out;
}

void dump_problem(const SdpProblem& problem, std::ostream& out) {
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  auto write_terms = [&](const std::vector<SdpTerm>& terms) {
    std::vector<std::string> lines;
    for (const auto& term : terms) {
      for (Eigen::Index c = 0; c < term.coeff.cols(); ++c) {
        for (Eigen::Index r = 0; r <= c; ++r) {
          const cdouble v = term.coeff(r, c);
          if (v == cdouble(0.0, 0.0)) continue;
          std::ostringstream line;
          line << std::setprecision(17) << term.block << ' ' << r << ' ' << c << ' ' << v.real()
               << ' ' << v.imag();
          lines.push_back(line.str());
        }
      }
    }
    return lines;
  };

  out << "lrkf-sdp 1\n";
  out << "blocks " << problem.blocks().size() << '\n';
  for (std::size_t j = 0; j < problem.blocks().size(); ++j) {
    const auto& b = problem.blocks()[j];
    out << j << ' ' << b.name << ' '
        << (b.field == Field::complex_hermitian ? "complex" : "real") << ' ' << b.size << '\n';
  }
  const auto objective = write_terms(problem.objective());
  out << "objective " << objective.size() << '\n';
  for (const auto& line : objective) out << line << '\n';
  out << "constraints " << problem.constraints().size() << '\n';
  for (std::size_t i = 0; i < problem.constraints().size(); ++i) {
    const auto& c = problem.constraints()[i];
    const auto lines = write_terms(c.terms);
    const char* rel = c.relation == Relation::less_equal ? "le"
                      : c.relation == Relation::equal    ? "eq"
                                                         : "ge";
    out << "constraint " << i << ' ' << rel << ' ' << c.rhs << ' ' << lines.size() << '\n';
    for (const auto& line : lines) out << line << '\n';
  }
  out << "end\n";
  out.precision(old_precision);
}

}  // namespace lrkf
