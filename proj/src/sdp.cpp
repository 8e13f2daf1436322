#include "aqnbf/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "aqnbf/errors.hpp"

namespace aqnbf::sdp {

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::PrimalInfeasible: return "primal_infeasible";
    case Status::DualInfeasible: return "dual_infeasible";
    case Status::NumericalTrouble: return "numerical_trouble";
  }
  return "unknown";
}

int SdpProblem::total_dim() const {
  int n = 0;
  for (const auto& b : blocks) n += b.dim;
  return n;
}

void SdpProblem::validate() const {
  if (blocks.empty()) throw InvalidArgument("SDP has no blocks");
  for (const auto& b : blocks)
    if (b.dim < 1) throw InvalidArgument("SDP block dimension must be positive");
  auto check = [&](const Entry& e, const char* where) {
    if (e.block < 0 || e.block >= static_cast<int>(blocks.size()))
      throw InvalidArgument(std::string("block index out of range in ") + where);
    const Block& b = blocks[static_cast<std::size_t>(e.block)];
    if (e.row < 0 || e.col < 0 || e.row >= b.dim || e.col >= b.dim)
      throw InvalidArgument(std::string("entry index out of range in ") + where);
    if (e.row > e.col) throw InvalidArgument(std::string("lower-triangle entry in ") + where);
    if (b.kind == BlockKind::Diagonal && e.row != e.col)
      throw InvalidArgument(std::string("off-diagonal entry in diagonal block in ") + where);
    if (!std::isfinite(e.value)) throw InvalidArgument(std::string("non-finite entry in ") + where);
  };
  for (const auto& e : objective) check(e, "objective");
  const double n = total_dim();
  if (static_cast<double>(constraints.size()) > n * n)
    throw InvalidArgument("more constraints than matrix entries");
  for (const auto& c : constraints) {
    if (!std::isfinite(c.rhs)) throw InvalidArgument("non-finite constraint right-hand side");
    for (const auto& e : c.entries) check(e, "constraint");
  }
}

bool CertificateReport::all_passed() const {
  return std::all_of(items.begin(), items.end(), [](const CertificateItem& i) { return i.passed; });
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Both orientations of every off-diagonal triplet, grouped by block.
struct SparseSym {
  struct Cell {
    int row;
    int col;
    double value;
  };
  std::vector<std::pair<int, std::vector<Cell>>> blocks;

  static SparseSym from(const std::vector<Entry>& entries) {
    SparseSym s;
    for (const auto& e : entries) {
      if (e.value == 0.0) continue;
      auto it = std::find_if(s.blocks.begin(), s.blocks.end(),
                             [&](const auto& b) { return b.first == e.block; });
      if (it == s.blocks.end()) {
        s.blocks.push_back({e.block, {}});
        it = std::prev(s.blocks.end());
      }
      it->second.push_back({e.row, e.col, e.value});
      if (e.row != e.col) it->second.push_back({e.col, e.row, e.value});
    }
    std::sort(s.blocks.begin(), s.blocks.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return s;
  }

  // <A, K> for a (possibly nonsymmetric) block matrix K.
  double dot(const BlockMatrix& k) const {
    double acc = 0.0;
    for (const auto& [b, cells] : blocks)
      for (const auto& c : cells) acc += c.value * k[static_cast<std::size_t>(b)](c.row, c.col);
    return acc;
  }

  void add_to(BlockMatrix& k, double scale) const {
    for (const auto& [b, cells] : blocks)
      for (const auto& c : cells) k[static_cast<std::size_t>(b)](c.row, c.col) += scale * c.value;
  }

  double frobenius_sq() const {
    double acc = 0.0;
    for (const auto& [b, cells] : blocks)
      for (const auto& c : cells) acc += c.value * c.value;
    return acc;
  }
};

BlockMatrix zeros_like(const std::vector<Block>& blocks) {
  BlockMatrix m;
  m.reserve(blocks.size());
  for (const auto& b : blocks) m.push_back(MatrixXd::Zero(b.dim, b.dim));
  return m;
}

BlockMatrix scaled_identity(const std::vector<Block>& blocks, double tau) {
  BlockMatrix m;
  m.reserve(blocks.size());
  for (const auto& b : blocks) m.push_back(tau * MatrixXd::Identity(b.dim, b.dim));
  return m;
}

double inner(const BlockMatrix& a, const BlockMatrix& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i].cwiseProduct(b[i]).sum();
  return acc;
}

double frobenius(const BlockMatrix& a) {
  double acc = 0.0;
  for (const auto& m : a) acc += m.squaredNorm();
  return std::sqrt(acc);
}

void symmetrize(BlockMatrix& a) {
  for (auto& m : a) m = 0.5 * (m + m.transpose()).eval();
}

// Largest alpha with M + alpha dM psd, given M positive definite.
double max_step(const MatrixXd& m, const MatrixXd& dm) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return 0.0;
  MatrixXd t = llt.matrixL().solve(dm);
  t = llt.matrixL().solve(t.transpose()).transpose();
  t = 0.5 * (t + t.transpose()).eval();
  const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(t, Eigen::EigenvaluesOnly).eigenvalues()(0);
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

class Solver {
 public:
  Solver(const SdpProblem& p, const SolverConfig& cfg) : p_(p), cfg_(cfg) {
    c_ = SparseSym::from(p.objective);
    a_.reserve(p.constraints.size());
    b_.resize(static_cast<Eigen::Index>(p.constraints.size()));
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
      a_.push_back(SparseSym::from(p.constraints[i].entries));
      b_(static_cast<Eigen::Index>(i)) = p.constraints[i].rhs;
    }
    norm_b_ = b_.norm();
    norm_c_ = std::sqrt(c_.frobenius_sq());
  }

  SdpSolution run();

 private:
  BlockMatrix apply_adjoint(const VectorXd& y) const {
    BlockMatrix k = zeros_like(p_.blocks);
    for (std::size_t i = 0; i < a_.size(); ++i) {
      const double yi = y(static_cast<Eigen::Index>(i));
      if (yi != 0.0) a_[i].add_to(k, yi);
    }
    return k;
  }

  VectorXd apply(const BlockMatrix& k) const {
    VectorXd out(static_cast<Eigen::Index>(a_.size()));
    for (std::size_t i = 0; i < a_.size(); ++i) out(static_cast<Eigen::Index>(i)) = a_[i].dot(k);
    return out;
  }

  // Schur complement M_ij = <A_i, X A_j S^-1>.
  MatrixXd schur(const BlockMatrix& x, const BlockMatrix& sinv) const;

  const SdpProblem& p_;
  const SolverConfig& cfg_;
  SparseSym c_;
  std::vector<SparseSym> a_;
  VectorXd b_;
  double norm_b_ = 0.0;
  double norm_c_ = 0.0;
};

MatrixXd Solver::schur(const BlockMatrix& x, const BlockMatrix& sinv) const {
  const auto m = static_cast<Eigen::Index>(a_.size());
  MatrixXd out = MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (const auto& [blk, cells] : a_[static_cast<std::size_t>(i)].blocks) {
      const auto bi = static_cast<std::size_t>(blk);
      const MatrixXd& xb = x[bi];
      const MatrixXd& sb = sinv[bi];
      const Eigen::Index n = xb.rows();
      // G = S^-1 A_i X, so that M_ij = sum over A_j cells (r, s) of a * G(s, r).
      MatrixXd g;
      if (static_cast<Eigen::Index>(cells.size()) >= n) {
        MatrixXd dense = MatrixXd::Zero(n, n);
        for (const auto& c : cells) dense(c.row, c.col) += c.value;
        g.noalias() = sb * dense * xb;
      } else {
        g = MatrixXd::Zero(n, n);
        for (const auto& c : cells) g.noalias() += c.value * sb.col(c.row) * xb.row(c.col);
      }
      for (Eigen::Index j = i; j < m; ++j) {
        for (const auto& [bj, cj] : a_[static_cast<std::size_t>(j)].blocks) {
          if (bj != blk) continue;
          double acc = 0.0;
          for (const auto& c : cj) acc += c.value * g(c.col, c.row);
          out(i, j) += acc;
        }
      }
    }
  }
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) out(j, i) = out(i, j);
  return out;
}

SdpSolution Solver::run() {
  SdpSolution sol;
  const auto& blocks = p_.blocks;
  const int n_total = p_.total_dim();
  const auto m = static_cast<Eigen::Index>(a_.size());

  BlockMatrix cmat = zeros_like(blocks);
  c_.add_to(cmat, 1.0);


  BlockMatrix x;
  BlockMatrix s;
  VectorXd y = VectorXd::Zero(m);
  if (cfg_.start) {
    x = cfg_.start->x;
    s = cfg_.start->s;
    y = cfg_.start->y;
    if (x.size() != blocks.size() || s.size() != blocks.size() || y.size() != m)
      throw InvalidArgument("start point does not match problem shape");
  } else {
    double max_a = 0.0;
    double max_ratio = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double na = std::sqrt(a_[static_cast<std::size_t>(i)].frobenius_sq());
      max_a = std::max(max_a, na);
      max_ratio = std::max(max_ratio, (1.0 + std::abs(b_(i))) / (1.0 + na));
    }
    const double rn = std::sqrt(static_cast<double>(n_total));
    const double tau_x = std::max({10.0, rn, rn * max_ratio});
    const double tau_s = std::max({10.0, rn, max_a, norm_c_});
    x = scaled_identity(blocks, tau_x);
    s = scaled_identity(blocks, tau_s);
  }

  int stalled = 0;
  // Best iterate with a closed gap and dual feasibility, ranked by primal
  // residual, kept for the stall fallback.
  struct Kept {
    BlockMatrix x, s;
    VectorXd y;
    Residuals residuals;
    double pobj = 0.0, dobj = 0.0;
    int iteration = 0;
  };
  std::optional<Kept> kept;
  for (int iter = 0;; ++iter) {
    // Residuals and objectives at the current iterate.
    const VectorXd ax = apply(x);
    const VectorXd rp = b_ - ax;
    BlockMatrix aty = apply_adjoint(y);
    BlockMatrix rd = cmat;
    for (std::size_t k = 0; k < blocks.size(); ++k) rd[k] -= aty[k] + s[k];
    const double pobj = inner(cmat, x);
    const double dobj = b_.dot(y);
    const double xs = inner(x, s);
    const double mu = xs / n_total;

    sol.residuals.primal_infeasibility = rp.norm() / (1.0 + norm_b_);
    sol.residuals.dual_infeasibility = frobenius(rd) / (1.0 + norm_c_);
    const double scale = 1.0 + std::abs(pobj) + std::abs(dobj);
    sol.residuals.relative_gap = std::abs(pobj - dobj) / scale;
    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.iterations = iter;

    IterateRecord rec;
    rec.iteration = iter;
    rec.primal_objective = pobj;
    rec.dual_objective = dobj;
    rec.primal_infeasibility = sol.residuals.primal_infeasibility;
    rec.dual_infeasibility = sol.residuals.dual_infeasibility;
    rec.mu = mu;
    if (!sol.trace.empty()) {
      rec.primal_step = sol.trace.back().primal_step;
      rec.dual_step = sol.trace.back().dual_step;
    }

    auto finish = [&](Status st, std::string msg) {
      if (st == Status::NumericalTrouble && kept &&
          kept->residuals.primal_infeasibility <= cfg_.stall_feas_factor * cfg_.feas_tol) {
        sol.status = Status::Optimal;
        sol.message = "converged with reduced primal accuracy (" + msg + ")";
        sol.x = std::move(kept->x);
        sol.y = std::move(kept->y);
        sol.s = std::move(kept->s);
        sol.residuals = kept->residuals;
        sol.primal_objective = kept->pobj;
        sol.dual_objective = kept->dobj;
        return sol;
      }
      sol.status = st;
      sol.message = std::move(msg);
      sol.x = x;
      sol.y = y;
      sol.s = s;
      return sol;
    };

    if (sol.residuals.relative_gap <= cfg_.gap_tol && xs / scale <= cfg_.gap_tol &&
        sol.residuals.primal_infeasibility <= cfg_.feas_tol &&
        sol.residuals.dual_infeasibility <= cfg_.feas_tol) {
      sol.trace.push_back(rec);
      return finish(Status::Optimal, "converged");
    }
    if (sol.residuals.relative_gap <= cfg_.gap_tol && xs / scale <= cfg_.gap_tol &&
        sol.residuals.dual_infeasibility <= cfg_.feas_tol &&
        (!kept || sol.residuals.primal_infeasibility < kept->residuals.primal_infeasibility))
      kept = Kept{x, s, y, sol.residuals, pobj, dobj, iter};
    if (kept && iter - kept->iteration >= 10) {
      sol.trace.push_back(rec);
      return finish(Status::NumericalTrouble, "primal residual stalled");
    }

    // Improving rays. A primal-infeasibility witness is y with b'y > 0 and
    // -A'y psd; a dual-infeasibility witness is X psd with A(X) = 0, <C,X> < 0.
    {
      BlockMatrix ray = aty;
      for (std::size_t k = 0; k < blocks.size(); ++k) ray[k] += s[k];
      const double ray_res = frobenius(ray) / std::max(1.0, norm_c_);
      const double ray_obj = dobj / std::max(1.0, norm_b_);
      if (ray_obj > 0.0 && sol.residuals.primal_infeasibility > cfg_.feas_tol &&
          ray_obj > cfg_.infeasibility_threshold * std::max(ray_res, 1e-300)) {
        sol.trace.push_back(rec);
        return finish(Status::PrimalInfeasible, "dual improving ray found");
      }
      const double xray_res = ax.norm() / std::max(1.0, norm_b_);
      const double xray_obj = -pobj / std::max(1.0, norm_c_);
      if (xray_obj > 0.0 && sol.residuals.dual_infeasibility > cfg_.feas_tol &&
          xray_obj > cfg_.infeasibility_threshold * std::max(xray_res, 1e-300)) {
        sol.trace.push_back(rec);
        return finish(Status::DualInfeasible, "primal improving ray found");
      }
    }

    if (iter >= cfg_.max_iters) {
      sol.trace.push_back(rec);
      return finish(Status::NumericalTrouble, "iteration limit reached");
    }
    if (!std::isfinite(xs) || frobenius(x) > 1e30 || frobenius(s) > 1e30) {
      sol.trace.push_back(rec);
      return finish(Status::NumericalTrouble, "iterates diverged");
    }

    BlockMatrix sinv;
    sinv.reserve(blocks.size());
    for (const auto& sb : s) {
      Eigen::LLT<MatrixXd> llt(sb);
      if (llt.info() != Eigen::Success) {
        sol.trace.push_back(rec);
        return finish(Status::NumericalTrouble, "dual slack lost definiteness");
      }
      sinv.push_back(llt.solve(MatrixXd::Identity(sb.rows(), sb.cols())));
    }
    symmetrize(sinv);

    MatrixXd mschur = schur(x, sinv);
    const MatrixXd mexact = mschur;
    Eigen::LLT<MatrixXd> mfac(mschur);
    if (mfac.info() != Eigen::Success) {
      const double shift = 1e-14 * std::max(1.0, mschur.diagonal().maxCoeff());
      mschur.diagonal().array() += shift;
      mfac.compute(mschur);
      if (mfac.info() != Eigen::Success) {
        sol.trace.push_back(rec);
        return finish(Status::NumericalTrouble, "Schur complement factorization failed");
      }
    }

    // X Rd S^-1 enters both right-hand sides.
    BlockMatrix xrds(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) xrds[k].noalias() = x[k] * rd[k] * sinv[k];
    const VectorXd a_xrds = apply(xrds);

    // rc_sinv = (sigma mu I - XS - corr) S^-1
    auto direction = [&](const BlockMatrix& rc_sinv, BlockMatrix& dx, VectorXd& dy, BlockMatrix& ds) {
      const VectorXd rhs = rp - apply(rc_sinv) + a_xrds;
      dy = mfac.solve(rhs);
      // Refinement keeps A(dX) close to rp once M is ill-conditioned near the
      // optimum; without it the primal residual drifts upward as mu shrinks.
      for (int r = 0; r < 2; ++r) {
        const VectorXd res = rhs - mexact * dy;
        if (res.norm() <= 1e-15 * rhs.norm()) break;
        dy += mfac.solve(res);
      }
      const BlockMatrix atdy = apply_adjoint(dy);
      ds.resize(blocks.size());
      dx.resize(blocks.size());
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        ds[k] = rd[k] - atdy[k];
        dx[k] = rc_sinv[k];
        dx[k].noalias() -= x[k] * ds[k] * sinv[k];
      }
      symmetrize(dx);
      symmetrize(ds);
    };
    auto step_lengths = [&](const BlockMatrix& dx, const BlockMatrix& ds) {
      double ap = std::numeric_limits<double>::infinity();
      double ad = ap;
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        ap = std::min(ap, max_step(x[k], dx[k]));
        ad = std::min(ad, max_step(s[k], ds[k]));
      }
      return std::pair{std::min(1.0, cfg_.step_fraction * ap), std::min(1.0, cfg_.step_fraction * ad)};
    };

    // Predictor (sigma = 0).
    BlockMatrix rc(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) rc[k] = -x[k];
    BlockMatrix dxp;
    BlockMatrix dsp;
    VectorXd dyp;
    direction(rc, dxp, dyp, dsp);
    const auto [app, adp] = step_lengths(dxp, dsp);

    double mu_aff = 0.0;
    for (std::size_t k = 0; k < blocks.size(); ++k)
      mu_aff += (x[k] + app * dxp[k]).cwiseProduct(s[k] + adp * dsp[k]).sum();
    mu_aff /= n_total;
    const double expon = std::max(1.0, 3.0 * std::pow(std::min(app, adp), 2));
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, expon), 0.0, 1.0);

    // Corrector with the second-order term dXp dSp.
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      rc[k] = sigma * mu * sinv[k] - x[k];
      rc[k].noalias() -= dxp[k] * dsp[k] * sinv[k];
    }
    BlockMatrix dx;
    BlockMatrix ds;
    VectorXd dy;
    direction(rc, dx, dy, ds);
    const auto [ap, ad] = step_lengths(dx, ds);

    for (std::size_t k = 0; k < blocks.size(); ++k) {
      x[k] += ap * dx[k];
      s[k] += ad * ds[k];
    }
    y += ad * dy;
    symmetrize(x);
    symmetrize(s);

    rec.primal_step = ap;
    rec.dual_step = ad;
    sol.trace.push_back(rec);

    stalled = (ap < 1e-8 && ad < 1e-8) ? stalled + 1 : 0;
    if (stalled >= 5) return finish(Status::NumericalTrouble, "step lengths stalled");
  }
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverConfig& config) {
  problem.validate();
  if (problem.total_dim() > config.dimension_guard) {
    std::ostringstream os;
    os << "SDP dimension " << problem.total_dim() << " exceeds guard " << config.dimension_guard;
    throw SizeGuardError(os.str());
  }
  Solver solver(problem, config);
  return solver.run();
}

CertificateReport check_certificate(const SdpProblem& p, const SdpSolution& sol, double tol) {
  CertificateReport report;
  const std::size_t nb = p.blocks.size();
  if (sol.x.size() != nb || sol.s.size() != nb ||
      sol.y.size() != static_cast<Eigen::Index>(p.constraints.size()))
    throw InvalidArgument("solution shape does not match problem");

  auto dense = [&](const std::vector<Entry>& entries) {
    std::vector<Eigen::MatrixXd> m;
    for (const auto& b : p.blocks) m.push_back(Eigen::MatrixXd::Zero(b.dim, b.dim));
    for (const auto& e : entries) {
      m[static_cast<std::size_t>(e.block)](e.row, e.col) += e.value;
      if (e.row != e.col) m[static_cast<std::size_t>(e.block)](e.col, e.row) += e.value;
    }
    return m;
  };
  auto trace_dot = [](const std::vector<Eigen::MatrixXd>& a, const std::vector<Eigen::MatrixXd>& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] * b[k]).trace();
    return acc;
  };

  const auto c = dense(p.objective);
  double norm_b = 0.0;
  double primal_sq = 0.0;
  std::vector<Eigen::MatrixXd> slack = c;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto a = dense(p.constraints[i].entries);
    const double r = trace_dot(a, sol.x) - p.constraints[i].rhs;
    primal_sq += r * r;
    norm_b += p.constraints[i].rhs * p.constraints[i].rhs;
    for (std::size_t k = 0; k < nb; ++k) slack[k] -= sol.y(static_cast<Eigen::Index>(i)) * a[k];
  }
  double norm_c = 0.0;
  double dual_sq = 0.0;
  double pobj = 0.0;
  double dobj = 0.0;
  for (std::size_t k = 0; k < nb; ++k) {
    norm_c += c[k].squaredNorm();
    dual_sq += (slack[k] - sol.s[k]).squaredNorm();
    pobj += (c[k] * sol.x[k]).trace();
  }
  for (std::size_t i = 0; i < p.constraints.size(); ++i)
    dobj += p.constraints[i].rhs * sol.y(static_cast<Eigen::Index>(i));

  auto min_eig = [](const std::vector<Eigen::MatrixXd>& m) {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& b : m) {
      const Eigen::MatrixXd sym = 0.5 * (b + b.transpose());
      lo = std::min(lo, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly)
                            .eigenvalues()(0));
    }
    return lo;
  };

  auto add = [&](std::string name, double value, bool ok) {
    report.items.push_back({std::move(name), value, tol, ok});
  };
  const double pinf = std::sqrt(primal_sq) / (1.0 + std::sqrt(norm_b));
  const double dinf = std::sqrt(dual_sq) / (1.0 + std::sqrt(norm_c));
  const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
  const double xmin = min_eig(sol.x);
  const double smin = min_eig(sol.s);
  add("primal_feasibility", pinf, pinf <= tol);
  add("dual_feasibility", dinf, dinf <= tol);
  add("duality_gap", gap, gap <= tol);
  add("primal_psd", xmin, xmin >= -tol);
  add("dual_psd", smin, smin >= -tol);
  return report;
}

namespace {

nlohmann::json entries_to_json(const std::vector<Entry>& entries) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : entries) out.push_back({e.block, e.row, e.col, e.value});
  return out;
}

std::vector<Entry> entries_from_json(const nlohmann::json& j) {
  std::vector<Entry> out;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 4) throw ParseError("SDP triplet must be [block, i, j, value]");
    out.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>(), t[3].get<double>()});
  }
  return out;
}

nlohmann::json block_matrix_to_json(const BlockMatrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t b = 0; b < m.size(); ++b)
    for (Eigen::Index i = 0; i < m[b].rows(); ++i)
      for (Eigen::Index j = i; j < m[b].cols(); ++j)
        if (m[b](i, j) != 0.0) out.push_back({b, i, j, m[b](i, j)});
  return out;
}

}  // namespace

nlohmann::json problem_to_json(const SdpProblem& p) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : p.blocks)
    blocks.push_back({{"dim", b.dim}, {"kind", b.kind == BlockKind::Psd ? "psd" : "diagonal"}});
  nlohmann::json cons = nlohmann::json::array();
  for (const auto& c : p.constraints) cons.push_back({{"rhs", c.rhs}, {"entries", entries_to_json(c.entries)}});
  return {{"format", "sdp-triplet"},
          {"sense", "minimize"},
          {"blocks", blocks},
          {"objective", entries_to_json(p.objective)},
          {"constraints", cons}};
}

SdpProblem problem_from_json(const nlohmann::json& j) {
  try {
    SdpProblem p;
    for (const auto& b : j.at("blocks")) {
      const std::string kind = b.value("kind", "psd");
      if (kind != "psd" && kind != "diagonal") throw ParseError("unknown block kind " + kind);
      p.blocks.push_back({b.at("dim").get<int>(), kind == "psd" ? BlockKind::Psd : BlockKind::Diagonal});
    }
    p.objective = entries_from_json(j.at("objective"));
    for (const auto& c : j.at("constraints"))
      p.constraints.push_back({entries_from_json(c.at("entries")), c.at("rhs").get<double>()});
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed SDP JSON: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid SDP JSON: ") + e.what());
  }
}

nlohmann::json solution_to_json(const SdpSolution& s) {
  std::vector<double> y(s.y.data(), s.y.data() + s.y.size());
  return {{"status", to_string(s.status)},
          {"message", s.message},
          {"iterations", s.iterations},
          {"primal_objective", s.primal_objective},
          {"dual_objective", s.dual_objective},
          {"residuals",
           {{"primal_infeasibility", s.residuals.primal_infeasibility},
            {"dual_infeasibility", s.residuals.dual_infeasibility},
            {"relative_gap", s.residuals.relative_gap}}},
          {"y", y},
          {"X", block_matrix_to_json(s.x)},
          {"S", block_matrix_to_json(s.s)}};
}

}  // namespace aqnbf::sdp
