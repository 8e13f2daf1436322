#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace aqnbf::sdp {

enum class BlockKind { Psd, Diagonal };

struct Block {
  int dim = 0;
  BlockKind kind = BlockKind::Psd;
};

/// Upper-triangle triplet (row <= col) of a symmetric block matrix; an
/// off-diagonal entry stands for both (row, col) and (col, row).
struct Entry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct Constraint {
  std::vector<Entry> entries;
  double rhs = 0.0;
};

/// Standard form: min <C, X> s.t. <A_i, X> = b_i, X psd (block diagonal).
/// Dual: max b'y s.t. S = C - sum_i y_i A_i psd.
struct SdpProblem {
  std::vector<Block> blocks;
  std::vector<Entry> objective;
  std::vector<Constraint> constraints;

  int total_dim() const;
  /// Throws InvalidArgument on out-of-range or lower-triangle entries,
  /// non-finite data, or a diagonal-block entry off the diagonal.
  void validate() const;
};

using BlockMatrix = std::vector<Eigen::MatrixXd>;

enum class Status { Optimal, PrimalInfeasible, DualInfeasible, NumericalTrouble };
std::string to_string(Status s);

struct StartPoint {
  BlockMatrix x;
  Eigen::VectorXd y;
  BlockMatrix s;
};

struct SolverConfig {
  double gap_tol = 1e-8;
  double feas_tol = 1e-9;
  int max_iters = 200;
  double step_fraction = 0.98;
  double infeasibility_threshold = 1e8;
  int dimension_guard = 512;
  /// On degenerate instances the primal residual can stall just above
  /// feas_tol once the gap has closed. The best such iterate is accepted when
  /// its primal residual is within this multiple of feas_tol.
  double stall_feas_factor = 100.0;
  /// Optional strictly feasible (X, S positive definite) starting point;
  /// defaults to identity-scaled X and S.
  std::optional<StartPoint> start;
};

struct IterateRecord {
  int iteration = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double mu = 0.0;
  double primal_step = 0.0;
  double dual_step = 0.0;
};

struct Residuals {
  double primal_infeasibility = 0.0;  // ||b - A(X)|| / (1 + ||b||)
  double dual_infeasibility = 0.0;    // ||C - A'y - S||_F / (1 + ||C||_F)
  double relative_gap = 0.0;          // |<C,X> - b'y| / (1 + |<C,X>| + |b'y|)
};

struct SdpSolution {
  Status status = Status::NumericalTrouble;
  BlockMatrix x;
  Eigen::VectorXd y;
  BlockMatrix s;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  Residuals residuals;
  int iterations = 0;
  std::vector<IterateRecord> trace;
  std::string message;
};

/// Primal-dual path-following (HKM direction, Mehrotra predictor-corrector).
/// Single-threaded and deterministic for identical inputs.
SdpSolution solve(const SdpProblem& problem, const SolverConfig& config = {});

struct CertificateItem {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct CertificateReport {
  std::vector<CertificateItem> items;
  bool all_passed() const;
};

/// Recomputes feasibility, gap and semidefiniteness from dense copies of the
/// problem data, independently of the solver's sparse kernels.
CertificateReport check_certificate(const SdpProblem& problem, const SdpSolution& solution,
                                    double tol);

nlohmann::json problem_to_json(const SdpProblem& p);
SdpProblem problem_from_json(const nlohmann::json& j);
nlohmann::json solution_to_json(const SdpSolution& s);

}  // namespace aqnbf::sdp
