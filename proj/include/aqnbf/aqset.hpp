#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "aqnbf/algebra.hpp"
#include "aqnbf/behavior.hpp"
#include "aqnbf/errors.hpp"
#include "aqnbf/sdp.hpp"

namespace aqnbf {

/// One moment variable: every cell (row, col) of the moment matrix whose
/// operator reduces to `word`.
struct WordClass {
  CanonicalWord word;
  std::vector<std::pair<int, int>> cells;
  /// Position of the basis monomial equal to `word`, or -1 for words that
  /// are not basis monomials (mixed-setting products).
  int basis_index = -1;
};

/// Moment matrix layout for the almost-quantum relaxation of a scenario:
/// rows and columns indexed by the monomial basis, cells grouped into
/// classes by canonical word.
class MomentStructure {
 public:
  explicit MomentStructure(const Scenario& scenario);

  const Scenario& scenario() const noexcept { return scenario_; }
  const std::vector<Monomial>& basis() const noexcept { return basis_; }
  int size() const noexcept { return static_cast<int>(basis_.size()); }

  const std::vector<WordClass>& classes() const noexcept { return classes_; }
  const std::vector<std::pair<int, int>>& zero_cells() const noexcept { return zero_cells_; }
  int unit_class() const noexcept { return unit_class_; }
  /// Class index of a cell, -1 for cells forced to zero.
  int cell_class(int row, int col) const { return cell_class_[static_cast<std::size_t>(row * size() + col)]; }
  /// Class holding the first-row cell (1, basis[g]).
  int basis_class(int g) const { return cell_class(0, g); }

  /// Free moment variables: one per class other than the unit class.
  int variable_count() const noexcept { return static_cast<int>(class_of_variable_.size()); }
  int class_of_variable(int v) const { return class_of_variable_.at(static_cast<std::size_t>(v)); }
  int variable_of_class(int k) const { return variable_of_class_.at(static_cast<std::size_t>(k)); }

  /// Moment matrix with the unit cell set to 1 and class k set to values[k]
  /// for every non-unit class (values indexed by variable).
  Eigen::MatrixXd assemble(const Eigen::VectorXd& variables) const;

  /// Largest violation of Γ(1,1) = 1, within-class equality and zero cells.
  double constraint_residual(const Eigen::MatrixXd& gamma) const;

  /// Number of independent scalar equalities the class partition imposes on
  /// the upper triangle (symmetry already identified), excluding Γ(1,1) = 1.
  std::size_t equality_count() const;

 private:
  Scenario scenario_;
  std::vector<Monomial> basis_;
  std::vector<WordClass> classes_;
  std::vector<std::pair<int, int>> zero_cells_;
  std::vector<int> cell_class_;
  std::vector<int> class_of_variable_;
  std::vector<int> variable_of_class_;
  int unit_class_ = 0;
};

/// Builds the moment structure; supports 1 to 3 parties.
MomentStructure build_moment_structure(const Scenario& scenario);

/// Shared immutable structure per scenario, built once.
const MomentStructure& moment_structure(const Scenario& scenario);

enum class Sense { Min, Max };

/// Standard-form SDP whose dual slack is the moment matrix Γ (one dual
/// variable per free class) and whose primal matrix is the sum-of-squares
/// Gram matrix Z certifying the bound.
sdp::SdpProblem compile_extremize(const MomentStructure& structure, const BellFunctional& f, Sense sense);

/// Gram matrix Z with f - bound = <u|Z|u> (Min) or bound - f = <u|Z|u> (Max)
/// modulo the projector identities, u the vector of basis monomials.
struct DualCertificate {
  Sense sense = Sense::Min;
  Eigen::MatrixXd gram;
  double bound = 0.0;
};

struct Extremum {
  Sense sense;
  /// f evaluated on the optimal moment matrix.
  double value;
  /// Bound certified by the Gram matrix.
  double certificate_bound;
  Eigen::MatrixXd moment_matrix;
  Behavior behavior;
  DualCertificate certificate;
  sdp::SdpProblem problem;
  sdp::SdpSolution solution;

  double gap() const { return std::abs(value - certificate_bound); }
};

/// Extremizes f over the almost-quantum set. Throws SolverFailure when the
/// solve ends in a non-optimal status.
Extremum aq_extremize(const MomentStructure& structure, const BellFunctional& f, Sense sense,
                      const sdp::SolverConfig& cfg = {});
Extremum aq_extremize(const BellFunctional& f, Sense sense, const sdp::SolverConfig& cfg = {});

class SolverFailure : public NumericalError {
 public:
  SolverFailure(const std::string& what, sdp::Status status) : NumericalError(what), status_(status) {}
  sdp::Status status() const noexcept { return status_; }

 private:
  sdp::Status status_;
};

/// Γ(γ,γ') = tr(Π_γ Π_γ') / D for the model with one d-dimensional factor
/// per (party, setting) and E_{a|x} = |a><a| on factor x. Positive definite
/// and feasible for every compiled constraint.
Eigen::MatrixXd strictly_feasible_point(const MomentStructure& structure);

}  // namespace aqnbf
