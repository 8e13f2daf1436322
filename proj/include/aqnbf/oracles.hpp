#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "aqnbf/aqset.hpp"
#include "aqnbf/behavior.hpp"

namespace aqnbf {

/// Projective quantum model: projectors[k][x][a] acts on party k's space,
/// `state` lives on the tensor product (party 0 most significant).
struct QuantumModel {
  std::string name;
  std::vector<int> dims;
  std::vector<std::vector<std::vector<Eigen::MatrixXcd>>> projectors;
  Eigen::VectorXcd state;

  /// Largest violation of idempotence, orthogonality, completeness and state
  /// normalization.
  double residual() const;
  /// Throws InvalidArgument when the model does not fit the scenario or its
  /// residual exceeds 1e-12.
  void validate(const Scenario& scenario) const;
};

/// Born-rule behavior of the model.
Behavior quantum_behavior(const QuantumModel& model, const Scenario& scenario);
double quantum_value(const BellFunctional& f, const QuantumModel& model);

/// Maximally entangled two-qubit state with A0 = Z, A1 = X and
/// B_y = (Z + (-1)^y X)/sqrt 2; outcome 0 is eigenvalue +1.
QuantumModel tsirelson_chsh_model();
/// Product of single-qubit states measured along random directions.
QuantumModel random_product_model(const Scenario& scenario, std::mt19937_64& rng);
/// Random pure state on (C^d)^n with random orthonormal measurement bases.
QuantumModel random_entangled_model(const Scenario& scenario, std::mt19937_64& rng);
/// GHZ state on n qubits measured in the XY plane at angles x * pi / m.
QuantumModel ghz_model(const Scenario& scenario);

/// (4 + CHSH) / 8 on (2,2,2), with CHSH = E00 + E01 + E10 - E11.
BellFunctional normalized_chsh();

/// Extremes of f over all local deterministic behaviors.
std::pair<double, double> deterministic_range(const BellFunctional& f, std::size_t guard = 1'000'000);

/// Γ(γ,γ') = tr(Π_γ Π_γ') / D from explicit projectors: party k owns one
/// d-dimensional factor per setting and E_{a|x} = |a><a| on factor x. The
/// operators are diagonal in the product basis and are built as Kronecker
/// products of their factor diagonals.
Eigen::MatrixXd trace_moment_matrix(const MomentStructure& structure);

}  // namespace aqnbf
