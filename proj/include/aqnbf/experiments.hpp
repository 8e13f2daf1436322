#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aqnbf/nbf.hpp"

namespace aqnbf {

/// Acceptance band for the headline minimum; the printed coefficients carry
/// four decimals, so the exact value is not known to better than this.
inline constexpr double kReproduceLow = -0.0038;
inline constexpr double kReproduceHigh = -0.0028;
inline constexpr double kPrintedNbfTol = 5e-4;

struct Reproduction {
  NbfVerdict u00;
  NbfVerdict u01;
  NbfVerdict v;
  BellFunctional w;
  Extremum extremum;
  SosCertificate certificate;
  double recomposition_residual = 0.0;
  double seconds = 0.0;

  double value() const { return extremum.value; }
  bool holds() const;
};

/// Verifies the printed blocks, composes them and minimizes W over the
/// almost-quantum set, with the lower-bound certificate re-expanded.
Reproduction reproduce(const sdp::SolverConfig& cfg = {}, double nbf_tol = kPrintedNbfTol);

struct PerturbPoint {
  double epsilon = 0.0;
  double value = 0.0;
  double gap = 0.0;
  /// Blocks that left the NBF band and were shrunk back.
  int shrunk = 0;
};

struct Perturbation {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  /// epsilon * k / steps for k = 0..steps, sharing one noise draw.
  std::vector<PerturbPoint> trajectory;
  /// Set for epsilon <= 1e-4, where the minimum must stay <= -0.002.
  std::optional<bool> claim;

  double value() const { return trajectory.back().value; }
};

inline constexpr double kPerturbMax = 0.01;
inline constexpr double kPerturbClaimEpsilon = 1e-4;
inline constexpr double kPerturbClaimValue = -0.002;

/// Adds i.i.d. uniform noise in [-epsilon, epsilon] to every coefficient of
/// the printed U_{0|0}, U_{0|1} and V, shrinks any block whose almost-quantum
/// range leaves [-tol, 1 + tol], recomposes and re-minimizes.
Perturbation perturb(double epsilon, std::uint64_t seed, const sdp::SolverConfig& cfg = {}, int steps = 4,
                     double nbf_tol = kPrintedNbfTol);

/// One functional of the inclusion-chain suite: the classical range must sit
/// inside the almost-quantum range, and so must every quantum value.
struct InclusionRow {
  std::string name;
  double det_min = 0.0;
  double det_max = 0.0;
  double aq_min = 0.0;
  double aq_max = 0.0;
  std::vector<std::pair<std::string, double>> quantum;

  bool holds(double tol = 1e-7) const;
};

/// Printed blocks, normalized CHSH and seeded random functionals on
/// (2,2,2), (2,3,2) and (2,2,3), each paired with quantum models.
std::vector<InclusionRow> inclusion_chain(std::uint64_t seed, const sdp::SolverConfig& cfg = {});

struct TraceCheck {
  Scenario scenario;
  int size = 0;
  double constraint_residual = 0.0;
  double min_eigenvalue = 0.0;
  /// Largest entrywise difference from strictly_feasible_point.
  double closed_form_gap = 0.0;
};

TraceCheck trace_check(const Scenario& scenario);

}  // namespace aqnbf
