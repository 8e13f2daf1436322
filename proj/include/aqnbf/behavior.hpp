#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "aqnbf/algebra.hpp"
#include "aqnbf/scenario.hpp"
#include "aqnbf/tolerance.hpp"

namespace aqnbf {

/// Validated conditional distribution p(a⃗|x⃗), stored densely in the
/// scenario's joint-event order.
class Behavior {
 public:
  const Scenario& scenario() const noexcept { return scenario_; }
  std::span<const double> table() const noexcept { return table_; }
  double probability(std::span<const int> outcomes, std::span<const int> settings) const;

 private:
  Behavior(Scenario scenario, std::vector<double> table)
      : scenario_(std::move(scenario)), table_(std::move(table)) {}

  friend Behavior behavior_from_table(Scenario, std::vector<double>, const ToleranceConfig&);

  Scenario scenario_;
  std::vector<double> table_;
};

/// Checks normalization, non-negativity and no-signalling, throwing the
/// matching ValidationError subclass for the first failing check.
Behavior behavior_from_table(Scenario scenario, std::vector<double> table,
                             const ToleranceConfig& tol = {});

/// Residuals of the three behavior checks without throwing.
struct BehaviorResiduals {
  double normalization = 0.0;
  double negativity = 0.0;  // magnitude of the most negative entry, 0 if none
  double signalling = 0.0;
};
BehaviorResiduals behavior_residuals(const Scenario& scenario, std::span<const double> table);

/// Projection of a behavior onto the monomial basis: one marginal
/// probability per basis monomial, 1 for the identity.
class CGVector {
 public:
  CGVector(Scenario scenario, std::vector<double> entries);

  const Scenario& scenario() const noexcept { return scenario_; }
  std::span<const double> entries() const noexcept { return entries_; }
  double operator[](std::size_t i) const { return entries_.at(i); }

 private:
  Scenario scenario_;
  std::vector<double> entries_;
};

CGVector to_collins_gisin(const Behavior& b);
Behavior from_collins_gisin(const CGVector& v, const ToleranceConfig& tol = {});

/// All local deterministic behaviors, ordered by the per-(party, setting)
/// response table read as a mixed-radix number (last setting fastest).
std::vector<Behavior> enumerate_deterministic(const Scenario& scenario,
                                              std::size_t guard = 1'000'000);
std::size_t deterministic_vertex_count(const Scenario& scenario);

/// Linear functional on behaviors, stored as coefficients over the monomial
/// basis (constant term first).
class BellFunctional {
 public:
  BellFunctional(Scenario scenario, std::vector<double> coeffs);

  static BellFunctional constant(const Scenario& scenario, double value);
  /// Sum of `terms` over basis monomials; throws on non-basis monomials.
  static BellFunctional from_terms(const Scenario& scenario,
                                   const std::vector<std::pair<Monomial, double>>& terms);

  const Scenario& scenario() const noexcept { return scenario_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_.at(i); }
  double coefficient(const Monomial& m) const;

  BellFunctional operator+(const BellFunctional& o) const;
  BellFunctional operator-(const BellFunctional& o) const;
  BellFunctional operator*(double s) const;

 private:
  Scenario scenario_;
  std::vector<double> coeffs_;
};

inline BellFunctional operator*(double s, const BellFunctional& f) { return f * s; }

/// Index of `m` in basis_monomials(scenario), or -1.
int basis_index(const Scenario& scenario, const Monomial& m);

/// Full-table coefficients W(a⃗, x⃗) converted to the monomial basis.
BellFunctional functional_from_full_table(const Scenario& scenario, std::span<const double> table);

/// A full table reproducing `f` on every no-signalling behavior; marginal
/// terms are spread evenly over the settings of the parties they omit.
std::vector<double> full_table(const BellFunctional& f);

double evaluate(const BellFunctional& f, const CGVector& v);
double evaluate(const BellFunctional& f, const Behavior& b);

/// Expansion of the event (a⃗|x⃗) over the basis: p(a⃗|x⃗) = sum sign * cg[index].
std::vector<std::pair<int, double>> expand_event(const Scenario& scenario,
                                                 std::span<const int> outcomes,
                                                 std::span<const int> settings);

/// Random no-signalling behavior: a mixture of deterministic vertices and
/// generalized PR boxes (a_1 + ... + a_n = f(x⃗) mod d), which reach outside
/// the local polytope.
Behavior random_no_signalling(const Scenario& scenario, std::mt19937_64& rng);

}  // namespace aqnbf
