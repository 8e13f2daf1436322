#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "aqnbf/nbf.hpp"

namespace aqnbf {

enum class InitStrategy { Paper, Random };

struct SeesawConfig {
  int restarts = 20;
  int max_sweeps = 60;
  /// A restart stops once `window` sweeps improve the value by less than
  /// `threshold` in total.
  double threshold = 1e-7;
  int window = 3;
  std::uint64_t seed = 1;
  InitStrategy init = InitStrategy::Paper;
  /// With the paper strategy, restart 0 also starts from the printed U.
  bool paper_u_first = true;
  /// Restarts after the first one reaching this value are not kept.
  double target = -0.001;
  /// Magnitude of the uniform noise added to random wiring mixtures.
  double noise = 0.1;
  /// Worker threads; 0 reads AQ_NR_THREADS and falls back to the core count.
  int threads = 0;
  sdp::SolverConfig solver;

  void validate() const;
};

/// Current blocks: the outcome-0 members U_{0|xi} of a two-outcome family
/// and the bipartite V. The family feeds V's `map.family_slot` party.
struct SeesawState {
  std::vector<BellFunctional> u;
  BellFunctional v;
  CompositionMap map = PaperFunctionals::composition_map();

  NbfFamily family() const { return NbfFamily::two_outcome(u); }
  BellFunctional composed() const { return compose(v, family(), map); }
};

struct BehaviorStep {
  Behavior behavior;
  /// Tripartite moments Γ(1, Π_γ) of the optimal point.
  CGVector moments;
  double value;
  double gap;
};

/// Minimizes the composed functional over the almost-quantum set.
BehaviorStep step_behavior(const SeesawState& state, const sdp::SolverConfig& cfg = {});

enum class Block { U, V };

struct FunctionalStep {
  SeesawState state;
  double value;
  /// False when the SDP optimum did not beat the incoming value and the old
  /// block was kept.
  bool accepted;
};

/// Minimizes the figure of merit W(p) over one block, keeping p and the other
/// block fixed. Feasible blocks are almost-quantum NBFs: the block and its
/// complement 1 - f both carry a Gram certificate.
FunctionalStep step_functionals(const CGVector& moments, const SeesawState& state, Block block,
                                const sdp::SolverConfig& cfg = {});

/// W(p) for the composed functional on tripartite moments, computed from the
/// blocks without forming W.
double figure_of_merit(const CGVector& moments, const SeesawState& state);

struct RestartTrace {
  int index = 0;
  /// Figure of merit at the end of every sweep.
  std::vector<double> sweep_values;
  /// Value after every step (p, U, V, p, U, V, ...).
  std::vector<double> step_values;
  bool failed = false;
  std::string error;
  std::optional<SeesawState> final_state;
  double best() const;
};

struct SeesawTrace {
  std::vector<RestartTrace> restarts;
  std::optional<SeesawState> best_state;
  std::optional<Behavior> best_behavior;
  double best_value = 0.0;
  int best_restart = -1;
  int failed_restarts = 0;
  bool target_reached = false;
};

/// Initial blocks for restart `index`. Paper: restart 0 uses the printed U
/// and V, later restarts the printed V with random U. Random: both random.
/// Every block is shrunk toward 1/2 until it is an exact almost-quantum NBF.
SeesawState initial_state(const SeesawConfig& cfg, int index);

/// Random NBF: a mixture of random classical wirings plus uniform noise,
/// shrunk into the NBF set.
BellFunctional random_nbf(const Scenario& scenario, double noise, std::mt19937_64& rng,
                          const sdp::SolverConfig& cfg = {});

/// Minimizer of <direction, f> over almost-quantum NBFs f.
BellFunctional extreme_nbf(const Scenario& scenario, const std::vector<double>& direction,
                           const sdp::SolverConfig& cfg = {});

/// 1/2 + s (f - 1/2) with the largest s <= 1 keeping the AQ range in [0, 1].
BellFunctional shrink_to_nbf(const BellFunctional& f, const sdp::SolverConfig& cfg = {});

/// Runs every restart (in parallel) and keeps those up to the first that
/// reaches the target. Throws NoWorkError for zero restarts and
/// NumericalError when every restart fails.
SeesawTrace run_seesaw(const SeesawConfig& cfg);

int worker_count(int requested);

}  // namespace aqnbf
