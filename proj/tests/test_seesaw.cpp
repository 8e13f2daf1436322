#include <doctest.h>

#include <cmath>

#include "aqnbf/errors.hpp"
#include "aqnbf/oracles.hpp"
#include "aqnbf/seesaw.hpp"

using namespace aqnbf;

namespace {

const PaperFunctionals& paper() {
  static const PaperFunctionals p = paper_functionals();
  return p;
}

SeesawState paper_state() { return {{paper().u00, paper().u01}, paper().v}; }

void check_feasible(const SeesawState& st) {
  for (const auto& u : st.u) CHECK(verify_nbf(u, 1e-6).is_nbf());
  CHECK(verify_nbf(st.v, 1e-6).is_nbf());
  CHECK(check_complete(st.family()).complete);
  const auto [lo, hi] = deterministic_range(st.composed());
  CHECK(lo >= -1e-6);
  CHECK(hi <= 1.0 + 1e-6);
}

}  // namespace

TEST_CASE("behavior step on the printed blocks") {
  const auto b = step_behavior(paper_state());
  CHECK(b.value == doctest::Approx(-0.0033).epsilon(0.1));
  CHECK(std::abs(b.gap) < 1e-6);
  CHECK(std::abs(figure_of_merit(b.moments, paper_state()) - b.value) < 1e-7);
}

TEST_CASE("constant V makes every step return one half") {
  SeesawState st = paper_state();
  st.v = BellFunctional::constant(st.v.scenario(), 0.5);
  const auto b = step_behavior(st);
  CHECK(std::abs(b.value - 0.5) < 1e-7);
  const auto fu = step_functionals(b.moments, st, Block::U);
  CHECK(std::abs(fu.value - 0.5) < 1e-7);
}

TEST_CASE("identity pick reduces to the bipartite minimum") {
  SeesawState st{{paper().u00, paper().u00}, BellFunctional::from_terms(make_scenario(2, 2, 2), {{{Letter{1, 0, 0}}, 1.0}})};
  const auto b = step_behavior(st);
  const double bipartite = aq_extremize(paper().u00, Sense::Min).value;
  CHECK(std::abs(bipartite) < 1e-7);
  CHECK(std::abs(b.value - bipartite) < 1e-7);
}

TEST_CASE("V step from the printed point does not lose ground") {
  // The printed blocks sit up to 2e-5 outside the NBF set, so the step may
  // keep them; it must never return a worse value.
  const auto b = step_behavior(paper_state());
  const auto fv = step_functionals(b.moments, paper_state(), Block::V);
  CHECK(fv.value <= b.value + 1e-9);

  SeesawState st{{shrink_to_nbf(paper().u00), shrink_to_nbf(paper().u01)}, shrink_to_nbf(paper().v)};
  check_feasible(st);
  const auto bs = step_behavior(st);
  const auto fs = step_functionals(bs.moments, st, Block::V);
  CHECK(fs.value <= bs.value + 1e-9);
  CHECK(fs.value <= -0.003);
  check_feasible(fs.state);
}

TEST_CASE("zero-objective block is a feasible NBF") {
  const auto s = make_scenario(2, 3, 2);
  const auto f = extreme_nbf(s, std::vector<double>(basis_size(s), 0.0));
  CHECK(verify_nbf(f, 1e-6).is_nbf());
}

TEST_CASE("shrinking lands inside the NBF set") {
  const auto f = shrink_to_nbf(3.0 * paper().u01 - BellFunctional::constant(paper().u01.scenario(), 1.0));
  const auto v = verify_nbf(f, 1e-6);
  CHECK(v.is_nbf());
  CHECK((std::abs(v.aq_min) < 1e-6 || std::abs(v.aq_max - 1.0) < 1e-6));
}

TEST_CASE("paper-guess run reaches the printed value monotonically") {
  SeesawConfig cfg;
  cfg.restarts = 1;
  cfg.max_sweeps = 10;
  const auto trace = run_seesaw(cfg);
  REQUIRE(trace.restarts.size() == 1);
  CHECK(trace.best_value <= -0.003);
  CHECK(trace.target_reached);
  const auto& sv = trace.restarts[0].sweep_values;
  for (std::size_t k = 1; k < sv.size(); ++k) CHECK(sv[k] <= sv[k - 1] + 1e-8);
  const auto& steps = trace.restarts[0].step_values;
  for (std::size_t k = 1; k < steps.size(); ++k) CHECK(steps[k] <= steps[k - 1] + 1e-8);
  REQUIRE(trace.best_state);
  check_feasible(*trace.best_state);
}

TEST_CASE("random initial blocks are exact NBFs") {
  SeesawConfig cfg;
  cfg.init = InitStrategy::Random;
  cfg.seed = 7;
  const auto st = initial_state(cfg, 3);
  check_feasible(st);
}

TEST_CASE("fixed seed reproduces the trace bitwise") {
  SeesawConfig cfg;
  cfg.init = InitStrategy::Random;
  cfg.seed = 11;
  cfg.restarts = 2;
  cfg.max_sweeps = 2;
  cfg.threads = 1;
  const auto a = run_seesaw(cfg);
  cfg.threads = 2;
  const auto b = run_seesaw(cfg);
  REQUIRE(a.restarts.size() == b.restarts.size());
  for (std::size_t i = 0; i < a.restarts.size(); ++i) CHECK(a.restarts[i].step_values == b.restarts[i].step_values);
  CHECK(a.best_value == b.best_value);
}

TEST_CASE("configuration errors") {
  SeesawConfig cfg;
  cfg.restarts = 0;
  CHECK_THROWS_AS(run_seesaw(cfg), NoWorkError);
  cfg.restarts = 1;
  cfg.threshold = 0.0;
  CHECK_THROWS_AS(run_seesaw(cfg), InvalidArgument);
  cfg.threshold = 1e-7;
  cfg.max_sweeps = 0;
  CHECK_THROWS_AS(run_seesaw(cfg), InvalidArgument);
}
