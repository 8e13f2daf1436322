#include <doctest.h>

#include <cmath>
#include <random>

#include "aqnbf/nbf.hpp"
#include "aqnbf/oracles.hpp"

using namespace aqnbf;

TEST_CASE("Tsirelson model attains the quantum CHSH value") {
  const auto m = tsirelson_chsh_model();
  CHECK(m.residual() < 1e-15);
  const double expected = (4.0 + 2.0 * std::sqrt(2.0)) / 8.0;
  CHECK(std::abs(quantum_value(normalized_chsh(), m) - expected) < 1e-12);
}

TEST_CASE("normalized CHSH in correlator form") {
  // E_xy = 1 - 2 pA(0|x) - 2 pB(0|y) + 4 p(00|xy), so the correlator form
  // fixes every basis coefficient.
  const auto f = normalized_chsh();
  const Letter a0{0, 0, 0}, a1{0, 1, 0}, b0{1, 0, 0}, b1{1, 1, 0};
  CHECK(std::abs(f[0] - 0.75) < 1e-15);
  CHECK(std::abs(f.coefficient({a0}) + 0.5) < 1e-15);
  CHECK(std::abs(f.coefficient({a1})) < 1e-15);
  CHECK(std::abs(f.coefficient({b0}) + 0.5) < 1e-15);
  CHECK(std::abs(f.coefficient({a1, b1}) + 0.5) < 1e-15);
  CHECK(std::abs(f.coefficient({a0, b1}) - 0.5) < 1e-15);
}

TEST_CASE("product model factorizes first-order functionals") {
  std::mt19937_64 rng(4);
  const auto s = make_scenario(2, 2, 2);
  const auto m = random_product_model(s, rng);
  const auto p = quantum_behavior(m, s);
  const Letter a1{0, 1, 0}, b0{1, 0, 0};
  const auto cg = to_collins_gisin(p);
  const double pa = cg[static_cast<std::size_t>(basis_index(s, {a1}))];
  const double pb = cg[static_cast<std::size_t>(basis_index(s, {b0}))];
  CHECK(std::abs(cg[static_cast<std::size_t>(basis_index(s, {a1, b0}))] - pa * pb) < 1e-12);
  const auto f = BellFunctional::from_terms(s, {{{}, 0.2}, {{a1}, 0.7}, {{b0}, -0.4}});
  CHECK(std::abs(quantum_value(f, m) - (0.2 + 0.7 * pa - 0.4 * pb)) < 1e-12);
  CHECK(std::abs(quantum_value(BellFunctional::constant(s, 1.0), m) - 1.0) < 1e-12);
}

TEST_CASE("malformed models are rejected") {
  auto m = tsirelson_chsh_model();
  m.projectors[0][0][0](0, 0) = 0.9;
  CHECK_THROWS_AS(m.validate(make_scenario(2, 2, 2)), InvalidArgument);
  CHECK_THROWS_AS(tsirelson_chsh_model().validate(make_scenario(2, 3, 2)), InvalidArgument);
}

TEST_CASE("deterministic ranges") {
  const auto p = paper_functionals();
  const auto [u0, u1] = deterministic_range(p.u00);
  CHECK(u0 == 0.0);
  CHECK(u1 == 1.0);
  const auto [c0, c1] = deterministic_range(normalized_chsh());
  CHECK(std::abs(c0 - 0.25) < 1e-15);
  CHECK(std::abs(c1 - 0.75) < 1e-15);
  const auto [k0, k1] = deterministic_range(BellFunctional::constant(make_scenario(2, 2, 2), 0.3));
  CHECK(k0 == 0.3);
  CHECK(k1 == 0.3);
}

TEST_CASE("trace moment matrix") {
  const auto& s222 = moment_structure(make_scenario(2, 2, 2));
  const auto g = trace_moment_matrix(s222);
  CHECK(g(0, 0) == 1.0);
  const int e = basis_index(s222.scenario(), {Letter{0, 0, 0}});
  const int f = basis_index(s222.scenario(), {Letter{1, 0, 0}});
  CHECK(g(e, f) == 0.25);

  const auto& s232 = moment_structure(make_scenario(2, 3, 2));
  const auto h = trace_moment_matrix(s232);
  const int e0 = basis_index(s232.scenario(), {Letter{0, 0, 0}});
  const int e1 = basis_index(s232.scenario(), {Letter{0, 1, 0}});
  CHECK(h(e0, e0) == 0.5);
  CHECK(h(e0, e1) == 0.25);

  for (const auto& sc : {make_scenario(2, 2, 2), make_scenario(2, 3, 2), make_scenario(3, 3, 2), make_scenario(2, 2, 3)}) {
    const auto& st = moment_structure(sc);
    const auto t = trace_moment_matrix(st);
    CHECK(st.constraint_residual(t) < 1e-12);
    CHECK((t - strictly_feasible_point(st)).cwiseAbs().maxCoeff() < 1e-12);
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t).eigenvalues().minCoeff();
    MESSAGE(sc.to_string(), " trace point min eigenvalue ", lo);
    CHECK(lo > 0.0);
  }
}

TEST_CASE("quantum values lie in the AQ range") {
  std::mt19937_64 rng(9);
  const auto s = make_scenario(3, 3, 2);
  const auto w = paper_functionals().composed();
  const auto lo = aq_extremize(w, Sense::Min).value;
  const auto hi = aq_extremize(w, Sense::Max).value;
  for (int t = 0; t < 3; ++t) {
    const double q = quantum_value(w, random_entangled_model(s, rng));
    CHECK(q >= lo - 1e-7);
    CHECK(q <= hi + 1e-7);
  }
  const double g = quantum_value(w, ghz_model(s));
  CHECK(g >= lo - 1e-7);
  CHECK(g <= hi + 1e-7);
}
