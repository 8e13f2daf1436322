#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "aqnbf/aqset.hpp"

using namespace aqnbf;

namespace {

BellFunctional normalized_chsh() {
  const auto s = make_scenario(2, 2, 2);
  std::vector<double> w(s.joint_events());
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const int outs[] = {a, b};
          const int sets[] = {x, y};
          w[s.event_index(outs, sets)] = (1.0 + ((a + b + x * y) % 2 == 0 ? 1.0 : -1.0)) / 8.0;
        }
  return functional_from_full_table(s, w);
}

}  // namespace

TEST_CASE("class counts") {
  CHECK(moment_structure(make_scenario(2, 3, 2)).classes().size() == 58);
  const auto& big = moment_structure(make_scenario(3, 3, 2));
  CHECK(big.size() == 64);
  CHECK(big.classes().size() == 532);
  CHECK(big.variable_count() == 531);
  CHECK(big.zero_cells().empty());
  CHECK_FALSE(moment_structure(make_scenario(2, 2, 3)).zero_cells().empty());
  CHECK_THROWS_AS(build_moment_structure(make_scenario(4, 2, 2)), SizeGuardError);
}

TEST_CASE("closed-form trace point is strictly feasible") {
  for (const auto& s : {make_scenario(2, 2, 2), make_scenario(2, 3, 3), make_scenario(3, 3, 2)}) {
    const auto& st = moment_structure(s);
    const Eigen::MatrixXd g = strictly_feasible_point(st);
    CHECK(st.constraint_residual(g) < 1e-15);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff() > 1e-6);
  }
}

TEST_CASE("normalized CHSH over the almost-quantum set") {
  const auto f = normalized_chsh();
  const auto hi = aq_extremize(f, Sense::Max);
  const auto lo = aq_extremize(f, Sense::Min);
  const double tsirelson = (4.0 + 2.0 * std::sqrt(2.0)) / 8.0;
  CHECK(std::abs(hi.value - tsirelson) < 1e-7);
  CHECK(std::abs(lo.value - (1.0 - tsirelson)) < 1e-7);
  CHECK(hi.gap() < 1e-7);
  CHECK(lo.gap() < 1e-7);
  CHECK(std::abs(evaluate(f, hi.behavior) - hi.value) < 1e-7);
}

TEST_CASE("random tripartite functional solve") {
  const auto s = make_scenario(3, 3, 2);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(basis_size(s));
  for (auto& v : c) v = u(rng);
  const BellFunctional f(s, c);
  const auto t0 = std::chrono::steady_clock::now();
  const auto lo = aq_extremize(f, Sense::Min);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("(3,3,2) solve: ", secs, " s, ", lo.solution.iterations, " iterations");
  CHECK(lo.gap() < 1e-7);
  CHECK(lo.moment_matrix.rows() == 64);
}
