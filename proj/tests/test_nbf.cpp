#include <doctest.h>

#include <cmath>
#include <random>

#include "aqnbf/nbf.hpp"

using namespace aqnbf;

namespace {

const PaperFunctionals& paper() {
  static const PaperFunctionals p = paper_functionals();
  return p;
}

double max_abs_diff(const BellFunctional& f, const BellFunctional& g) {
  double worst = 0.0;
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) worst = std::max(worst, std::abs(f[i] - g[i]));
  return worst;
}

BellFunctional random_functional(const Scenario& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(basis_size(s));
  for (auto& v : c) v = u(rng);
  return BellFunctional(s, c);
}

}  // namespace

TEST_CASE("printed coefficients") {
  const auto& p = paper();
  const Letter a0{0, 0, 0}, a1{0, 1, 0}, b0{1, 0, 0}, b1{1, 1, 0};
  CHECK(p.u01[0] == 1.0);
  CHECK(p.u01.coefficient({b0}) == -0.0329);
  CHECK(p.v[0] == 0.1590);
  CHECK(p.v.coefficient({a1, b1}) == -0.7404);
  CHECK(p.u00[0] == 1.0);
  CHECK(p.u00.coefficient({a1, b1}) == 2.0);
  CHECK(p.v.coefficient({a0, b0}) == -0.6132);
}

TEST_CASE("U00 coefficient form matches its wiring on every vertex") {
  for (const auto& b : enumerate_deterministic(make_scenario(2, 3, 2)))
    CHECK(evaluate(paper().u00, b) == doctest::Approx(wiring_u00(b)).epsilon(1e-15));
}

TEST_CASE("verify_nbf on the printed functionals") {
  const auto u00 = verify_nbf(paper().u00, 1e-6);
  REQUIRE(u00.is_nbf());
  CHECK(std::abs(u00.aq_min) < 1e-6);
  CHECK(std::abs(u00.aq_max - 1.0) < 1e-6);
  CHECK(verify_nbf(paper().u01, 5e-4).is_nbf());
  CHECK(verify_nbf(paper().v, 5e-4).is_nbf());

  const auto doubled = verify_nbf(2.0 * paper().u00, 5e-4);
  CHECK(doubled.verdict == Verdict::NotNbf);
  CHECK(std::abs(doubled.aq_max - 2.0) < 1e-6);
}

TEST_CASE("SOS certificates recompose") {
  const auto& st = moment_structure(make_scenario(2, 3, 2));
  const auto v = verify_nbf(paper().u00, 1e-6);
  REQUIRE(v.lower);
  const auto dec = sos_decomposition(*v.lower, st);
  CHECK(dec.residual < 1e-6);
  CHECK(std::abs(v.lower->bound - v.aq_min) < 1e-7);
  for (std::size_t g = 1; g < dec.reconstructed.size(); ++g)
    CHECK(std::abs(dec.reconstructed[g] - paper().u00[g]) < 1e-6);
  CHECK(sos_decomposition(*v.upper, st).residual < 1e-6);

  SosCertificate bad = *v.lower;
  bad.gram(1, 1) += 1e-3;
  CHECK(sos_decomposition(bad, st).residual > 1e-6);

  SosCertificate negative = *v.lower;
  negative.gram -= 1e-3 * Eigen::MatrixXd::Identity(st.size(), st.size());
  CHECK_THROWS_AS(sos_decomposition(negative, st), NumericalError);
}

TEST_CASE("unit Gram certifies the constant one") {
  const auto s = make_scenario(2, 2, 2);
  const auto& st = moment_structure(s);
  SosCertificate c;
  c.gram = Eigen::MatrixXd::Zero(st.size(), st.size());
  c.gram(0, 0) = 1.0;
  c.target.assign(static_cast<std::size_t>(st.size()), 0.0);
  c.target[0] = 1.0;
  const auto dec = sos_decomposition(c, st);
  REQUIRE(dec.factors.size() == 1);
  CHECK(std::abs(std::abs(dec.factors[0](0)) - 1.0) < 1e-15);
  CHECK(dec.residual < 1e-15);
}

TEST_CASE("family completeness") {
  CHECK(check_complete(NbfFamily::two_outcome({paper().u00})).complete);
  CHECK(check_complete(NbfFamily::two_outcome({paper().u01})).complete);
  const auto bad = check_complete(NbfFamily({{paper().u00, paper().u00}}));
  CHECK_FALSE(bad.complete);
  CHECK(bad.coefficient_residual > 0.5);
}

TEST_CASE("composition routes agree") {
  std::mt19937_64 rng(11);
  const auto s232 = make_scenario(2, 3, 2);
  const auto s222 = make_scenario(2, 2, 2);
  for (int slot = 0; slot < 2; ++slot) {
    for (int t = 0; t < 3; ++t) {
      const auto v = random_functional(s222, rng);
      const auto fam = NbfFamily::two_outcome({random_functional(s232, rng), random_functional(s232, rng)});
      const CompositionMap map{slot, -1};
      CHECK(max_abs_diff(compose(v, fam, map), compose_polynomial(v, fam, map)) < 1e-12);
    }
  }
  const auto w = paper().composed();
  CHECK(w.scenario() == make_scenario(3, 3, 2));
  CHECK(max_abs_diff(w, compose_polynomial(paper().v, paper().family(), PaperFunctionals::composition_map())) <
        1e-12);
}

TEST_CASE("identity-pick composition returns U00 on the AB marginal") {
  const auto s222 = make_scenario(2, 2, 2);
  const auto pick = BellFunctional::from_terms(s222, {{{Letter{0, 0, 0}}, 1.0}});
  const auto w = compose(pick, paper().family());
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto p = random_no_signalling(w.scenario(), rng);
    const auto cg = to_collins_gisin(p);
    // AB marginal in CG form: entries without a party-2 letter.
    const auto s232 = make_scenario(2, 3, 2);
    std::vector<double> ab;
    for (const auto& m : basis_monomials(s232)) ab.push_back(cg[static_cast<std::size_t>(basis_index(w.scenario(), m))]);
    CHECK(std::abs(evaluate(w, cg) - evaluate(paper().u00, CGVector(s232, ab))) < 1e-12);
  }
}

TEST_CASE("composition on white noise factorizes") {
  // On uniform p the family outputs alpha = 0 with probability U_{0|xi}(uniform)
  // independently of Charlie's uniform outcome.
  const auto& p = paper();
  const auto w = p.composed();
  const auto s = w.scenario();
  const auto noise = behavior_from_table(s, std::vector<double>(s.joint_events(), 1.0 / 8.0));
  const auto s232 = make_scenario(2, 3, 2);
  const auto u_noise = behavior_from_table(s232, std::vector<double>(s232.joint_events(), 0.25));
  const double q0 = evaluate(p.u00, u_noise), q1 = evaluate(p.u01, u_noise);
  // V's first party is Charlie (uniform), second is the composed device.
  std::vector<double> table(make_scenario(2, 2, 2).joint_events());
  const auto s222 = make_scenario(2, 2, 2);
  for (std::size_t e = 0; e < table.size(); ++e) {
    int o[2], x[2];
    s222.decode_event(e, o, x);
    const double q = x[1] == 0 ? q0 : q1;
    table[e] = 0.5 * (o[1] == 0 ? q : 1.0 - q);
  }
  CHECK(std::abs(evaluate(w, noise) - evaluate(p.v, behavior_from_table(s222, table))) < 1e-12);
}

TEST_CASE("composition is linear") {
  std::mt19937_64 rng(3);
  const auto s232 = make_scenario(2, 3, 2);
  const auto s222 = make_scenario(2, 2, 2);
  const auto v1 = random_functional(s222, rng), v2 = random_functional(s222, rng);
  const auto u = random_functional(s232, rng), u1 = random_functional(s232, rng), u2 = random_functional(s232, rng);
  const double a = 0.3, b = -1.7;
  const auto fam = NbfFamily::two_outcome({u, u1});
  CHECK(max_abs_diff(compose(a * v1 + b * v2, fam), a * compose(v1, fam) + b * compose(v2, fam)) < 1e-12);
  // Linear in U_{0|1} when the complement member is composed along with it.
  const auto mix = [&](const BellFunctional& x) { return compose_polynomial(v1, NbfFamily({{u, u}, {x, x}})); };
  CHECK(max_abs_diff(mix(a * u1 + b * u2), a * mix(u1) + b * mix(u2) + (1.0 - a - b) * mix(u1 * 0.0)) < 1e-12);
}

TEST_CASE("paper composition: classical positivity and AQ violation") {
  const auto w = paper().composed();
  double lo = 1e9, hi = -1e9;
  for (const auto& b : enumerate_deterministic(w.scenario())) {
    const double x = evaluate(w, b);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo >= -1e-6);
  CHECK(hi <= 1.0 + 1e-6);
  const auto m = aq_extremize(w, Sense::Min);
  MESSAGE("min W over AQ = ", m.value, ", gap ", m.gap());
  CHECK(m.value <= -0.0028);
  CHECK(m.value >= -0.0038);
  CHECK(m.gap() < 1e-7);
}

TEST_CASE("AQ-nonnegativity cone") {
  const auto u00 = aq_nonnegative(paper().u00);
  REQUIRE(u00.status == sdp::Status::Optimal);
  CHECK(u00.member);
  const auto cone = nbf_constraints(make_scenario(2, 3, 2));
  auto coeffs = certified_coefficients(cone, u00.gram);
  coeffs[0] += u00.margin;
  for (std::size_t g = 0; g < coeffs.size(); ++g) CHECK(std::abs(coeffs[g] - paper().u00[g]) < 1e-7);

  const auto s = make_scenario(2, 2, 2);
  const auto negative = aq_nonnegative(BellFunctional::constant(s, -1.0));
  CHECK_FALSE(negative.member);
  CHECK(std::abs(negative.margin + 1.0) < 1e-7);
  const auto zero = aq_nonnegative(BellFunctional::constant(s, 0.0));
  CHECK(zero.member);
  CHECK(zero.gram.norm() < 1e-6);
}
