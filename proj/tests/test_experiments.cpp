#include <doctest.h>

#include <cmath>

#include "aqnbf/errors.hpp"
#include "aqnbf/experiments.hpp"
#include "aqnbf/json_io.hpp"

using namespace aqnbf;

namespace {

const Reproduction& repro() {
  static const Reproduction r = reproduce();
  return r;
}

}  // namespace

TEST_CASE("reproduction lands in the band with a tight certificate") {
  const auto& r = repro();
  CHECK(r.u00.is_nbf());
  CHECK(r.u01.is_nbf());
  CHECK(r.v.is_nbf());
  CHECK(r.value() >= kReproduceLow);
  CHECK(r.value() <= kReproduceHigh);
  CHECK(r.extremum.gap() <= 1e-7);
  CHECK(r.recomposition_residual < 1e-6);
  CHECK(r.seconds < 60.0);
  CHECK(r.holds());
  CHECK(r.extremum.moment_matrix.rows() == 64);
}

TEST_CASE("tighter solver tolerance gives the same value") {
  sdp::SolverConfig tight;
  tight.gap_tol = 1e-10;
  tight.feas_tol = 1e-10;
  const Extremum e = aq_extremize(repro().w, Sense::Min, tight);
  CHECK(std::abs(e.value - repro().value()) < 1e-7);
  CHECK(e.gap() <= repro().extremum.gap() + 1e-12);
}

TEST_CASE("certificate survives a JSON round trip") {
  const auto& r = repro();
  Scenario s = make_scenario(1, 2, 2);
  const SosCertificate back = certificate_from_json(nlohmann::json::parse(certificate_to_json(r.certificate, r.w.scenario()).dump()), &s);
  CHECK(s == r.w.scenario());
  CHECK(back.bound == r.certificate.bound);
  CHECK((back.gram - r.certificate.gram).norm() == 0.0);
  CHECK(sos_decomposition(back, moment_structure(s)).residual < 1e-6);

  auto bad = certificate_to_json(r.certificate, r.w.scenario());
  bad["gram"].push_back({0, 5, 2, 1.0});
  CHECK_THROWS_AS(certificate_from_json(bad), ParseError);
}

TEST_CASE("zero perturbation matches the reproduction") {
  const auto p = perturb(0.0, 1, {}, 1);
  for (const auto& pt : p.trajectory) CHECK(std::abs(pt.value - repro().value()) < 1e-9);
  REQUIRE(p.claim);
  CHECK(*p.claim);
}

TEST_CASE("small perturbation keeps the violation") {
  const auto p = perturb(1e-4, 3);
  REQUIRE(p.trajectory.size() == 5);
  for (const auto& pt : p.trajectory) CHECK(pt.value <= kPerturbClaimValue);
  REQUIRE(p.claim);
  CHECK(*p.claim);
  const auto q = perturb(1e-4, 3);
  CHECK(q.value() == p.value());
}

TEST_CASE("large perturbation is reported without a claim") {
  const auto p = perturb(1e-2, 3, {}, 1);
  CHECK_FALSE(p.claim.has_value());
  CHECK(std::isfinite(p.value()));
  CHECK_THROWS_AS(perturb(0.02, 1), InvalidArgument);
  CHECK_THROWS_AS(perturb(-1e-3, 1), InvalidArgument);
}

TEST_CASE("inclusion chain over the oracle suite") {
  const auto rows = inclusion_chain(17);
  CHECK(rows.size() >= 10);
  for (const auto& r : rows) {
    INFO(r.name);
    CHECK(r.holds(1e-7));
    CHECK(r.quantum.size() >= 2);
  }
}

TEST_CASE("trace construction satisfies the compiled constraints") {
  for (const auto& s : {make_scenario(2, 2, 2), make_scenario(2, 3, 2), make_scenario(3, 3, 2)}) {
    const auto t = trace_check(s);
    CHECK(t.constraint_residual < 1e-12);
    CHECK(t.min_eigenvalue > 0.0);
    CHECK(t.closed_form_gap < 1e-12);
  }
}
