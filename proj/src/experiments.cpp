#include "aqnbf/experiments.hpp"

#include <chrono>
#include <random>

#include "aqnbf/errors.hpp"
#include "aqnbf/oracles.hpp"
#include "aqnbf/seesaw.hpp"

namespace aqnbf {

bool Reproduction::holds() const {
  return u00.is_nbf() && u01.is_nbf() && v.is_nbf() && value() >= kReproduceLow && value() <= kReproduceHigh &&
         extremum.gap() <= 1e-7 && recomposition_residual < 1e-6;
}

Reproduction reproduce(const sdp::SolverConfig& cfg, double nbf_tol) {
  const auto start = std::chrono::steady_clock::now();
  const auto paper = paper_functionals();
  NbfVerdict vu00 = verify_nbf(paper.u00, nbf_tol, cfg);
  NbfVerdict vu01 = verify_nbf(paper.u01, nbf_tol, cfg);
  NbfVerdict vv = verify_nbf(paper.v, nbf_tol, cfg);
  BellFunctional w = paper.composed();
  const auto& structure = moment_structure(w.scenario());
  Extremum e = aq_extremize(structure, w, Sense::Min, cfg);
  SosCertificate cert = make_certificate(w, e.certificate);
  const double residual = sos_decomposition(cert, structure).residual;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(vu00), std::move(vu01), std::move(vv), std::move(w), std::move(e), std::move(cert), residual, seconds};
}

namespace {

BellFunctional with_noise(const BellFunctional& f, const std::vector<double>& noise, double scale) {
  std::vector<double> c(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t g = 0; g < c.size(); ++g) c[g] += scale * noise[g];
  return BellFunctional(f.scenario(), std::move(c));
}

// Shrinks toward 1/2 only when the range leaves the tolerance band.
BellFunctional project(const BellFunctional& f, double tol, const sdp::SolverConfig& cfg, int& shrunk) {
  const auto& st = moment_structure(f.scenario());
  const double lo = aq_extremize(st, f, Sense::Min, cfg).value;
  const double hi = aq_extremize(st, f, Sense::Max, cfg).value;
  if (lo >= -tol && hi <= 1.0 + tol) return f;
  ++shrunk;
  return shrink_to_nbf(f, cfg);
}

}  // namespace

Perturbation perturb(double epsilon, std::uint64_t seed, const sdp::SolverConfig& cfg, int steps, double nbf_tol) {
  if (!(epsilon >= 0.0 && epsilon <= kPerturbMax)) throw InvalidArgument("epsilon must lie in [0, 0.01]");
  if (steps < 1) throw InvalidArgument("steps must be positive");
  const auto paper = paper_functionals();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto draw = [&](const BellFunctional& f) {
    std::vector<double> n(f.coeffs().size());
    for (auto& x : n) x = unit(rng);
    return n;
  };
  const auto n00 = draw(paper.u00);
  const auto n01 = draw(paper.u01);
  const auto nv = draw(paper.v);

  Perturbation out;
  out.epsilon = epsilon;
  out.seed = seed;
  for (int k = 0; k <= steps; ++k) {
    PerturbPoint pt;
    pt.epsilon = epsilon * k / steps;
    BellFunctional u00 = with_noise(paper.u00, n00, pt.epsilon);
    BellFunctional u01 = with_noise(paper.u01, n01, pt.epsilon);
    BellFunctional v = with_noise(paper.v, nv, pt.epsilon);
    if (k > 0) {
      u00 = project(u00, nbf_tol, cfg, pt.shrunk);
      u01 = project(u01, nbf_tol, cfg, pt.shrunk);
      v = project(v, nbf_tol, cfg, pt.shrunk);
    }
    const auto w = compose(v, NbfFamily::two_outcome({u00, u01}), PaperFunctionals::composition_map());
    const Extremum e = aq_extremize(w, Sense::Min, cfg);
    pt.value = e.value;
    pt.gap = e.gap();
    out.trajectory.push_back(pt);
  }
  if (epsilon <= kPerturbClaimEpsilon) out.claim = out.value() <= kPerturbClaimValue;
  return out;
}

bool InclusionRow::holds(double tol) const {
  if (det_min < aq_min - tol || det_max > aq_max + tol) return false;
  for (const auto& [name, q] : quantum)
    if (q < aq_min - tol || q > aq_max + tol) return false;
  return true;
}

std::vector<InclusionRow> inclusion_chain(std::uint64_t seed, const sdp::SolverConfig& cfg) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto random_functional = [&](const Scenario& s) {
    std::vector<double> c(basis_size(s));
    for (auto& x : c) x = unit(rng);
    return BellFunctional(s, std::move(c));
  };
  const auto paper = paper_functionals();
  const auto s222 = make_scenario(2, 2, 2);
  const auto s232 = make_scenario(2, 3, 2);
  const auto s223 = make_scenario(2, 2, 3);

  std::vector<std::pair<std::string, BellFunctional>> suite = {
      {"U00", paper.u00}, {"U01", paper.u01}, {"V", paper.v}, {"CHSH", normalized_chsh()}};
  for (int i = 0; i < 3; ++i) suite.emplace_back("random(2,2,2)#" + std::to_string(i), random_functional(s222));
  for (int i = 0; i < 3; ++i) suite.emplace_back("random(2,3,2)#" + std::to_string(i), random_functional(s232));
  for (int i = 0; i < 2; ++i) suite.emplace_back("random(2,2,3)#" + std::to_string(i), random_functional(s223));
  // CHSH-signed correlators sum_xy c_xy E_xy with jittered weights keep the
  // classical and almost-quantum ranges apart.
  for (int i = 0; i < 2; ++i) {
    std::vector<double> t(s222.joint_events());
    for (std::size_t xy = 0; xy < 4; ++xy) {
      const double c = (xy == 3 ? -1.0 : 1.0) * (1.0 + 0.3 * unit(rng));
      for (std::size_t ab = 0; ab < 4; ++ab) t[xy * 4 + ab] = (ab == 0 || ab == 3) ? c : -c;
    }
    suite.emplace_back("tilted-chsh#" + std::to_string(i), functional_from_full_table(s222, t));
  }

  std::vector<InclusionRow> rows;
  for (const auto& [name, f] : suite) {
    InclusionRow row;
    row.name = name;
    std::tie(row.det_min, row.det_max) = deterministic_range(f);
    const auto& st = moment_structure(f.scenario());
    row.aq_min = aq_extremize(st, f, Sense::Min, cfg).value;
    row.aq_max = aq_extremize(st, f, Sense::Max, cfg).value;
    std::vector<QuantumModel> models;
    if (f.scenario() == s222) models.push_back(tsirelson_chsh_model());
    if (f.scenario().outcomes() == 2) models.push_back(ghz_model(f.scenario()));
    for (int k = 0; k < 2; ++k) models.push_back(random_entangled_model(f.scenario(), rng));
    if (f.scenario().outcomes() == 2) models.push_back(random_product_model(f.scenario(), rng));
    for (const auto& m : models) row.quantum.emplace_back(m.name, quantum_value(f, m));
    rows.push_back(std::move(row));
  }
  return rows;
}

TraceCheck trace_check(const Scenario& scenario) {
  const auto& st = moment_structure(scenario);
  const Eigen::MatrixXd gamma = trace_moment_matrix(st);
  TraceCheck out{scenario};
  out.size = st.size();
  out.constraint_residual = st.constraint_residual(gamma);
  out.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gamma, Eigen::EigenvaluesOnly).eigenvalues()(0);
  out.closed_form_gap = (gamma - strictly_feasible_point(st)).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace aqnbf
