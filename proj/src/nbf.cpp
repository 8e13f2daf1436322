#include "aqnbf/nbf.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "aqnbf/errors.hpp"

namespace aqnbf {

namespace {

// Sum of m over every cell of the class, both orientations included.
double class_sum(const std::vector<std::pair<int, int>>& cells, const Eigen::MatrixXd& m) {
  double s = 0.0;
  for (const auto& [r, c] : cells) s += m(r, c);
  return s;
}

}  // namespace

SosCertificate make_certificate(const BellFunctional& f, const DualCertificate& cert) {
  SosCertificate out;
  out.sense = cert.sense;
  out.gram = cert.gram;
  out.bound = cert.bound;
  out.target.assign(f.coeffs().begin(), f.coeffs().end());
  if (cert.sense == Sense::Min) {
    out.target[0] -= cert.bound;
  } else {
    for (auto& t : out.target) t = -t;
    out.target[0] += cert.bound;
  }
  return out;
}

SosDecomposition sos_decomposition(const SosCertificate& cert, const MomentStructure& st) {
  const int n = st.size();
  if (cert.gram.rows() != n || cert.gram.cols() != n) throw InvalidArgument("Gram matrix has wrong shape");
  if (static_cast<int>(cert.target.size()) != n) throw InvalidArgument("certificate target has wrong length");
  const Eigen::MatrixXd sym = 0.5 * (cert.gram + cert.gram.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition of the Gram matrix failed");
  const double lowest = eig.eigenvalues().minCoeff();
  if (lowest < -1e-6) {
    std::ostringstream os;
    os << "Gram matrix is not positive semidefinite (eigenvalue " << lowest << ")";
    throw NumericalError(os.str());
  }

  SosDecomposition out;
  Eigen::MatrixXd recomposed = Eigen::MatrixXd::Zero(n, n);
  for (int i = n - 1; i >= 0; --i) {
    const double lambda = eig.eigenvalues()(i);
    if (lambda <= 0.0) continue;
    Eigen::VectorXd fi = std::sqrt(lambda) * eig.eigenvectors().col(i);
    recomposed += fi * fi.transpose();
    out.factors.push_back(std::move(fi));
  }

  out.reconstructed.assign(static_cast<std::size_t>(n), 0.0);
  for (const auto& cls : st.classes()) {
    const double s = class_sum(cls.cells, recomposed);
    if (cls.basis_index >= 0) {
      out.reconstructed[static_cast<std::size_t>(cls.basis_index)] = s;
      out.residual = std::max(out.residual, std::abs(s - cert.target[static_cast<std::size_t>(cls.basis_index)]));
    } else {
      out.residual = std::max(out.residual, std::abs(s));
    }
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Nbf: return "nbf";
    case Verdict::NotNbf: return "not_nbf";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

NbfVerdict verify_nbf(const BellFunctional& f, double tol, const sdp::SolverConfig& cfg) {
  NbfVerdict v;
  v.tol = tol;
  try {
    const auto& st = moment_structure(f.scenario());
    const Extremum lo = aq_extremize(st, f, Sense::Min, cfg);
    const Extremum hi = aq_extremize(st, f, Sense::Max, cfg);
    v.aq_min = lo.value;
    v.aq_max = hi.value;
    v.min_gap = lo.gap();
    v.max_gap = hi.gap();
    v.lower = make_certificate(f, lo.certificate);
    v.upper = make_certificate(f, hi.certificate);
    v.verdict = v.aq_min >= -tol && v.aq_max <= 1.0 + tol ? Verdict::Nbf : Verdict::NotNbf;
  } catch (const SolverFailure& e) {
    v.verdict = Verdict::Indeterminate;
    v.message = e.what();
  }
  return v;
}

NbfFamily::NbfFamily(std::vector<std::vector<BellFunctional>> members) : members_(std::move(members)) {
  if (members_.empty() || members_.front().empty()) throw InvalidArgument("family needs at least one member");
  const auto& s = members_.front().front().scenario();
  for (const auto& row : members_) {
    if (row.size() != members_.front().size()) throw InvalidArgument("family rows differ in outcome count");
    for (const auto& f : row)
      if (!(f.scenario() == s)) throw ScenarioMismatch("family members live in different scenarios");
  }
}

NbfFamily NbfFamily::two_outcome(const std::vector<BellFunctional>& outcome_zero) {
  std::vector<std::vector<BellFunctional>> rows;
  for (const auto& u : outcome_zero) rows.push_back({u, BellFunctional::constant(u.scenario(), 1.0) - u});
  return NbfFamily(std::move(rows));
}

Completeness check_complete(const NbfFamily& fam, double tol, unsigned seed) {
  Completeness out;
  const auto& s = fam.scenario();
  std::vector<BellFunctional> sums;
  for (const auto& row : fam.members()) {
    BellFunctional sum = BellFunctional::constant(s, 0.0);
    for (const auto& f : row) sum = sum + f;
    for (std::size_t i = 0; i < sum.coeffs().size(); ++i)
      out.coefficient_residual = std::max(out.coefficient_residual, std::abs(sum[i] - (i == 0 ? 1.0 : 0.0)));
    sums.push_back(std::move(sum));
  }
  std::mt19937_64 rng(seed);
  for (int t = 0; t < 100; ++t) {
    const Behavior p = random_no_signalling(s, rng);
    const CGVector cg = to_collins_gisin(p);
    for (const auto& sum : sums) out.sample_residual = std::max(out.sample_residual, std::abs(evaluate(sum, cg) - 1.0));
  }
  out.complete = out.coefficient_residual <= tol && out.sample_residual <= tol;
  return out;
}

Scenario composed_scenario(const BellFunctional& v, const NbfFamily& fam, const CompositionMap& map) {
  const auto& vs = v.scenario();
  const auto& us = fam.scenario();
  if (vs.parties() != 2 || us.parties() != 2) throw InvalidArgument("composition needs bipartite V and U");
  if (map.family_slot != 0 && map.family_slot != 1) throw InvalidArgument("family slot must be 0 or 1");
  if (vs.settings(map.family_slot) != fam.settings() || vs.outcomes() != fam.outcomes()) {
    std::ostringstream os;
    os << "V's slot " << map.family_slot << " has " << vs.settings(map.family_slot) << " settings and "
       << vs.outcomes() << " outcomes, the family " << fam.settings() << " and " << fam.outcomes();
    throw InvalidArgument(os.str());
  }
  if (vs.outcomes() != us.outcomes()) throw InvalidArgument("composition needs a uniform outcome count");
  const int other = vs.settings(1 - map.family_slot);
  int third = map.third_party_settings;
  if (third < 0) third = std::max({us.settings(0), us.settings(1), other});
  if (third < other) throw InvalidArgument("third party needs at least as many settings as V's free party");
  return Scenario({us.settings(0), us.settings(1), third}, us.outcomes());
}

BellFunctional compose(const BellFunctional& v, const NbfFamily& fam, const CompositionMap& map) {
  const Scenario ws = composed_scenario(v, fam, map);
  const auto done = check_complete(fam);
  if (!done.complete) {
    std::ostringstream os;
    os << "family is not complete (coefficient residual " << done.coefficient_residual << ")";
    throw InvalidArgument(os.str());
  }
  const auto& vs = v.scenario();
  const auto& us = fam.scenario();
  const int slot = map.family_slot;
  const int other_settings = vs.settings(1 - slot);

  std::vector<std::vector<std::vector<double>>> ut(static_cast<std::size_t>(fam.settings()));
  for (int xi = 0; xi < fam.settings(); ++xi)
    for (int alpha = 0; alpha < fam.outcomes(); ++alpha) ut[static_cast<std::size_t>(xi)].push_back(full_table(fam.at(xi, alpha)));
  const std::vector<double> vt = full_table(v);

  std::vector<double> table(ws.joint_events(), 0.0);
  int outs[3], sets[3];
  int vo[2], vx[2];
  for (std::size_t e = 0; e < table.size(); ++e) {
    ws.decode_event(e, outs, sets);
    if (sets[2] >= other_settings) continue;
    vo[1 - slot] = outs[2];
    vx[1 - slot] = sets[2];
    const std::size_t ue = us.event_index(std::span<const int>(outs, 2), std::span<const int>(sets, 2));
    double w = 0.0;
    for (int xi = 0; xi < fam.settings(); ++xi) {
      for (int alpha = 0; alpha < fam.outcomes(); ++alpha) {
        vo[slot] = alpha;
        vx[slot] = xi;
        w += vt[vs.event_index(vo, vx)] * ut[static_cast<std::size_t>(xi)][static_cast<std::size_t>(alpha)][ue];
      }
    }
    table[e] = w;
  }
  return functional_from_full_table(ws, table);
}

BellFunctional compose_polynomial(const BellFunctional& v, const NbfFamily& fam, const CompositionMap& map) {
  const Scenario ws = composed_scenario(v, fam, map);
  const auto& ubasis = basis_monomials(fam.scenario());
  const auto& vbasis = basis_monomials(v.scenario());
  std::vector<double> w(basis_size(ws), 0.0);
  for (std::size_t g = 0; g < vbasis.size(); ++g) {
    const double c = v[g];
    if (c == 0.0) continue;
    const Letter* fl = nullptr;
    Monomial third;
    for (const auto& l : vbasis[g]) {
      if (l.party == map.family_slot)
        fl = &l;
      else
        third.push_back({2, l.setting, l.outcome});
    }
    if (!fl) {
      w[static_cast<std::size_t>(basis_index(ws, third))] += c;
      continue;
    }
    const BellFunctional& u = fam.at(fl->setting, fl->outcome);
    for (std::size_t h = 0; h < ubasis.size(); ++h) {
      if (u[h] == 0.0) continue;
      Monomial m = ubasis[h];
      m.insert(m.end(), third.begin(), third.end());
      w[static_cast<std::size_t>(basis_index(ws, m))] += c * u[h];
    }
  }
  return BellFunctional(ws, std::move(w));
}

PaperFunctionals paper_functionals() {
  const auto s232 = make_scenario(2, 3, 2);
  const auto s222 = make_scenario(2, 2, 2);
  const auto a = [](int x) { return Letter{0, x, 0}; };
  const auto b = [](int y) { return Letter{1, y, 0}; };
  auto u00 = BellFunctional::from_terms(s232, {{{}, 1.0}, {{a(1)}, -1.0}, {{b(1)}, -1.0}, {{a(1), b(1)}, 2.0}});
  auto u01 = BellFunctional::from_terms(s232, {{{}, 1.0},
                                               {{b(0)}, -0.0329},
                                               {{b(2)}, -0.7117},
                                               {{a(0)}, -0.0329},
                                               {{a(0), b(0)}, -0.8418},
                                               {{a(0), b(2)}, 0.6359},
                                               {{a(2)}, -0.7117},
                                               {{a(2), b(0)}, 0.6359},
                                               {{a(2), b(2)}, 0.4360}});
  auto v = BellFunctional::from_terms(s222, {{{}, 0.1590},
                                             {{b(0)}, 0.8372},
                                             {{b(1)}, 0.0031},
                                             {{a(0)}, -0.1544},
                                             {{a(0), b(0)}, -0.6132},
                                             {{a(0), b(1)}, 0.5547},
                                             {{a(1)}, 0.5884},
                                             {{a(1), b(0)}, -0.5902},
                                             {{a(1), b(1)}, -0.7404}});
  return {std::move(u00), std::move(u01), std::move(v)};
}

double wiring_u00(const Behavior& b) {
  double p = 0.0;
  const int sets[] = {1, 1};
  for (int a = 0; a < b.scenario().outcomes(); ++a) {
    const int outs[] = {a, a};
    p += b.probability(outs, sets);
  }
  return p;
}

std::vector<sdp::Entry> NonnegativityCone::entries(std::size_t row, int block, double scale) const {
  std::vector<sdp::Entry> out;
  for (const auto& [r, c] : rows.at(row).upper_cells) out.push_back({block, r, c, scale});
  return out;
}

NonnegativityCone nbf_constraints(const Scenario& scenario) {
  NonnegativityCone cone;
  cone.structure = &moment_structure(scenario);
  const auto& st = *cone.structure;
  for (int k = 0; k < static_cast<int>(st.classes().size()); ++k) {
    const auto& cls = st.classes()[static_cast<std::size_t>(k)];
    NonnegativityCone::ClassRow row;
    row.target = k == st.unit_class()     ? NonnegativityCone::Target::Unit
                 : cls.basis_index >= 0 ? NonnegativityCone::Target::Basis
                                        : NonnegativityCone::Target::Vanishing;
    row.basis_index = std::max(cls.basis_index, 0);
    for (const auto& [r, c] : cls.cells)
      if (r <= c) row.upper_cells.emplace_back(r, c);
    cone.rows.push_back(std::move(row));
  }
  return cone;
}

ConeMembership aq_nonnegative(const BellFunctional& f, double tol, const sdp::SolverConfig& cfg) {
  const NonnegativityCone cone = nbf_constraints(f.scenario());
  sdp::SdpProblem p;
  p.blocks = {{cone.dim()}};
  p.objective = {{0, 0, 0, 1.0}};
  for (std::size_t r = 0; r < cone.rows.size(); ++r) {
    const auto& row = cone.rows[r];
    if (row.target == NonnegativityCone::Target::Unit) continue;
    const double rhs = row.target == NonnegativityCone::Target::Vanishing
                           ? 0.0
                           : f[static_cast<std::size_t>(row.basis_index)];
    p.constraints.push_back({cone.entries(r, 0), rhs});
  }
  const auto sol = sdp::solve(p, cfg);
  ConeMembership out;
  out.status = sol.status;
  if (sol.status != sdp::Status::Optimal) return out;
  out.gram = sol.x.front();
  out.margin = f[0] - out.gram(0, 0);
  out.member = out.margin >= -tol;
  return out;
}

std::vector<double> certified_coefficients(const NonnegativityCone& cone, const Eigen::MatrixXd& gram) {
  std::vector<double> out(static_cast<std::size_t>(cone.dim()), 0.0);
  for (const auto& row : cone.rows) {
    if (row.target == NonnegativityCone::Target::Vanishing) continue;
    double s = 0.0;
    for (const auto& [r, c] : row.upper_cells) s += r == c ? gram(r, c) : gram(r, c) + gram(c, r);
    out[static_cast<std::size_t>(row.basis_index)] = s;
  }
  return out;
}

}  // namespace aqnbf
