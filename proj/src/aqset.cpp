#include "aqnbf/aqset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "aqnbf/errors.hpp"

namespace aqnbf {

MomentStructure::MomentStructure(const Scenario& scenario)
    : scenario_(scenario), basis_(basis_monomials(scenario)) {
  const int n = size();
  auto wc = word_classes(scenario);
  zero_cells_ = std::move(wc.zero_cells);
  std::map<CanonicalWord, int> basis_word;
  for (int g = 0; g < n; ++g) basis_word.emplace(canonicalize(Monomial{}, basis_[g]), g);

  cell_class_.assign(static_cast<std::size_t>(n * n), -1);
  for (auto& [word, cells] : wc.classes) {
    const int k = static_cast<int>(classes_.size());
    const auto it = basis_word.find(word);
    for (const auto& [r, c] : cells) cell_class_[static_cast<std::size_t>(r * n + c)] = k;
    classes_.push_back({word, std::move(cells), it == basis_word.end() ? -1 : it->second});
  }
  unit_class_ = cell_class(0, 0);
  variable_of_class_.assign(classes_.size(), -1);
  for (int k = 0; k < static_cast<int>(classes_.size()); ++k) {
    if (k == unit_class_) continue;
    variable_of_class_[static_cast<std::size_t>(k)] = static_cast<int>(class_of_variable_.size());
    class_of_variable_.push_back(k);
  }
}

Eigen::MatrixXd MomentStructure::assemble(const Eigen::VectorXd& variables) const {
  if (variables.size() != variable_count()) throw InvalidArgument("moment variable count mismatch");
  const int n = size();
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < static_cast<int>(classes_.size()); ++k) {
    const int v = variable_of_class_[static_cast<std::size_t>(k)];
    const double value = v < 0 ? 1.0 : variables(v);
    for (const auto& [r, c] : classes_[static_cast<std::size_t>(k)].cells) gamma(r, c) = value;
  }
  return gamma;
}

double MomentStructure::constraint_residual(const Eigen::MatrixXd& gamma) const {
  if (gamma.rows() != size() || gamma.cols() != size()) throw InvalidArgument("moment matrix has wrong shape");
  double worst = std::abs(gamma(0, 0) - 1.0);
  for (const auto& cls : classes_) {
    const auto [r0, c0] = cls.cells.front();
    for (const auto& [r, c] : cls.cells) worst = std::max(worst, std::abs(gamma(r, c) - gamma(r0, c0)));
  }
  for (const auto& [r, c] : zero_cells_) worst = std::max(worst, std::abs(gamma(r, c)));
  return worst;
}

std::size_t MomentStructure::equality_count() const {
  std::size_t count = 0;
  for (const auto& cls : classes_) {
    std::size_t upper = 0;
    for (const auto& [r, c] : cls.cells) upper += r <= c ? 1 : 0;
    count += upper - 1;
  }
  for (const auto& [r, c] : zero_cells_) count += r <= c ? 1 : 0;
  return count;
}

MomentStructure build_moment_structure(const Scenario& scenario) {
  if (scenario.parties() > 3) {
    std::ostringstream os;
    os << "moment structures support at most 3 parties, got " << scenario.parties();
    throw SizeGuardError(os.str());
  }
  return MomentStructure(scenario);
}

const MomentStructure& moment_structure(const Scenario& scenario) {
  static std::mutex mutex;
  static std::map<std::pair<std::vector<int>, int>, std::unique_ptr<MomentStructure>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{scenario.settings(), scenario.outcomes()}];
  if (!slot) slot = std::make_unique<MomentStructure>(build_moment_structure(scenario));
  return *slot;
}

sdp::SdpProblem compile_extremize(const MomentStructure& st, const BellFunctional& f, Sense sense) {
  if (!(f.scenario() == st.scenario())) throw ScenarioMismatch("functional and moment structure scenarios differ");
  std::vector<double> weight(st.classes().size(), 0.0);
  for (int g = 1; g < st.size(); ++g) weight[static_cast<std::size_t>(st.basis_class(g))] += f[static_cast<std::size_t>(g)];

  sdp::SdpProblem p;
  p.blocks = {{st.size()}};
  p.objective = {{0, 0, 0, 1.0}};
  const double sign = sense == Sense::Min ? -1.0 : 1.0;
  p.constraints.reserve(static_cast<std::size_t>(st.variable_count()));
  for (int v = 0; v < st.variable_count(); ++v) {
    const int k = st.class_of_variable(v);
    sdp::Constraint con;
    for (const auto& [r, c] : st.classes()[static_cast<std::size_t>(k)].cells)
      if (r <= c) con.entries.push_back({0, r, c, -1.0});
    con.rhs = sign * weight[static_cast<std::size_t>(k)];
    p.constraints.push_back(std::move(con));
  }
  return p;
}

Extremum aq_extremize(const MomentStructure& st, const BellFunctional& f, Sense sense,
                      const sdp::SolverConfig& cfg) {
  sdp::SdpProblem problem = compile_extremize(st, f, sense);
  sdp::SdpSolution sol = sdp::solve(problem, cfg);
  if (sol.status != sdp::Status::Optimal) {
    std::ostringstream os;
    os << "almost-quantum " << (sense == Sense::Min ? "minimization" : "maximization")
       << " ended with status " << sdp::to_string(sol.status) << " (" << sol.message << ")";
    throw SolverFailure(os.str(), sol.status);
  }
  Eigen::MatrixXd gamma = st.assemble(sol.y);
  std::vector<double> moments(static_cast<std::size_t>(st.size()));
  for (int g = 0; g < st.size(); ++g) moments[static_cast<std::size_t>(g)] = gamma(0, g);
  double value = 0.0;
  for (int g = 0; g < st.size(); ++g) value += f[static_cast<std::size_t>(g)] * moments[static_cast<std::size_t>(g)];

  DualCertificate cert;
  cert.sense = sense;
  cert.gram = sol.x.front();
  cert.bound = sense == Sense::Min ? f[0] - cert.gram(0, 0) : f[0] + cert.gram(0, 0);

  Behavior b = from_collins_gisin(CGVector(st.scenario(), std::move(moments)), extraction_tolerances());
  const double bound = cert.bound;
  return Extremum{sense,           value,          bound, std::move(gamma), std::move(b), std::move(cert),
                  std::move(problem), std::move(sol)};
}

Extremum aq_extremize(const BellFunctional& f, Sense sense, const sdp::SolverConfig& cfg) {
  return aq_extremize(moment_structure(f.scenario()), f, sense, cfg);
}

Eigen::MatrixXd strictly_feasible_point(const MomentStructure& st) {
  const int n = st.size();
  const double d = st.scenario().outcomes();
  Eigen::MatrixXd gamma(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      double value = 1.0;
      for (int k = 0; k < st.scenario().parties(); ++k) {
        const Letter* u = nullptr;
        const Letter* v = nullptr;
        for (const auto& l : st.basis()[static_cast<std::size_t>(r)]) if (l.party == k) u = &l;
        for (const auto& l : st.basis()[static_cast<std::size_t>(c)]) if (l.party == k) v = &l;
        // Normalized trace of the party-k factor.
        if (u && v) {
          if (u->setting == v->setting)
            value *= u->outcome == v->outcome ? 1.0 / d : 0.0;
          else
            value *= 1.0 / (d * d);
        } else if (u || v) {
          value *= 1.0 / d;
        }
      }
      gamma(r, c) = value;
    }
  }
  return gamma;
}

}  // namespace aqnbf
