#include "aqnbf/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "aqnbf/errors.hpp"

namespace aqnbf {

namespace {

struct Event {
  std::vector<int> outcomes;
  std::vector<int> settings;
};

Event decode(const Scenario& s, std::size_t index) {
  Event e{std::vector<int>(static_cast<std::size_t>(s.parties())),
          std::vector<int>(static_cast<std::size_t>(s.parties()))};
  s.decode_event(index, e.outcomes, e.settings);
  return e;
}

std::string describe_event(const Scenario& s, std::size_t index) {
  const Event e = decode(s, index);
  std::ostringstream os;
  os << "p(";
  for (int a : e.outcomes) os << a;
  os << "|";
  for (int x : e.settings) os << x;
  os << ")";
  return os.str();
}

// Marginal of `table` on the parties in `mask`; parties outside the mask are
// summed over their outcomes at the setting given in `settings`.
double marginal(const Scenario& s, std::span<const double> table, unsigned mask,
                std::span<const int> outcomes, std::span<const int> settings) {
  const int n = s.parties();
  std::vector<int> a(outcomes.begin(), outcomes.end());
  std::vector<int> free;
  for (int k = 0; k < n; ++k)
    if (!(mask & (1u << k))) free.push_back(k);
  double total = 0.0;
  std::size_t combos = 1;
  for (std::size_t f = 0; f < free.size(); ++f) combos *= static_cast<std::size_t>(s.outcomes());
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t r = c;
    for (int k : free) {
      a[k] = static_cast<int>(r % static_cast<std::size_t>(s.outcomes()));
      r /= static_cast<std::size_t>(s.outcomes());
    }
    total += table[s.event_index(a, settings)];
  }
  return total;
}

}  // namespace

double Behavior::probability(std::span<const int> outcomes, std::span<const int> settings) const {
  return table_[scenario_.event_index(outcomes, settings)];
}

BehaviorResiduals behavior_residuals(const Scenario& s, std::span<const double> table) {
  if (table.size() != s.joint_events())
    throw InvalidArgument("behavior table has wrong size");
  BehaviorResiduals r;
  const std::size_t na = s.outcome_tuples();
  for (std::size_t x = 0; x < s.setting_tuples(); ++x) {
    double sum = 0.0;
    for (std::size_t a = 0; a < na; ++a) sum += table[x * na + a];
    r.normalization = std::max(r.normalization, std::abs(sum - 1.0));
  }
  for (double p : table) r.negativity = std::max(r.negativity, -p);

  // Dropping one party at a time suffices: every smaller marginal is a
  // marginal of one of these.
  const int n = s.parties();
  std::vector<int> a(static_cast<std::size_t>(n));
  std::vector<int> x(static_cast<std::size_t>(n));
  for (int drop = 0; drop < n && n > 1; ++drop) {
    const unsigned mask = ((1u << n) - 1u) & ~(1u << drop);
    for (std::size_t e = 0; e < s.joint_events(); ++e) {
      s.decode_event(e, a, x);
      if (x[drop] != 0 || a[drop] != 0) continue;
      const double ref = marginal(s, table, mask, a, x);
      for (int y = 1; y < s.settings(drop); ++y) {
        x[drop] = y;
        r.signalling = std::max(r.signalling, std::abs(marginal(s, table, mask, a, x) - ref));
      }
      x[drop] = 0;
    }
  }
  return r;
}

Behavior behavior_from_table(Scenario s, std::vector<double> table, const ToleranceConfig& tol) {
  if (table.size() != s.joint_events()) {
    std::ostringstream os;
    os << "behavior table has " << table.size() << " entries, scenario " << s.to_string()
       << " needs " << s.joint_events();
    throw InvalidArgument(os.str());
  }
  for (double p : table)
    if (!std::isfinite(p)) throw InvalidArgument("behavior table holds a non-finite entry");

  const std::size_t na = s.outcome_tuples();
  double worst = 0.0;
  std::size_t worst_at = 0;
  for (std::size_t x = 0; x < s.setting_tuples(); ++x) {
    double sum = 0.0;
    for (std::size_t a = 0; a < na; ++a) sum += table[x * na + a];
    if (std::abs(sum - 1.0) > worst) {
      worst = std::abs(sum - 1.0);
      worst_at = x * na;
    }
  }
  if (worst > tol.normalization) {
    std::ostringstream os;
    os << "normalization violated at setting block of " << describe_event(s, worst_at)
       << ", residual " << worst;
    throw NormalizationError(os.str(), worst_at, worst);
  }

  worst = 0.0;
  for (std::size_t e = 0; e < table.size(); ++e) {
    if (-table[e] > worst) {
      worst = -table[e];
      worst_at = e;
    }
  }
  if (worst > tol.negativity) {
    std::ostringstream os;
    os << "negative probability " << describe_event(s, worst_at) << " = " << table[worst_at];
    throw NegativityError(os.str(), worst_at, worst);
  }

  const int n = s.parties();
  std::vector<int> a(static_cast<std::size_t>(n));
  std::vector<int> x(static_cast<std::size_t>(n));
  worst = 0.0;
  for (int drop = 0; drop < n && n > 1; ++drop) {
    const unsigned mask = ((1u << n) - 1u) & ~(1u << drop);
    for (std::size_t e = 0; e < s.joint_events(); ++e) {
      s.decode_event(e, a, x);
      if (x[drop] != 0 || a[drop] != 0) continue;
      const double ref = marginal(s, table, mask, a, x);
      for (int y = 1; y < s.settings(drop); ++y) {
        x[drop] = y;
        const double d = std::abs(marginal(s, table, mask, a, x) - ref);
        if (d > worst) {
          worst = d;
          worst_at = s.event_index(a, x);
        }
      }
      x[drop] = 0;
    }
  }
  if (worst > tol.signalling) {
    std::ostringstream os;
    os << "no-signalling violated near " << describe_event(s, worst_at) << ", residual " << worst;
    throw SignallingError(os.str(), worst_at, worst);
  }
  return Behavior(std::move(s), std::move(table));
}

CGVector::CGVector(Scenario scenario, std::vector<double> entries)
    : scenario_(std::move(scenario)), entries_(std::move(entries)) {
  if (entries_.size() != basis_size(scenario_))
    throw InvalidArgument("Collins-Gisin vector has wrong size");
}

CGVector to_collins_gisin(const Behavior& b) {
  const Scenario& s = b.scenario();
  const auto basis = basis_monomials(s);
  std::vector<double> out;
  out.reserve(basis.size());
  const int n = s.parties();
  for (const auto& m : basis) {
    unsigned mask = 0;
    std::vector<int> a(static_cast<std::size_t>(n), 0);
    std::vector<int> x(static_cast<std::size_t>(n), 0);
    for (const auto& l : m) {
      mask |= 1u << l.party;
      a[l.party] = l.outcome;
      x[l.party] = l.setting;
    }
    out.push_back(marginal(s, b.table(), mask, a, x));
  }
  return CGVector(s, std::move(out));
}

std::vector<std::pair<int, double>> expand_event(const Scenario& s, std::span<const int> outcomes,
                                                 std::span<const int> settings) {
  // Each party contributes either its letter, or (1 - sum of its letters)
  // for the dropped outcome d-1.
  std::vector<std::pair<Monomial, double>> terms{{Monomial{}, 1.0}};
  for (int k = 0; k < s.parties(); ++k) {
    std::vector<std::pair<Letter, double>> factor;  // letter with outcome -1 means identity
    if (outcomes[k] < s.outcomes() - 1) {
      factor.push_back({Letter{k, settings[k], outcomes[k]}, 1.0});
    } else {
      factor.push_back({Letter{k, settings[k], -1}, 1.0});
      for (int a = 0; a + 1 < s.outcomes(); ++a) factor.push_back({Letter{k, settings[k], a}, -1.0});
    }
    std::vector<std::pair<Monomial, double>> next;
    next.reserve(terms.size() * factor.size());
    for (const auto& [m, c] : terms) {
      for (const auto& [l, f] : factor) {
        Monomial e = m;
        if (l.outcome >= 0) e.push_back(l);
        next.emplace_back(std::move(e), c * f);
      }
    }
    terms = std::move(next);
  }
  std::vector<std::pair<int, double>> out;
  out.reserve(terms.size());
  for (const auto& [m, c] : terms) out.emplace_back(basis_index(s, m), c);
  return out;
}

Behavior from_collins_gisin(const CGVector& v, const ToleranceConfig& tol) {
  const Scenario& s = v.scenario();
  std::vector<double> table(s.joint_events());
  std::vector<int> a(static_cast<std::size_t>(s.parties()));
  std::vector<int> x(static_cast<std::size_t>(s.parties()));
  for (std::size_t e = 0; e < table.size(); ++e) {
    s.decode_event(e, a, x);
    double p = 0.0;
    for (const auto& [idx, sign] : expand_event(s, a, x)) p += sign * v[static_cast<std::size_t>(idx)];
    table[e] = p;
  }
  return behavior_from_table(s, std::move(table), tol);
}

std::size_t deterministic_vertex_count(const Scenario& s) {
  double count = 1.0;
  for (int m : s.settings()) count *= std::pow(static_cast<double>(s.outcomes()), m);
  return count > 1e18 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(count);
}

std::vector<Behavior> enumerate_deterministic(const Scenario& s, std::size_t guard) {
  const std::size_t count = deterministic_vertex_count(s);
  if (count > guard) {
    std::ostringstream os;
    os << "scenario " << s.to_string() << " has " << count << " deterministic vertices, guard is "
       << guard;
    throw SizeGuardError(os.str());
  }
  // Response digits: one outcome per (party, setting), party-major.
  std::vector<int> offset(static_cast<std::size_t>(s.parties()) + 1, 0);
  for (int k = 0; k < s.parties(); ++k) offset[k + 1] = offset[k] + s.settings(k);
  const int digits = offset.back();

  std::vector<Behavior> out;
  out.reserve(count);
  std::vector<int> response(static_cast<std::size_t>(digits), 0);
  std::vector<int> a(static_cast<std::size_t>(s.parties()));
  std::vector<int> x(static_cast<std::size_t>(s.parties()));
  for (std::size_t v = 0; v < count; ++v) {
    std::size_t r = v;
    for (int i = digits - 1; i >= 0; --i) {
      response[i] = static_cast<int>(r % static_cast<std::size_t>(s.outcomes()));
      r /= static_cast<std::size_t>(s.outcomes());
    }
    std::vector<double> table(s.joint_events(), 0.0);
    for (std::size_t e = 0; e < table.size(); ++e) {
      s.decode_event(e, a, x);
      bool hit = true;
      for (int k = 0; k < s.parties() && hit; ++k) hit = response[offset[k] + x[k]] == a[k];
      if (hit) table[e] = 1.0;
    }
    out.push_back(behavior_from_table(s, std::move(table)));
  }
  return out;
}

BellFunctional::BellFunctional(Scenario scenario, std::vector<double> coeffs)
    : scenario_(std::move(scenario)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != basis_size(scenario_))
    throw InvalidArgument("functional coefficient vector has wrong size");
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw InvalidArgument("functional holds a non-finite coefficient");
}

BellFunctional BellFunctional::constant(const Scenario& s, double value) {
  std::vector<double> c(basis_size(s), 0.0);
  c[0] = value;
  return BellFunctional(s, std::move(c));
}

BellFunctional BellFunctional::from_terms(const Scenario& s,
                                          const std::vector<std::pair<Monomial, double>>& terms) {
  std::vector<double> c(basis_size(s), 0.0);
  for (const auto& [m, v] : terms) {
    const int i = basis_index(s, m);
    if (i < 0) throw InvalidArgument("not a basis monomial: " + to_string(m));
    c[static_cast<std::size_t>(i)] += v;
  }
  return BellFunctional(s, std::move(c));
}

double BellFunctional::coefficient(const Monomial& m) const {
  const int i = basis_index(scenario_, m);
  if (i < 0) throw InvalidArgument("not a basis monomial: " + to_string(m));
  return coeffs_[static_cast<std::size_t>(i)];
}

BellFunctional BellFunctional::operator+(const BellFunctional& o) const {
  if (!(scenario_ == o.scenario_)) throw ScenarioMismatch("adding functionals of different scenarios");
  std::vector<double> c = coeffs_;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.coeffs_[i];
  return BellFunctional(scenario_, std::move(c));
}

BellFunctional BellFunctional::operator-(const BellFunctional& o) const { return *this + o * -1.0; }

BellFunctional BellFunctional::operator*(double s) const {
  std::vector<double> c = coeffs_;
  for (double& v : c) v *= s;
  return BellFunctional(scenario_, std::move(c));
}

int basis_index(const Scenario& s, const Monomial& m) {
  // Basis order is (letter count, lexicographic); rank within the grade is
  // computed directly so lookups need no table.
  Monomial sorted = m;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const Letter& l = sorted[i];
    if (l.party < 0 || l.party >= s.parties() || l.setting < 0 || l.setting >= s.settings(l.party) ||
        l.outcome < 0 || l.outcome >= s.outcomes() - 1)
      return -1;
    if (i > 0 && sorted[i - 1].party == l.party) return -1;
  }
  static thread_local std::map<std::pair<std::vector<int>, int>, std::map<Monomial, int>> cache;
  auto& index = cache[{s.settings(), s.outcomes()}];
  if (index.empty()) {
    const auto basis = basis_monomials(s);
    for (std::size_t i = 0; i < basis.size(); ++i) index.emplace(basis[i], static_cast<int>(i));
  }
  const auto it = index.find(sorted);
  return it == index.end() ? -1 : it->second;
}

BellFunctional functional_from_full_table(const Scenario& s, std::span<const double> table) {
  if (table.size() != s.joint_events()) throw InvalidArgument("full table has wrong size");
  std::vector<double> c(basis_size(s), 0.0);
  std::vector<int> a(static_cast<std::size_t>(s.parties()));
  std::vector<int> x(static_cast<std::size_t>(s.parties()));
  for (std::size_t e = 0; e < table.size(); ++e) {
    if (table[e] == 0.0) continue;
    s.decode_event(e, a, x);
    for (const auto& [idx, sign] : expand_event(s, a, x)) c[static_cast<std::size_t>(idx)] += sign * table[e];
  }
  return BellFunctional(s, std::move(c));
}

std::vector<double> full_table(const BellFunctional& f) {
  const Scenario& s = f.scenario();
  const auto basis = basis_monomials(s);
  std::vector<double> table(s.joint_events(), 0.0);
  std::vector<int> a(static_cast<std::size_t>(s.parties()));
  std::vector<int> x(static_cast<std::size_t>(s.parties()));
  for (std::size_t e = 0; e < table.size(); ++e) {
    s.decode_event(e, a, x);
    double w = 0.0;
    for (std::size_t g = 0; g < basis.size(); ++g) {
      const double c = f[g];
      if (c == 0.0) continue;
      // The marginal p_S(a_S|x_S) equals the sum over the omitted parties'
      // outcomes, averaged over their settings.
      bool hit = true;
      unsigned mask = 0;
      for (const auto& l : basis[g]) {
        mask |= 1u << l.party;
        hit = hit && a[l.party] == l.outcome && x[l.party] == l.setting;
      }
      if (!hit) continue;
      double weight = 1.0;
      for (int k = 0; k < s.parties(); ++k)
        if (!(mask & (1u << k))) weight /= s.settings(k);
      w += c * weight;
    }
    table[e] = w;
  }
  return table;
}

double evaluate(const BellFunctional& f, const CGVector& v) {
  if (!(f.scenario() == v.scenario())) throw ScenarioMismatch("functional and behavior scenarios differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) acc += f[i] * v[i];
  return acc;
}

double evaluate(const BellFunctional& f, const Behavior& b) {
  if (!(f.scenario() == b.scenario())) throw ScenarioMismatch("functional and behavior scenarios differ");
  return evaluate(f, to_collins_gisin(b));
}

Behavior random_no_signalling(const Scenario& s, std::mt19937_64& rng) {
  const int n = s.parties();
  const int d = s.outcomes();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int components = 4;
  std::vector<double> weights(components);
  double total = 0.0;
  for (double& w : weights) total += (w = -std::log(1.0 - unit(rng)));  // flat Dirichlet

  std::vector<double> table(s.joint_events(), 0.0);
  std::vector<int> a(static_cast<std::size_t>(n));
  std::vector<int> x(static_cast<std::size_t>(n));
  for (int c = 0; c < components; ++c) {
    const double w = weights[c] / total;
    if (c % 2 == 0) {
      // Deterministic vertex: one outcome per (party, setting).
      std::vector<std::vector<int>> response(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k)
        for (int y = 0; y < s.settings(k); ++y)
          response[k].push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(d)));
      for (std::size_t e = 0; e < table.size(); ++e) {
        s.decode_event(e, a, x);
        bool hit = true;
        for (int k = 0; k < n && hit; ++k) hit = response[k][x[k]] == a[k];
        if (hit) table[e] += w;
      }
    } else {
      // Generalized PR box: every proper sub-marginal is uniform.
      std::vector<int> target(s.setting_tuples());
      for (int& t : target) t = static_cast<int>(rng() % static_cast<std::uint64_t>(d));
      const double mass = w / std::pow(static_cast<double>(d), n - 1);
      for (std::size_t e = 0; e < table.size(); ++e) {
        s.decode_event(e, a, x);
        int sum = 0;
        for (int k = 0; k < n; ++k) sum += a[k];
        if (sum % d == target[e / s.outcome_tuples()]) table[e] += mass;
      }
    }
  }
  return behavior_from_table(s, std::move(table));
}

}  // namespace aqnbf
