#include "aqnbf/seesaw.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

#include "aqnbf/errors.hpp"

namespace aqnbf {

namespace {

// A V letter split into the family letter (on the family slot) and the third
// party's letter, renamed to party 2.
struct SplitTerm {
  double coeff;
  const Letter* family;
  Monomial third;
};

std::vector<SplitTerm> split_v(const SeesawState& st, const std::vector<Monomial>& vbasis) {
  std::vector<SplitTerm> out;
  for (std::size_t g = 0; g < vbasis.size(); ++g) {
    SplitTerm t{st.v[g], nullptr, {}};
    for (const auto& l : vbasis[g]) {
      if (l.party == st.map.family_slot)
        t.family = &l;
      else
        t.third.push_back({2, l.setting, l.outcome});
    }
    out.push_back(std::move(t));
  }
  return out;
}

double moment(const CGVector& p, const Monomial& ab, const Monomial& third) {
  Monomial m = ab;
  m.insert(m.end(), third.begin(), third.end());
  return p[static_cast<std::size_t>(basis_index(p.scenario(), m))];
}

// Value of the substituted V monomial: U_{0|xi} (or 1) times the third
// party's letter, on p.
double substituted(const CGVector& p, const SplitTerm& t, const std::vector<BellFunctional>& u,
                   const std::vector<Monomial>& ubasis) {
  if (!t.family) return moment(p, {}, t.third);
  const auto& f = u.at(static_cast<std::size_t>(t.family->setting));
  double s = 0.0;
  for (std::size_t h = 0; h < ubasis.size(); ++h)
    if (f[h] != 0.0) s += f[h] * moment(p, ubasis[h], t.third);
  return s;
}

// Objective coefficients and Gram-pair constraints for a block of
// `pairs` functionals, each coupled with its complement.
sdp::SdpProblem pair_problem(const NonnegativityCone& cone, const std::vector<std::vector<double>>& grad) {
  sdp::SdpProblem p;
  const int pairs = static_cast<int>(grad.size());
  for (int i = 0; i < 2 * pairs; ++i) p.blocks.push_back({cone.dim()});
  for (int i = 0; i < pairs; ++i) {
    const int f = 2 * i, g = 2 * i + 1;
    for (std::size_t r = 0; r < cone.rows.size(); ++r) {
      const auto& row = cone.rows[r];
      if (row.target == NonnegativityCone::Target::Vanishing) {
        p.constraints.push_back({cone.entries(r, f), 0.0});
        p.constraints.push_back({cone.entries(r, g), 0.0});
        continue;
      }
      const double c = grad[static_cast<std::size_t>(i)][static_cast<std::size_t>(row.basis_index)];
      if (c != 0.0) {
        const auto e = cone.entries(r, f, c);
        p.objective.insert(p.objective.end(), e.begin(), e.end());
      }
      auto both = cone.entries(r, f);
      const auto eg = cone.entries(r, g);
      both.insert(both.end(), eg.begin(), eg.end());
      p.constraints.push_back({std::move(both), row.target == NonnegativityCone::Target::Unit ? 1.0 : 0.0});
    }
  }
  return p;
}

std::vector<BellFunctional> read_pairs(const NonnegativityCone& cone, const sdp::SdpSolution& sol, int pairs,
                                       const Scenario& s) {
  std::vector<BellFunctional> out;
  for (int i = 0; i < pairs; ++i) out.emplace_back(s, certified_coefficients(cone, sol.x[static_cast<std::size_t>(2 * i)]));
  return out;
}

sdp::SdpSolution solve_or_throw(const sdp::SdpProblem& p, const sdp::SolverConfig& cfg, const char* what) {
  auto sol = sdp::solve(p, cfg);
  if (sol.status != sdp::Status::Optimal) {
    std::ostringstream os;
    os << what << " step ended with status " << sdp::to_string(sol.status) << " (" << sol.message << ")";
    throw SolverFailure(os.str(), sol.status);
  }
  return sol;
}

void require_two_outcome(const SeesawState& st) {
  if (st.v.scenario().outcomes() != 2) throw InvalidArgument("the see-saw supports two-outcome scenarios only");
  if (static_cast<int>(st.u.size()) != st.v.scenario().settings(st.map.family_slot))
    throw InvalidArgument("family size does not match V's family slot");
}

// Random classical wiring: a distribution over setting pairs and, per pair,
// a random 0/1 response to the outcome pair.
BellFunctional random_wiring(const Scenario& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> q(s.setting_tuples());
  double total = 0.0;
  for (auto& x : q) total += (x = -std::log(1.0 - u01(rng)));
  std::vector<double> t(s.joint_events());
  const std::size_t per = s.outcome_tuples();
  for (std::size_t x = 0; x < q.size(); ++x)
    for (std::size_t a = 0; a < per; ++a) t[x * per + a] = coin(rng) ? q[x] / total : 0.0;
  return functional_from_full_table(s, t);
}

}  // namespace

void SeesawConfig::validate() const {
  if (restarts < 0) throw InvalidArgument("restarts must be non-negative");
  if (max_sweeps < 1 || window < 1) throw InvalidArgument("sweep counts must be positive");
  if (!(threshold > 0.0)) throw InvalidArgument("improvement threshold must be positive");
  if (noise < 0.0) throw InvalidArgument("noise must be non-negative");
}

double figure_of_merit(const CGVector& p, const SeesawState& st) {
  require_two_outcome(st);
  const auto vbasis = basis_monomials(st.v.scenario());
  const auto ubasis = basis_monomials(st.u.front().scenario());
  double w = 0.0;
  for (const auto& t : split_v(st, vbasis))
    if (t.coeff != 0.0) w += t.coeff * substituted(p, t, st.u, ubasis);
  return w;
}

BehaviorStep step_behavior(const SeesawState& st, const sdp::SolverConfig& cfg) {
  const BellFunctional w = st.composed();
  Extremum e = aq_extremize(w, Sense::Min, cfg);
  std::vector<double> m(static_cast<std::size_t>(e.moment_matrix.rows()));
  for (std::size_t g = 0; g < m.size(); ++g) m[g] = e.moment_matrix(0, static_cast<Eigen::Index>(g));
  return {std::move(e.behavior), CGVector(w.scenario(), std::move(m)), e.value, e.gap()};
}

FunctionalStep step_functionals(const CGVector& p, const SeesawState& st, Block block, const sdp::SolverConfig& cfg) {
  require_two_outcome(st);
  const double incoming = figure_of_merit(p, st);
  const auto vbasis = basis_monomials(st.v.scenario());
  const auto ubasis = basis_monomials(st.u.front().scenario());
  const auto terms = split_v(st, vbasis);
  SeesawState next = st;

  if (block == Block::U) {
    // W = const + sum_xi <grad_xi, u_xi>.
    std::vector<std::vector<double>> grad(st.u.size(), std::vector<double>(ubasis.size(), 0.0));
    for (const auto& t : terms) {
      if (!t.family || t.coeff == 0.0) continue;
      auto& g = grad[static_cast<std::size_t>(t.family->setting)];
      for (std::size_t h = 0; h < ubasis.size(); ++h) g[h] += t.coeff * moment(p, ubasis[h], t.third);
    }
    const NonnegativityCone cone = nbf_constraints(st.u.front().scenario());
    const auto sol = solve_or_throw(pair_problem(cone, grad), cfg, "U");
    next.u = read_pairs(cone, sol, static_cast<int>(st.u.size()), st.u.front().scenario());
  } else {
    std::vector<std::vector<double>> grad(1, std::vector<double>(vbasis.size(), 0.0));
    for (std::size_t g = 0; g < terms.size(); ++g) grad[0][g] = substituted(p, terms[g], st.u, ubasis);
    const NonnegativityCone cone = nbf_constraints(st.v.scenario());
    const auto sol = solve_or_throw(pair_problem(cone, grad), cfg, "V");
    next.v = read_pairs(cone, sol, 1, st.v.scenario()).front();
  }
  const double value = figure_of_merit(p, next);
  if (value <= incoming) return {std::move(next), value, true};
  return {st, incoming, false};
}

BellFunctional extreme_nbf(const Scenario& s, const std::vector<double>& direction, const sdp::SolverConfig& cfg) {
  if (direction.size() != basis_size(s)) throw InvalidArgument("direction has the wrong length");
  const NonnegativityCone cone = nbf_constraints(s);
  const auto sol = solve_or_throw(pair_problem(cone, {direction}), cfg, "extreme NBF");
  return read_pairs(cone, sol, 1, s).front();
}

double RestartTrace::best() const {
  return sweep_values.empty() ? INFINITY : *std::min_element(sweep_values.begin(), sweep_values.end());
}

BellFunctional shrink_to_nbf(const BellFunctional& f, const sdp::SolverConfig& cfg) {
  const auto& st = moment_structure(f.scenario());
  const double lo = aq_extremize(st, f, Sense::Min, cfg).value;
  const double hi = aq_extremize(st, f, Sense::Max, cfg).value;
  double s = 1.0;
  if (lo < 0.0) s = std::min(s, 0.5 / (0.5 - lo));
  if (hi > 1.0) s = std::min(s, 0.5 / (hi - 0.5));
  if (s == 1.0) return f;
  const auto half = BellFunctional::constant(f.scenario(), 0.5);
  return half + s * (f - half);
}

BellFunctional random_nbf(const Scenario& s, double noise, std::mt19937_64& rng, const sdp::SolverConfig& cfg) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(-noise, noise);
  // Mixture of three wirings with random weights.
  BellFunctional f = BellFunctional::constant(s, 0.0);
  double total = 0.0;
  std::vector<double> w(3);
  for (auto& x : w) total += (x = -std::log(1.0 - u01(rng)));
  for (double x : w) f = f + (x / total) * random_wiring(s, rng);
  std::vector<double> c(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t g = 1; g < c.size(); ++g) c[g] += jitter(rng);
  return shrink_to_nbf(BellFunctional(s, std::move(c)), cfg);
}

SeesawState initial_state(const SeesawConfig& cfg, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  const auto paper = paper_functionals();
  const auto s232 = make_scenario(2, 3, 2);
  if (cfg.init == InitStrategy::Paper) {
    SeesawState st{{}, shrink_to_nbf(paper.v, cfg.solver)};
    if (index == 0 && cfg.paper_u_first) {
      st.u = {shrink_to_nbf(paper.u00, cfg.solver), shrink_to_nbf(paper.u01, cfg.solver)};
    } else {
      for (int xi = 0; xi < 2; ++xi) st.u.push_back(random_nbf(s232, cfg.noise, rng, cfg.solver));
    }
    return st;
  }
  std::vector<BellFunctional> u;
  for (int xi = 0; xi < 2; ++xi) u.push_back(random_nbf(s232, cfg.noise, rng, cfg.solver));
  return {std::move(u), random_nbf(make_scenario(2, 2, 2), cfg.noise, rng, cfg.solver)};
}

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("AQ_NR_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct RestartResult {
  RestartTrace trace;
  std::optional<Behavior> best_behavior;
  std::optional<SeesawState> best_state;
};

RestartResult run_restart(const SeesawConfig& cfg, int index) {
  RestartResult out;
  out.trace.index = index;
  double best = INFINITY;
  try {
    SeesawState st = initial_state(cfg, index);
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
      BehaviorStep b = step_behavior(st, cfg.solver);
      out.trace.step_values.push_back(b.value);
      FunctionalStep fu = step_functionals(b.moments, st, Block::U, cfg.solver);
      out.trace.step_values.push_back(fu.value);
      FunctionalStep fv = step_functionals(b.moments, fu.state, Block::V, cfg.solver);
      out.trace.step_values.push_back(fv.value);
      st = std::move(fv.state);
      out.trace.sweep_values.push_back(fv.value);
      if (fv.value < best) {
        best = fv.value;
        out.best_behavior = std::move(b.behavior);
        out.best_state = st;
      }
      const auto& v = out.trace.sweep_values;
      const std::size_t k = v.size();
      if (k > static_cast<std::size_t>(cfg.window) &&
          v[k - 1 - static_cast<std::size_t>(cfg.window)] - v[k - 1] < cfg.threshold)
        break;
    }
    out.trace.final_state = std::move(st);
  } catch (const NumericalError& e) {
    out.trace.failed = true;
    out.trace.error = e.what();
  }
  return out;
}

}  // namespace

SeesawTrace run_seesaw(const SeesawConfig& cfg) {
  cfg.validate();
  if (cfg.restarts == 0) throw NoWorkError("see-saw run with zero restarts");
  // Warm the shared structure cache before the workers start.
  moment_structure(make_scenario(3, 3, 2));
  moment_structure(make_scenario(2, 3, 2));
  moment_structure(make_scenario(2, 2, 2));

  std::vector<std::optional<RestartResult>> results(static_cast<std::size_t>(cfg.restarts));
  std::atomic<int> next{0};
  std::atomic<int> first_hit{cfg.restarts};
  std::mutex mutex;
  const auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= cfg.restarts || i > first_hit.load()) return;
      RestartResult r = run_restart(cfg, i);
      const bool hit = !r.trace.failed && r.trace.best() <= cfg.target;
      std::lock_guard lock(mutex);
      if (hit && i < first_hit.load()) first_hit.store(i);
      results[static_cast<std::size_t>(i)] = std::move(r);
    }
  };
  const int workers = std::min(worker_count(cfg.threads), cfg.restarts);
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Keep restarts up to the first hit so the outcome does not depend on
  // scheduling.
  SeesawTrace trace;
  const int keep = std::min(first_hit.load() + 1, cfg.restarts);
  for (int i = 0; i < keep; ++i) {
    auto& r = *results[static_cast<std::size_t>(i)];
    if (r.trace.failed) {
      ++trace.failed_restarts;
    } else if (trace.best_restart < 0 || r.trace.best() < trace.best_value) {
      trace.best_restart = i;
      trace.best_value = r.trace.best();
      trace.best_state = r.best_state;
      trace.best_behavior = r.best_behavior;
    }
    trace.restarts.push_back(std::move(r.trace));
  }
  if (trace.best_restart < 0) {
    std::ostringstream os;
    os << "all " << keep << " see-saw restarts failed";
    if (!trace.restarts.empty()) os << "; first error: " << trace.restarts.front().error;
    throw NumericalError(os.str());
  }
  trace.target_reached = trace.best_value <= cfg.target;
  return trace;
}

}  // namespace aqnbf
