#include "aqnbf/aqnbf.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "aqnbf/errors.hpp"
#include "aqnbf/experiments.hpp"
#include "aqnbf/json_io.hpp"
#include "aqnbf/oracles.hpp"
#include "aqnbf/seesaw.hpp"

struct aq_functional {
  aqnbf::BellFunctional f;
};

namespace {

using nlohmann::json;
using namespace aqnbf;

thread_local std::string last_error;

aq_status fail(aq_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <typename F>
aq_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const ParseError& e) {
    return fail(AQ_PARSE_ERROR, e.what());
  } catch (const SizeGuardError& e) {
    return fail(AQ_SIZE_GUARD, e.what());
  } catch (const NoWorkError& e) {
    return fail(AQ_NO_WORK, e.what());
  } catch (const NumericalError& e) {
    return fail(AQ_NUMERICAL_ERROR, e.what());
  } catch (const Error& e) {
    return fail(AQ_INVALID_ARGUMENT, e.what());
  } catch (const json::exception& e) {
    return fail(AQ_PARSE_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(AQ_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(AQ_INTERNAL_ERROR, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const json& j) {
  if (out) *out = dup_string(j.dump(2));
}

template <typename T>
void require(const T* p, const char* what) {
  if (!p) throw InvalidArgument(std::string(what) + " is null");
}

sdp::SolverConfig solver_config(const aq_solver_options* opts) {
  sdp::SolverConfig cfg;
  if (opts) {
    cfg.gap_tol = opts->gap_tol;
    cfg.feas_tol = opts->feas_tol;
    cfg.max_iters = opts->max_iters;
  }
  if (!(cfg.gap_tol > 0.0) || !(cfg.feas_tol > 0.0) || cfg.max_iters < 1)
    throw InvalidArgument("solver tolerances and iteration cap must be positive");
  return cfg;
}

json solver_json(const sdp::SolverConfig& cfg) {
  return {{"gap_tol", cfg.gap_tol}, {"feas_tol", cfg.feas_tol}, {"max_iters", cfg.max_iters}};
}

json solution_summary(const sdp::SdpSolution& s) {
  return {{"status", sdp::to_string(s.status)},
          {"message", s.message},
          {"iterations", s.iterations},
          {"primal_infeasibility", s.residuals.primal_infeasibility},
          {"dual_infeasibility", s.residuals.dual_infeasibility},
          {"relative_gap", s.residuals.relative_gap}};
}

json extremum_json(const BellFunctional& f, const Extremum& e, const sdp::SolverConfig& cfg) {
  const SosCertificate cert = make_certificate(f, e.certificate);
  const double residual = sos_decomposition(cert, moment_structure(f.scenario())).residual;
  return {{"sense", e.sense == Sense::Min ? "min" : "max"},
          {"value", e.value},
          {"certificate_bound", e.certificate_bound},
          {"gap", e.gap()},
          {"recomposition_residual", residual},
          {"solver", solution_summary(e.solution)},
          {"tolerances", solver_json(cfg)},
          {"behavior", behavior_to_json(e.behavior)},
          {"certificate", certificate_to_json(cert, f.scenario())}};
}

json verdict_json(const BellFunctional& f, const NbfVerdict& v) {
  json out = {{"verdict", to_string(v.verdict)},
              {"aq_min", v.aq_min},
              {"aq_max", v.aq_max},
              {"min_gap", v.min_gap},
              {"max_gap", v.max_gap},
              {"tol", v.tol},
              {"message", v.message}};
  const auto& st = moment_structure(f.scenario());
  if (v.lower) {
    out["lower_certificate"] = certificate_to_json(*v.lower, f.scenario());
    out["lower_recomposition_residual"] = sos_decomposition(*v.lower, st).residual;
  }
  if (v.upper) {
    out["upper_certificate"] = certificate_to_json(*v.upper, f.scenario());
    out["upper_recomposition_residual"] = sos_decomposition(*v.upper, st).residual;
  }
  return out;
}

aq_functional* wrap(BellFunctional f) { return new aq_functional{std::move(f)}; }

}  // namespace

extern "C" {

const char* aq_version(void) { return "0.1.0"; }

const char* aq_status_name(aq_status status) {
  switch (status) {
    case AQ_OK: return "ok";
    case AQ_INVALID_ARGUMENT: return "invalid_argument";
    case AQ_PARSE_ERROR: return "parse_error";
    case AQ_NUMERICAL_ERROR: return "numerical_error";
    case AQ_SIZE_GUARD: return "size_guard";
    case AQ_NO_WORK: return "no_work";
    case AQ_INTERNAL_ERROR: return "internal_error";
  }
  return "unknown";
}

const char* aq_last_error(void) { return last_error.c_str(); }

void aq_string_free(char* s) { delete[] s; }

void aq_solver_options_default(aq_solver_options* opts) {
  if (!opts) return;
  const sdp::SolverConfig cfg;
  opts->gap_tol = cfg.gap_tol;
  opts->feas_tol = cfg.feas_tol;
  opts->max_iters = cfg.max_iters;
}

void aq_seesaw_options_default(aq_seesaw_options* opts) {
  if (!opts) return;
  const SeesawConfig cfg;
  opts->restarts = cfg.restarts;
  opts->max_sweeps = cfg.max_sweeps;
  opts->threshold = cfg.threshold;
  opts->window = cfg.window;
  opts->seed = cfg.seed;
  opts->init = cfg.init == InitStrategy::Paper ? AQ_INIT_PAPER : AQ_INIT_RANDOM;
  opts->target = cfg.target;
  opts->noise = cfg.noise;
  opts->threads = cfg.threads;
  aq_solver_options_default(&opts->solver);
}

aq_status aq_functional_parse(const char* text, aq_functional** out) {
  return guarded([&] {
    require(text, "json");
    require(out, "out");
    *out = wrap(functional_from_json(json::parse(text)));
    return AQ_OK;
  });
}

aq_status aq_functional_load(const char* path, aq_functional** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap(functional_from_json(read_json_file(path)));
    return AQ_OK;
  });
}

aq_status aq_functional_paper(const char* name, aq_functional** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    const std::string n = name;
    const auto paper = paper_functionals();
    if (n == "u00") *out = wrap(paper.u00);
    else if (n == "u01") *out = wrap(paper.u01);
    else if (n == "v") *out = wrap(paper.v);
    else if (n == "w") *out = wrap(paper.composed());
    else if (n == "chsh") *out = wrap(normalized_chsh());
    else throw InvalidArgument("unknown functional " + n);
    return AQ_OK;
  });
}

aq_status aq_functional_to_json(const aq_functional* f, int full_table, char** out) {
  return guarded([&] {
    require(f, "functional");
    require(out, "out");
    emit(out, functional_to_json(f->f, full_table ? TableFormat::Full : TableFormat::CollinsGisin));
    return AQ_OK;
  });
}

aq_status aq_functional_scenario(const aq_functional* f, int* parties, int* settings, int* outcomes) {
  return guarded([&] {
    require(f, "functional");
    const Scenario& s = f->f.scenario();
    if (parties) *parties = s.parties();
    if (settings) {
      int m = 0;
      for (int k = 0; k < s.parties(); ++k) m = std::max(m, s.settings(k));
      *settings = m;
    }
    if (outcomes) *outcomes = s.outcomes();
    return AQ_OK;
  });
}

aq_status aq_functional_scale(const aq_functional* f, double factor, aq_functional** out) {
  return guarded([&] {
    require(f, "functional");
    require(out, "out");
    *out = wrap(factor * f->f);
    return AQ_OK;
  });
}

aq_status aq_functional_evaluate(const aq_functional* f, const char* behavior_json, double* value) {
  return guarded([&] {
    require(f, "functional");
    require(behavior_json, "behavior");
    require(value, "value");
    const Behavior b = behavior_from_json(json::parse(behavior_json));
    *value = evaluate(f->f, b);
    return AQ_OK;
  });
}

void aq_functional_free(aq_functional* f) { delete f; }

aq_status aq_extremize(const aq_functional* f, int maximize, const aq_solver_options* opts, double* value,
                       double* gap, char** report_json) {
  return guarded([&] {
    require(f, "functional");
    const auto cfg = solver_config(opts);
    const Extremum e = aqnbf::aq_extremize(f->f, maximize ? Sense::Max : Sense::Min, cfg);
    if (value) *value = e.value;
    if (gap) *gap = e.gap();
    emit(report_json, extremum_json(f->f, e, cfg));
    return AQ_OK;
  });
}

aq_status aq_verify_nbf(const aq_functional* f, double tol, const aq_solver_options* opts, int* is_nbf,
                        char** report_json) {
  return guarded([&] {
    require(f, "functional");
    if (!(tol >= 0.0)) throw InvalidArgument("tolerance must be non-negative");
    const auto cfg = solver_config(opts);
    const NbfVerdict v = verify_nbf(f->f, tol, cfg);
    if (v.verdict == Verdict::Indeterminate) throw NumericalError(v.message);
    if (is_nbf) *is_nbf = v.is_nbf() ? 1 : 0;
    json out = verdict_json(f->f, v);
    out["tolerances"] = solver_json(cfg);
    emit(report_json, out);
    return AQ_OK;
  });
}

aq_status aq_compose(const aq_functional* v, const aq_functional* const* members, int settings, int outcomes,
                     int family_slot, aq_functional** out) {
  return guarded([&] {
    require(v, "V");
    require(members, "members");
    require(out, "out");
    if (settings < 1 || outcomes < 1) throw InvalidArgument("family dimensions must be positive");
    std::vector<std::vector<BellFunctional>> fam(static_cast<std::size_t>(settings));
    for (int xi = 0; xi < settings; ++xi)
      for (int a = 0; a < outcomes; ++a) {
        const aq_functional* m = members[xi * outcomes + a];
        require(m, "family member");
        fam[static_cast<std::size_t>(xi)].push_back(m->f);
      }
    *out = wrap(compose(v->f, NbfFamily(std::move(fam)), CompositionMap{family_slot, -1}));
    return AQ_OK;
  });
}

aq_status aq_seesaw_run(const aq_seesaw_options* opts, double* best_value, int* target_reached, char** trace_json) {
  return guarded([&] {
    require(opts, "options");
    SeesawConfig cfg;
    cfg.restarts = opts->restarts;
    cfg.max_sweeps = opts->max_sweeps;
    cfg.threshold = opts->threshold;
    cfg.window = opts->window;
    cfg.seed = opts->seed;
    if (opts->init != AQ_INIT_PAPER && opts->init != AQ_INIT_RANDOM) throw InvalidArgument("unknown init strategy");
    cfg.init = opts->init == AQ_INIT_PAPER ? InitStrategy::Paper : InitStrategy::Random;
    cfg.target = opts->target;
    cfg.noise = opts->noise;
    cfg.threads = opts->threads;
    cfg.solver = solver_config(&opts->solver);
    const SeesawTrace trace = run_seesaw(cfg);
    if (best_value) *best_value = trace.best_value;
    if (target_reached) *target_reached = trace.target_reached ? 1 : 0;
    json out = trace_to_json(trace);
    out["config"] = {{"restarts", cfg.restarts}, {"max_sweeps", cfg.max_sweeps}, {"threshold", cfg.threshold},
                     {"window", cfg.window},     {"seed", cfg.seed},             {"init", cfg.init == InitStrategy::Paper ? "paper" : "random"},
                     {"target", cfg.target},     {"noise", cfg.noise},           {"solver", solver_json(cfg.solver)}};
    emit(trace_json, out);
    return AQ_OK;
  });
}

aq_status aq_reproduce(const aq_solver_options* opts, double* value, int* holds, char** report_json) {
  return guarded([&] {
    const auto cfg = solver_config(opts);
    const Reproduction r = reproduce(cfg);
    if (value) *value = r.value();
    if (holds) *holds = r.holds() ? 1 : 0;
    json out = {{"value", r.value()},
                {"band", {kReproduceLow, kReproduceHigh}},
                {"holds", r.holds()},
                {"seconds", r.seconds},
                {"nbf_tol", kPrintedNbfTol},
                {"u00", verdict_json(paper_functionals().u00, r.u00)},
                {"u01", verdict_json(paper_functionals().u01, r.u01)},
                {"v", verdict_json(paper_functionals().v, r.v)},
                {"w", functional_to_json(r.w)},
                {"extremum", extremum_json(r.w, r.extremum, cfg)}};
    emit(report_json, out);
    return AQ_OK;
  });
}

aq_status aq_perturb(double epsilon, uint64_t seed, int steps, const aq_solver_options* opts, double* value,
                     int* claim, char** report_json) {
  return guarded([&] {
    const auto cfg = solver_config(opts);
    const Perturbation p = perturb(epsilon, seed, cfg, steps);
    if (value) *value = p.value();
    if (claim) *claim = p.claim ? (*p.claim ? 1 : 0) : -1;
    json traj = json::array();
    for (const auto& pt : p.trajectory)
      traj.push_back({{"epsilon", pt.epsilon}, {"value", pt.value}, {"gap", pt.gap}, {"shrunk_blocks", pt.shrunk}});
    json out = {{"epsilon", p.epsilon}, {"seed", p.seed}, {"value", p.value()}, {"trajectory", traj},
                {"claim_threshold", kPerturbClaimValue}, {"tolerances", solver_json(cfg)}};
    out["claim"] = p.claim ? json(*p.claim) : json(nullptr);
    emit(report_json, out);
    return AQ_OK;
  });
}

aq_status aq_oracle_table(uint64_t seed, const aq_solver_options* opts, int* ok, char** report_json) {
  return guarded([&] {
    const auto cfg = solver_config(opts);
    bool all = true;
    json rows = json::array();
    for (const auto& r : inclusion_chain(seed, cfg)) {
      json q = json::object();
      for (const auto& [name, val] : r.quantum) q[name] = val;
      const bool holds = r.holds(1e-7);
      all = all && holds;
      rows.push_back({{"name", r.name}, {"det_min", r.det_min}, {"det_max", r.det_max}, {"aq_min", r.aq_min},
                      {"aq_max", r.aq_max}, {"quantum", q}, {"holds", holds}});
    }
    json traces = json::array();
    for (const auto& s : {make_scenario(2, 2, 2), make_scenario(2, 3, 2), make_scenario(3, 3, 2)}) {
      const TraceCheck t = trace_check(s);
      const bool holds = t.constraint_residual < 1e-12 && t.min_eigenvalue > 0.0 && t.closed_form_gap < 1e-12;
      all = all && holds;
      traces.push_back({{"scenario", scenario_to_json(s)}, {"size", t.size},
                        {"constraint_residual", t.constraint_residual}, {"min_eigenvalue", t.min_eigenvalue},
                        {"closed_form_gap", t.closed_form_gap}, {"holds", holds}});
    }
    const double chsh_aq = aqnbf::aq_extremize(normalized_chsh(), Sense::Max, cfg).value;
    const double chsh_q = quantum_value(normalized_chsh(), tsirelson_chsh_model());
    const double tsirelson = (4.0 + 2.0 * std::sqrt(2.0)) / 8.0;
    const bool chsh_ok = std::abs(chsh_aq - tsirelson) < 1e-6 && std::abs(chsh_q - tsirelson) < 1e-9;
    all = all && chsh_ok;
    if (ok) *ok = all ? 1 : 0;
    emit(report_json, {{"inclusion", rows},
                       {"inclusion_tol", 1e-7},
                       {"trace_moment_matrix", traces},
                       {"tsirelson", {{"expected", tsirelson}, {"aq_max", chsh_aq}, {"quantum", chsh_q}, {"holds", chsh_ok}}},
                       {"tolerances", solver_json(cfg)}});
    return AQ_OK;
  });
}

}  // extern "C"
