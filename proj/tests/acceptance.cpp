// One pass/fail line per acceptance criterion. Usage: acceptance <cli> <workdir>
// The CLI runs the reproduction, see-saw and perturbation commands so that
// those criteria are checked on the shipped surface.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "aqnbf/errors.hpp"
#include "aqnbf/experiments.hpp"
#include "aqnbf/oracles.hpp"
#include "sdp_instances.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace aqnbf;

namespace {

std::string cli;
fs::path work;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int run_cli(const std::string& args) {
  const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

json load(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

Outcome headline() {
  const fs::path out = work / "reproduce.json";
  const int rc = run_cli("reproduce --out " + out.string());
  if (rc != 0 && rc != 1) return {false, fmt("reproduce exited with %d", rc)};
  const json rep = load(out);
  const double value = rep["value"];
  const double gap = rep["extremum"]["gap"];
  const double seconds = load(work / "reproduce.report.json")["wall_time_seconds"];
  const bool pass = rc == 0 && value >= kReproduceLow && value <= kReproduceHigh && gap <= 1e-7 && seconds <= 60.0;
  return {pass, fmt("min W = %.10f in [%g, %g], gap %.2e <= 1e-7, %.2f s <= 60 s, exit %d", value, kReproduceLow,
                    kReproduceHigh, gap, seconds, rc)};
}

Outcome verdicts() {
  const auto paper = paper_functionals();
  bool pass = true;
  std::ostringstream os;
  auto one = [&](const char* name, const BellFunctional& f, double tol, bool exact) {
    const NbfVerdict v = verify_nbf(f, tol);
    const auto& st = moment_structure(f.scenario());
    double residual = INFINITY;
    if (v.lower && v.upper)
      residual = std::max(sos_decomposition(*v.lower, st).residual, sos_decomposition(*v.upper, st).residual);
    bool ok = v.is_nbf() && residual < 1e-6;
    if (exact) ok = ok && std::abs(v.aq_min) <= 1e-6 && std::abs(v.aq_max - 1.0) <= 1e-6;
    pass = pass && ok;
    os << fmt("%s %s [%.2e, 1%+.2e] tol %g sos %.1e; ", name, to_string(v.verdict).c_str(), v.aq_min, v.aq_max - 1.0,
              tol, residual);
  };
  one("U00", paper.u00, 1e-6, true);
  one("U01", paper.u01, kPrintedNbfTol, false);
  one("V", paper.v, kPrintedNbfTol, false);
  return {pass, os.str() + "recomposition < 1e-6"};
}

Outcome tsirelson() {
  const double expected = (4.0 + 2.0 * std::sqrt(2.0)) / 8.0;
  const double aq = aq_extremize(normalized_chsh(), Sense::Max).value;
  const double q = quantum_value(normalized_chsh(), tsirelson_chsh_model());
  const bool pass = std::abs(aq - expected) < 1e-6 && std::abs(q - expected) < 1e-9;
  return {pass, fmt("aq_max %.10f, quantum %.12f, expected %.12f (1e-6 / 1e-9)", aq, q, expected)};
}

Outcome trace_construction() {
  bool pass = true;
  std::ostringstream os;
  for (const auto& s : {make_scenario(2, 2, 2), make_scenario(2, 3, 2), make_scenario(3, 3, 2)}) {
    const TraceCheck t = trace_check(s);
    pass = pass && t.constraint_residual < 1e-12 && t.min_eigenvalue > 0.0;
    os << fmt("n=%d residual %.1e min_eig %.4g; ", t.size, t.constraint_residual, t.min_eigenvalue);
  }
  return {pass, os.str() + "residual < 1e-12, min_eig > 0"};
}

Outcome inclusion() {
  const auto rows = inclusion_chain(17);
  int bad = 0;
  std::size_t pairs = 0;
  for (const auto& r : rows) {
    bad += !r.holds(1e-7);
    pairs += r.quantum.size();
  }
  return {rows.size() >= 10 && bad == 0,
          fmt("%zu functionals, %zu quantum values, %d violations at 1e-7", rows.size(), pairs, bad)};
}

Outcome composition_contrast() {
  const auto w = paper_functionals().composed();
  const auto [lo, hi] = deterministic_range(w);
  const std::size_t vertices = deterministic_vertex_count(w.scenario());
  const double aq_min = aq_extremize(w, Sense::Min).value;
  const bool pass = vertices == 512 && lo >= -1e-6 && hi <= 1.0 + 1e-6 && aq_min < 0.0;
  return {pass, fmt("%zu vertices in [%.6f, %.6f] within 1e-6, AQ min %.10f < 0", vertices, lo, hi, aq_min)};
}

Outcome seesaw() {
  const fs::path paper_out = work / "seesaw_paper.json";
  const int rc = run_cli("seesaw run --init paper --out " + paper_out.string());
  if (rc != 0 && rc != 1) return {false, fmt("paper run exited with %d", rc)};
  const json paper = load(paper_out);
  bool monotone = true;
  for (const auto& r : paper["restarts"]) {
    const auto v = r["sweep_values"].get<std::vector<double>>();
    for (std::size_t k = 1; k < v.size(); ++k) monotone = monotone && v[k] <= v[k - 1] + 1e-8;
  }
  const double paper_best = paper["best_value"];
  const bool paper_ok = monotone && paper_best <= -0.003;

  // Seed 7 plus three refreshes.
  double random_best = INFINITY;
  int batches = 0, restarts = 0;
  bool hit = false;
  for (std::uint64_t seed = 7; seed <= 10 && !hit; ++seed) {
    const fs::path out = work / ("seesaw_random_" + std::to_string(seed) + ".json");
    const int r = run_cli("seesaw run --init random --restarts 20 --seed " + std::to_string(seed) + " --out " + out.string());
    ++batches;
    if (r != 0 && r != 1) continue;
    const json t = load(out);
    restarts += static_cast<int>(t["restarts"].size());
    random_best = std::min(random_best, t["best_value"].get<double>());
    hit = t["target_reached"].get<bool>();
  }
  return {paper_ok && hit,
          fmt("paper: best %.10f <= -0.003, monotone %s; random: best %.3e over %d restarts in %d batch(es), target -0.001 %s",
              paper_best, monotone ? "yes" : "no", random_best, restarts, batches, hit ? "reached" : "missed")};
}

Outcome solver_suite() {
  using namespace sdp_instances;
  const double lmax =
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(lambda_max_matrix()).eigenvalues().maxCoeff();
  const auto b = solve(boundary_problem());
  const auto t = solve(trace_problem());
  const auto l = solve(lambda_max_problem());
  const auto ip = solve(infeasible_primal());
  const auto id = solve(infeasible_dual());
  const double eb = std::abs(b.primal_objective + 1.0);
  const double et = std::abs(t.primal_objective - 3.0);
  const double el = std::abs(-l.primal_objective - lmax);
  const bool pass = b.status == Status::Optimal && t.status == Status::Optimal && l.status == Status::Optimal &&
                    eb < 1e-8 && et < 1e-8 && el < 1e-8 && ip.status == Status::PrimalInfeasible &&
                    id.status == Status::DualInfeasible;
  return {pass, fmt("boundary %.1e, trace %.1e, lambda_max %.1e (< 1e-8); infeasible primal -> %s, dual -> %s", eb, et,
                    el, to_string(ip.status).c_str(), to_string(id.status).c_str())};
}

Outcome robustness() {
  const fs::path out = work / "perturb.json";
  const int rc = run_cli("perturb --epsilon 1e-4 --seed 1 --out " + out.string());
  if (rc != 0 && rc != 1) return {false, fmt("perturb exited with %d", rc)};
  const json rep = load(out);
  double worst = -INFINITY;
  for (const auto& pt : rep["trajectory"]) worst = std::max(worst, pt["value"].get<double>());
  return {rc == 0 && worst <= -0.002,
          fmt("epsilon 1e-4: largest minimum along the trajectory %.10f <= -0.002, exit %d", worst, rc)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: acceptance <cli> <workdir>\n");
    return 2;
  }
  cli = argv[1];
  work = argv[2];
  fs::create_directories(work);

  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"headline reproduction", headline},
      {"NBF verdicts with certificates", verdicts},
      {"Tsirelson sandwich", tsirelson},
      {"trace-construction cross-check", trace_construction},
      {"inclusion chain", inclusion},
      {"classical positivity vs AQ violation", composition_contrast},
      {"see-saw", seesaw},
      {"SDP solver closed forms", solver_suite},
      {"robustness probe", robustness},
  };
  int passed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    passed += o.pass;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", passed, index);
  return passed == index ? 0 : 1;
}
