// Command-line front end over the C interface.

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aqnbf/aqnbf.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kClaimFails = 1, kInputError = 2, kNumerical = 3 };

struct CliError {
  int code;
  std::string message;
};

int exit_code(aq_status s) {
  switch (s) {
    case AQ_OK: return kOk;
    case AQ_NUMERICAL_ERROR:
    case AQ_INTERNAL_ERROR: return kNumerical;
    default: return kInputError;
  }
}

void check(aq_status s) {
  if (s != AQ_OK) throw CliError{exit_code(s), std::string(aq_status_name(s)) + ": " + aq_last_error()};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  aq_string_free(s);
  return out;
}

json take_json(char* s) { return json::parse(take(s)); }

struct Functional {
  aq_functional* p = nullptr;
  Functional() = default;
  Functional(const Functional&) = delete;
  Functional& operator=(const Functional&) = delete;
  Functional(Functional&& o) noexcept : p(o.p) { o.p = nullptr; }
  ~Functional() { aq_functional_free(p); }
};

Functional load(const std::string& path) {
  Functional f;
  check(aq_functional_load(path.c_str(), &f.p));
  return f;
}

Functional parse(const json& j) {
  Functional f;
  check(aq_functional_parse(j.dump().c_str(), &f.p));
  return f;
}

Functional paper(const char* name) {
  Functional f;
  check(aq_functional_paper(name, &f.p));
  return f;
}

json to_json(const Functional& f) {
  char* out = nullptr;
  check(aq_functional_to_json(f.p, 0, &out));
  return take_json(out);
}

std::string sha256(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr)) return "";
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kInputError, "cannot open " + path};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw CliError{kInputError, "cannot write " + path.string()};
  out << j.dump(2) << '\n';
}

// Artifacts live next to the primary output: <stem>.<suffix>.json.
fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension();
  return fs::path(p.string() + "." + suffix + ".json");
}

struct Report {
  explicit Report(std::string name) : command(std::move(name)) {}

  std::string command;
  std::vector<std::string> inputs;
  json config = json::object();
  json results = json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  json finish(int code) const {
    std::string blob;
    for (const auto& in : inputs) blob += in + '\n';
    return {{"command", command},
            {"inputs_digest", sha256(blob)},
            {"config", config},
            {"config_digest", sha256(config.dump())},
            {"results", results},
            {"exit_code", code},
            {"wall_time_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
            {"tool_version", aq_version()}};
  }
};

struct Options {
  double tol = -1.0;
  std::uint64_t seed = 1;
  int restarts = 20;
  int sweeps = 60;
  std::string init = "paper";
  std::string out;
  std::string file;
  std::string v_file;
  std::string family_file;
  int slot = 1;
  double epsilon = 1e-4;
  int steps = 4;
  double target = -0.001;
};

aq_solver_options solver_options(const Options& o) {
  aq_solver_options s;
  aq_solver_options_default(&s);
  if (o.tol > 0.0) {
    s.gap_tol = o.tol;
    s.feas_tol = o.tol;
  }
  return s;
}

json solver_json(const aq_solver_options& s) {
  return {{"gap_tol", s.gap_tol}, {"feas_tol", s.feas_tol}, {"max_iters", s.max_iters}};
}

// Writes the report (and the primary artifact when given) if --out is set.
int emit(const Options& o, Report& r, int code, const json* artifact = nullptr) {
  if (!o.out.empty()) {
    const fs::path out(o.out);
    if (artifact) {
      write_json(out, *artifact);
      r.results["artifact"] = out.string();
    }
    write_json(artifact ? sibling(out, "report") : out, r.finish(code));
  }
  return code;
}

int cmd_verify(const Options& o) {
  Report r{"verify"};
  const double tol = o.tol >= 0.0 ? o.tol : 5e-4;
  r.inputs.push_back(read_file(o.file));
  const Functional f = load(o.file);
  aq_solver_options s;
  aq_solver_options_default(&s);
  r.config = {{"tol", tol}, {"solver", solver_json(s)}};
  int is_nbf = 0;
  char* out = nullptr;
  check(aq_verify_nbf(f.p, tol, &s, &is_nbf, &out));
  json v = take_json(out);
  std::printf("verdict %s\naq_min %.10f\naq_max %.10f\ntol %g\n", v["verdict"].get<std::string>().c_str(),
              v["aq_min"].get<double>(), v["aq_max"].get<double>(), tol);
  r.results = {{"verdict", v["verdict"]}, {"aq_min", v["aq_min"]}, {"aq_max", v["aq_max"]},
               {"min_gap", v["min_gap"]}, {"max_gap", v["max_gap"]}, {"tol", tol}};
  if (!o.out.empty()) {
    const fs::path base(o.out);
    for (const char* side : {"lower", "upper"}) {
      const std::string key = std::string(side) + "_certificate";
      if (!v.contains(key)) continue;
      const fs::path p = sibling(base, key);
      write_json(p, v[key]);
      r.results[key] = p.string();
      r.results[std::string(side) + "_recomposition_residual"] = v[std::string(side) + "_recomposition_residual"];
    }
    r.results["recomposition_tol"] = 1e-6;
  }
  return emit(o, r, is_nbf ? kOk : kClaimFails);
}

int cmd_aq(const Options& o, bool maximize) {
  Report r{maximize ? "aq max" : "aq min"};
  r.inputs.push_back(read_file(o.file));
  const Functional f = load(o.file);
  const aq_solver_options s = solver_options(o);
  r.config = {{"sense", maximize ? "max" : "min"}, {"solver", solver_json(s)}};
  double value = 0.0, gap = 0.0;
  char* out = nullptr;
  check(aq_extremize(f.p, maximize ? 1 : 0, &s, &value, &gap, &out));
  json e = take_json(out);
  std::printf("value %.10f\ngap %.3e\n", value, gap);
  r.results = {{"value", value}, {"certificate_bound", e["certificate_bound"]}, {"gap", gap},
               {"recomposition_residual", e["recomposition_residual"]}, {"tolerances", solver_json(s)}};
  return emit(o, r, kOk, &e);
}

int cmd_compose(const Options& o) {
  Report r{"compose"};
  r.inputs = {read_file(o.v_file), read_file(o.family_file)};
  const Functional v = load(o.v_file);
  const json fam = json::parse(r.inputs[1], nullptr, false);
  if (fam.is_discarded() || !fam.contains("family") || !fam["family"].is_array() || fam["family"].empty())
    throw CliError{kInputError, "family file must hold {\"family\": [[U_{0|0}, U_{1|0}, ...], ...]}"};
  std::vector<Functional> members;
  const int settings = static_cast<int>(fam["family"].size());
  const int outcomes = static_cast<int>(fam["family"][0].size());
  for (const auto& row : fam["family"]) {
    if (!row.is_array() || static_cast<int>(row.size()) != outcomes)
      throw CliError{kInputError, "family rows must have equal length"};
    for (const auto& m : row) members.push_back(parse(m));
  }
  std::vector<const aq_functional*> ptrs;
  for (const auto& m : members) ptrs.push_back(m.p);
  r.config = {{"family_slot", o.slot}};
  Functional w;
  check(aq_compose(v.p, ptrs.data(), settings, outcomes, o.slot, &w.p));
  int parties = 0, m = 0, d = 0;
  check(aq_functional_scenario(w.p, &parties, &m, &d));
  std::printf("composed scenario (%d,%d,%d)\n", parties, m, d);
  const json wj = to_json(w);
  if (o.out.empty()) std::printf("%s\n", wj.dump(2).c_str());
  r.results = {{"scenario", wj["scenario"]}};
  return emit(o, r, kOk, &wj);
}

int cmd_seesaw(const Options& o) {
  Report r{"seesaw run"};
  aq_seesaw_options s;
  aq_seesaw_options_default(&s);
  s.restarts = o.restarts;
  s.max_sweeps = o.sweeps;
  s.seed = o.seed;
  s.target = o.target;
  if (o.init != "paper" && o.init != "random") throw CliError{kInputError, "--init must be paper or random"};
  s.init = o.init == "paper" ? AQ_INIT_PAPER : AQ_INIT_RANDOM;
  s.solver = solver_options(o);
  r.config = {{"restarts", s.restarts}, {"max_sweeps", s.max_sweeps}, {"seed", s.seed}, {"init", o.init},
              {"target", s.target}, {"threshold", s.threshold}, {"window", s.window}, {"noise", s.noise},
              {"solver", solver_json(s.solver)}};
  double best = 0.0;
  int reached = 0;
  char* out = nullptr;
  check(aq_seesaw_run(&s, &best, &reached, &out));
  json trace = take_json(out);
  std::printf("best %.10f (restart %d)\n", best, trace["best_restart"].get<int>());
  std::printf("restarts run %zu, failed %d\n", trace["restarts"].size(), trace["failed_restarts"].get<int>());
  if (!reached) std::printf("target missed (target %g)\n", s.target);
  r.results = {{"best_value", best}, {"target", s.target}, {"target_reached", reached != 0},
               {"status", reached ? "target reached" : "target missed"},
               {"best_restart", trace["best_restart"]}, {"failed_restarts", trace["failed_restarts"]},
               {"monotone_tol", 1e-8}, {"tolerances", solver_json(s.solver)}};
  return emit(o, r, reached ? kOk : kClaimFails, &trace);
}

int cmd_reproduce(const Options& o) {
  Report r{"reproduce"};
  const aq_solver_options s = solver_options(o);
  r.config = {{"solver", solver_json(s)}};
  double value = 0.0;
  int holds = 0;
  char* out = nullptr;
  check(aq_reproduce(&s, &value, &holds, &out));
  json rep = take_json(out);
  const json& ex = rep["extremum"];
  std::printf("U00 %s  U01 %s  V %s  (tol %g)\n", rep["u00"]["verdict"].get<std::string>().c_str(),
              rep["u01"]["verdict"].get<std::string>().c_str(), rep["v"]["verdict"].get<std::string>().c_str(),
              rep["nbf_tol"].get<double>());
  std::printf("min W %.10f\ngap %.3e\nband [%g, %g]\n%s\n", value, ex["gap"].get<double>(), rep["band"][0].get<double>(),
              rep["band"][1].get<double>(), holds ? "claim holds" : "claim fails");
  r.results = {{"value", value},
               {"band", rep["band"]},
               {"gap", ex["gap"]},
               {"gap_tol", 1e-7},
               {"recomposition_residual", ex["recomposition_residual"]},
               {"recomposition_tol", 1e-6},
               {"nbf_verdicts", {{"u00", rep["u00"]["verdict"]}, {"u01", rep["u01"]["verdict"]}, {"v", rep["v"]["verdict"]}}},
               {"nbf_tol", rep["nbf_tol"]},
               {"holds", holds != 0},
               {"solve_seconds", rep["seconds"]},
               {"tolerances", solver_json(s)}};
  if (!o.out.empty()) {
    const fs::path base(o.out);
    write_json(sibling(base, "behavior"), ex["behavior"]);
    write_json(sibling(base, "certificate"), ex["certificate"]);
    r.results["behavior"] = sibling(base, "behavior").string();
    r.results["certificate"] = sibling(base, "certificate").string();
  }
  return emit(o, r, holds ? kOk : kClaimFails, &rep);
}

int cmd_perturb(const Options& o) {
  Report r{"perturb"};
  const aq_solver_options s = solver_options(o);
  r.config = {{"epsilon", o.epsilon}, {"seed", o.seed}, {"steps", o.steps}, {"solver", solver_json(s)}};
  double value = 0.0;
  int claim = -1;
  char* out = nullptr;
  check(aq_perturb(o.epsilon, o.seed, o.steps, &s, &value, &claim, &out));
  json rep = take_json(out);
  for (const auto& pt : rep["trajectory"])
    std::printf("epsilon %.3e  min W %.10f  gap %.2e  shrunk %d\n", pt["epsilon"].get<double>(),
                pt["value"].get<double>(), pt["gap"].get<double>(), pt["shrunk_blocks"].get<int>());
  std::printf("%s\n", claim < 0 ? "exploratory (no claim)" : claim ? "claim holds" : "claim fails");
  r.results = {{"value", value}, {"trajectory", rep["trajectory"]}, {"claim", rep["claim"]},
               {"claim_threshold", rep["claim_threshold"]}, {"tolerances", solver_json(s)}};
  return emit(o, r, claim == 0 ? kClaimFails : kOk, &rep);
}

int cmd_oracle(const Options& o) {
  Report r{"oracle"};
  const aq_solver_options s = solver_options(o);
  r.config = {{"seed", o.seed}, {"solver", solver_json(s)}};
  int ok = 0;
  char* out = nullptr;
  check(aq_oracle_table(o.seed, &s, &ok, &out));
  json rep = take_json(out);
  std::printf("%-18s %10s %10s %10s %10s  %s\n", "functional", "det_min", "det_max", "aq_min", "aq_max", "quantum");
  for (const auto& row : rep["inclusion"]) {
    std::string q;
    for (const auto& [name, val] : row["quantum"].items()) q += name + "=" + std::to_string(val.get<double>()) + " ";
    std::printf("%-18s %10.6f %10.6f %10.6f %10.6f  %s%s\n", row["name"].get<std::string>().c_str(),
                row["det_min"].get<double>(), row["det_max"].get<double>(), row["aq_min"].get<double>(),
                row["aq_max"].get<double>(), q.c_str(), row["holds"].get<bool>() ? "" : " FAIL");
  }
  for (const auto& t : rep["trace_moment_matrix"])
    std::printf("trace Gamma %s n=%d residual %.2e min_eig %.4g closed_form %.2e\n", t["scenario"].dump().c_str(),
                t["size"].get<int>(), t["constraint_residual"].get<double>(), t["min_eigenvalue"].get<double>(),
                t["closed_form_gap"].get<double>());
  const auto& ts = rep["tsirelson"];
  std::printf("CHSH expected %.9f aq_max %.9f quantum %.12f\n", ts["expected"].get<double>(),
              ts["aq_max"].get<double>(), ts["quantum"].get<double>());
  r.results = rep;
  return emit(o, r, ok ? kOk : kClaimFails);
}

int cmd_dump_paper(const Options& o) {
  Report r{"nbf dump-paper"};
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  for (const char* name : {"u00", "u01", "v", "w"}) {
    const fs::path p = dir / (std::string(name) + ".json");
    write_json(p, to_json(paper(name)));
    r.results[name] = p.string();
    std::printf("%s\n", p.string().c_str());
  }
  json fam = {{"family", json::array({json::array({to_json(paper("u00"))}), json::array({to_json(paper("u01"))})})}};
  // Complete the two-outcome family with the complements 1 - U.
  for (auto& row : fam["family"]) {
    json comp = row[0];
    for (auto& e : comp["entries"]) e["coeff"] = -e["coeff"].get<double>();
    bool has_unit = false;
    for (auto& e : comp["entries"])
      if (e["monomial"].empty()) {
        e["coeff"] = 1.0 + e["coeff"].get<double>();
        has_unit = true;
      }
    if (!has_unit) comp["entries"].push_back({{"monomial", json::array()}, {"coeff", 1.0}});
    row.push_back(comp);
  }
  const fs::path p = dir / "family.json";
  write_json(p, fam);
  r.results["family"] = p.string();
  std::printf("%s\n", p.string().c_str());
  write_json(dir / "dump-paper.report.json", r.finish(kOk));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Almost-quantum Bell functional toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(aq_version()));
  Options o;

  auto add_out = [&](CLI::App* c, const std::string& help) { c->add_option("--out", o.out, help); };
  auto add_tol = [&](CLI::App* c, const std::string& help) { c->add_option("--tol", o.tol, help); };

  auto* verify = app.add_subcommand("verify", "Decide whether a functional is an almost-quantum NBF");
  verify->add_option("file", o.file, "functional JSON")->required();
  add_tol(verify, "NBF tolerance (default 5e-4)");
  add_out(verify, "report path; certificates are written next to it");

  auto* aq = app.add_subcommand("aq", "Extremize a functional over the almost-quantum set");
  aq->require_subcommand(1);
  auto* aq_min = aq->add_subcommand("min", "minimum");
  auto* aq_max = aq->add_subcommand("max", "maximum");
  for (auto* c : {aq_min, aq_max}) {
    c->add_option("file", o.file, "functional JSON")->required();
    add_tol(c, "solver gap and feasibility tolerance");
    add_out(c, "extremum JSON (behavior and certificate); report next to it");
  }

  auto* compose = app.add_subcommand("compose", "Compose V with a family of functionals");
  auto setup_compose = [&](CLI::App* c) {
    c->add_option("v", o.v_file, "V functional JSON")->required();
    c->add_option("family", o.family_file, "family JSON {\"family\": [[U_{0|0}, U_{1|0}], ...]}")->required();
    c->add_option("--slot", o.slot, "party of V that receives the family output (default 1)");
    add_out(c, "composed functional JSON; report next to it");
  };
  setup_compose(compose);

  auto* seesaw = app.add_subcommand("seesaw", "See-saw search");
  seesaw->require_subcommand(1);
  auto* seesaw_run = seesaw->add_subcommand("run", "run the restarts");
  seesaw_run->add_option("--seed", o.seed, "RNG seed");
  seesaw_run->add_option("--restarts", o.restarts, "number of restarts (default 20)");
  seesaw_run->add_option("--sweeps", o.sweeps, "sweep cap per restart (default 60)");
  seesaw_run->add_option("--init", o.init, "paper or random")->check(CLI::IsMember({"paper", "random"}));
  seesaw_run->add_option("--target", o.target, "target value (default -0.001)");
  add_tol(seesaw_run, "solver gap and feasibility tolerance");
  add_out(seesaw_run, "trace JSON; report next to it");

  auto* reproduce = app.add_subcommand("reproduce", "Compose the printed functionals and minimize");
  add_tol(reproduce, "solver gap and feasibility tolerance");
  add_out(reproduce, "reproduction JSON; behavior, certificate and report next to it");

  auto* perturb = app.add_subcommand("perturb", "Robustness of the minimum under coefficient noise");
  perturb->add_option("--epsilon", o.epsilon, "noise magnitude in [0, 0.01] (default 1e-4)");
  perturb->add_option("--seed", o.seed, "RNG seed");
  perturb->add_option("--steps", o.steps, "trajectory points after zero (default 4)");
  add_tol(perturb, "solver gap and feasibility tolerance");
  add_out(perturb, "perturbation JSON; report next to it");

  auto* oracle = app.add_subcommand("oracle", "Print the oracle cross-check table");
  oracle->add_option("--seed", o.seed, "seed for random functionals and models");
  add_tol(oracle, "solver gap and feasibility tolerance");
  add_out(oracle, "report path");

  auto* nbf = app.add_subcommand("nbf", "NBF utilities");
  nbf->require_subcommand(1);
  auto* nbf_verify = nbf->add_subcommand("verify", "same as verify");
  nbf_verify->add_option("file", o.file, "functional JSON")->required();
  add_tol(nbf_verify, "NBF tolerance (default 5e-4)");
  add_out(nbf_verify, "report path; certificates are written next to it");
  auto* nbf_compose = nbf->add_subcommand("compose", "same as compose");
  setup_compose(nbf_compose);
  auto* dump = nbf->add_subcommand("dump-paper", "Write the printed functionals and their family");
  add_out(dump, "output directory (default .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (verify->parsed() || nbf_verify->parsed()) return cmd_verify(o);
    if (aq_min->parsed()) return cmd_aq(o, false);
    if (aq_max->parsed()) return cmd_aq(o, true);
    if (compose->parsed() || nbf_compose->parsed()) return cmd_compose(o);
    if (seesaw_run->parsed()) return cmd_seesaw(o);
    if (reproduce->parsed()) return cmd_reproduce(o);
    if (perturb->parsed()) return cmd_perturb(o);
    if (oracle->parsed()) return cmd_oracle(o);
    if (dump->parsed()) return cmd_dump_paper(o);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumerical;
  }
  return kInputError;
}
