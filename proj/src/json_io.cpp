#include "aqnbf/json_io.hpp"

#include <fstream>
#include <sstream>

#include "aqnbf/errors.hpp"

namespace aqnbf {

using nlohmann::json;

namespace {

json letters_to_json(const std::vector<Letter>& m) {
  json out = json::array();
  for (const auto& l : m) out.push_back({l.party, l.setting, l.outcome});
  return out;
}

Monomial letters_from_json(const json& j, const Scenario& s) {
  if (!j.is_array()) throw ParseError("monomial must be an array of [party, setting, outcome]");
  Monomial m;
  for (const auto& l : j) {
    if (!l.is_array() || l.size() != 3) throw ParseError("letter must be [party, setting, outcome]");
    Letter x{l[0].get<int>(), l[1].get<int>(), l[2].get<int>()};
    if (x.party < 0 || x.party >= s.parties() || x.setting < 0 || x.setting >= s.settings(x.party) || x.outcome < 0 ||
        x.outcome >= s.outcomes())
      throw ParseError("letter " + l.dump() + " is outside the scenario");
    m.push_back(x);
  }
  std::sort(m.begin(), m.end());
  for (std::size_t i = 1; i < m.size(); ++i)
    if (m[i].party == m[i - 1].party) throw ParseError("monomial has two letters for one party");
  return m;
}

TableFormat format_of(const json& j) {
  const auto f = j.value("format", std::string("collins_gisin"));
  if (f == "collins_gisin") return TableFormat::CollinsGisin;
  if (f == "full") return TableFormat::Full;
  throw ParseError("unknown format '" + f + "'");
}

const char* format_name(TableFormat f) { return f == TableFormat::Full ? "full" : "collins_gisin"; }

// Joint-event index of a full-format entry.
std::size_t event_of(const Monomial& m, const Scenario& s) {
  if (static_cast<int>(m.size()) != s.parties()) throw ParseError("full-format entries need one letter per party");
  std::vector<int> o, x;
  for (const auto& l : m) {
    o.push_back(l.outcome);
    x.push_back(l.setting);
  }
  return s.event_index(o, x);
}

Monomial event_monomial(std::size_t e, const Scenario& s) {
  std::vector<int> o(static_cast<std::size_t>(s.parties())), x(o.size());
  s.decode_event(e, o, x);
  Monomial m;
  for (int k = 0; k < s.parties(); ++k) m.push_back({k, x[static_cast<std::size_t>(k)], o[static_cast<std::size_t>(k)]});
  return m;
}

template <class F>
void for_entries(const json& j, const Scenario& s, F&& fn) {
  if (!j.contains("entries") || !j["entries"].is_array()) throw ParseError("missing 'entries' array");
  for (const auto& e : j["entries"]) {
    if (!e.contains("monomial") || !e.contains("coeff") || !e["coeff"].is_number())
      throw ParseError("entry needs 'monomial' and numeric 'coeff'");
    fn(letters_from_json(e["monomial"], s), e["coeff"].get<double>());
  }
}

}  // namespace

json scenario_to_json(const Scenario& s) {
  return {{"parties", s.parties()}, {"settings", s.settings()}, {"outcomes", s.outcomes()}};
}

Scenario scenario_from_json(const json& j) {
  try {
    const int n = j.at("parties").get<int>();
    auto settings = j.at("settings").get<std::vector<int>>();
    if (static_cast<int>(settings.size()) != n) throw ParseError("'settings' length differs from 'parties'");
    return Scenario(std::move(settings), j.at("outcomes").get<int>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad scenario: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("bad scenario: ") + e.what());
  }
}

json functional_to_json(const BellFunctional& f, TableFormat format) {
  const auto& s = f.scenario();
  json entries = json::array();
  if (format == TableFormat::CollinsGisin) {
    const auto basis = basis_monomials(s);
    for (std::size_t g = 0; g < basis.size(); ++g)
      if (f[g] != 0.0) entries.push_back({{"monomial", letters_to_json(basis[g])}, {"coeff", f[g]}});
  } else {
    const auto table = full_table(f);
    for (std::size_t e = 0; e < table.size(); ++e)
      entries.push_back({{"monomial", letters_to_json(event_monomial(e, s))}, {"coeff", table[e]}});
  }
  return {{"scenario", scenario_to_json(s)}, {"format", format_name(format)}, {"entries", entries}};
}

BellFunctional functional_from_json(const json& j) {
  try {
    const Scenario s = scenario_from_json(j.at("scenario"));
    if (format_of(j) == TableFormat::CollinsGisin) {
      std::vector<double> c(basis_size(s), 0.0);
      for_entries(j, s, [&](const Monomial& m, double v) {
        const int g = basis_index(s, m);
        if (g < 0) throw ParseError("monomial " + to_string(m) + " is not in the basis");
        c[static_cast<std::size_t>(g)] += v;
      });
      return BellFunctional(s, std::move(c));
    }
    std::vector<double> t(s.joint_events(), 0.0);
    for_entries(j, s, [&](const Monomial& m, double v) { t[event_of(m, s)] += v; });
    return functional_from_full_table(s, t);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad functional: ") + e.what());
  }
}

json behavior_to_json(const Behavior& b, TableFormat format) {
  const auto& s = b.scenario();
  json entries = json::array();
  if (format == TableFormat::Full) {
    for (std::size_t e = 0; e < b.table().size(); ++e)
      entries.push_back({{"monomial", letters_to_json(event_monomial(e, s))}, {"coeff", b.table()[e]}});
  } else {
    const auto cg = to_collins_gisin(b);
    const auto basis = basis_monomials(s);
    for (std::size_t g = 0; g < basis.size(); ++g)
      entries.push_back({{"monomial", letters_to_json(basis[g])}, {"coeff", cg[g]}});
  }
  return {{"scenario", scenario_to_json(s)}, {"format", format_name(format)}, {"entries", entries}};
}

Behavior behavior_from_json(const json& j, const ToleranceConfig& tol) {
  try {
    const Scenario s = scenario_from_json(j.at("scenario"));
    const bool full = format_of(j) == TableFormat::Full;
    const std::size_t n = full ? s.joint_events() : basis_size(s);
    std::vector<double> v(n, 0.0);
    std::vector<bool> seen(n, false);
    for_entries(j, s, [&](const Monomial& m, double x) {
      const std::size_t i = full ? event_of(m, s) : static_cast<std::size_t>(basis_index(s, m));
      if (!full && basis_index(s, m) < 0) throw ParseError("monomial " + to_string(m) + " is not in the basis");
      if (seen[i]) throw ParseError("duplicate entry " + to_string(m));
      seen[i] = true;
      v[i] = x;
    });
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw ParseError("behavior is missing entries");
    return full ? behavior_from_table(s, std::move(v), tol) : from_collins_gisin(CGVector(s, std::move(v)), tol);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad behavior: ") + e.what());
  }
}

json word_classes_to_json(const MomentStructure& st) {
  json classes = json::array();
  for (const auto& cls : st.classes()) {
    json cells = json::array();
    for (const auto& [r, c] : cls.cells) cells.push_back({r, c});
    classes.push_back({{"word", cls.word.to_string()}, {"basis_index", cls.basis_index}, {"cells", cells}});
  }
  json zero = json::array();
  for (const auto& [r, c] : st.zero_cells()) zero.push_back({r, c});
  json basis = json::array();
  for (const auto& m : st.basis()) basis.push_back(to_string(m));
  return {{"scenario", scenario_to_json(st.scenario())}, {"basis", basis}, {"classes", classes}, {"zero_cells", zero}};
}

json certificate_to_json(const SosCertificate& cert, const Scenario& scenario) {
  json gram = json::array();
  for (Eigen::Index i = 0; i < cert.gram.rows(); ++i)
    for (Eigen::Index j = i; j < cert.gram.cols(); ++j)
      if (cert.gram(i, j) != 0.0) gram.push_back({0, i, j, cert.gram(i, j)});
  return {{"format", "sdp-triplet"},
          {"scenario", scenario_to_json(scenario)},
          {"sense", cert.sense == Sense::Min ? "min" : "max"},
          {"bound", cert.bound},
          {"target", cert.target},
          {"blocks", json::array({{{"dim", cert.gram.rows()}, {"kind", "psd"}}})},
          {"gram", gram}};
}

SosCertificate certificate_from_json(const json& j, Scenario* scenario) {
  try {
    const Scenario s = scenario_from_json(j.at("scenario"));
    SosCertificate cert;
    const auto sense = j.at("sense").get<std::string>();
    if (sense != "min" && sense != "max") throw ParseError("certificate sense must be min or max");
    cert.sense = sense == "min" ? Sense::Min : Sense::Max;
    cert.bound = j.at("bound").get<double>();
    cert.target = j.at("target").get<std::vector<double>>();
    if (cert.target.size() != basis_size(s)) throw ParseError("certificate target has the wrong length");
    const auto n = j.at("blocks").at(0).at("dim").get<Eigen::Index>();
    cert.gram = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : j.at("gram")) {
      if (!t.is_array() || t.size() != 4) throw ParseError("gram triplet must be [block, i, j, value]");
      const auto r = t[1].get<Eigen::Index>(), c = t[2].get<Eigen::Index>();
      if (t[0].get<int>() != 0 || r < 0 || c < r || c >= n) throw ParseError("gram triplet out of range");
      cert.gram(r, c) = cert.gram(c, r) = t[3].get<double>();
    }
    if (scenario) *scenario = s;
    return cert;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad certificate: ") + e.what());
  }
}

json state_to_json(const SeesawState& st) {
  json u = json::array();
  for (const auto& f : st.u) u.push_back(functional_to_json(f));
  return {{"u", u},
          {"v", functional_to_json(st.v)},
          {"family_slot", st.map.family_slot},
          {"w", functional_to_json(st.composed())}};
}

json trace_to_json(const SeesawTrace& trace) {
  json restarts = json::array();
  for (const auto& r : trace.restarts) {
    json item = {{"index", r.index}, {"sweep_values", r.sweep_values}, {"step_values", r.step_values},
                 {"failed", r.failed}};
    if (r.failed) item["error"] = r.error;
    restarts.push_back(std::move(item));
  }
  json out = {{"restarts", restarts},
              {"best_value", trace.best_value},
              {"best_restart", trace.best_restart},
              {"failed_restarts", trace.failed_restarts},
              {"target_reached", trace.target_reached}};
  if (trace.best_state) out["best_state"] = state_to_json(*trace.best_state);
  if (trace.best_behavior) out["best_behavior"] = behavior_to_json(*trace.best_behavior);
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace aqnbf
