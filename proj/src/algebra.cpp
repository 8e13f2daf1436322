#include "aqnbf/algebra.hpp"

#include <algorithm>
#include <sstream>

#include "aqnbf/errors.hpp"

namespace aqnbf {

namespace {

char party_name(int party) { return static_cast<char>('A' + party); }

void append_letter(std::ostringstream& os, const Letter& l) {
  os << party_name(l.party) << "(" << l.outcome << "|" << l.setting << ")";
}

}  // namespace

std::string to_string(const Monomial& m) {
  if (m.empty()) return "1";
  std::ostringstream os;
  for (const auto& l : m) append_letter(os, l);
  return os.str();
}

std::string CanonicalWord::to_string() const {
  if (zero) return "0";
  if (letters.empty()) return "1";
  std::ostringstream os;
  for (const auto& l : letters) append_letter(os, l);
  return os.str();
}

CanonicalWord adjoint(const CanonicalWord& w) {
  if (w.zero) return w;
  CanonicalWord out = w;
  auto first = out.letters.begin();
  while (first != out.letters.end()) {
    auto last = std::find_if(first, out.letters.end(),
                             [&](const Letter& l) { return l.party != first->party; });
    std::reverse(first, last);
    first = last;
  }
  return out;
}

CanonicalWord representative(const CanonicalWord& w) {
  CanonicalWord a = adjoint(w);
  return a < w ? a : w;
}

std::size_t basis_size(const Scenario& scenario) {
  std::size_t n = 1;
  for (int m : scenario.settings())
    n *= 1 + static_cast<std::size_t>(m) * static_cast<std::size_t>(scenario.outcomes() - 1);
  return n;
}

std::vector<Monomial> basis_monomials(const Scenario& scenario) {
  // Per party: no letter, or one (setting, outcome < d-1) letter.
  std::vector<std::vector<Letter>> options(static_cast<std::size_t>(scenario.parties()));
  for (int k = 0; k < scenario.parties(); ++k)
    for (int x = 0; x < scenario.settings(k); ++x)
      for (int a = 0; a + 1 < scenario.outcomes(); ++a) options[k].push_back({k, x, a});

  std::vector<Monomial> out{Monomial{}};
  for (int k = 0; k < scenario.parties(); ++k) {
    std::vector<Monomial> next;
    next.reserve(out.size() * (options[k].size() + 1));
    for (const auto& m : out) {
      next.push_back(m);
      for (const auto& l : options[k]) {
        Monomial e = m;
        e.push_back(l);
        next.push_back(std::move(e));
      }
    }
    out = std::move(next);
  }
  std::sort(out.begin(), out.end(), [](const Monomial& a, const Monomial& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

CanonicalWord canonicalize(const Monomial& u, const Monomial& v) {
  auto by_party = [](const Letter& a, const Letter& b) { return a.party < b.party; };
  Monomial su = u;
  Monomial sv = v;
  std::stable_sort(su.begin(), su.end(), by_party);
  std::stable_sort(sv.begin(), sv.end(), by_party);
  for (const Monomial* m : {&su, &sv})
    for (std::size_t i = 1; i < m->size(); ++i)
      if ((*m)[i].party == (*m)[i - 1].party)
        throw InvalidArgument("monomial holds two letters of one party: " + to_string(*m));

  CanonicalWord w;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < su.size() || j < sv.size()) {
    const bool take_u = i < su.size() && (j >= sv.size() || su[i].party <= sv[j].party);
    const bool take_v = j < sv.size() && (i >= su.size() || sv[j].party <= su[i].party);
    if (take_u && take_v) {
      const Letter& a = su[i++];
      const Letter& b = sv[j++];
      if (a.setting == b.setting) {
        if (a.outcome != b.outcome) return CanonicalWord::make_zero();
        w.letters.push_back(a);
      } else {
        w.letters.push_back(a);
        w.letters.push_back(b);
      }
    } else if (take_u) {
      w.letters.push_back(su[i++]);
    } else {
      w.letters.push_back(sv[j++]);
    }
  }
  return representative(w);
}

WordClasses word_classes(const Scenario& scenario) {
  const auto basis = basis_monomials(scenario);
  const int n = static_cast<int>(basis.size());
  WordClasses out;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      CanonicalWord w = canonicalize(basis[r], basis[c]);
      if (w.zero)
        out.zero_cells.emplace_back(r, c);
      else
        out.classes[std::move(w)].emplace_back(r, c);
    }
  }
  return out;
}

}  // namespace aqnbf
