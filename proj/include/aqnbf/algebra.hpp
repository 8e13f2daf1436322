#pragma once

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aqnbf/scenario.hpp"

namespace aqnbf {

/// Symbolic projector: outcome `outcome` of setting `setting` on `party`.
struct Letter {
  int party = 0;
  int setting = 0;
  int outcome = 0;

  auto operator<=>(const Letter&) const = default;
};

/// Product of letters with at most one letter per party, sorted by party.
/// The empty monomial is the identity.
using Monomial = std::vector<Letter>;

std::string to_string(const Monomial& m);

/// Reduced form of a product u†v under the projector identities, identified
/// with its adjoint. Within a party the letters keep (from u†, from v) order.
struct CanonicalWord {
  bool zero = false;
  std::vector<Letter> letters;

  static CanonicalWord make_zero() { return CanonicalWord{true, {}}; }
  bool is_unit() const noexcept { return !zero && letters.empty(); }
  std::string to_string() const;

  auto operator<=>(const CanonicalWord&) const = default;
};

/// Reverses the letter order inside every party block.
CanonicalWord adjoint(const CanonicalWord& w);

/// The lexicographically smaller of {w, adjoint(w)}.
CanonicalWord representative(const CanonicalWord& w);

/// Monomial basis: identity, then by letter count, then lexicographic by
/// (party, setting, outcome). Outcome d-1 is dropped for every setting.
std::vector<Monomial> basis_monomials(const Scenario& scenario);

/// Expected basis size, prod_k (1 + m_k (d - 1)).
std::size_t basis_size(const Scenario& scenario);

/// Canonical class of the cell (u, v), i.e. of the operator u†v. Letters may
/// be given in any party order; each monomial must hold at most one letter
/// per party.
CanonicalWord canonicalize(const Monomial& u, const Monomial& v);

/// Partition of all N x N cells (N = basis size) by canonical word.
struct WordClasses {
  std::map<CanonicalWord, std::vector<std::pair<int, int>>> classes;
  std::vector<std::pair<int, int>> zero_cells;
};

WordClasses word_classes(const Scenario& scenario);

}  // namespace aqnbf
