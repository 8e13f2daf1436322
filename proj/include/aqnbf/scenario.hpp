#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace aqnbf {

/// Signature (n, m, d) of a Bell scenario: party count, per-party setting
/// counts and a common outcome count.
class Scenario {
 public:
  Scenario(std::vector<int> settings, int outcomes);

  int parties() const noexcept { return static_cast<int>(settings_.size()); }
  int settings(int party) const { return settings_.at(static_cast<std::size_t>(party)); }
  const std::vector<int>& settings() const noexcept { return settings_; }
  int outcomes() const noexcept { return outcomes_; }

  /// Number of setting tuples x⃗ (product of per-party setting counts).
  std::size_t setting_tuples() const noexcept { return setting_tuples_; }
  /// Number of outcome tuples a⃗ (d^n).
  std::size_t outcome_tuples() const noexcept { return outcome_tuples_; }
  std::size_t joint_events() const noexcept { return setting_tuples_ * outcome_tuples_; }

  /// Row-major joint index: setting tuple outer, outcome tuple inner, first
  /// party most significant in both.
  std::size_t event_index(std::span<const int> outcomes, std::span<const int> settings) const;
  void decode_event(std::size_t index, std::span<int> outcomes, std::span<int> settings) const;

  std::string to_string() const;

  bool operator==(const Scenario&) const = default;

 private:
  std::vector<int> settings_;
  int outcomes_;
  std::size_t setting_tuples_ = 1;
  std::size_t outcome_tuples_ = 1;
};

/// Uniform scenario: `n` parties, `m` settings each, `d` outcomes.
Scenario make_scenario(int n, int m, int d);

}  // namespace aqnbf
