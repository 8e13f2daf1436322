#include "aqnbf/scenario.hpp"

#include <sstream>

#include "aqnbf/errors.hpp"

namespace aqnbf {

Scenario::Scenario(std::vector<int> settings, int outcomes)
    : settings_(std::move(settings)), outcomes_(outcomes) {
  if (settings_.empty()) throw InvalidArgument("scenario needs at least one party");
  if (outcomes_ < 2) throw InvalidArgument("scenario needs at least two outcomes");
  for (int m : settings_) {
    if (m < 1) throw InvalidArgument("every party needs at least one setting");
    setting_tuples_ *= static_cast<std::size_t>(m);
    outcome_tuples_ *= static_cast<std::size_t>(outcomes_);
  }
}

std::size_t Scenario::event_index(std::span<const int> outcomes,
                                  std::span<const int> settings) const {
  const int n = parties();
  if (static_cast<int>(outcomes.size()) != n || static_cast<int>(settings.size()) != n)
    throw InvalidArgument("event arity does not match party count");
  std::size_t x = 0;
  std::size_t a = 0;
  for (int k = 0; k < n; ++k) {
    if (settings[k] < 0 || settings[k] >= settings_[k])
      throw InvalidArgument("setting index out of range");
    if (outcomes[k] < 0 || outcomes[k] >= outcomes_)
      throw InvalidArgument("outcome index out of range");
    x = x * static_cast<std::size_t>(settings_[k]) + static_cast<std::size_t>(settings[k]);
    a = a * static_cast<std::size_t>(outcomes_) + static_cast<std::size_t>(outcomes[k]);
  }
  return x * outcome_tuples_ + a;
}

void Scenario::decode_event(std::size_t index, std::span<int> outcomes,
                            std::span<int> settings) const {
  const int n = parties();
  std::size_t a = index % outcome_tuples_;
  std::size_t x = index / outcome_tuples_;
  for (int k = n - 1; k >= 0; --k) {
    outcomes[k] = static_cast<int>(a % static_cast<std::size_t>(outcomes_));
    a /= static_cast<std::size_t>(outcomes_);
    settings[k] = static_cast<int>(x % static_cast<std::size_t>(settings_[k]));
    x /= static_cast<std::size_t>(settings_[k]);
  }
}

std::string Scenario::to_string() const {
  std::ostringstream os;
  os << "(" << parties() << ", [";
  for (std::size_t k = 0; k < settings_.size(); ++k) os << (k ? "," : "") << settings_[k];
  os << "], " << outcomes_ << ")";
  return os.str();
}

Scenario make_scenario(int n, int m, int d) {
  if (n < 1) throw InvalidArgument("party count must be positive");
  if (m < 1) throw InvalidArgument("setting count must be positive");
  if (d < 2) throw InvalidArgument("outcome count must be at least 2");
  return Scenario(std::vector<int>(static_cast<std::size_t>(n), m), d);
}

}  // namespace aqnbf
