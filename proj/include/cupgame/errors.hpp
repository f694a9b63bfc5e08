#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace cupgame {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid GameConfig, strategy parameters or experiment document.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, std::string key = {})
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)), message_(what) {}
  const std::string& key() const noexcept { return key_; }
  const std::string& message() const noexcept { return message_; }
  /// Same error with `prefix.` prepended to the key.
  ConfigError under(const std::string& prefix) const {
    return ConfigError(message_, key_.empty() ? prefix : prefix + "." + key_);
  }

 private:
  std::string key_;
  std::string message_;
};

/// An adaptive-simulated filler paired with a randomized emptier, or similar.
class CapabilityMismatch : public Error {
 public:
  using Error::Error;
};

enum class Rule {
  budget_exceeded,
  per_cup_cap_exceeded,
  non_positive_placement,
  cup_out_of_range,
  illegal_empty,
  duplicate_cup,
  too_many_cups,
  fill_not_half_integral,
};

const char* rule_name(Rule rule) noexcept;

/// A move or emptier decision broke the game rules.
class RuleViolation : public Error {
 public:
  RuleViolation(Rule rule, const std::string& what, std::optional<std::uint64_t> step = std::nullopt)
      : Error(std::string(rule_name(rule)) + (step ? " at step " + std::to_string(*step) : std::string()) + ": " +
              what),
        rule_(rule),
        detail_(what),
        step_(step) {}

  Rule rule() const noexcept { return rule_; }
  const std::string& detail() const noexcept { return detail_; }
  std::optional<std::uint64_t> step() const noexcept { return step_; }

  RuleViolation at_step(std::uint64_t step) const { return RuleViolation(rule_, detail_, step); }

 private:
  Rule rule_;
  std::string detail_;
  std::optional<std::uint64_t> step_;
};

}  // namespace cupgame
