#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace thinscan {

// Argument outside the mathematical domain of a function (non-finite input,
// negative interval, division by a zero distance).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A supporting curve that cannot provide a tangent frame.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// phi-weighted steering vector with zero norm.
class DegenerateSteeringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical stage could not produce a usable result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Violation {
  std::string field;
  std::string rule;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<Violation> violations)
      : std::runtime_error(summarize(violations)), violations_(std::move(violations)) {}
  explicit ConfigError(const std::string& message)
      : std::runtime_error(message), violations_{{"config", message}} {}

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& v) {
    std::string out = "invalid experiment config:";
    for (const auto& item : v) out += "\n  " + item.field + ": " + item.rule;
    return out;
  }
  std::vector<Violation> violations_;
};

}  // namespace thinscan
