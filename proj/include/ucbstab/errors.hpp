#ifndef UCBSTAB_ERRORS_HPP_
#define UCBSTAB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ucbstab {

/// A caller broke a documented precondition (e.g. querying an index before
/// every arm has been pulled once).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An argument lies outside the mathematical domain of the function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A sample has zero spread where a positive variance is required.
class DegenerateSample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment or instance configuration. `key()` names the offending
/// config entry, e.g. "instance.horizon".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string &message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}

  const std::string &key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// A numerical routine failed to meet its own postcondition.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ucbstab

#endif  // UCBSTAB_ERRORS_HPP_
