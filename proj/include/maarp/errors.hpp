#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace maarp {

// Bad arguments, malformed configs, contract violations detected on entry.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values or blow-ups detected while iterating; carries the step index.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::int64_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  std::int64_t iteration() const { return iteration_; }

 private:
  std::int64_t iteration_;
};

// Equilibrium-solver failures: no convergence, infeasible instance, box too small.
class OracleError : public std::runtime_error {
 public:
  explicit OracleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace maarp
