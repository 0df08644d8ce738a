#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mpfe {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
  SolverError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

struct InstabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mpfe
