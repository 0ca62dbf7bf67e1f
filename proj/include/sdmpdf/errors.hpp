#pragma once

#include <stdexcept>
#include <string>

namespace sdmpdf {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A matrix that must be positive definite failed its Cholesky factorization,
// or an integrator state lost positivity beyond the accepted floor.
struct PositivityLoss : Error {
  double time = 0.0;
  double min_eigenvalue = 0.0;
  explicit PositivityLoss(const std::string& what, double t = 0.0, double mineig = 0.0)
      : Error(what), time(t), min_eigenvalue(mineig) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace sdmpdf
