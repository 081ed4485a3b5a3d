#pragma once

#include <stdexcept>
#include <string>

namespace bifurc {

/// Bad or inconsistent run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative solver failed to converge (CLI exit code 3).
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Quadrature resolution guard tripped (CLI exit code 4).
struct QuadratureError : std::runtime_error {
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bifurc
