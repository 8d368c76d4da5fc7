// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <stdexcept>
#include <string>

namespace adscharge {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimensionError : public Error {
  using Error::Error;
};
class ShapeError : public Error {
  using Error::Error;
};
class DomainError : public Error {
  using Error::Error;
};
class NormalizationError : public Error {
  using Error::Error;
};
class StencilError : public Error {
  using Error::Error;
};
class DegenerateMetricError : public Error {
  using Error::Error;
};
class ModelDomainError : public Error {
  using Error::Error;
};
class ConsistencyError : public Error {
  using Error::Error;
};
class HypothesisError : public Error {
  using Error::Error;
};
class ConfigError : public Error {
  using Error::Error;
};

/// Raised when a quadrature sample is not finite; carries the node index.
class PropagationError : public Error {
 public:
  PropagationError(const std::string& what, std::size_t node)
      : Error(what), node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

}  // namespace adscharge
