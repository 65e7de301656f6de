#pragma once

#include <stdexcept>
#include <string>

namespace bendbench {

/// Raised when a point lands on (or within 1e-30 squared magnitude of) a Moebius pole.
class SingularPoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An objective could not be assembled from its description.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonPositiveInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace bendbench
