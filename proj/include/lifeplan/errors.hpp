#pragma once

#include <stdexcept>
#include <string>

namespace lifeplan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or missing input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Covariance matrix that cannot be factored, or whose condition estimate exceeds the limit.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// A problem instance whose preconditions rule out a meaningful answer
/// (tangency off the efficient branch, unattainable target, infeasible plan).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace lifeplan
