#pragma once

#include <stdexcept>
#include <string>

namespace polyobs {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Matrix/vector shapes or counts do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A model invariant is violated (singular descriptor, bad weights, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

// Thm2 requested on a system whose E-matrix varies across vertices.
class NonConstantEError : public ModelError {
 public:
  using ModelError::ModelError;
};

// The synthesis SDP has no feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Solver reported success but the certificate fails re-substitution,
// or a loaded certificate is internally inconsistent.
class CertificateError : public Error {
 public:
  using Error::Error;
};

// File or schema problem.
class IoError : public Error {
 public:
  using Error::Error;
};

// Scenario schedule problem (bad generator, dimension, horizon, ...).
class ScheduleError : public Error {
 public:
  using Error::Error;
};

}  // namespace polyobs
