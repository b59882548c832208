#pragma once

#include <stdexcept>
#include <string>

namespace hsvm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data that cannot be fitted: non-finite values, bad labels, schema
/// violations.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Only one class present in the labels.
class SingleClassData : public DataError {
 public:
  using DataError::DataError;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Rejected configuration (unknown key, bad value). The message names the key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class MaxPivotsExceeded : public SolverError {
 public:
  using SolverError::SolverError;
};

class MalformedProgram : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Every initial coefficient is zero, so no scaling parameter can bring an
/// effect back.
class EmptyInitial : public Error {
 public:
  using Error::Error;
};

void log_warning(const std::string& message);

}  // namespace hsvm
