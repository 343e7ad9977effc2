#pragma once

#include <stdexcept>

namespace rankpi {

/// Malformed or inconsistent input data (dataset files, label lists, model files).
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A model file that cannot be loaded: wrong magic, wrong version, truncation, bad checksum.
class ModelFormatError : public DataError {
  public:
    using DataError::DataError;
};

/// Non-finite values during optimization, usually a malformed Gram matrix.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace rankpi
