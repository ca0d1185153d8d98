#pragma once

#include <stdexcept>
#include <string>

namespace netlqr {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of vectors/matrices handed to an operation do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A model failed validation and an operation refused to run on it.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A PD solve was singular or ill-conditioned beyond the cap.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Random model generation could not satisfy its constraints.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// A model is not in the structural form an operation requires.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Malformed or mismatched file artifact (bad format tag, hash mismatch, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

class ArtifactMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace netlqr
