#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ncdist {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (shape mismatch, bad index, non-unitary matrix, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The photon-number cutoffs cannot hold the requested state within the tail tolerance.
/// `sufficient_cutoffs` carries per-mode cutoffs that would have been large enough, when known.
class TruncationTooSmall : public Error {
 public:
  TruncationTooSmall(const std::string& what, std::vector<int> sufficient_cutoffs = {})
      : Error(what), sufficient_cutoffs_(std::move(sufficient_cutoffs)) {}

  const std::vector<int>& sufficient_cutoffs() const noexcept { return sufficient_cutoffs_; }

 private:
  std::vector<int> sufficient_cutoffs_;
};

/// A numerical consistency check failed (non-PSD input, bound ordering violation, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A JSON state document does not conform to the schema. `pointer` is a JSON pointer to the offending node.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& pointer, const std::string& message)
      : Error(pointer + ": " + message), pointer_(pointer) {}

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace ncdist
