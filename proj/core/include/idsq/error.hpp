#pragma once

#include <stdexcept>
#include <string>

namespace idsq {

// Base of every error thrown by the library. Catch this to handle all of them.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

// An enumeration or recursion limit was hit (oracle word count, DP degree,
// sign-vector search width, series length).
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// Matrix or block dimensions do not fit the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed in a way that indicates a defect, e.g. the
// Jacobi sweep limit was reached.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace idsq
