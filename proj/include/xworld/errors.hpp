#pragma once

#include <stdexcept>
#include <string>

namespace xworld {

/// Base of every domain error raised by the library.
class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// Malformed model text, or a model that fails validation.
class ModelError : public Error {
 public:
    using Error::Error;
};

/// A query that names unknown variables or violates a precondition.
class QueryError : public Error {
 public:
    using Error::Error;
};

/// Exact-inference failures: zero-probability evidence, positivity, inadmissible sets.
class InferenceError : public Error {
 public:
    using Error::Error;
};

/// The exogenous state space is larger than the enumeration cap.
class CapExceeded : public Error {
 public:
    using Error::Error;
};

}  // namespace xworld
