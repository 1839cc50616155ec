#pragma once

#include <stdexcept>
#include <string>

namespace taxotag {

// Base class for all library errors. The CLI maps subtypes onto exit codes:
// validation/config problems exit 1, runtime failures exit 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input validation (exit code 1).
struct MalformedPathError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct DuplicateIdError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct LengthMismatchError : Error { using Error::Error; };

// Runtime failures (exit code 2).
struct EncoderFailure : Error { using Error::Error; };
struct DimensionMismatchError : Error { using Error::Error; };
struct KTooLargeError : Error { using Error::Error; };
struct EmptyIndexError : Error { using Error::Error; };
struct EmptyBatchError : Error { using Error::Error; };
struct EmptyNegativesError : Error { using Error::Error; };
struct NonFiniteInputError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace taxotag
