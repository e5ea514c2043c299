#pragma once

#include <stdexcept>
#include <string>

namespace cmtk {

// Base for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad arguments, bad configuration, missing files. CLI exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// Malformed input data (unparseable rows, truncated files). CLI exit code 1.
struct ParseError : Error {
  using Error::Error;
};

// Structurally valid input violating a contract (bad label, duplicate id).
struct ValidationError : Error {
  using Error::Error;
};

// Input file is missing a required column/field.
struct SchemaError : Error {
  using Error::Error;
};

// Persisted model carries an unsupported format version.
struct IncompatibleModelError : Error {
  using Error::Error;
};

}  // namespace cmtk
