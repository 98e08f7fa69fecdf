#pragma once

#include <stdexcept>
#include <string>

namespace batforge {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files: embeddings, lexicons, datasets, checkpoints.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or arguments, detected before any work is done.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace batforge
