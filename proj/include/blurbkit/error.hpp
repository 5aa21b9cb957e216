#pragma once

#include <stdexcept>
#include <string>

namespace blurbkit {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable/unwritable file.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents (vocab.txt, JSONL, CoNLL, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration (bad sizes, rates, flag combinations).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data violates an operation's precondition.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace blurbkit
