#pragma once

#include <stdexcept>
#include <string>

namespace advaudio {

/// Base error for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// File / format problems (WAV parsing, config files, corpora).
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

/// Failures of the external transcriber (subprocess, HTTP, vocabulary).
class OracleError : public Error {
 public:
  explicit OracleError(const std::string& what) : Error(what) {}
};

}  // namespace advaudio
