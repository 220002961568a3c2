#pragma once

#include <stdexcept>
#include <string>

namespace screenwave {

// Every failure raised by the library derives from Error so front-ends can
// map categories to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// kappa at or above the first transverse cutoff: more than one mode propagates.
class UnsupportedRegime : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, int line, const std::string& what)
      : Error(format(key, line, what)), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, int line,
                            const std::string& what) {
    std::string msg = "config error";
    if (!key.empty()) msg += " at key '" + key + "'";
    if (line > 0) msg += " (line " + std::to_string(line) + ")";
    return msg + ": " + what;
  }

  std::string key_;
  int line_ = 0;
};

}  // namespace screenwave
