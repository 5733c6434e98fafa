#pragma once

#include <stdexcept>
#include <string>

namespace idalc {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent dataset files.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values, unknown keys, missing seeds.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A pipeline failure tagged with the phase it happened in.
class PhaseError : public Error {
 public:
  PhaseError(std::string phase, const std::string& what)
      : Error("[" + phase + "] " + what), phase_(std::move(phase)) {}

  const std::string& phase() const { return phase_; }

 private:
  std::string phase_;
};

}  // namespace idalc
