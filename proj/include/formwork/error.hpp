#pragma once

#include <stdexcept>
#include <string>

namespace formwork {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-range or inconsistent argument (bin size <= 0, k too large, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. line() is 0 when the position is unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Config / scene spec value rejected; key() names the offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string key, const std::string& what) : Error(what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// Model fitting could not produce a model (degenerate samples, rank-deficient covariance).
class FitError : public Error {
 public:
  using Error::Error;
};

// Result/reference labels could not be paired.
class PairingError : public Error {
 public:
  using Error::Error;
};

// A pipeline step failed; step() names it.
class PipelineError : public Error {
 public:
  PipelineError(std::string step, const std::string& what)
      : Error("step " + step + " failed: " + what), step_(std::move(step)) {}

  const std::string& step() const noexcept { return step_; }

 private:
  std::string step_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace formwork
