#pragma once

#include <stdexcept>
#include <string>

namespace lfp {

/// Broad failure category. The CLI maps these onto exit codes.
enum class ErrorKind {
  usage,    // bad arguments or configuration
  data,     // malformed input, failed lookups, invalid structures
  numeric,  // undefined statistics, optimizer failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::data, "invalid cell: " + what) {}
};

class DecodeError : public Error {
 public:
  explicit DecodeError(const std::string& what)
      : Error(ErrorKind::data, "undecodable genotype: " + what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class LookupError : public Error {
 public:
  explicit LookupError(const std::string& what)
      : Error(ErrorKind::data, what) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what)
      : Error(ErrorKind::data, what) {}
};

class SamplingError : public Error {
 public:
  explicit SamplingError(const std::string& what)
      : Error(ErrorKind::data, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::numeric, what) {}
};

}  // namespace lfp
