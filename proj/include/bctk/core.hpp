#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bctk {

using Complex = std::complex<double>;

/// Bad input: violated precondition or malformed request. CLI exit code 2.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not certify its result. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  NumericError(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

/// File or stream failure. CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Verdict { Holds, Fails, Undetermined };

const char* to_string(Verdict v);

}  // namespace bctk
