#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcalc {

/// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad expression text, bad JSON, unreadable files.
/// The CLI maps these to exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public InputError {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : InputError(what + " at position " + std::to_string(position)),
        position_(position) {}

  /// 1-based character offset; one past the end for premature end of input.
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UndeclaredVariable : public InputError {
 public:
  explicit UndeclaredVariable(std::string name)
      : InputError("undeclared variable '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// A mathematical hypothesis or precondition does not hold for the data.
/// The CLI maps these to exit code 2.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Evaluation hit log(x <= 0), division by exact zero, and the like.
class DomainError : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

/// Some tail samples leave the declared compact set.
class CompactnessError : public HypothesisError {
 public:
  CompactnessError(const std::string& what, std::vector<std::size_t> samples)
      : HypothesisError(what + format_samples(samples)), samples_(std::move(samples)) {}
  const std::vector<std::size_t>& samples() const noexcept { return samples_; }

 private:
  static std::string format_samples(const std::vector<std::size_t>& s) {
    std::string out = " (offending samples:";
    for (std::size_t i = 0; i < s.size() && i < 8; ++i) out += " " + std::to_string(s[i]);
    if (s.size() > 8) out += " ...";
    return out + ")";
  }
  std::vector<std::size_t> samples_;
};

class IntegrabilityError : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class PerturbationTooLarge : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class DivergenceRisk : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class BoundDegenerate : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

}  // namespace mcalc
