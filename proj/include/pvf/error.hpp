#pragma once

#include <stdexcept>
#include <string>

namespace pvf {

/// Bad input or violated precondition. The CLI reports these with exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Intervention Efficiency is undefined on a set without positives.
class NoPositivesError : public ValidationError {
 public:
  NoPositivesError() : ValidationError("no positives in evaluation set") {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace pvf
