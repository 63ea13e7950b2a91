#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lagfront {

// Base of every error raised by the library. `name()` is the stable error
// identifier surfaced by the command line tool.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& message)
      : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define LAGFRONT_DEFINE_ERROR(Type)                                  \
  class Type : public Error {                                        \
   public:                                                           \
    explicit Type(const std::string& message) : Error(#Type, message) {} \
  }

LAGFRONT_DEFINE_ERROR(DomainError);
LAGFRONT_DEFINE_ERROR(SingularJacobian);
LAGFRONT_DEFINE_ERROR(MaxIterations);
LAGFRONT_DEFINE_ERROR(SeedNotOnCurve);
LAGFRONT_DEFINE_ERROR(RankDeficientSeed);
LAGFRONT_DEFINE_ERROR(NotOnSigmaStar);
LAGFRONT_DEFINE_ERROR(ChartFailure);
LAGFRONT_DEFINE_ERROR(DeltaNonEmptyForGraphLike);
LAGFRONT_DEFINE_ERROR(DegenerateMetric);
LAGFRONT_DEFINE_ERROR(BlowUp);
LAGFRONT_DEFINE_ERROR(UnknownGerm);
LAGFRONT_DEFINE_ERROR(NotSingularGerm);
LAGFRONT_DEFINE_ERROR(IoError);
LAGFRONT_DEFINE_ERROR(FormatError);

#undef LAGFRONT_DEFINE_ERROR

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& message)
      : Error("SyntaxError",
              "at byte " + std::to_string(offset) + ": " + message),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UndeclaredVariable : public Error {
 public:
  explicit UndeclaredVariable(std::string variable)
      : Error("UndeclaredVariable", variable), variable_(std::move(variable)) {}

  const std::string& variable() const noexcept { return variable_; }

 private:
  std::string variable_;
};

}  // namespace lagfront
