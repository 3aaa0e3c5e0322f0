#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace paracurv {

/// Base of every error raised by the library. Callers that only need a
/// diagnostic can catch this and print what().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function was evaluated outside its domain (sqrt/ln of a non-positive
/// value, division by zero, point outside a chart guard).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double offending)
      : Error(what), offending_(offending) {}
  double offending_value() const noexcept { return offending_; }

 private:
  double offending_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// contract/raise_lower called with a slot of the wrong kind.
class SlotError : public Error {
 public:
  using Error::Error;
};

class SingularMetric : public Error {
 public:
  using Error::Error;
};

class RankDeficientJacobian : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset, std::vector<std::string> expected)
      : Error(what), offset_(offset), expected_(std::move(expected)) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnknownCoordinate : public Error {
 public:
  UnknownCoordinate(const std::string& name, std::size_t offset)
      : Error("unknown coordinate '" + name + "' at offset " + std::to_string(offset)),
        name_(name),
        offset_(offset) {}
  const std::string& name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

class InvalidAlpha : public Error {
 public:
  using Error::Error;
};

/// An operation that needs a (2n+1)-dimensional paracontact structure got
/// something else.
class NotParacontact : public Error {
 public:
  using Error::Error;
};

class IsotropicVector : public Error {
 public:
  using Error::Error;
};

class IsotropicSection : public Error {
 public:
  using Error::Error;
};

class NotHorizontal : public Error {
 public:
  using Error::Error;
};

class SamplingExhausted : public Error {
 public:
  using Error::Error;
};

/// Wraps a failure while evaluating the structure at a sample point.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, std::vector<double> point)
      : Error(what), point_(std::move(point)) {}
  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

/// Invalid manifest content; field() names the offending JSON path.
class ManifestError : public Error {
 public:
  ManifestError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace paracurv
