#pragma once

#include <stdexcept>
#include <string>

namespace nlspec {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (bad size, negative epsilon, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// The state left the positive cone where the right-hand side is defined.
class PositivityError : public ContractError {
 public:
  PositivityError(const std::string& what, double min_value)
      : ContractError(what), min_value_(min_value) {}
  double min_value() const noexcept { return min_value_; }

 private:
  double min_value_;
};

/// A model or scenario constraint failed. `rule` names exactly one
/// validation rule; `field` is the offending field path.
class ValidationError : public Error {
 public:
  ValidationError(std::string rule, std::string field, const std::string& detail)
      : Error("validation rule '" + rule + "' failed for " + field + ": " + detail),
        rule_(std::move(rule)),
        field_(std::move(field)) {}
  const std::string& rule() const noexcept { return rule_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string rule_;
  std::string field_;
};

/// Malformed scenario text. Carries the byte offset reported by the parser.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Well-formed JSON that does not match the scenario schema.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& detail)
      : Error("schema violation at " + path + ": " + detail), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlspec
