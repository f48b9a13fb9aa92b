#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace brinkmann {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the chart domain of a metric or field.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The metric is numerically degenerate at the evaluation point.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Malformed expression text. `offset` is the byte offset of the failure.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error("parse error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset),
        detail_(message) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t offset_;
  std::string detail_;
};

/// Identifier that is neither a declared coordinate nor a known function/constant.
class UnknownIdentifierError : public ParseError {
 public:
  UnknownIdentifierError(std::size_t offset, const std::string& name)
      : ParseError(offset, "unknown identifier '" + name + "'"), name_(name) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Runtime failure while evaluating an expression (division by zero, log of
/// a nonpositive number, ...). `offset` points at the offending node.
class EvalError : public Error {
 public:
  EvalError(std::size_t offset, const std::string& message)
      : Error("evaluation error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A spacetime document that does not satisfy the schema. `path` is a
/// JSON-pointer-like location ("/coefficients/H").
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& message)
      : Error("schema violation at " + path + ": " + message), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Parallel transport integration failed (step collapse).
class TransportError : public Error {
 public:
  TransportError(double parameter, const std::string& message)
      : Error(message + " (curve parameter " + std::to_string(parameter) + ")"),
        parameter_(parameter) {}

  double parameter() const noexcept { return parameter_; }

 private:
  double parameter_;
};

/// Unknown catalog entry or invalid catalog parameters.
class CatalogError : public Error {
 public:
  using Error::Error;
};

/// Deck normalization could not reach the fundamental domain with a short word.
class DeckError : public Error {
 public:
  using Error::Error;
};

}  // namespace brinkmann
