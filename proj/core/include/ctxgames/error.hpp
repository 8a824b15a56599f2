#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ctxgames {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of two operands disagree (d, K, J or a context index out of range).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An enumeration-based routine was asked to work on an instance beyond its size guard.
class GuardError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver stopped at its iteration cap without meeting the tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Malformed text input. Line numbers are 1-based; 0 means "whole document".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid run configuration; `field` is the dotted path of the offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace ctxgames
