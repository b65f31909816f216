#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace scg {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A coefficient or expression was evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
      : Error(what), offset_(offset), expected_(std::move(expected)) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(std::size_t offset, std::string name)
      : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset)),
        offset_(offset),
        name_(std::move(name)) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::size_t offset_;
  std::string name_;
};

class WindowTooSmall : public Error {
 public:
  using Error::Error;
};

class NewtonDivergence : public Error {
 public:
  NewtonDivergence(std::size_t time_index, double residual)
      : Error(message(time_index, residual)),
        time_index_(time_index),
        residual_(residual) {}
  std::size_t time_index() const noexcept { return time_index_; }
  double residual() const noexcept { return residual_; }

 private:
  static std::string message(std::size_t n, double residual) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "Newton iteration failed at time index %zu (residual %.3e)", n, residual);
    return buf;
  }

  std::size_t time_index_;
  double residual_;
};

class FixedPointStall : public Error {
 public:
  FixedPointStall(std::size_t time_index, double change)
      : Error("projection fixed point did not converge at time index " +
              std::to_string(time_index) + " (last change " + std::to_string(change) + ")"),
        time_index_(time_index) {}
  std::size_t time_index() const noexcept { return time_index_; }

 private:
  std::size_t time_index_;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class BoundaryBelowDomain : public Error {
 public:
  using Error::Error;
};

/// The equilibrium control cannot be built (action boundary missing or degenerate).
class PreconditionFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace scg
