#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ansfd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its domain (eta = 0, h <= 0, K <= 0, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A slope estimate was requested from a window holding too few samples.
class WindowUnderflow : public Error {
 public:
  WindowUnderflow(std::size_t have, std::size_t need);
  std::size_t have() const noexcept { return have_; }
  std::size_t need() const noexcept { return need_; }

 private:
  std::size_t have_;
  std::size_t need_;
};

/// State vector dimensions disagree with the problem.
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// The solution left the representable range; carries the failing step.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(std::size_t step_index);
  DivergenceError(std::size_t step_index, const std::string& context);
  std::size_t step_index() const noexcept { return step_index_; }

 private:
  std::size_t step_index_;
};

/// A stability bracket does not straddle the boundary.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Malformed scheme string, grid string or config document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A problem name did not resolve in the catalog.
class UnknownProblem : public Error {
 public:
  using Error::Error;
};

}  // namespace ansfd
