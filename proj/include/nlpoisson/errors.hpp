#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nlpoisson {

/// Evaluation left the domain of a primitive (ln, sqrt, division, singular kernel).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Syntax or semantic error in a problem definition, with a 1-based position.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Picard iteration blew up; carries the ||u_{m+1} - u_m||^(2) history.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}

  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// The contraction certificate did not admit the requested parameters.
class RefusedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlpoisson
