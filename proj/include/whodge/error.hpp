#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace whodge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input; `field` names the offending parameter or config path.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& msg)
      : Error(field + ": " + msg), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedRealization : public Error {
 public:
  using Error::Error;
};

class PositivityViolation : public Error {
 public:
  PositivityViolation(std::vector<double> witness, double min_eig, const std::string& msg)
      : Error(msg), witness_(std::move(witness)), min_eig_(min_eig) {}
  const std::vector<double>& witness() const { return witness_; }
  double min_eig() const { return min_eig_; }

 private:
  std::vector<double> witness_;
  double min_eig_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, std::vector<double> best_residuals)
      : Error(msg), best_(std::move(best_residuals)) {}
  const std::vector<double>& best_residuals() const { return best_; }

 private:
  std::vector<double> best_;
};

}  // namespace whodge
