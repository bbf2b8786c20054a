#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fhqr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Raised when a pivot column is numerically dependent on the basis built so far.
class RankDeficient : public Error {
 public:
  RankDeficient(std::size_t step, double residual_norm, const std::string& what)
      : Error(what), step_(step), residual_norm_(residual_norm) {}
  std::size_t step() const noexcept { return step_; }
  double residual_norm() const noexcept { return residual_norm_; }

 private:
  std::size_t step_;
  double residual_norm_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(double residual, const std::string& what)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  DecodeError(std::size_t bit_offset, const std::string& what)
      : Error(what + " (at bit offset " + std::to_string(bit_offset) + ")"),
        bit_offset_(bit_offset) {}
  std::size_t bit_offset() const noexcept { return bit_offset_; }

 private:
  std::size_t bit_offset_;
};

class InfeasibleBudget : public Error {
 public:
  using Error::Error;
};

class EqualizationError : public Error {
 public:
  EqualizationError(std::size_t subcarrier, const std::string& what)
      : Error(what), subcarrier_(subcarrier) {}
  std::size_t subcarrier() const noexcept { return subcarrier_; }

 private:
  std::size_t subcarrier_;
};

}  // namespace fhqr
