#pragma once

#include <stdexcept>
#include <string>

namespace zermelo {

enum class ErrorCode {
  non_invertible,
  domain_exit,
  not_homothety,
  undefined_input,
  wind_too_strong,
  invalid_randers,
  invalid_input,
  no_interception,
  infeasible,
  non_convergence,
  parse_error,
  dimension_mismatch,
  io_error,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Carries the worst sample seen by the Lie-derivative test.
class NotHomothety : public Error {
 public:
  NotHomothety(const std::string& what, double worst_residual, double sigma_spread)
      : Error(ErrorCode::not_homothety, what),
        worst_residual_(worst_residual),
        sigma_spread_(sigma_spread) {}

  double worst_residual() const noexcept { return worst_residual_; }
  double sigma_spread() const noexcept { return sigma_spread_; }

 private:
  double worst_residual_;
  double sigma_spread_;
};

}  // namespace zermelo
