#pragma once

#include <stdexcept>
#include <string>

namespace sfwm {

/// Wavelength or frequency outside the validity range of a material model.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A requested LP mode is not guided at the requested wavelength.
class ModeCutoffError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-physical argument (negative idler frequency, zero efficiency, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, double best_delta_n, double best_residual_nm)
      : std::runtime_error(what), best_delta_n_(best_delta_n), best_residual_nm_(best_residual_nm) {}

  double best_delta_n() const { return best_delta_n_; }
  double best_residual_nm() const { return best_residual_nm_; }

 private:
  double best_delta_n_;
  double best_residual_nm_;
};

}  // namespace sfwm
