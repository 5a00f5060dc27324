#pragma once

#include <cmath>
#include <vector>

namespace sfwm {

struct SellmeierTerm {
  double b;       // dimensionless oscillator strength
  double c_um2;   // resonance wavelength squared, um^2
};

/// n^2(lambda) = 1 + sum_i B_i lambda^2 / (lambda^2 - C_i), lambda in micrometres.
struct SellmeierModel {
  std::vector<SellmeierTerm> terms;
  double lambda_min_um = 0.0;
  double lambda_max_um = 0.0;

  bool in_range(double lambda_um) const { return lambda_um >= lambda_min_um && lambda_um <= lambda_max_um; }

  /// Throws std::invalid_argument when the range is empty, a resonance falls inside it,
  /// or n^2 drops below 1 anywhere on a dense sample of the range.
  void validate() const;
};

/// Malitson (1965) three-term fit for fused silica, valid 0.21-3.71 um.
SellmeierModel malitson_fused_silica();

/// Unchecked Sellmeier sum; the scalar type is a template parameter so the same
/// expression can be evaluated in extended precision.
template <typename Scalar>
Scalar sellmeier_index_squared(const SellmeierModel& model, Scalar lambda_um) {
  const Scalar l2 = lambda_um * lambda_um;
  Scalar n2{1};
  for (const auto& t : model.terms) n2 += Scalar(t.b) * l2 / (l2 - Scalar(t.c_um2));
  return n2;
}

/// Refractive index; throws RangeError outside the model's valid range.
double refractive_index(const SellmeierModel& model, double lambda_um);

}  // namespace sfwm
