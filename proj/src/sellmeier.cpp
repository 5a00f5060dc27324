#include "sfwm/sellmeier.hpp"

#include <stdexcept>
#include <string>

#include "sfwm/errors.hpp"

namespace sfwm {

SellmeierModel malitson_fused_silica() {
  return SellmeierModel{{{0.6961663, 0.0684043 * 0.0684043},
                         {0.4079426, 0.1162414 * 0.1162414},
                         {0.8974794, 9.896161 * 9.896161}},
                        0.21,
                        3.71};
}

void SellmeierModel::validate() const {
  if (!(lambda_min_um > 0.0) || !(lambda_max_um > lambda_min_um))
    throw std::invalid_argument("sellmeier: valid range must satisfy 0 < min < max");
  for (const auto& t : terms) {
    const double pole = std::sqrt(std::abs(t.c_um2));
    if (t.c_um2 > 0.0 && pole >= lambda_min_um && pole <= lambda_max_um)
      throw std::invalid_argument("sellmeier: resonance at " + std::to_string(pole) + " um inside valid range");
  }
  constexpr int kSamples = 512;
  for (int k = 0; k <= kSamples; ++k) {
    const double lambda = lambda_min_um + (lambda_max_um - lambda_min_um) * k / kSamples;
    if (sellmeier_index_squared(*this, lambda) < 1.0)
      throw std::invalid_argument("sellmeier: n^2 < 1 at " + std::to_string(lambda) + " um");
  }
}

double refractive_index(const SellmeierModel& model, double lambda_um) {
  if (!model.in_range(lambda_um))
    throw RangeError("wavelength " + std::to_string(lambda_um) + " um outside Sellmeier range [" +
                     std::to_string(model.lambda_min_um) + ", " + std::to_string(model.lambda_max_um) + "]");
  return std::sqrt(sellmeier_index_squared(model, lambda_um));
}

}  // namespace sfwm
