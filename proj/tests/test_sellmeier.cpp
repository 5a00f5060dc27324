#include <doctest.h>

#include <cmath>

#include "sfwm/errors.hpp"
#include "sfwm/sellmeier.hpp"

using namespace sfwm;

// Reference indices evaluated with mpmath at 40 digits from the same three-term coefficients.
TEST_SUITE("sellmeier") {
  TEST_CASE("fused silica index matches high-precision reference") {
    const auto silica = malitson_fused_silica();
    CHECK(refractive_index(silica, 0.5) == doctest::Approx(1.4623264867003779).epsilon(1e-14));
    CHECK(refractive_index(silica, 1.064) == doctest::Approx(1.4496309898590633).epsilon(1e-14));
    CHECK(refractive_index(silica, 1.55) == doctest::Approx(1.4440236217032609).epsilon(1e-14));
    CHECK(refractive_index(silica, 0.83) == doctest::Approx(1.4528156462490813).epsilon(1e-14));
    CHECK(refractive_index(silica, 1.49) == doctest::Approx(1.4447353097220738).epsilon(1e-14));
  }

  TEST_CASE("range limits") {
    const auto silica = malitson_fused_silica();
    CHECK_NOTHROW(refractive_index(silica, 0.21));
    CHECK_NOTHROW(refractive_index(silica, 3.71));
    CHECK_THROWS_AS(refractive_index(silica, 0.2), RangeError);
    CHECK_THROWS_AS(refractive_index(silica, 4.0), RangeError);
  }

  TEST_CASE("normal dispersion across the visible and near infrared") {
    const auto silica = malitson_fused_silica();
    double prev = refractive_index(silica, 0.4);
    for (double l = 0.45; l <= 2.0; l += 0.05) {
      const double n = refractive_index(silica, l);
      CHECK(n < prev);
      prev = n;
    }
  }

  TEST_CASE("model validation") {
    SellmeierModel bad{{{0.5, 1.0}}, 0.5, 2.0};  // pole at 1 um inside the range
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    SellmeierModel inverted{{{0.5, 0.01}}, 2.0, 0.5};
    CHECK_THROWS_AS(inverted.validate(), std::invalid_argument);
    CHECK_NOTHROW(malitson_fused_silica().validate());
  }

  TEST_CASE("templated evaluation agrees in long double") {
    const auto silica = malitson_fused_silica();
    const long double n2 = sellmeier_index_squared<long double>(silica, 1.064L);
    CHECK(static_cast<double>(std::sqrt(n2)) == doctest::Approx(refractive_index(silica, 1.064)).epsilon(1e-15));
  }
}
