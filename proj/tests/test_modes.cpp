#include <doctest.h>

#include <cmath>

#include "sfwm/errors.hpp"
#include "sfwm/modes.hpp"
#include "sfwm/units.hpp"

using namespace sfwm;

namespace {

// x^2/2 [Z_l^2 - Z_{l-1} Z_{l+1}] is an antiderivative of x Z_l(x)^2 for Z = J and Z = K.
double lommel_j(int l, double x) {
  auto j = [](int n, double t) { return n < 0 ? -std::cyl_bessel_j(1, t) : std::cyl_bessel_j(n, t); };
  return 0.5 * x * x * (j(l, x) * j(l, x) - j(l - 1, x) * j(l + 1, x));
}
double lommel_k(int l, double x) {
  auto k = [](int n, double t) { return std::cyl_bessel_k(std::abs(n), t); };
  return 0.5 * x * x * (k(l, x) * k(l, x) - k(l - 1, x) * k(l + 1, x));
}

// Exact integral of R(r)^2 r dr over [0, extent * a], times the angular factor.
double analytic_norm_on_disc(const ModeSolution& s, double extent) {
  const double a = s.core_radius_um;
  const int l = s.mode.l;
  const double core = a * a / (s.u * s.u) * lommel_j(l, s.u);
  const double ratio = std::cyl_bessel_j(l, s.u) / std::cyl_bessel_k(l, s.w);
  const double clad = ratio * ratio * a * a / (s.w * s.w) * (lommel_k(l, extent * s.w) - lommel_k(l, s.w));
  return (core + clad) * (l == 0 ? 2.0 * kPi : kPi);
}

}  // namespace

TEST_SUITE("fibermodes") {
  // Values from mpmath at 40 digits.
  TEST_CASE("Bessel functions against tabulated values") {
    CHECK(std::cyl_bessel_j(0, 0.5) == doctest::Approx(0.9384698072408129).epsilon(1e-12));
    CHECK(std::cyl_bessel_j(1, 2.3) == doctest::Approx(0.53987253260431367).epsilon(1e-12));
    CHECK(std::cyl_bessel_j(2, 7.1) == doctest::Approx(-0.2919659511342514).epsilon(1e-12));
    CHECK(std::cyl_bessel_k(0, 0.3) == doctest::Approx(1.3724600605442974).epsilon(1e-12));
    CHECK(std::cyl_bessel_k(1, 1.7) == doctest::Approx(0.20936248820408247).epsilon(1e-12));
    CHECK(std::cyl_bessel_k(2, 4.2) == doctest::Approx(0.013659929987217175).epsilon(1e-12));
  }

  TEST_CASE("V number") {
    FiberSpec f;
    CHECK(v_number(f, 1.064) == doctest::Approx(3.03).epsilon(2e-3));
    CHECK(v_number(f, 1.49) == doctest::Approx(2.16).epsilon(2e-3));
    CHECK(v_number(f, 1.49) < 2.405);
    f.numerical_aperture = 0.0;
    CHECK(v_number(f, 1.064) == 0.0);
  }

  // b from the textbook form u J_{l+1}/J_l = w K_{l+1}/K_l, solved with mpmath findroot.
  TEST_CASE("normalized propagation constant matches independent root solve") {
    CHECK(*lp_b(0, 1, 2.0) == doctest::Approx(0.41616339265497246).epsilon(1e-10));
    CHECK(*lp_b(0, 1, 3.0) == doctest::Approx(0.65147088617829192).epsilon(1e-10));
    CHECK(*lp_b(1, 1, 3.0) == doctest::Approx(0.17851703148951017).epsilon(1e-10));
    CHECK(*lp_b(1, 1, 4.0) == doctest::Approx(0.44006294742893237).epsilon(1e-10));
    CHECK(*lp_b(2, 1, 4.0) == doctest::Approx(0.047236941912439201).epsilon(1e-9));
    CHECK(*lp_b(0, 2, 4.0) == doctest::Approx(0.0044594812777635233).epsilon(1e-8));
    const double u = 3.0 * std::sqrt(1.0 - *lp_b(1, 1, 3.0));
    CHECK(std::abs(lp_characteristic(1, u, 3.0)) < 1e-9);
    CHECK(lp_roots(0, 2.0).front() == doctest::Approx(1.5281840299453826).epsilon(1e-10));
  }

  TEST_CASE("cutoffs") {
    CHECK_FALSE(lp_b(1, 1, 2.40).has_value());
    CHECK(lp_b(1, 1, 2.41).has_value());
    CHECK_FALSE(lp_b(2, 1, 3.83).has_value());
    CHECK(lp_b(2, 1, 3.84).has_value());
    CHECK_FALSE(lp_b(0, 2, 3.83).has_value());
    // l = 0 modes leave cutoff with w ~ exp(-c / (V - Vc)), so step clear of it.
    CHECK(lp_b(0, 2, 3.90).has_value());
  }

  TEST_CASE("mode content of the default fiber") {
    FiberSpec f;
    auto labels = [&](double um) {
      std::vector<std::string> out;
      for (const auto& m : solve_modes(f, um)) out.push_back(mode_label(m.mode));
      return out;
    };
    CHECK(labels(1.064) == std::vector<std::string>{"LP01", "LP11e", "LP11o"});
    CHECK(labels(1.49) == std::vector<std::string>{"LP01"});
    CHECK(labels(1.43) == std::vector<std::string>{"LP01"});
  }

  TEST_CASE("weak guidance limit keeps LP01 near the cladding index") {
    FiberSpec f;
    f.numerical_aperture = 1e-4;
    const auto modes = solve_modes(f, 1.064);
    REQUIRE(modes.size() == 1);
    CHECK(modes[0].mode == ModeId::lp(0, 1));
    CHECK(modes[0].n_eff - f.cladding_index(1.064) >= 0.0);
    CHECK(modes[0].n_eff - f.cladding_index(1.064) < 1e-8);
  }

  TEST_CASE("solution invariants across the band") {
    FiberSpec f;
    std::size_t prev_count = 100;
    for (double um = 0.8; um <= 1.6001; um += 0.02) {
      const auto modes = solve_modes(f, um);
      CHECK(modes.size() <= prev_count);
      prev_count = modes.size();
      CHECK(modes.front().mode == ModeId::lp(0, 1));
      for (const auto& m : modes) {
        CHECK(m.u * m.u + m.w * m.w == doctest::Approx(m.v * m.v).epsilon(1e-9));
        CHECK(m.n_eff > f.cladding_index(um));
        CHECK(m.n_eff < f.core_index(um));
      }
      for (std::size_t k = 1; k < modes.size(); ++k) CHECK(modes[k].n_eff <= modes[k - 1].n_eff);
    }
  }

  TEST_CASE("unguided mode raises cutoff error") {
    FiberSpec f;
    CHECK_THROWS_AS(solve_mode(f, ModeId::lp(1, 1), 1.49), ModeCutoffError);
    CHECK_THROWS_AS(solve_mode(f, ModeId::lp(0, 2), 1.064), ModeCutoffError);
  }

  TEST_CASE("profiles") {
    FiberSpec f;
    const auto lp01 = solve_mode(f, ModeId::lp(0, 1), 1.064);
    const double centre = mode_profile(lp01, 0.0, 0.0);
    for (double r = 0.1; r < 16.0; r += 0.37)
      for (double th : {0.0, 1.0, 2.5}) CHECK(mode_profile(lp01, r, th) < centre);
    CHECK(mode_profile(lp01, 2.0, 0.3) == doctest::Approx(mode_profile(lp01, 2.0, 2.1)));

    const auto lp11 = solve_mode(f, ModeId::lp(1, 1, Orientation::even), 1.064);
    for (double r = 0.0; r < 16.0; r += 0.5) CHECK(std::abs(mode_profile(lp11, r, kPi / 2)) < 1e-12);
  }

  TEST_CASE("unit normalization on the grid and against the exact disc integral") {
    FiberSpec f;
    for (double um : {0.83, 1.064, 1.49}) {
      for (const auto& m : solve_modes(f, um)) {
        CHECK(profile_norm_on_grid(m) == doctest::Approx(1.0).epsilon(1e-6));
        // midpoint rule, 400 radial points: error ~ (dr / a)^2
        const double exact = analytic_norm_on_disc(m, m.grid.extent_in_core_radii);
        CHECK(1.0 / (m.norm * m.norm) == doctest::Approx(exact).epsilon(1e-4));
      }
    }
    const auto fine = solve_mode(f, ModeId::lp(1, 1), 1.064, PolarGrid{3200, 64, 4.0});
    CHECK(1.0 / (fine.norm * fine.norm) == doctest::Approx(analytic_norm_on_disc(fine, 4.0)).epsilon(1e-6));
  }

  TEST_CASE("azimuthal selection") {
    const auto lp01 = ModeId::lp(0, 1);
    const auto lp11e = ModeId::lp(1, 1, Orientation::even);
    const auto lp11o = ModeId::lp(1, 1, Orientation::odd);
    const auto lp21e = ModeId::lp(2, 1, Orientation::even);
    CHECK(azimuthal_selection(lp01, lp01, lp01, lp01));
    CHECK_FALSE(azimuthal_selection(lp01, lp01, lp11e, lp01));
    CHECK(azimuthal_selection(lp11e, lp01, lp11e, lp01));
    CHECK_FALSE(azimuthal_selection(lp11e, lp01, lp11o, lp01));
    CHECK(azimuthal_selection(lp11o, lp11o, lp01, lp01));
    CHECK(azimuthal_selection(lp11e, lp11e, lp21e, lp01));  // cos^2 cos 2t
    CHECK_FALSE(azimuthal_selection(lp11e, lp11o, lp21e, lp01));
  }

  // Reference overlaps: mpmath quad over the infinite plane with the mpmath-solved profiles.
  TEST_CASE("overlap integrals") {
    FiberSpec f;
    const auto p = solve_mode(f, ModeId::lp(0, 1), 1.064);
    const auto s = solve_mode(f, ModeId::lp(0, 1), 0.830);
    const auto i = solve_mode(f, ModeId::lp(0, 1), 1.4817449664430521);
    const auto ov1 = overlap_integral(p, p, s, i);
    CHECK_FALSE(ov1.forbidden);
    CHECK(ov1.value == doctest::Approx(0.0189358018816).epsilon(1e-4));

    const auto p11 = solve_mode(f, ModeId::lp(1, 1, Orientation::even), 1.064);
    const auto s11 = solve_mode(f, ModeId::lp(1, 1, Orientation::even), 0.8489032699023597);
    const auto i2 = solve_mode(f, ModeId::lp(0, 1), 1.425092709605685);
    const auto ov2 = overlap_integral(p11, p, s11, i2);
    CHECK(ov2.value == doctest::Approx(0.0119504326711).epsilon(1e-4));
    CHECK(ov1.value > ov2.value);

    SUBCASE("permutation symmetry") {
      CHECK(overlap_integral(s11, i2, p11, p).value == doctest::Approx(ov2.value).epsilon(1e-12));
      CHECK(overlap_integral(i2, p11, p, s11).value == doctest::Approx(ov2.value).epsilon(1e-12));
    }
    SUBCASE("forbidden quadruple") {
      const auto r = overlap_integral(p, p, s11, i2);
      CHECK(r.forbidden);
      CHECK(r.value == 0.0);
    }
    SUBCASE("grid convergence") {
      PolarGrid fine{800, 512, 4.0};
      const auto pf = solve_mode(f, ModeId::lp(1, 1, Orientation::even), 1.064, fine);
      const auto qf = solve_mode(f, ModeId::lp(0, 1), 1.064, fine);
      const auto sf = solve_mode(f, ModeId::lp(1, 1, Orientation::even), 0.8489032699023597, fine);
      const auto if_ = solve_mode(f, ModeId::lp(0, 1), 1.425092709605685, fine);
      CHECK(overlap_integral(pf, qf, sf, if_).value == doctest::Approx(ov2.value).epsilon(1e-4));
    }
    SUBCASE("larger core dilutes the overlap") {
      FiberSpec wide = f;
      wide.core_radius_um *= 2.0;
      const auto w = solve_mode(wide, ModeId::lp(0, 1), 1.064);
      const auto same = overlap_integral(p, p, p, p);
      CHECK(same.value > 0.0);
      CHECK(overlap_integral(w, w, w, w).value < same.value);
    }
  }

  TEST_CASE("mode labels") {
    CHECK(parse_mode_label("LP01") == ModeId::lp(0, 1));
    CHECK(parse_mode_label("LP11o") == ModeId::lp(1, 1, Orientation::odd));
    CHECK(parse_mode_label("LP(2,1,odd)") == ModeId::lp(2, 1, Orientation::odd));
    CHECK_THROWS_AS(parse_mode_label("LP1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_mode_label("XP01"), std::invalid_argument);
    CHECK_THROWS_AS(parse_mode_label("LP00"), std::invalid_argument);
    for (const char* s : {"LP01", "LP11e", "LP11o", "LP21e", "LP02"}) CHECK(mode_label(parse_mode_label(s)) == s);
  }
}
