#pragma once

#include <string>

#include "sfwm/sellmeier.hpp"

namespace sfwm {

enum class Axis { fast, slow };
enum class Orientation { even, odd };  // cos(l theta) / sin(l theta)

/// Step-index polarization-maintaining fiber. Core index follows n_co^2 = n_cl^2 + NA^2.
struct FiberSpec {
  double core_radius_um = 4.1;
  double numerical_aperture = 0.125;
  double length_m = 1.0;
  double birefringence = 0.0;  // n_slow - n_fast, wavelength independent
  SellmeierModel cladding = malitson_fused_silica();

  /// Throws std::invalid_argument on violated geometry invariants.
  void validate() const;

  double cladding_index(double lambda_um) const { return refractive_index(cladding, lambda_um); }
  double core_index(double lambda_um) const;
};

/// LP_{l,m} mode on a given polarization axis.
struct ModeId {
  int l = 0;
  int m = 1;
  Orientation orientation = Orientation::even;
  Axis axis = Axis::fast;

  /// Builds a mode id, forcing the orientation to even when l == 0.
  static ModeId lp(int l, int m, Orientation o = Orientation::even, Axis axis = Axis::fast);

  ModeId on(Axis a) const {
    ModeId copy = *this;
    copy.axis = a;
    return copy;
  }

  bool same_spatial_mode(const ModeId& other) const {
    return l == other.l && m == other.m && orientation == other.orientation;
  }

  friend bool operator==(const ModeId&, const ModeId&) = default;
};

/// Parses "LP01", "LP11e", "LP11o", "LP11" (even) or "LP(l,m[,even|odd|e|o])".
/// Throws std::invalid_argument naming the offending label.
ModeId parse_mode_label(const std::string& label, Axis axis = Axis::fast);

/// Inverse of parse_mode_label (axis is not encoded).
std::string mode_label(const ModeId& mode);

const char* axis_name(Axis a);

}  // namespace sfwm
