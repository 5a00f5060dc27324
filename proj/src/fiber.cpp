#include "sfwm/fiber.hpp"

#include <cctype>
#include <cmath>
#include <regex>
#include <stdexcept>

namespace sfwm {

void FiberSpec::validate() const {
  if (!(core_radius_um > 0.0)) throw std::invalid_argument("fiber: core_radius must be > 0");
  if (!(numerical_aperture > 0.0 && numerical_aperture < 1.0))
    throw std::invalid_argument("fiber: numerical_aperture must lie in (0, 1)");
  if (!(length_m > 0.0)) throw std::invalid_argument("fiber: length must be > 0");
  if (!(birefringence >= 0.0)) throw std::invalid_argument("fiber: birefringence must be >= 0");
  cladding.validate();
}

double FiberSpec::core_index(double lambda_um) const {
  const double ncl = cladding_index(lambda_um);
  return std::sqrt(ncl * ncl + numerical_aperture * numerical_aperture);
}

ModeId ModeId::lp(int l, int m, Orientation o, Axis axis) {
  if (l < 0) throw std::invalid_argument("LP mode: azimuthal order must be >= 0");
  if (m < 1) throw std::invalid_argument("LP mode: radial order must be >= 1");
  return ModeId{l, m, l == 0 ? Orientation::even : o, axis};
}

ModeId parse_mode_label(const std::string& label, Axis axis) {
  static const std::regex compact(R"(^\s*LP([0-9])([1-9])([eEoO]?)\s*$)");
  static const std::regex explicit_form(R"(^\s*LP\(\s*([0-9]+)\s*,\s*([0-9]+)\s*(?:,\s*(even|odd|e|o)\s*)?\)\s*$)",
                                        std::regex::icase);
  std::smatch match;
  std::string orient;
  int l = 0;
  int m = 0;
  if (std::regex_match(label, match, compact) || std::regex_match(label, match, explicit_form)) {
    l = std::stoi(match[1].str());
    m = std::stoi(match[2].str());
    orient = match[3].str();
  } else {
    throw std::invalid_argument("malformed mode label '" + label + "' (expected LP01, LP11e, LP11o or LP(l,m,even|odd))");
  }
  for (auto& ch : orient) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  const Orientation o = (orient == "o" || orient == "odd") ? Orientation::odd : Orientation::even;
  if (l == 0 && o == Orientation::odd) throw std::invalid_argument("mode label '" + label + "': LP0m has no odd orientation");
  try {
    return ModeId::lp(l, m, o, axis);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("mode label '" + label + "': " + e.what());
  }
}

std::string mode_label(const ModeId& mode) {
  const char* suffix = mode.l == 0 ? "" : (mode.orientation == Orientation::even ? "e" : "o");
  if (mode.l < 10 && mode.m < 10) return "LP" + std::to_string(mode.l) + std::to_string(mode.m) + suffix;
  return "LP(" + std::to_string(mode.l) + "," + std::to_string(mode.m) + (mode.l == 0 ? "" : std::string(",") + suffix) + ")";
}

const char* axis_name(Axis a) { return a == Axis::slow ? "slow" : "fast"; }

}  // namespace sfwm
