#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sfwm {

/// Chebyshev interpolant of a smooth function on [lo, hi], sampled at first-kind nodes.
template <typename Scalar = double>
class ChebyshevInterpolant {
 public:
  ChebyshevInterpolant() = default;

  template <typename Fn>
  ChebyshevInterpolant(Fn&& fn, Scalar lo, Scalar hi, int nodes) : lo_(lo), hi_(hi), coeffs_(nodes) {
    if (!(hi > lo) || nodes < 2) throw std::invalid_argument("chebyshev: need hi > lo and >= 2 nodes");
    const Scalar pi = std::numbers::pi_v<Scalar>;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values(nodes);
    for (int k = 0; k < nodes; ++k) {
      const Scalar x = std::cos(pi * (k + Scalar(0.5)) / nodes);
      values(k) = fn(from_unit(x));
    }
    for (int j = 0; j < nodes; ++j) {
      Scalar acc{0};
      for (int k = 0; k < nodes; ++k) acc += values(k) * std::cos(pi * j * (k + Scalar(0.5)) / nodes);
      coeffs_(j) = acc * Scalar(2) / nodes;
    }
    coeffs_(0) /= Scalar(2);
  }

  Scalar lo() const { return lo_; }
  Scalar hi() const { return hi_; }
  bool contains(Scalar x) const { return x >= lo_ && x <= hi_; }

  /// Clenshaw recurrence; no range check.
  Scalar operator()(Scalar x) const {
    const Scalar t = (Scalar(2) * x - (lo_ + hi_)) / (hi_ - lo_);
    Scalar b1{0}, b2{0};
    for (Eigen::Index j = coeffs_.size() - 1; j >= 1; --j) {
      const Scalar b0 = Scalar(2) * t * b1 - b2 + coeffs_(j);
      b2 = b1;
      b1 = b0;
    }
    return t * b1 - b2 + coeffs_(0);
  }

  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& coefficients() const { return coeffs_; }

 private:
  Scalar from_unit(Scalar x) const { return Scalar(0.5) * (lo_ + hi_) + Scalar(0.5) * (hi_ - lo_) * x; }

  Scalar lo_{0};
  Scalar hi_{1};
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coeffs_;
};

}  // namespace sfwm
