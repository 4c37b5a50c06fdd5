#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace ciiq {

template <typename Scalar>
using PlaneT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// A 2D coefficient/pixel plane. Indexed (row, col) = (y, x).
using Plane = PlaneT<double>;

using BytePlane = Eigen::Array<unsigned char, Eigen::Dynamic, Eigen::Dynamic>;

/// Population standard deviation (divide by n) of any array expression.
template <typename Derived>
double population_stddev(const Eigen::ArrayBase<Derived>& a) {
  const double mu = a.mean();
  return std::sqrt((a.derived().template cast<double>() - mu).square().mean());
}

}  // namespace ciiq
