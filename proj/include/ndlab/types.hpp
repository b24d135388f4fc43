#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Core>

namespace ndlab {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXd;
using ComplexDenseMatrix = Eigen::MatrixXcd;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Node-indexed data: `interior` follows DomainGrid::interior(), `boundary`
/// follows DomainGrid::boundary().
struct GridFunction {
  Vector interior;
  Vector boundary;
};

inline double sup_norm(const Vector& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }
inline double sup_norm(const ComplexVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

/// Cell-quadrature discrete L2 norm (h^2 * sum |v|^2)^(1/2).
inline double l2_norm(const Vector& v, double h) { return h * v.norm(); }

inline Vector positive_part(const Vector& v) { return v.cwiseMax(0.0); }

}  // namespace ndlab
