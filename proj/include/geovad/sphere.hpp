#pragma once

#include <cmath>
#include <vector>

#include "geovad/errors.hpp"
#include "geovad/types.hpp"

// Riemannian primitives on the unit hypersphere S^{D-1}. Points are plain
// Eigen vectors with unit Euclidean norm (within 1e-9); tangent vectors at a
// base point p are vectors orthogonal to p. Free functions accept arbitrary
// dense expressions and evaluate to plain column vectors of the same scalar.

namespace geovad::sphere {

// Tolerances referenced throughout the module. Overridable per call where a
// function takes them as defaulted arguments.
inline constexpr double kZeroNormTol = 1e-12;
inline constexpr double kAntipodalTol = 1e-12;
inline constexpr double kSmallAngleTol = 1e-8;
inline constexpr double kAtBaseTol = 1e-9;
inline constexpr double kSlerpDegenerateSin = 1e-6;
inline constexpr double kHemisphereMargin = 1e-6;

template <class Scalar>
Scalar clamp_unit(Scalar c) {
  return c < Scalar(-1) ? Scalar(-1) : (c > Scalar(1) ? Scalar(1) : c);
}

template <class Derived>
VecT<typename Derived::Scalar> normalize(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar n = v.norm();
  if (n < Scalar(kZeroNormTol)) throw ZeroVectorError("normalize: vector norm below 1e-12");
  return v / n;
}

template <class DA, class DB>
typename DA::Scalar geodesic_distance(const Eigen::MatrixBase<DA>& p,
                                      const Eigen::MatrixBase<DB>& q) {
  return std::acos(clamp_unit(p.dot(q)));
}

// Log_p(x): tangent vector at base whose geodesic reaches x at unit time.
// Falls back to the Euclidean difference below the small-angle threshold.
template <class DA, class DB>
VecT<typename DA::Scalar> log_map(const Eigen::MatrixBase<DA>& base,
                                  const Eigen::MatrixBase<DB>& x) {
  using Scalar = typename DA::Scalar;
  const Scalar c = base.dot(x);
  if (c < Scalar(-1) + Scalar(kAntipodalTol))
    throw AntipodalPointError("log_map: target is antipodal to the base point");
  const Scalar cc = clamp_unit(c);
  const Scalar theta = std::acos(cc);
  if (theta < Scalar(kSmallAngleTol)) return x - base;
  return (theta / std::sin(theta)) * (x - cc * base);
}

// Exp_p(v): point reached by the geodesic from base with initial velocity v.
// Requires v orthogonal to base (tangent-space membership).
template <class DA, class DB>
VecT<typename DA::Scalar> exp_map(const Eigen::MatrixBase<DA>& base,
                                  const Eigen::MatrixBase<DB>& v) {
  using Scalar = typename DA::Scalar;
  const Scalar n = v.norm();
  if (n < Scalar(kZeroNormTol)) return base;
  return std::cos(n) * base + (std::sin(n) / n) * v;
}

template <class DA, class DB>
VecT<typename DA::Scalar> lerp_normalized(const Eigen::MatrixBase<DA>& p,
                                          const Eigen::MatrixBase<DB>& q,
                                          typename DA::Scalar t) {
  using Scalar = typename DA::Scalar;
  VecT<Scalar> blend = (Scalar(1) - t) * p + t * q;
  const Scalar n = blend.norm();
  if (n < Scalar(kZeroNormTol))
    throw ZeroVectorError("lerp_normalized: blend vanished (antipodal endpoints?)");
  return blend / n;
}

// Constant-angular-velocity interpolation along the connecting great circle.
// Near-coincident endpoints switch to normalized linear interpolation; the
// geodesic is not unique for antipodal endpoints.
template <class DA, class DB>
VecT<typename DA::Scalar> slerp(const Eigen::MatrixBase<DA>& p,
                                const Eigen::MatrixBase<DB>& q,
                                typename DA::Scalar t) {
  using Scalar = typename DA::Scalar;
  if (t == Scalar(0)) return p;
  if (t == Scalar(1)) return q;
  const Scalar omega = geodesic_distance(p, q);
  if (Scalar(M_PI) - omega < Scalar(1e-9))
    throw AntipodalPointError("slerp: endpoints antipodal, geodesic not unique");
  const Scalar s = std::sin(omega);
  if (s < Scalar(kSlerpDegenerateSin)) return lerp_normalized(p, q, t);
  return (std::sin((Scalar(1) - t) * omega) / s) * p + (std::sin(t * omega) / s) * q;
}

// Spherical centering: direction of the log map at the base point. Discards
// the radial distance and keeps only the direction relative to the base.
// The at-base test uses the log-map norm (the geodesic distance) rather than
// arccos, whose rounding floor near 1 sits above the tolerance.
template <class DA, class DB>
VecT<typename DA::Scalar> center(const Eigen::MatrixBase<DA>& base,
                                 const Eigen::MatrixBase<DB>& x) {
  const VecT<typename DA::Scalar> delta = log_map(base, x);
  const typename DA::Scalar n = delta.norm();
  if (n < typename DA::Scalar(kAtBaseTol))
    throw AtBasePointError("center: point coincides with the base, direction undefined");
  return delta / n;
}

struct FrechetOptions {
  int t_max = 5;
  double eps = 1e-7;
  double hemisphere_margin = kHemisphereMargin;
};

struct FrechetResult {
  VecX mean;
  int iterations = 0;            // exp-map updates performed
  double final_gradient_norm = 0.0;
  std::vector<double> objectives;  // mean squared geodesic distance per visited iterate
};

// Karcher iteration: initialize at the normalized Euclidean mean, take full
// Riemannian gradient steps (eta = 1) until the gradient norm drops below eps
// or t_max updates have been made. Points one sample per row. Requires all
// points strictly inside the open hemisphere around the initialization.
FrechetResult frechet_mean(const MatX& points, const FrechetOptions& opts = {});

FrechetResult frechet_mean(const std::vector<VecX>& points, const FrechetOptions& opts = {});

}  // namespace geovad::sphere
