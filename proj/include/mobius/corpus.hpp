#pragma once

// Bundled example curves and domains used by the CLI, tests and benchmarks.

#include "mobius/curve.hpp"
#include "mobius/domain.hpp"

namespace mobius::corpus {

inline ClosedCurve circle2(double radius = 1.0, Vec2 center = {0, 0}) {
  return ClosedCurve(2, FourierSeries(center.x, {radius}, {0}),
                     FourierSeries(center.y, {0}, {radius}));
}

inline ClosedCurve ellipse2(double a = 2.0, double b = 1.0, Vec2 center = {0, 0}) {
  return ClosedCurve(2, FourierSeries(center.x, {a}, {0}),
                     FourierSeries(center.y, {0}, {b}));
}

// Circle of radius `radius` centered at `center`, in the plane orthogonal to
// `normal`.
inline ClosedCurve circle3(double radius = 1.0, Vec3 center = {0, 0, 0},
                           Vec3 normal = {0, 0, 1}) {
  Vec3 n = normal / norm(normal);
  Vec3 up = std::abs(n.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  Vec3 e1 = cross(up, n);
  e1 = e1 / norm(e1);
  Vec3 e2 = cross(n, e1);
  return ClosedCurve(3,
                     FourierSeries(center.x, {radius * e1.x}, {radius * e2.x}),
                     FourierSeries(center.y, {radius * e1.y}, {radius * e2.y}),
                     FourierSeries(center.z, {radius * e1.z}, {radius * e2.z}));
}

// (2,3) torus knot ((2+cos 3t)cos 2t, (2+cos 3t)sin 2t, sin 3t); positive
// curvature everywhere, so the parallel-curve route applies.
inline ClosedCurve trefoil() {
  FourierSeries x(0, {0.5, 2, 0, 0, 0.5}, {0, 0, 0, 0, 0});
  FourierSeries y(0, {0, 0, 0, 0, 0}, {-0.5, 2, 0, 0, 0.5});
  FourierSeries z(0, {0, 0, 0, 0, 0}, {0, 0, 1, 0, 0});
  return ClosedCurve(3, x, y, z);
}

inline ClosedCurve mirror_z(const ClosedCurve& k) {
  Mat3 m;
  m.m = {1, 0, 0, 0, 1, 0, 0, 0, -1};
  return k.transformed(m, {0, 0, 0});
}

// Hopf-linked pair: unit circles in orthogonal planes through each other's
// centers.
inline std::pair<ClosedCurve, ClosedCurve> hopf_pair() {
  return {circle3(1.0, {0, 0, 0}, {0, 0, 1}), circle3(1.0, {1, 0, 0}, {0, 1, 0})};
}

// Coaxial unit circles in parallel planes at the given separation.
inline std::pair<ClosedCurve, ClosedCurve> coaxial_pair(double separation = 2.0) {
  return {circle3(1.0, {0, 0, 0}, {0, 0, 1}),
          circle3(1.0, {0, 0, separation}, {0, 0, 1})};
}

// Auxiliary circle of radius rho through the z-axis (in the xz-plane,
// centered at (rho, 0, 0)); converges to the z-axis line near the origin as
// rho grows.
inline ClosedCurve zaxis_proxy(double rho) {
  return circle3(rho, {rho, 0, 0}, {0, 1, 0});
}

inline PlanarDomain disk(double radius = 1.0, Vec2 center = {0, 0}) {
  return PlanarDomain(circle2(radius, center));
}

inline PlanarDomain ellipse_domain(double a = 2.0, double b = 1.0) {
  return PlanarDomain(ellipse2(a, b));
}

inline PlanarDomain annulus(double r_in = 1.0, double r_out = 4.0) {
  return PlanarDomain(circle2(r_out), {circle2(r_in).reversed()});
}

// chi = -1: one blob-shaped outer boundary with two circular holes.
inline PlanarDomain two_hole_domain() {
  // smooth outer boundary r(t) = 2.6 + 0.3 cos 2t
  int n = 512;
  std::vector<Vec3> pts(n);
  for (int i = 0; i < n; ++i) {
    double t = kTwoPi * i / n;
    double r = 2.6 + 0.3 * std::cos(2 * t);
    pts[i] = {r * std::cos(t), r * std::sin(t), 0};
  }
  ClosedCurve outer = ClosedCurve::fit_points(pts, 2, 16, 1e-12);
  return PlanarDomain(outer, {circle2(0.5, {-1.2, 0}).reversed(),
                              circle2(0.5, {1.2, 0}).reversed()});
}

inline PlanarDomain two_component_domain(double separation = 6.0) {
  return PlanarDomain({DomainComponent{circle2(1.0, {0, 0}), {}},
                       DomainComponent{circle2(1.0, {separation, 0}), {}}});
}

// Random smooth star-shaped domain: radius 1 + small low-order harmonics.
inline PlanarDomain random_blob(std::uint64_t seed, double amplitude = 0.18) {
  SampleStream rng(seed, 0);
  int n = 512;
  std::vector<double> ak(6, 0.0), bk(6, 0.0);
  for (int k = 2; k <= 6; ++k) {
    ak[k - 1] = amplitude * rng.uniform(-1, 1) / k;
    bk[k - 1] = amplitude * rng.uniform(-1, 1) / k;
  }
  std::vector<Vec3> pts(n);
  for (int i = 0; i < n; ++i) {
    double t = kTwoPi * i / n;
    double r = 1.0;
    for (int k = 2; k <= 6; ++k)
      r += ak[k - 1] * std::cos(k * t) + bk[k - 1] * std::sin(k * t);
    pts[i] = {r * std::cos(t), r * std::sin(t), 0};
  }
  ClosedCurve outer = ClosedCurve::fit_points(pts, 2, 24, 1e-11);
  return PlanarDomain(outer);
}

}  // namespace mobius::corpus
