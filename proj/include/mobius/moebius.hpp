#pragma once

// Moebius transformations of the plane and of space as compositions of
// sphere/circle inversions, similarities and reflections, their action on
// curves and domains, and the statistical invariance harness.

#include <functional>
#include <variant>
#include <vector>

#include "mobius/curve.hpp"
#include "mobius/domain.hpp"

namespace mobius::mob {

struct Inversion {
  Vec3 center;
  double radius;
};
struct Similarity {
  Mat3 linear;  // rotation * scale (optionally improper)
  Vec3 shift;
};
struct Reflection {
  Vec3 point, normal;  // plane (3D) or line with normal (2D)
};

using Primitive = std::variant<Inversion, Similarity, Reflection>;

struct MoebiusMap {
  std::vector<Primitive> steps;

  static MoebiusMap identity() { return {}; }
  static MoebiusMap inversion(Vec3 c, double r) { return {{Inversion{c, r}}}; }
  static MoebiusMap similarity(Mat3 m, Vec3 shift) { return {{Similarity{m, shift}}}; }

  MoebiusMap then(const MoebiusMap& g) const {
    MoebiusMap h = *this;
    h.steps.insert(h.steps.end(), g.steps.begin(), g.steps.end());
    return h;
  }

  Vec3 apply(Vec3 x) const {
    for (const auto& s : steps) {
      if (std::holds_alternative<Inversion>(s)) {
        const auto& inv = std::get<Inversion>(s);
        Vec3 d = x - inv.center;
        double r2 = norm2(d);
        if (r2 == 0) throw GeometryError("moebius map: hit an inversion center");
        x = inv.center + (inv.radius * inv.radius / r2) * d;
      } else if (std::holds_alternative<Similarity>(s)) {
        const auto& sim = std::get<Similarity>(s);
        x = sim.linear.apply(x) + sim.shift;
      } else {
        const auto& re = std::get<Reflection>(s);
        Vec3 n = re.normal / norm(re.normal);
        x = x - 2 * dot(x - re.point, n) * n;
      }
    }
    return x;
  }

  // Preimages of infinity: points the composed map sends to infinity. The
  // image of a curve is bounded iff the curve avoids all of them.
  std::vector<Vec3> singular_points() const {
    std::vector<Vec3> sing;
    for (size_t i = 0; i < steps.size(); ++i) {
      if (!std::holds_alternative<Inversion>(steps[i])) continue;
      Vec3 c = std::get<Inversion>(steps[i]).center;
      // pull the center back through the preceding maps
      bool lost = false;
      for (size_t j = i; j-- > 0;) {
        if (std::holds_alternative<Inversion>(steps[j])) {
          const auto& inv = std::get<Inversion>(steps[j]);
          Vec3 d = c - inv.center;
          double r2 = norm2(d);
          if (r2 == 0) {  // center maps to infinity: this singularity is the
            lost = true;  // previous center's, already recorded
            break;
          }
          c = inv.center + (inv.radius * inv.radius / r2) * d;
        } else if (std::holds_alternative<Similarity>(steps[j])) {
          const auto& sim = std::get<Similarity>(steps[j]);
          // invert x -> Mx + b
          Vec3 y = c - sim.shift;
          // inverse of the linear part by Cramer
          const auto& m = sim.linear.m;
          double det = sim.linear.det();
          Mat3 inv;
          inv.m = {(m[4] * m[8] - m[5] * m[7]) / det, (m[2] * m[7] - m[1] * m[8]) / det,
                   (m[1] * m[5] - m[2] * m[4]) / det, (m[5] * m[6] - m[3] * m[8]) / det,
                   (m[0] * m[8] - m[2] * m[6]) / det, (m[2] * m[3] - m[0] * m[5]) / det,
                   (m[3] * m[7] - m[4] * m[6]) / det, (m[1] * m[6] - m[0] * m[7]) / det,
                   (m[0] * m[4] - m[1] * m[3]) / det};
          c = inv.apply(y);
        } else {
          const auto& re = std::get<Reflection>(steps[j]);
          Vec3 n = re.normal / norm(re.normal);
          c = c - 2 * dot(c - re.point, n) * n;  // involution
        }
      }
      if (!lost) sing.push_back(c);
    }
    return sing;
  }

  // Orientation parity of the composition (+1 preserving, -1 reversing).
  int parity(int dim) const {
    int p = 1;
    for (const auto& s : steps) {
      if (std::holds_alternative<Inversion>(s))
        p = -p;  // inversion reverses orientation in R^n
      else if (std::holds_alternative<Reflection>(s))
        p = -p;
      else if (std::get<Similarity>(s).linear.det() < 0)
        p = -p;
    }
    (void)dim;
    return p;
  }
};

// Image of a curve under the map: dense sampling refit to Fourier form, mode
// count grown until the refit residual is below 1e-9 x diameter.
inline ClosedCurve apply(const MoebiusMap& map, const ClosedCurve& curve) {
  for (Vec3 s : map.singular_points()) {
    double d = curve.distance_to(s);
    if (d < 1e-6 * curve.diameter())
      throw GeometryError("moebius apply: a singular point lies on the curve");
  }
  int n = std::max(2048, 32 * curve.modes());
  std::vector<Vec3> pts(n);
  double far = 0;
  for (int i = 0; i < n; ++i) {
    pts[i] = map.apply(curve.point(kTwoPi * i / n));
    far = std::max(far, norm(pts[i]));
  }
  if (!(far < 1e9 * std::max(1.0, curve.diameter())))
    throw GeometryError("moebius apply: image unbounded");
  double diam_est = 0;
  for (int i = 0; i < n; i += 8)
    for (int j = i + 8; j < n; j += 8) diam_est = std::max(diam_est, norm(pts[j] - pts[i]));
  return ClosedCurve::fit_points(pts, curve.dimension, std::max(8, curve.modes()),
                                 1e-9 * std::sqrt(diam_est * diam_est + 1e-300));
}

// Image of a domain; boundary curves are mapped individually and the
// containment structure is rebuilt. Every singular preimage must stay outside
// the closed domain so that compact maps to compact.
inline PlanarDomain apply(const MoebiusMap& map, const PlanarDomain& dom) {
  for (Vec3 s : map.singular_points()) {
    if (dom.contains(s.xy()) || dom.boundary_distance(s.xy()) < 1e-9 * dom.diameter())
      throw GeometryError("moebius apply: map sends the compact domain to an unbounded one");
  }
  std::vector<ClosedCurve> images;
  for (const auto* c : dom.boundary()) images.push_back(apply(map, *c));
  return PlanarDomain::from_curves(std::move(images));
}

// Distance from x to the curve's curvature tube (union of osculating
// circles), by dense sampling.
inline double curvature_tube_distance(const ClosedCurve& k, Vec3 x, int n = 1024) {
  double best = 1e300;
  for (int i = 0; i < n; ++i) {
    double t = kTwoPi * i / n;
    Frame f = k.frame(t);
    if (f.curvature < 1e-9 || !f.normal_ok) {
      // flat point: osculating "circle" is the tangent line
      Vec3 d = x - f.point;
      double along = dot(d, f.tangent);
      best = std::min(best, norm(d - along * f.tangent));
      continue;
    }
    double rho = 1.0 / f.curvature;
    Vec3 center = f.point + rho * f.normal;
    Vec3 axis = (k.dimension == 3) ? cross(f.tangent, f.normal) : Vec3{0, 0, 1};
    Vec3 d = x - center;
    double da = dot(d, axis);
    Vec3 dp = d - da * axis;
    best = std::min(best, std::sqrt(sq(da) + sq(norm(dp) - rho)));
  }
  return best;
}

struct SafeCenter {
  Vec3 center;
  double radius;
};

// A sphere center outside the curvature tube with radius comparable to the
// curve diameter, found by rejection sampling over a bounding box.
inline SafeCenter safe_inversion_center(const ClosedCurve& k, std::uint64_t seed = 1,
                                        int budget = 4000) {
  double diam = k.diameter();
  Vec3 centroid{k.coord[0].a0, k.coord[1].a0, k.dimension == 3 ? k.coord[2].a0 : 0.0};
  double margin = 0.05 * diam;
  for (int i = 0; i < budget; ++i) {
    SampleStream rng(seed, i);
    Vec3 c = centroid + (0.6 + 1.4 * rng.u01()) * diam * rng.sphere_dir();
    if (curvature_tube_distance(k, c) < margin) continue;
    if (k.distance_to(c) < 2 * margin) continue;
    return {c, (0.5 + rng.u01()) * diam};
  }
  throw RejectionBudgetError("safe_inversion_center: rejection budget exhausted");
}

// ---------------------------------------------------------------------------
// Invariance certification: run a functional over random admissible maps and
// report the worst deviation.

struct InvarianceTrial {
  int trial;
  double value;
  double deviation;
};

struct InvarianceReport {
  double base_value = 0;
  double max_deviation = 0;
  int redraws = 0;
  std::vector<InvarianceTrial> trials;
};

// draw_map: given a per-trial RNG stream, produce a candidate map or throw.
// evaluate: functional on the transformed object.
template <class DrawMap, class Evaluate>
InvarianceReport invariance_scan(double base_value, int trials, std::uint64_t seed,
                                 DrawMap&& draw_map, Evaluate&& evaluate) {
  InvarianceReport rep;
  rep.base_value = base_value;
  int produced = 0;
  std::uint64_t idx = 0;
  while (produced < trials) {
    if (idx > static_cast<std::uint64_t>(40) * trials + 400)
      throw RejectionBudgetError("invariance_scan: too many inadmissible maps");
    SampleStream rng(seed, idx++);
    try {
      MoebiusMap m = draw_map(rng);
      double v = evaluate(m);
      rep.trials.push_back({produced, v, std::abs(v - base_value)});
      rep.max_deviation = std::max(rep.max_deviation, std::abs(v - base_value));
      ++produced;
    } catch (const GeometryError&) {
      ++rep.redraws;
    } catch (const OffsetError&) {
      ++rep.redraws;
    }
  }
  return rep;
}

// Random inversion whose center keeps its distance from a reference point set.
inline MoebiusMap random_inversion_around(SampleStream& rng, Vec3 centroid, double diam,
                                          bool planar) {
  Vec3 dir = rng.sphere_dir();
  if (planar) {
    dir.z = 0;
    double n = norm(dir);
    if (n < 1e-9) dir = {1, 0, 0};
    else dir = dir / n;
  }
  Vec3 c = centroid + (0.7 + 1.3 * rng.u01()) * diam * dir;
  double r = (0.5 + 1.0 * rng.u01()) * diam;
  return MoebiusMap::inversion(c, r);
}

}  // namespace mobius::mob
