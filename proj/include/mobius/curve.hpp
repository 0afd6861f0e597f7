#pragma once

// Smooth closed curves in R^2 or R^3 as truncated Fourier series, plus the
// pointwise geometry the energy integrands consume: frames, curvature, chord
// angles and the dihedral angle between the two tangent chord-planes.
//
// Angle conventions:
//   * plane:  theta_p is the oriented angle from the unit tangent at p to
//             q - p, in (-pi, pi].
//   * space:  theta_p, theta_q in [0, pi]; orientation information lives in
//             (cos_tau, sin_tau) of the dihedral between the planes spanned
//             by (tangent, chord) at p and at q, oriented by dp ^ (q-p) and
//             dq ^ (q-p). sin_tau is signed so that the writhe integrand
//             sin_tau sin_theta_p sin_theta_q / r^2 reproduces the average of
//             signed crossing numbers over projections.

#include <optional>
#include <vector>

#include "mobius/common.hpp"
#include "mobius/fourier.hpp"

namespace mobius {

struct ChordData {
  Vec3 p, q;
  double r = 0;                    // |q - p|
  double theta_p = 0, theta_q = 0;
  double cos_tau = 0, sin_tau = 0;
  bool degenerate_dihedral = false;
};

struct Frame {
  Vec3 point, tangent;   // tangent has unit norm
  double curvature = 0;  // signed in 2D, nonnegative in 3D
  Vec3 normal;           // principal normal (3D, where curvature > 0)
  bool normal_ok = false;
};

// Dense samples of a curve and its derivatives, shared by the quadratures.
struct CurveGrid {
  int n = 0;
  std::vector<double> t;
  std::vector<Vec3> p, d1, d2;
  std::vector<double> speed;
  std::vector<double> kappa;  // signed in 2D
  double dt() const { return kTwoPi / n; }
};

class ClosedCurve {
 public:
  int dimension = 2;
  std::array<FourierSeries, 3> coord;

  ClosedCurve() = default;
  ClosedCurve(int dim, FourierSeries x, FourierSeries y, FourierSeries z = {})
      : dimension(dim), coord{std::move(x), std::move(y), std::move(z)} {
    finalize();
  }

  int modes() const {
    return std::max({coord[0].modes(), coord[1].modes(), coord[2].modes()});
  }

  Vec3 point(double t) const { return eval(t, 0); }
  Vec3 deriv(double t, int order) const { return eval(t, order); }

  double speed(double t) const { return norm(eval(t, 1)); }
  double length() const { return length_; }
  double diameter() const { return diameter_; }
  double min_speed() const { return min_speed_; }

  Frame frame(double t) const {
    Frame f;
    Vec3 v = eval(t, 1), a = eval(t, 2);
    double sp = norm(v);
    if (sp < 1e-12 * (diameter_ > 0 ? diameter_ : 1.0))
      throw DegenerateCurveError("eval_frame: |K'| below tolerance");
    f.point = eval(t, 0);
    f.tangent = v / sp;
    if (dimension == 2) {
      f.curvature = cross(v, a).z / (sp * sp * sp);
      // left normal (90deg ccw of the tangent)
      f.normal = Vec3(perp(f.tangent.xy()));
      f.normal_ok = true;
    } else {
      Vec3 va = cross(v, a);
      f.curvature = norm(va) / (sp * sp * sp);
      Vec3 an = a - dot(a, f.tangent) * f.tangent;
      double nn = norm(an);
      if (nn > 1e-10 * sq(sp)) {
        f.normal = an / nn;
        f.normal_ok = true;
      }
    }
    return f;
  }

  double signed_curvature2(double t) const {
    Vec3 v = eval(t, 1), a = eval(t, 2);
    double sp = norm(v);
    return cross(v, a).z / (sp * sp * sp);
  }

  CurveGrid grid(int n) const {
    CurveGrid g;
    g.n = n;
    g.t.resize(n);
    g.p.resize(n);
    g.d1.resize(n);
    g.d2.resize(n);
    g.speed.resize(n);
    g.kappa.resize(n);
    for (int i = 0; i < n; ++i) {
      double t = kTwoPi * i / n;
      g.t[i] = t;
      g.p[i] = eval(t, 0);
      g.d1[i] = eval(t, 1);
      g.d2[i] = eval(t, 2);
      g.speed[i] = norm(g.d1[i]);
      if (dimension == 2)
        g.kappa[i] = cross(g.d1[i], g.d2[i]).z / (g.speed[i] * g.speed[i] * g.speed[i]);
      else
        g.kappa[i] = norm(cross(g.d1[i], g.d2[i])) / (g.speed[i] * g.speed[i] * g.speed[i]);
    }
    return g;
  }

  ChordData chord(double s, double t) const {
    Frame fp = frame(s), fq = frame(t);
    return chord_from_frames(fp, fq, dimension, diameter_);
  }

  static ChordData chord_from_frames(const Frame& fp, const Frame& fq, int dim,
                                     double scale) {
    ChordData c;
    c.p = fp.point;
    c.q = fq.point;
    Vec3 d = c.q - c.p;
    c.r = norm(d);
    if (c.r < 1e-12 * std::max(scale, 1e-30))
      throw NearDiagonalError("chord_data: chord length below tolerance");
    if (dim == 2) {
      Vec2 rhat = d.xy() / c.r;
      c.theta_p = std::atan2(cross(fp.tangent.xy(), rhat), dot(fp.tangent.xy(), rhat));
      c.theta_q = std::atan2(cross(fq.tangent.xy(), rhat), dot(fq.tangent.xy(), rhat));
      double prod = std::sin(c.theta_p) * std::sin(c.theta_q);
      c.cos_tau = (prod > 0) ? 1.0 : (prod < 0 ? -1.0 : 0.0);
      c.sin_tau = 0.0;
      if (prod == 0) c.degenerate_dihedral = true;
    } else {
      Vec3 rhat = d / c.r;
      c.theta_p = std::acos(std::clamp(dot(fp.tangent, rhat), -1.0, 1.0));
      c.theta_q = std::acos(std::clamp(dot(fq.tangent, rhat), -1.0, 1.0));
      Vec3 np = cross(fp.tangent, d), nq = cross(fq.tangent, d);
      double nn = norm(np) * norm(nq);
      if (nn < 1e-14 * sq(norm2(d))) {
        // chord parallel to a tangent; sin(theta)=0 there so any finite value
        // is inert in the shipped integrands
        c.cos_tau = 0;
        c.sin_tau = 0;
        c.degenerate_dihedral = true;
      } else {
        c.cos_tau = std::clamp(dot(np, nq) / nn, -1.0, 1.0);
        c.sin_tau = std::clamp(dot(cross(nq, np), d) / (nn * c.r), -1.0, 1.0);
      }
    }
    return c;
  }

  // ---- global scans -------------------------------------------------------

  // Minimum over parameter pairs of |K(t)-K(s)| with |t-s| outside a small
  // window; used for embeddedness checks.
  double min_self_distance(int n = 1024) const {
    CurveGrid g = grid(n);
    // window: skip parameter separations whose chord is controlled by
    // curvature (arc close to chord)
    int win = std::max(2, n / 64);
    double best = 1e300;
    for (int i = 0; i < n; ++i)
      for (int j = i + win; j < n; ++j) {
        if (i + n - j < win) continue;
        best = std::min(best, norm(g.p[j] - g.p[i]));
      }
    return best;
  }

  double max_curvature(int n = 2048) const {
    CurveGrid g = grid(n);
    double m = 0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::abs(g.kappa[i]));
    return m;
  }

  double min_curvature(int n = 2048) const {
    CurveGrid g = grid(n);
    double m = 1e300;
    for (int i = 0; i < n; ++i) m = std::min(m, g.kappa[i]);
    return m;
  }

  // Parameter of the point closest to x: dense scan then Newton on
  // (K(t)-x).K'(t) = 0.
  double nearest_parameter(Vec3 x, int n = 512) const {
    double best = 1e300, tb = 0;
    for (int i = 0; i < n; ++i) {
      double t = kTwoPi * i / n;
      double d = norm2(eval(t, 0) - x);
      if (d < best) {
        best = d;
        tb = t;
      }
    }
    double t = tb;
    for (int it = 0; it < 40; ++it) {
      Vec3 p = eval(t, 0), v = eval(t, 1), a = eval(t, 2);
      double f = dot(p - x, v);
      double fp = dot(v, v) + dot(p - x, a);
      if (std::abs(fp) < 1e-30) break;
      double step = f / fp;
      step = std::clamp(step, -kTwoPi / n, kTwoPi / n);
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    return t;
  }

  double distance_to(Vec3 x) const { return norm(eval(nearest_parameter(x), 0) - x); }

  // ---- derived curves -----------------------------------------------------

  ClosedCurve reversed() const {
    ClosedCurve c = *this;
    for (auto& f : c.coord) f = f.reversed();
    c.finalize();
    return c;
  }

  ClosedCurve transformed(const Mat3& m, Vec3 shift) const {
    // Linear maps act directly on the coefficient vectors.
    ClosedCurve c = *this;
    int mm = modes();
    auto getv = [&](int which, int k) -> Vec3 {
      auto pick = [&](const FourierSeries& f) -> double {
        if (which == 0) return f.a0;
        if (which == 1) return k <= f.modes() ? f.a[k - 1] : 0.0;
        return k <= f.modes() ? f.b[k - 1] : 0.0;
      };
      return {pick(coord[0]), pick(coord[1]), pick(coord[2])};
    };
    for (int d = 0; d < 3; ++d) c.coord[d] = coord[d].padded(mm);
    Vec3 c0 = m.apply(getv(0, 0)) + shift;
    c.coord[0].a0 = c0.x;
    c.coord[1].a0 = c0.y;
    c.coord[2].a0 = c0.z;
    for (int k = 1; k <= mm; ++k) {
      Vec3 ak = m.apply(getv(1, k)), bk = m.apply(getv(2, k));
      c.coord[0].a[k - 1] = ak.x;
      c.coord[1].a[k - 1] = ak.y;
      c.coord[2].a[k - 1] = ak.z;
      c.coord[0].b[k - 1] = bk.x;
      c.coord[1].b[k - 1] = bk.y;
      c.coord[2].b[k - 1] = bk.z;
    }
    c.finalize();
    return c;
  }

  ClosedCurve scaled(double c) const {
    Mat3 m;
    m.m = {c, 0, 0, 0, c, 0, 0, 0, c};
    return transformed(m, {0, 0, 0});
  }

  // Offset along the principal normal: K(t) + delta n(t), refit to Fourier.
  ClosedCurve parallel3(double delta) const {
    if (dimension != 3)
      throw ConfigError("parallel3 expects a space curve");
    int n_check = std::max(4096, 16 * modes());
    CurveGrid g = grid(n_check);
    double kmin = 1e300;
    for (int i = 0; i < n_check; ++i) kmin = std::min(kmin, g.kappa[i]);
    if (kmin * diameter_ < 1e-2)
      throw GeometryError(
          "parallel_curve3: curvature vanishes; move the curve off its "
          "curvature tube (e.g. by a preliminary inversion) first");
    std::vector<Vec3> pts(n_check);
    for (int i = 0; i < n_check; ++i) {
      Vec3 v = g.d1[i], a = g.d2[i];
      Vec3 an = a - (dot(a, v) / dot(v, v)) * v;
      pts[i] = g.p[i] + delta * (an / norm(an));
    }
    ClosedCurve off = fit_points(pts, 3, modes(), 1e-9 * diameter_);
    // embedded and disjoint from the base curve
    double gap = 1e300;
    for (int i = 0; i < n_check; i += 4) gap = std::min(gap, distance_to(off.point(g.t[i])));
    if (gap < 0.5 * std::abs(delta))
      throw OffsetError("parallel_curve3: offset collides with the curve", gap);
    return off;
  }

  // Fit a closed curve through uniformly sampled points, growing the mode
  // count until the refit residual (checked at off-grid points) is below tol.
  static ClosedCurve fit_points(const std::vector<Vec3>& pts, int dim, int modes0,
                                double tol, int max_modes = 2048) {
    int n = static_cast<int>(pts.size());
    std::vector<double> xs(n), ys(n), zs(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = pts[i].x;
      ys[i] = pts[i].y;
      zs[i] = pts[i].z;
    }
    int m = std::max(1, modes0);
    while (true) {
      if (m >= n / 2 - 1) throw ConfigError("fit_points: need more samples than modes");
      ClosedCurve c;
      c.dimension = dim;
      c.coord[0] = FourierSeries::fit(xs, m);
      c.coord[1] = FourierSeries::fit(ys, m);
      c.coord[2] = dim == 3 ? FourierSeries::fit(zs, m) : FourierSeries();
      double resid = 0;
      for (int i = 0; i < n; ++i)
        resid = std::max(resid, norm(c.eval(kTwoPi * i / n, 0) - pts[i]));
      // aliasing guard: the top quarter of the spectrum must be negligible
      double tail = 0;
      for (int d = 0; d < (dim == 3 ? 3 : 2); ++d)
        tail = std::max(tail, c.coord[d].tail_amplitude(std::max(1, (3 * m) / 4)));
      if ((resid < tol && tail < 10 * tol) || m >= max_modes) {
        c.finalize();
        c.refit_residual_ = resid;
        if (resid > tol)
          throw GeometryError("curve refit residual above tolerance");
        return c;
      }
      m = std::min(max_modes, 2 * m);
    }
  }

  double refit_residual() const { return refit_residual_; }

  void finalize() {
    int n = std::max(1024, 16 * modes());
    double len = 0, msp = 1e300;
    std::vector<Vec3> ps;
    ps.reserve(256);
    for (int i = 0; i < n; ++i) {
      double t = kTwoPi * i / n;
      double sp = norm(eval(t, 1));
      len += sp;
      msp = std::min(msp, sp);
      if (i % std::max(1, n / 256) == 0) ps.push_back(eval(t, 0));
    }
    length_ = len * kTwoPi / n;
    min_speed_ = msp;
    double d2 = 0;
    for (size_t i = 0; i < ps.size(); ++i)
      for (size_t j = i + 1; j < ps.size(); ++j) d2 = std::max(d2, norm2(ps[j] - ps[i]));
    diameter_ = std::sqrt(d2);
    if (min_speed_ < 1e-9 * std::max(diameter_, 1e-30))
      throw DegenerateCurveError("curve is not regular: |K'| vanishes");
  }

 private:
  Vec3 eval(double t, int order) const {
    return {coord[0].eval(t, order), coord[1].eval(t, order),
            dimension == 3 ? coord[2].eval(t, order) : 0.0};
  }

  double length_ = 0, diameter_ = 0, min_speed_ = 0, refit_residual_ = 0;
};

// Arclength by the periodic trapezoid rule at resolution n (spectral for
// smooth curves).
inline double arclength(const ClosedCurve& c, int n = 0) {
  if (n <= 0) n = std::max(1024, 16 * c.modes());
  double s = 0;
  for (int i = 0; i < n; ++i) s += c.speed(kTwoPi * i / n);
  return s * kTwoPi / n;
}

}  // namespace mobius
