#include <doctest.h>

#include "mobius/corpus.hpp"
#include "mobius/curve.hpp"
#include "mobius/domain.hpp"

using namespace mobius;

namespace {

// Independent oracle: adaptive Simpson quadrature.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int depth = 24) {
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fhi, double fmid, double acc,
          int d) -> double {
    double mid = 0.5 * (lo + hi);
    double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    double flm = f(lm), frm = f(rm);
    double left = (mid - lo) / 6 * (flo + 4 * flm + fmid);
    double right = (hi - mid) / 6 * (fmid + 4 * frm + fhi);
    if (d <= 0 || std::abs(left + right - acc) < 15 * tol)
      return left + right + (left + right - acc) / 15;
    return rec(lo, mid, flo, fmid, flm, left, d - 1) +
           rec(mid, hi, fmid, fhi, frm, right, d - 1);
  };
  double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return rec(a, b, fa, fb, fm, whole, depth);
}

// Independent oracle: 5-point central finite differences of the position
// map. The step balances truncation against roundoff so the derivative is
// good to ~1e-11, which supports a 1e-8 match on the curvature.
Vec3 fd_deriv(const ClosedCurve& c, double t, int order, double h) {
  auto p = [&](double tt) { return c.point(tt); };
  if (order == 1)
    return (p(t - 2 * h) - 8 * p(t - h) + 8 * p(t + h) - p(t + 2 * h)) / (12 * h);
  return ((-1) * p(t + 2 * h) + 16 * p(t + h) - 30 * p(t) + 16 * p(t - h) -
          p(t - 2 * h)) /
         (12 * h * h);
}

}  // namespace

TEST_SUITE("curve") {
  TEST_CASE("frame on circles") {
    ClosedCurve c = corpus::circle2();
    Frame f = c.frame(0.0);
    CHECK(norm(f.point - Vec3{1, 0, 0}) < 1e-14);
    CHECK(norm(f.tangent - Vec3{0, 1, 0}) < 1e-14);
    CHECK(f.curvature == doctest::Approx(1.0).epsilon(1e-13));
    ClosedCurve cr = corpus::circle2(3.5);
    for (double t : {0.0, 0.7, 2.9, 5.5})
      CHECK(cr.frame(t).curvature == doctest::Approx(1 / 3.5).epsilon(1e-12));
  }

  TEST_CASE("frame matches finite differences on the ellipse") {
    ClosedCurve e = corpus::ellipse2();
    double h = 1e-3;
    for (double t : {0.0, 0.3, 1.1, 2.2, 4.0}) {
      Vec3 v = fd_deriv(e, t, 1, h), a = fd_deriv(e, t, 2, h);
      double sp = norm(v);
      double kappa_fd = cross(v, a).z / (sp * sp * sp);
      CHECK(e.frame(t).curvature == doctest::Approx(kappa_fd).epsilon(1e-8));
    }
    CHECK(e.frame(0.0).curvature == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("arclength: circles exactly, ellipse vs adaptive Simpson") {
    CHECK(arclength(corpus::circle2()) == doctest::Approx(kTwoPi).epsilon(1e-14));
    CHECK(arclength(corpus::circle2(3.0)) == doctest::Approx(3 * kTwoPi).epsilon(1e-14));
    ClosedCurve e = corpus::ellipse2();
    double oracle = adaptive_simpson([&](double t) { return e.speed(t); }, 0, kTwoPi,
                                     1e-13);
    CHECK(std::abs(arclength(e) - oracle) < 1e-10);
  }

  TEST_CASE("arclength converges spectrally") {
    ClosedCurve e = corpus::ellipse2();
    double ref = arclength(e, 4096);
    double e16 = std::abs(arclength(e, 16) - ref);
    double e32 = std::abs(arclength(e, 32) - ref);
    double e64 = std::abs(arclength(e, 64) - ref);
    CHECK(e32 < e16 / 100);  // much faster than any fixed-order rule
    CHECK(e64 < 1e-9);
  }

  TEST_CASE("chord data on the circle diameter") {
    ClosedCurve c = corpus::circle2();
    ChordData cd = c.chord(0.0, kPi);
    CHECK(cd.r == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(std::abs(cd.theta_p) == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(std::abs(cd.theta_q) == doctest::Approx(kPi / 2).epsilon(1e-12));
  }

  TEST_CASE("planar curve in space has cos_tau = -1") {
    ClosedCurve c = corpus::circle3();
    SampleStream rng(3, 0);
    for (int i = 0; i < 50; ++i) {
      double s = rng.uniform(0, kTwoPi);
      double t = s + rng.uniform(0.3, kPi);
      ChordData cd = c.chord(s, t);
      // oracle: both plane normals explicitly
      Vec3 d = cd.q - cd.p;
      Vec3 np = cross(c.frame(s).tangent, d), nq = cross(c.frame(t).tangent, d);
      double oc = dot(np, nq) / (norm(np) * norm(nq));
      CHECK(cd.cos_tau == doctest::Approx(oc).epsilon(1e-12));
      CHECK(cd.cos_tau == doctest::Approx(-1.0).epsilon(1e-10));
      CHECK(std::abs(cd.sin_tau) < 1e-10);
    }
  }

  TEST_CASE("near-diagonal chord angle law") {
    // |sin theta_p| = (kappa/2) |q-p| + O(|q-p|^2), slope 1 and intercept
    // kappa/2 in log-log within 1%
    for (const ClosedCurve& c : {corpus::ellipse2(), corpus::trefoil()}) {
      for (double s : {0.4, 2.1}) {
        double kappa = c.frame(s).curvature;
        std::vector<double> lx, ly;
        for (double dt : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
          ChordData cd = c.chord(s, s + dt);
          lx.push_back(std::log(cd.r));
          ly.push_back(std::log(std::abs(std::sin(cd.theta_p))));
        }
        double n = lx.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < lx.size(); ++i) {
          sx += lx[i];
          sy += ly[i];
          sxx += lx[i] * lx[i];
          sxy += lx[i] * ly[i];
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        double inter = (sy - slope * sx) / n;
        CHECK(slope == doctest::Approx(1.0).epsilon(0.01));
        CHECK(std::exp(inter) == doctest::Approx(kappa / 2).epsilon(0.01));
        // Richardson-style ratio check at 1e-3 / 1e-4
        ChordData c1 = c.chord(s, s + 1e-3), c2 = c.chord(s, s + 1e-4);
        double ratio = std::abs(std::sin(c1.theta_p)) / std::abs(std::sin(c2.theta_p));
        CHECK(ratio == doctest::Approx(c1.r / c2.r).epsilon(0.02));
      }
    }
  }

  TEST_CASE("pointwise product identities") {
    // plane: (cos cos + sin sin) dp dq equals the dot form
    ClosedCurve e = corpus::ellipse2();
    SampleStream rng(11, 0);
    for (int i = 0; i < 10000; ++i) {
      double s = rng.uniform(0, kTwoPi), t = s + rng.uniform(0.05, kTwoPi - 0.1);
      ChordData cd = e.chord(s, t);
      double lhs = std::cos(cd.theta_p) * std::cos(cd.theta_q) +
                   std::sin(cd.theta_p) * std::sin(cd.theta_q);
      Vec3 vp = e.deriv(s, 1), vq = e.deriv(t, 1);
      double rhs = dot(vp, vq) / (norm(vp) * norm(vq));
      REQUIRE(std::abs(lhs - rhs) < 1e-12);
    }
    // space: dp.dq = (cos cos + cos tau sin sin) dp dq
    ClosedCurve k = corpus::trefoil();
    for (int i = 0; i < 10000; ++i) {
      double s = rng.uniform(0, kTwoPi), t = s + rng.uniform(0.05, kTwoPi - 0.1);
      ChordData cd = k.chord(s, t);
      double lhs = std::cos(cd.theta_p) * std::cos(cd.theta_q) +
                   cd.cos_tau * std::sin(cd.theta_p) * std::sin(cd.theta_q);
      Vec3 vp = k.deriv(s, 1), vq = k.deriv(t, 1);
      double rhs = dot(vp, vq) / (norm(vp) * norm(vq));
      REQUIRE(std::abs(lhs - rhs) < 1e-12);
    }
  }

  TEST_CASE("chord angle normalization") {
    ClosedCurve k = corpus::trefoil();
    SampleStream rng(5, 0);
    for (int i = 0; i < 200; ++i) {
      double s = rng.uniform(0, kTwoPi), t = s + rng.uniform(0.2, kPi);
      ChordData cd = k.chord(s, t);
      CHECK(cd.r > 0);
      CHECK(sq(std::sin(cd.theta_p)) + sq(std::cos(cd.theta_p)) ==
            doctest::Approx(1.0).epsilon(1e-14));
      if (!cd.degenerate_dihedral)
        CHECK(sq(cd.sin_tau) + sq(cd.cos_tau) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  TEST_CASE("near-diagonal chord is an error") {
    ClosedCurve c = corpus::circle2();
    CHECK_THROWS_AS(c.chord(1.0, 1.0 + 1e-15), NearDiagonalError);
  }

  TEST_CASE("degenerate curve is rejected") {
    CHECK_THROWS_AS(ClosedCurve(2, FourierSeries(0, {0}, {0}), FourierSeries(0, {0}, {0})),
                    DegenerateCurveError);
  }

  TEST_CASE("planar offset: disk") {
    PlanarDomain disk = corpus::disk();
    PlanarDomain off = disk.offset(0.25);
    const ClosedCurve& k = off.components[0].outer;
    for (int i = 0; i < 64; ++i)
      CHECK(norm(k.point(kTwoPi * i / 64)) == doctest::Approx(0.75).epsilon(1e-9));
    CHECK_THROWS_AS(disk.offset(1.0), OffsetError);
    CHECK_THROWS_AS(disk.offset(1.5), OffsetError);
  }

  TEST_CASE("planar offset: ellipse distance check") {
    PlanarDomain e = corpus::ellipse_domain();
    PlanarDomain off = e.offset(0.1);
    const ClosedCurve& k = off.components[0].outer;
    const ClosedCurve& base = e.components[0].outer;
    for (int i = 0; i < 256; ++i) {
      double d = base.distance_to(k.point(kTwoPi * i / 256));
      CHECK(d == doctest::Approx(0.1).epsilon(1e-6));
    }
    CHECK(k.refit_residual() < 1e-9 * base.diameter());
  }

  TEST_CASE("space offset: circle") {
    ClosedCurve c = corpus::circle3();
    ClosedCurve off = c.parallel3(0.1);
    for (int i = 0; i < 64; ++i) {
      Vec3 p = off.point(kTwoPi * i / 64);
      CHECK(std::abs(p.z) < 1e-10);
      CHECK(norm(p) == doctest::Approx(0.9).epsilon(1e-9));
    }
  }

  TEST_CASE("space offset requires positive curvature") {
    // planar curve with an inflection, embedded in space
    ClosedCurve flat(3, FourierSeries(0, {1}, {0}),
                     FourierSeries(0, {0, 0}, {1, 0.55}), FourierSeries(0, {0}, {0}));
    CHECK(flat.min_curvature() < 1e-3);
    CHECK_THROWS_AS(flat.parallel3(0.05), GeometryError);
  }

  TEST_CASE("space offset: trefoil distance check") {
    ClosedCurve k = corpus::trefoil();
    ClosedCurve off = k.parallel3(0.05);
    for (int i = 0; i < 256; ++i) {
      double d = k.distance_to(off.point(kTwoPi * i / 256));
      CHECK(d == doctest::Approx(0.05).epsilon(2e-5));
    }
    CHECK(off.refit_residual() < 1e-9 * k.diameter());
  }

  TEST_CASE("domain structure and validation") {
    PlanarDomain ann = corpus::annulus();
    CHECK(ann.euler_characteristic() == 0);
    // first inward-offset contact: outer (radius 4-d) meets the growing hole
    // boundary (radius 1+d) at d = 1.5
    CHECK(ann.reach() == doctest::Approx(1.5).epsilon(1e-3));
    CHECK(ann.contains({2.5, 0}));
    CHECK(!ann.contains({0, 0}));
    CHECK(!ann.contains({5, 0}));

    PlanarDomain two = corpus::two_hole_domain();
    CHECK(two.euler_characteristic() == -1);
    CHECK(two.contains({0, 2.0}));
    CHECK(!two.contains({1.2, 0}));

    PlanarDomain pair = corpus::two_component_domain();
    CHECK(pair.euler_characteristic() == 2);

    // intersecting boundaries are rejected
    CHECK_THROWS_AS(PlanarDomain(corpus::circle2(1.0), {corpus::circle2(1.0, {0.5, 0})}),
                    GeometryError);
  }

  TEST_CASE("from_curves rebuilds nesting") {
    std::vector<ClosedCurve> curves{corpus::circle2(0.5, {0, 0}), corpus::circle2(2.0),
                                    corpus::circle2(0.4, {5, 0})};
    PlanarDomain d = PlanarDomain::from_curves(curves);
    CHECK(d.components.size() == 2);
    CHECK(d.euler_characteristic() == 1);
    CHECK(signed_area(d.components[0].outer) > 0);
    for (const auto& c : d.components)
      for (const auto& h : c.holes) CHECK(signed_area(h) < 0);
  }

  TEST_CASE("orientation and scaling transforms") {
    ClosedCurve e = corpus::ellipse2();
    ClosedCurve r = e.reversed();
    CHECK(norm(r.point(0.3) - e.point(-0.3)) < 1e-12);
    CHECK(signed_area(r) == doctest::Approx(-signed_area(e)).epsilon(1e-12));
    ClosedCurve s = e.scaled(2.5);
    CHECK(s.length() == doctest::Approx(2.5 * e.length()).epsilon(1e-12));
  }
}
