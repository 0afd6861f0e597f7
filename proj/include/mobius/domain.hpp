#pragma once

// Planar domains: an outer boundary plus holes per connected component.
// Orientation convention: outer curves counterclockwise, hole curves
// clockwise, so the stored orientation of every curve is the boundary
// orientation induced by the domain and the left normal of every boundary
// curve points into the domain.

#include <vector>

#include "mobius/curve.hpp"

namespace mobius {

namespace detail {

// Dense polyline cache for point-location and seeded distance queries.
struct Polyline {
  std::vector<Vec2> pts;
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  double seg_bound = 0;  // max deviation of the curve from the polyline

  void build(const ClosedCurve& c, int n) {
    pts.resize(n);
    for (int i = 0; i < n; ++i) {
      Vec2 p = c.point(kTwoPi * i / n).xy();
      pts[i] = p;
      lo.x = std::min(lo.x, p.x);
      lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x);
      hi.y = std::max(hi.y, p.y);
    }
    double seg = 0;
    for (int i = 0; i < n; ++i) seg = std::max(seg, norm(pts[(i + 1) % n] - pts[i]));
    seg_bound = seg;  // conservative
  }

  bool contains(Vec2 q) const {
    if (q.x < lo.x || q.x > hi.x || q.y < lo.y || q.y > hi.y) return false;
    bool in = false;
    size_t n = pts.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
      Vec2 a = pts[j], b = pts[i];
      if ((b.y > q.y) != (a.y > q.y)) {
        double xc = b.x + (q.y - b.y) * (a.x - b.x) / (a.y - b.y);
        if (q.x < xc) in = !in;
      }
    }
    return in;
  }

  // (squared distance to nearest vertex, its index)
  std::pair<double, int> coarse_nearest(Vec2 q) const {
    double best = 1e300;
    int bi = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
      double d2 = norm2(pts[i] - q);
      if (d2 < best) {
        best = d2;
        bi = static_cast<int>(i);
      }
    }
    return {best, bi};
  }
};

// Newton polish of the nearest-point parameter starting from seed t0.
inline double polished_distance(const ClosedCurve& c, Vec2 x, double t0, int poly_n) {
  Vec3 x3(x);
  double t = t0;
  double cap = kTwoPi / poly_n;
  for (int it = 0; it < 30; ++it) {
    Vec3 p = c.point(t), v = c.deriv(t, 1), a = c.deriv(t, 2);
    double f = dot(p - x3, v);
    double fp = dot(v, v) + dot(p - x3, a);
    if (std::abs(fp) < 1e-30) break;
    double step = std::clamp(f / fp, -2 * cap, 2 * cap);
    t -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return norm(c.point(t) - x3);
}

}  // namespace detail

inline double signed_area(const ClosedCurve& c, int n = 2048) {
  double a = 0;
  for (int i = 0; i < n; ++i) {
    double t = kTwoPi * i / n;
    a += cross(c.point(t), c.deriv(t, 1)).z;
  }
  return 0.5 * a * kTwoPi / n;
}

struct DomainComponent {
  ClosedCurve outer;
  std::vector<ClosedCurve> holes;
};

class PlanarDomain {
 public:
  std::vector<DomainComponent> components;

  PlanarDomain() = default;
  explicit PlanarDomain(ClosedCurve outer, std::vector<ClosedCurve> holes = {}) {
    components.push_back({std::move(outer), std::move(holes)});
    normalize_and_validate();
  }
  explicit PlanarDomain(std::vector<DomainComponent> comps) : components(std::move(comps)) {
    normalize_and_validate();
  }

  PlanarDomain(const PlanarDomain& o) : components(o.components) { rebuild_cache(); }
  PlanarDomain& operator=(const PlanarDomain& o) {
    components = o.components;
    rebuild_cache();
    return *this;
  }
  PlanarDomain(PlanarDomain&&) = default;
  PlanarDomain& operator=(PlanarDomain&&) = default;

  // Build from an unordered set of disjoint simple curves: containment depth
  // decides outer (even depth) vs hole (odd depth).
  static PlanarDomain from_curves(std::vector<ClosedCurve> curves) {
    int n = static_cast<int>(curves.size());
    std::vector<detail::Polyline> poly(n);
    for (int i = 0; i < n; ++i) poly[i].build(curves[i], 2048);
    std::vector<int> depth(n, 0), parent(n, -1);
    for (int i = 0; i < n; ++i) {
      Vec2 probe = poly[i].pts[0];
      double best_area = 1e300;
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (poly[j].contains(probe)) {
          ++depth[i];
          double ar = std::abs(signed_area(curves[j]));
          if (ar < best_area) {
            best_area = ar;
            parent[i] = j;
          }
        }
      }
    }
    std::vector<DomainComponent> comps;
    std::vector<int> comp_of(n, -1);
    for (int i = 0; i < n; ++i)
      if (depth[i] % 2 == 0) {
        comp_of[i] = static_cast<int>(comps.size());
        comps.push_back({curves[i], {}});
      }
    for (int i = 0; i < n; ++i)
      if (depth[i] % 2 == 1) {
        if (parent[i] < 0 || comp_of[parent[i]] < 0)
          throw GeometryError("domain: hole without enclosing outer boundary");
        comps[comp_of[parent[i]]].holes.push_back(curves[i]);
      }
    return PlanarDomain(std::move(comps));
  }

  int euler_characteristic() const {
    int holes = 0;
    for (const auto& c : components) holes += static_cast<int>(c.holes.size());
    return static_cast<int>(components.size()) - holes;
  }

  // All boundary curves with the induced orientation.
  std::vector<const ClosedCurve*> boundary() const {
    std::vector<const ClosedCurve*> b;
    for (const auto& c : components) {
      b.push_back(&c.outer);
      for (const auto& h : c.holes) b.push_back(&h);
    }
    return b;
  }

  std::vector<ClosedCurve> boundary_copy() const {
    std::vector<ClosedCurve> b;
    for (const auto* c : boundary()) b.push_back(*c);
    return b;
  }

  double boundary_length() const {
    double s = 0;
    for (const auto* c : boundary()) s += c->length();
    return s;
  }

  double diameter() const { return diameter_; }

  bool contains(Vec2 q) const {
    size_t k = 0;
    for (const auto& c : components) {
      size_t outer_idx = k++;
      bool in_outer = polys_[outer_idx].contains(q);
      bool in_hole = false;
      for (size_t hi = 0; hi < c.holes.size(); ++hi) {
        if (in_outer && polys_[k].contains(q)) in_hole = true;
        ++k;
      }
      if (in_outer && !in_hole) return true;
    }
    return false;
  }

  // Unsigned distance from x to the boundary system. If the caller only needs
  // values below `need_below`, larger distances may be returned approximately.
  double boundary_distance(Vec2 x, double need_below = 1e300) const {
    auto bs = boundary();
    double best = 1e300;
    for (size_t i = 0; i < bs.size(); ++i) {
      auto [d2, idx] = polys_[i].coarse_nearest(x);
      double coarse = std::sqrt(d2);
      if (coarse - polys_[i].seg_bound > std::min(best, need_below)) continue;
      double t0 = kTwoPi * idx / static_cast<double>(polys_[i].pts.size());
      best = std::min(best,
                      detail::polished_distance(*bs[i], x, t0,
                                                static_cast<int>(polys_[i].pts.size())));
    }
    return best;
  }

  double signed_distance(Vec2 x) const {
    double d = boundary_distance(x);
    return contains(x) ? d : -d;
  }

  // Largest inward offset with injective normal coordinates: min over
  // boundary points p (inward normal nu) and boundary points q of the contact
  // radius |q-p|^2 / (2 (q-p).nu); the limit q->p recovers the curvature
  // radius on convex stretches.
  double reach() const { return reach_; }

  PlanarDomain offset(double delta) const {
    if (!(delta > 0) || delta >= 0.95 * reach_)
      throw OffsetError("parallel_curve2: offset distance exceeds the feasible bound",
                        0.95 * reach_);
    std::vector<DomainComponent> comps;
    for (const auto& c : components) {
      DomainComponent nc;
      nc.outer = offset_curve(c.outer, delta);
      for (const auto& h : c.holes) nc.holes.push_back(offset_curve(h, delta));
      comps.push_back(std::move(nc));
    }
    return PlanarDomain(std::move(comps));
  }

  static ClosedCurve offset_curve(const ClosedCurve& c, double delta) {
    int n = std::max(512, 16 * c.modes());
    std::vector<Vec3> pts(n);
    for (int i = 0; i < n; ++i) {
      double t = kTwoPi * i / n;
      Vec3 v = c.deriv(t, 1);
      Vec2 nu = perp(v.xy() / norm(v.xy()));  // left normal = inward
      pts[i] = c.point(t) + Vec3(delta * nu);
    }
    return ClosedCurve::fit_points(pts, 2, std::max(c.modes(), 8), 1e-9 * c.diameter());
  }

 private:
  void normalize_and_validate() {
    for (auto& comp : components) {
      if (signed_area(comp.outer) < 0) comp.outer = comp.outer.reversed();
      for (auto& h : comp.holes)
        if (signed_area(h) > 0) h = h.reversed();
    }
    rebuild_cache();
    auto bs = boundary();
    for (size_t i = 0; i < bs.size(); ++i)
      for (size_t j = i + 1; j < bs.size(); ++j) {
        double dmin = 1e300;
        for (int k = 0; k < 256; ++k)
          dmin = std::min(dmin, bs[i]->distance_to(bs[j]->point(kTwoPi * k / 256)));
        if (dmin < 1e-9 * (bs[i]->diameter() + bs[j]->diameter()))
          throw GeometryError("domain boundaries intersect or touch");
      }
    size_t k = 0;
    for (const auto& c : components) {
      size_t outer_idx = k++;
      for (const auto& h : c.holes) {
        if (!polys_[outer_idx].contains(h.point(0).xy()))
          throw GeometryError("domain: hole is not inside its outer boundary");
        ++k;
      }
    }
  }

  void rebuild_cache() {
    auto bs = boundary();
    polys_.assign(bs.size(), {});
    for (size_t i = 0; i < bs.size(); ++i) polys_[i].build(*bs[i], 2048);
    std::vector<Vec2> ps;
    for (const auto& pl : polys_)
      for (size_t i = 0; i < pl.pts.size(); i += 16) ps.push_back(pl.pts[i]);
    double d2 = 0;
    for (size_t i = 0; i < ps.size(); ++i)
      for (size_t j = i + 1; j < ps.size(); ++j) d2 = std::max(d2, norm2(ps[j] - ps[i]));
    diameter_ = std::sqrt(d2);
    reach_ = compute_reach();
  }

  double compute_reach() const {
    auto bs = boundary();
    int ns = 384;
    std::vector<Vec2> P, NU;
    double rmin = 1e300;
    for (const auto* c : bs) {
      for (int i = 0; i < ns; ++i) {
        double t = kTwoPi * i / ns;
        Vec3 v = c->deriv(t, 1);
        P.push_back(c->point(t).xy());
        NU.push_back(perp(v.xy() / norm(v.xy())));
        double kap = c->signed_curvature2(t);
        if (kap > 1e-12) rmin = std::min(rmin, 1.0 / kap);
      }
    }
    size_t n = P.size();
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        Vec2 d = P[j] - P[i];
        double proj = dot(d, NU[i]);
        if (proj <= 1e-12) continue;
        rmin = std::min(rmin, norm2(d) / (2 * proj));
      }
    return rmin;
  }

  double diameter_ = 0, reach_ = 0;
  std::vector<detail::Polyline> polys_;
};

// ---------------------------------------------------------------------------
// Precomputed signed-distance field with bilinear interpolation, for
// geometric searches that need millions of cheap distance queries. The field
// is smooth near the boundary (within the reach), which is the only region
// where sign decisions are delicate.

class DistanceField {
 public:
  DistanceField(const PlanarDomain& dom, int n = 512, double margin_rel = 0.15) {
    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (const auto* c : dom.boundary())
      for (int i = 0; i < 512; ++i) {
        Vec2 p = c->point(kTwoPi * i / 512).xy();
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
      }
    double margin = margin_rel * std::max(hi.x - lo.x, hi.y - lo.y);
    lo_ = lo - Vec2{margin, margin};
    hi_ = hi + Vec2{margin, margin};
    nx_ = ny_ = n;
    hx_ = (hi_.x - lo_.x) / (nx_ - 1);
    hy_ = (hi_.y - lo_.y) / (ny_ - 1);
    d_.resize(static_cast<size_t>(nx_) * ny_);
    parallel_for(static_cast<std::int64_t>(nx_) * ny_, [&](std::int64_t idx) {
      int ix = static_cast<int>(idx % nx_), iy = static_cast<int>(idx / nx_);
      Vec2 x{lo_.x + ix * hx_, lo_.y + iy * hy_};
      d_[idx] = dom.signed_distance(x);
    });
  }

  double operator()(Vec2 x) const {
    double fx = (x.x - lo_.x) / hx_, fy = (x.y - lo_.y) / hy_;
    if (fx < 0 || fy < 0 || fx > nx_ - 1.001 || fy > ny_ - 1.001) return -1e3;
    int ix = static_cast<int>(fx), iy = static_cast<int>(fy);
    double ax = fx - ix, ay = fy - iy;
    auto at = [&](int i, int j) { return d_[static_cast<size_t>(j) * nx_ + i]; };
    return (1 - ax) * (1 - ay) * at(ix, iy) + ax * (1 - ay) * at(ix + 1, iy) +
           (1 - ax) * ay * at(ix, iy + 1) + ax * ay * at(ix + 1, iy + 1);
  }

 private:
  Vec2 lo_, hi_;
  int nx_ = 0, ny_ = 0;
  double hx_ = 1, hy_ = 1;
  std::vector<double> d_;
};

// ---------------------------------------------------------------------------
// Area quadrature for domain integrals. Decomposition: a boundary strip in
// normal-offset coordinates carrying a smooth cutoff chi(dist), plus a
// Cartesian midpoint grid for the rest. The Cartesian integrand vanishes
// smoothly before it reaches the boundary, so the plain grid converges fast;
// the strip is a tensor rule (periodic trapezoid along the boundary, graded
// Gauss panels in the offset). The strip may start at d = delta > 0, which
// integrates over the inward parallel domain instead.

struct AreaNode {
  Vec2 x;
  double w;
};

// C^inf cutoff: 1 for u <= 0, 0 for u >= 1.
inline double smooth_step01(double u) {
  if (u <= 0) return 1.0;
  if (u >= 1) return 0.0;
  auto f = [](double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; };
  return f(1 - u) / (f(1 - u) + f(u));
}

class DomainRule {
 public:
  // chi falls from 1 at dist=cut1/2 to 0 at dist=cut1; cut1 must stay below
  // the domain reach.
  DomainRule(const PlanarDomain& dom, double cut1, int ns, double h)
      : cut1_(cut1), cut0_(0.5 * cut1), ns_(ns) {
    if (cut1_ >= dom.reach())
      throw OffsetError("DomainRule: strip width exceeds the domain reach", dom.reach());
    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (const auto* c : dom.boundary())
      for (int i = 0; i < 256; ++i) {
        Vec2 p = c->point(kTwoPi * i / 256).xy();
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
      }
    int nx = static_cast<int>((hi.x - lo.x) / h) + 2;
    int ny = static_cast<int>((hi.y - lo.y) / h) + 2;
    std::vector<AreaNode> core(static_cast<size_t>(nx) * ny, AreaNode{{}, -1});
    parallel_for(static_cast<std::int64_t>(nx) * ny, [&](std::int64_t idx) {
      int ix = static_cast<int>(idx % nx), iy = static_cast<int>(idx / nx);
      Vec2 x{lo.x + (ix + 0.5) * h, lo.y + (iy + 0.5) * h};
      if (!dom.contains(x)) return;
      double d = dom.boundary_distance(x, cut1_ * 1.05);
      if (d <= cut0_ + 1e-12) return;
      double w = (1.0 - chi(d)) * h * h;
      if (w > 1e-300) core[idx] = {x, w};
    });
    for (const auto& n : core)
      if (n.w > 0) core_.push_back(n);
    for (const auto* c : dom.boundary()) curves_.push_back(c);
  }

  // Integral of f over the inward offset domain {dist >= delta}, delta < cut1/2.
  template <class F>
  double integrate(double delta, F&& f, int gauss_pts = 12) const {
    if (delta >= cut0_) throw ConfigError("DomainRule::integrate: delta too large");
    double s_core = parallel_sum(static_cast<std::int64_t>(core_.size()),
                                 [&](std::int64_t i) { return core_[i].w * f(core_[i].x); });
    double s_strip = 0;
    for (const ClosedCurve* c : curves_) {
      auto ring = [&](double d) {
        double ch = chi(d);
        if (ch <= 0) return 0.0;
        return parallel_sum(ns_, [&](std::int64_t i) {
          double t = kTwoPi * static_cast<double>(i) / ns_;
          Vec3 v = c->deriv(t, 1);
          double sp = norm(v.xy());
          Vec2 nu = perp(v.xy() / sp);
          double kap = c->signed_curvature2(t);
          Vec2 x = c->point(t).xy() + d * nu;
          return f(x) * sp * (1.0 - kap * d);
        }) * (kTwoPi / ns_) * ch;
      };
      s_strip += graded_panels(delta, cut1_, std::max(delta, 1e-8 * cut1_), 1.9,
                               gauss_pts, ring);
    }
    return s_core + s_strip;
  }

  double chi(double d) const { return smooth_step01((d - cut0_) / (cut1_ - cut0_)); }
  double cut0() const { return cut0_; }
  size_t core_nodes() const { return core_.size(); }

 private:
  double cut1_, cut0_;
  int ns_;
  std::vector<AreaNode> core_;
  std::vector<const ClosedCurve*> curves_;
};

// Fixed nodes for integrating boundary-regular functions over the whole
// domain (mutual energies of disjoint domains and similar).
inline std::vector<AreaNode> area_rule(const PlanarDomain& dom, int ns = 256,
                                       int nd = 24, double h_rel = 0.02) {
  double cut1 = 0.85 * std::min(dom.reach(), 0.5 * dom.diameter());
  double cut0 = 0.5 * cut1;
  auto chi = [&](double d) { return smooth_step01((d - cut0) / (cut1 - cut0)); };
  std::vector<AreaNode> nodes;
  const GaussRule& g = gauss_legendre(nd);
  for (const auto* c : dom.boundary()) {
    for (int id = 0; id < nd; ++id) {
      double d = 0.5 * cut1 * (1 + g.x[id]);
      double wd = 0.5 * cut1 * g.w[id] * chi(d);
      if (wd < 1e-300) continue;
      for (int i = 0; i < ns; ++i) {
        double t = kTwoPi * i / ns;
        Vec3 v = c->deriv(t, 1);
        double sp = norm(v.xy());
        Vec2 nu = perp(v.xy() / sp);
        double kap = c->signed_curvature2(t);
        nodes.push_back({c->point(t).xy() + d * nu, wd * sp * (1 - kap * d) * kTwoPi / ns});
      }
    }
  }
  double h = h_rel * dom.diameter();
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  for (const auto* c : dom.boundary())
    for (int i = 0; i < 256; ++i) {
      Vec2 p = c->point(kTwoPi * i / 256).xy();
      lo.x = std::min(lo.x, p.x);
      lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x);
      hi.y = std::max(hi.y, p.y);
    }
  int nx = static_cast<int>((hi.x - lo.x) / h) + 2;
  int ny = static_cast<int>((hi.y - lo.y) / h) + 2;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      Vec2 x{lo.x + (ix + 0.5) * h, lo.y + (iy + 0.5) * h};
      if (!dom.contains(x)) continue;
      double d = dom.boundary_distance(x, cut1 * 1.05);
      if (d <= cut0 + 1e-12) continue;
      double w = (1.0 - chi(d)) * h * h;
      if (w > 1e-300) nodes.push_back({x, w});
    }
  return nodes;
}

}  // namespace mobius
