#pragma once

// Planar energies: the renormalized r^-4 potential V(w, Omega), the domain
// energy E(Omega), the curve energy E(K) in its limit-free and cutoff forms,
// mutual energies of disjoint domains, and the line-geometry and
// tangent-circle routes to the same quantities.

#include <vector>

#include "mobius/curve.hpp"
#include "mobius/domain.hpp"
#include "mobius/mc.hpp"
#include "mobius/renorm.hpp"

namespace mobius::planar {

inline constexpr double kDiskDomainEnergy = 3.0 * kPi * kPi / 4.0;  // E of a round disk
inline constexpr double kCircleCurveEnergy = kPi * kPi / 2.0;       // E of a circle

// ---------------------------------------------------------------------------
// Renormalized potential, contour form: V(w) = -1/2 oint det(p-w, dp)/|p-w|^4
// over the oriented boundary. Evaluations near the boundary replace the
// trapezoid nodes around the closest point by graded Gauss panels.

class ContourPotential {
 public:
  explicit ContourPotential(const PlanarDomain& dom, int n_base = 512) {
    for (const auto* c : dom.boundary()) {
      Grid g;
      g.curve = c;
      g.n = std::max(n_base, 8 * c->modes());
      g.p.resize(g.n);
      g.v.resize(g.n);
      for (int i = 0; i < g.n; ++i) {
        double t = kTwoPi * i / g.n;
        g.p[i] = c->point(t).xy();
        g.v[i] = c->deriv(t, 1).xy();
      }
      grids_.push_back(std::move(g));
    }
  }

  double operator()(Vec2 w) const {
    double s = 0;
    for (const auto& g : grids_) s += loop_integral(g, w);
    return -0.5 * s;
  }

 private:
  struct Grid {
    const ClosedCurve* curve;
    int n;
    std::vector<Vec2> p, v;
  };

  static double kernel(Vec2 p, Vec2 v, Vec2 w) {
    Vec2 d = p - w;
    double r2 = norm2(d);
    return cross(d, v) / (r2 * r2);
  }

  double loop_integral(const Grid& g, Vec2 w) const {
    double h = kTwoPi / g.n;
    double sum = 0, best = 1e300;
    int jbest = 0;
    for (int j = 0; j < g.n; ++j) {
      sum += kernel(g.p[j], g.v[j], w);
      double d2 = norm2(g.p[j] - w);
      if (d2 < best) {
        best = d2;
        jbest = j;
      }
    }
    sum *= h;
    double sp = norm(g.v[jbest]);
    double d_param = std::sqrt(best) / sp;  // distance in parameter units
    if (d_param > 12 * h) return sum;

    // close to this boundary component: redo the whole loop with graded
    // panels from the foot of the perpendicular (the trapezoid cannot
    // resolve the d^-2 peak, and the counterterm cancellation downstream
    // amplifies any error here)
    const ClosedCurve& c = *g.curve;
    Vec3 w3(w);
    double tc = kTwoPi * jbest / g.n;
    for (int it = 0; it < 30; ++it) {
      Vec3 p = c.point(tc), vv = c.deriv(tc, 1), a = c.deriv(tc, 2);
      double f = dot(p - w3, vv);
      double fp = dot(vv, vv) + dot(p - w3, a);
      if (std::abs(fp) < 1e-30) break;
      double step = std::clamp(f / fp, -2 * h, 2 * h);
      tc -= step;
      if (std::abs(step) < 1e-15) break;
    }
    double dist = norm(c.point(tc) - w3);
    auto f = [&](double t) {
      return kernel(c.point(t).xy(), c.deriv(t, 1).xy(), w);
    };
    double first = std::max(0.2 * dist / sp, 1e-9);
    return graded_panels(0, kPi, first, 1.55, 8, [&](double u) { return f(tc + u); }) +
           graded_panels(0, kPi, first, 1.55, 8, [&](double u) { return f(tc - u); });
  }

  std::vector<Grid> grids_;
};

struct PotentialValue {
  double value = 0;
  bool near_boundary = false;
};

// V(w, Omega) for strictly interior w; always finite and negative.
inline PotentialValue potential(const PlanarDomain& dom, Vec2 w, int n_base = 512) {
  if (!dom.contains(w)) throw GeometryError("potential: point is not inside the domain");
  ContourPotential pot(dom, n_base);
  PotentialValue out;
  out.value = pot(w);
  out.near_boundary = dom.boundary_distance(w, 1e-3 * dom.diameter() * 2) <
                      1e-3 * dom.diameter();
  return out;
}

// ---------------------------------------------------------------------------
// Boundary blow-up of V: sample along the inward normal, fit
// c2/d^2 + c1/d + c0 (+ c3 d).

struct PotentialProfile {
  std::vector<std::pair<double, double>> samples;  // (delta, V)
  double c2 = 0, c1 = 0, c0 = 0;
  double fit_residual = 0;
  double kappa = 0;  // boundary curvature at the foot point
};

inline PotentialProfile potential_asymptotics(const PlanarDomain& dom,
                                              const ClosedCurve& bnd, double t,
                                              int rungs = 8) {
  ContourPotential pot(dom, 768);
  Frame f = bnd.frame(t);
  Vec2 nu = perp(f.tangent.xy());  // inward
  PotentialProfile prof;
  prof.kappa = f.curvature;
  double d0 = 0.2 * dom.reach();
  for (int i = 0; i < rungs; ++i) {
    double d = d0 * std::pow(0.5, i);
    Vec2 w = f.point.xy() + d * nu;
    if (!dom.contains(w)) throw GeometryError("potential_asymptotics: ladder exits the domain");
    prof.samples.push_back({d, pot(w)});
  }
  DivergenceModel model{{-2, -1, 0, 1}, {}};
  RenormResult r = extrapolate(prof.samples, model);
  prof.c2 = r.coefficients.at(-2);
  prof.c1 = r.coefficients.at(-1);
  prof.c0 = r.coefficients.at(0);
  prof.fit_residual = r.fit_residual;
  return prof;
}

// ---------------------------------------------------------------------------
// Domain energy: E(Omega) = lim_{d->0} ( int_{Omega_d} V + (pi/4d) L ).

struct DomainEnergyOptions {
  int rungs = 6;
  double ratio = 0.5;
  double delta0 = 0;     // 0: automatic
  int ns = 384;          // boundary nodes of the strip rule
  double h_rel = 0.012;  // Cartesian core spacing / diameter
  int n_contour = 512;   // potential contour resolution
};

struct DomainEnergy {
  RenormResult renorm;                              // fitted limit
  std::vector<std::pair<double, double>> raw;       // (delta, int_{Omega_d} V)
  double counterterm_coefficient = 0;               // pi L / 4
};

inline DomainEnergy domain_energy_full(const PlanarDomain& dom,
                                       DomainEnergyOptions opt = {}) {
  double L = dom.boundary_length();
  double cut1 = 0.85 * std::min(dom.reach(), 0.25 * dom.diameter());
  double delta0 = opt.delta0 > 0 ? opt.delta0
                                 : std::min(dom.diameter() / 16.0, 0.9 * 0.5 * cut1);
  if (delta0 >= 0.5 * cut1)
    throw OffsetError("domain_energy: ladder start exceeds the feasible offset", 0.5 * cut1);
  DomainRule rule(dom, cut1, opt.ns, opt.h_rel * dom.diameter());
  ContourPotential pot(dom, opt.n_contour);
  DomainEnergy out;
  out.counterterm_coefficient = kPi * L / 4.0;
  std::vector<std::pair<double, double>> ladder;
  for (double d : geometric_ladder(delta0, opt.rungs, opt.ratio)) {
    double raw = rule.integrate(d, [&](Vec2 x) { return pot(x); });
    out.raw.push_back({d, raw});
    ladder.push_back({d, raw + kPi * L / (4.0 * d)});
  }
  out.renorm = extrapolate(ladder, DivergenceModel::constant_plus_linear());
  return out;
}

inline RenormResult domain_energy(const PlanarDomain& dom, DomainEnergyOptions opt = {}) {
  return domain_energy_full(dom, opt).renorm;
}

// ---------------------------------------------------------------------------
// Curve energy, limit-free form: E(K) = -1/2 II sin th_p sin th_q /r^2 dp dq
// with the signed planar angles; the diagonal of self-pairs carries the
// analytic limit -kappa^2/4.

namespace detail {

inline void check_disjoint_components(const std::vector<const ClosedCurve*>& ks) {
  for (size_t a = 0; a < ks.size(); ++a)
    for (size_t b = a + 1; b < ks.size(); ++b) {
      double dmin = 1e300;
      for (int i = 0; i < 256; ++i)
        dmin = std::min(dmin, ks[a]->distance_to(ks[b]->point(kTwoPi * i / 256)));
      if (dmin < 1e-9 * (ks[a]->diameter() + ks[b]->diameter()))
        throw GeometryError("curve components intersect");
    }
}

inline double min_gap(const std::vector<const ClosedCurve*>& ks) {
  double g = 1e300;
  for (size_t a = 0; a < ks.size(); ++a)
    for (size_t b = a + 1; b < ks.size(); ++b)
      for (int i = 0; i < 256; ++i)
        g = std::min(g, ks[a]->distance_to(ks[b]->point(kTwoPi * i / 256)));
  return g;
}

// sin th_p sin th_q / r^2 in parameter form (planar, signed).
inline double sinsin_kernel2(Vec2 p, Vec2 vp, Vec2 q, Vec2 vq) {
  Vec2 d = q - p;
  double r2 = norm2(d);
  double sp = norm(vp), sq_ = norm(vq);
  return cross(vp / sp, d) * cross(vq / sq_, d) / (r2 * r2) * sp * sq_;
}

}  // namespace detail

inline int default_curve_n(const std::vector<const ClosedCurve*>& ks) {
  int n = 512;
  for (const auto* k : ks) n = std::max(n, 16 * k->modes());
  if (ks.size() > 1) {
    double g = detail::min_gap(ks);
    double dmax = 0;
    for (const auto* k : ks) dmax = std::max(dmax, k->length());
    n = std::max(n, std::min(4096, static_cast<int>(8 * dmax / std::max(g, 1e-6))));
  }
  return n;
}

inline double curve_energy(const std::vector<const ClosedCurve*>& ks, int n = 0) {
  detail::check_disjoint_components(ks);
  if (n <= 0) n = default_curve_n(ks);
  double total = 0;
  std::vector<CurveGrid> gs;
  for (const auto* k : ks) gs.push_back(k->grid(n));
  for (size_t a = 0; a < ks.size(); ++a)
    for (size_t b = 0; b < ks.size(); ++b) {
      const CurveGrid &ga = gs[a], &gb = gs[b];
      double w = sq(kTwoPi / n);
      double s = parallel_sum(static_cast<std::int64_t>(n) * n, [&](std::int64_t idx) {
        int i = static_cast<int>(idx / n), j = static_cast<int>(idx % n);
        if (a == b && i == j)
          return -0.25 * sq(ga.kappa[i]) * sq(ga.speed[i]);
        return detail::sinsin_kernel2(ga.p[i].xy(), ga.d1[i].xy(), gb.p[j].xy(),
                                      gb.d1[j].xy());
      });
      total += w * s;
    }
  return -0.5 * total;
}

inline double curve_energy(const PlanarDomain& dom, int n = 0) {
  std::vector<const ClosedCurve*> ks = dom.boundary();
  return curve_energy(ks, n);
}

// ---------------------------------------------------------------------------
// Cutoff forms over {|q-p| > eps}.

enum class CutForm { dots, coscos };

namespace detail {

// Window [t_minus, t_plus] around s where |K(t) - K(s)| < eps; assumes eps is
// below the curve's self-gap so the window is a single interval.
inline std::pair<double, double> eps_window(const ClosedCurve& c, const CurveGrid& g,
                                            double s, Vec2 p, double eps) {
  auto r2at = [&](double t) { return norm2(c.point(t).xy() - p); };
  double e2 = eps * eps;
  double h = kTwoPi / g.n;
  auto bisect = [&](double lo, double hi) {
    // r2(lo) < e2 <= r2(hi)
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (r2at(mid) < e2) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  double up = s;
  int guard = 0;
  while (r2at(up + h) < e2 && ++guard < g.n) up += h;
  if (guard >= g.n) throw GeometryError("cutoff: eps exceeds the curve extent");
  double t_plus = bisect(up, up + h);
  double dn = s;
  guard = 0;
  while (r2at(dn - h) < e2 && ++guard < g.n) dn -= h;
  double t_minus = bisect(dn, dn - h);
  return {t_minus, t_plus};
}

}  // namespace detail

struct CutoffEnergy {
  RenormResult curve_convention;   // E(K)
  double kappa_term = 0;           // (pi/8) oint kappa ds
  double domain_value = 0;         // E(K) + kappa term
  std::vector<std::pair<double, double>> raw_ladder;  // (eps, scaled cutoff integral)
};

// Cutoff double integral of `form` over the boundary system; the ladder is
// geometric from eps0 (default diameter/16).
inline CutoffEnergy curve_energy_cutoff(const std::vector<const ClosedCurve*>& ks,
                                        CutForm form, double eps0 = 0, int rungs = 6,
                                        int n_outer = 0) {
  detail::check_disjoint_components(ks);
  double diam = 0;
  for (const auto* k : ks) diam = std::max(diam, k->diameter());
  if (ks.size() > 1) {
    double gap = detail::min_gap(ks);
    if (eps0 <= 0) eps0 = std::min(diam / 16, 0.45 * gap);
  } else if (eps0 <= 0) {
    eps0 = diam / 16;
  }
  if (n_outer <= 0) {
    n_outer = 512;
    for (const auto* k : ks) n_outer = std::max(n_outer, 16 * k->modes());
  }
  double L = 0;
  for (const auto* k : ks) L += k->length();

  std::vector<CurveGrid> gs;
  for (const auto* k : ks) gs.push_back(k->grid(std::max(1024, 4 * n_outer)));

  auto pair_kernel = [&](Vec2 p, Vec2 vp, Vec2 q, Vec2 vq) {
    Vec2 d = q - p;
    double r2 = norm2(d);
    if (form == CutForm::dots) return dot(vp, vq) / r2;
    double sp = norm(vp), sq_ = norm(vq);
    return dot(vp / sp, d) * dot(vq / sq_, d) / (r2 * r2) * sp * sq_;
  };

  CutoffEnergy out;
  std::vector<std::pair<double, double>> ladder;
  for (double eps : geometric_ladder(eps0, rungs)) {
    // self pairs: outer trapezoid, inner integral over the complement of the
    // eps-window by graded panels from both window ends
    double integral = 0;
    for (size_t a = 0; a < ks.size(); ++a) {
      const ClosedCurve& c = *ks[a];
      const CurveGrid& g = gs[a];
      double self = parallel_sum(n_outer, [&](std::int64_t io) {
        double s = kTwoPi * static_cast<double>(io) / n_outer;
        Vec2 p = c.point(s).xy(), vp = c.deriv(s, 1).xy();
        auto [tm, tp] = detail::eps_window(c, g, s, p, eps);
        auto f = [&](double t) {
          return pair_kernel(p, vp, c.point(t).xy(), c.deriv(t, 1).xy());
        };
        double mid = 0.5 * (tp + tm + kTwoPi);
        double first = 0.25 * eps / norm(vp);
        double inner = graded_panels(0, mid - tp, first, 1.7, 8,
                                     [&](double u) { return f(tp + u); }) +
                       graded_panels(0, (tm + kTwoPi) - mid, first, 1.7, 8,
                                     [&](double u) { return f(tm + kTwoPi - u); });
        return inner;
      }) * (kTwoPi / n_outer);
      integral += self;
      // cross pairs: plain tensor trapezoid (eps below the component gap)
      for (size_t b = 0; b < ks.size(); ++b) {
        if (b == a) continue;
        const CurveGrid& gb = gs[b];
        int n = g.n;
        double crossint = parallel_sum(static_cast<std::int64_t>(n) * n,
                                       [&](std::int64_t idx) {
          int i = static_cast<int>(idx / n), j = static_cast<int>(idx % n);
          return pair_kernel(g.p[i].xy(), g.d1[i].xy(), gb.p[j].xy(), gb.d1[j].xy());
        });
        integral += crossint * sq(kTwoPi / n);
      }
    }
    double scaled = (form == CutForm::dots) ? 0.25 * integral : 0.5 * integral;
    out.raw_ladder.push_back({eps, scaled});
    double counter = (form == CutForm::dots) ? L / (2 * eps) : L / eps;
    ladder.push_back({eps, counter - scaled});
  }
  out.curve_convention = extrapolate(ladder, DivergenceModel{{-1, 0, 1}, {}});
  double kap = 0;
  for (const auto* k : ks) {
    int n = 1024;
    for (int i = 0; i < n; ++i) {
      double t = kTwoPi * i / n;
      kap += k->signed_curvature2(t) * k->speed(t);
    }
  }
  kap *= kTwoPi / 1024;
  out.kappa_term = kPi / 8.0 * kap;
  out.domain_value = out.curve_convention.value + out.kappa_term;
  return out;
}

// ---------------------------------------------------------------------------
// Mutual energies of disjoint domains.

inline void check_domains_disjoint(const PlanarDomain& a, const PlanarDomain& b) {
  for (const auto* c : b.boundary())
    if (a.contains(c->point(0).xy()))
      throw GeometryError("mutual energy: domains overlap");
  for (const auto* c : a.boundary())
    if (b.contains(c->point(0).xy()))
      throw GeometryError("mutual energy: domains overlap");
  for (const auto* ca : a.boundary())
    for (int i = 0; i < 128; ++i)
      if (b.contains(ca->point(kTwoPi * i / 128).xy()))
        throw GeometryError("mutual energy: domains overlap");
}

inline double mutual_energy_area(const PlanarDomain& a, const PlanarDomain& b,
                                 int ns = 256, int nd = 24, double h_rel = 0.02) {
  check_domains_disjoint(a, b);
  auto ra = area_rule(a, ns, nd, h_rel), rb = area_rule(b, ns, nd, h_rel);
  std::int64_t na = ra.size(), nb = rb.size();
  return parallel_sum(na, [&](std::int64_t i) {
    double s = 0;
    Vec2 w = ra[i].x;
    for (std::int64_t j = 0; j < nb; ++j) {
      double r2 = norm2(rb[j].x - w);
      s += rb[j].w / (r2 * r2);
    }
    return ra[i].w * s;
  });
}

enum class MutualForm { rere, imim, dots };

struct MutualContour {
  double value = 0;
  bool near_contact_warning = false;
};

inline MutualContour mutual_energy_contour(const std::vector<const ClosedCurve*>& k1,
                                           const std::vector<const ClosedCurve*>& k2,
                                           MutualForm form, int n = 0) {
  std::vector<const ClosedCurve*> all = k1;
  all.insert(all.end(), k2.begin(), k2.end());
  detail::check_disjoint_components(all);
  double gap = 1e300, diam = 0;
  for (const auto* a : k1)
    for (const auto* b : k2) {
      for (int i = 0; i < 256; ++i)
        gap = std::min(gap, a->distance_to(b->point(kTwoPi * i / 256)));
      diam = std::max({diam, a->diameter(), b->diameter()});
    }
  MutualContour out;
  out.near_contact_warning = gap < 1e-3 * diam;
  if (n <= 0)
    n = std::max({512, static_cast<int>(std::min(8192.0, 10 * diam / std::max(gap, 1e-9)))});
  double total = 0;
  for (const auto* a : k1)
    for (const auto* b : k2) {
      CurveGrid ga = a->grid(n), gb = b->grid(n);
      double s = parallel_sum(static_cast<std::int64_t>(n) * n, [&](std::int64_t idx) {
        int i = static_cast<int>(idx / n), j = static_cast<int>(idx % n);
        Vec2 p = ga.p[i].xy(), vp = ga.d1[i].xy();
        Vec2 q = gb.p[j].xy(), vq = gb.d1[j].xy();
        Vec2 d = q - p;
        double r2 = norm2(d);
        switch (form) {
          case MutualForm::rere: {
            double spn = norm(vp), sqn = norm(vq);
            return dot(vp / spn, d) * dot(vq / sqn, d) / (r2 * r2) * spn * sqn;
          }
          case MutualForm::imim:
            return detail::sinsin_kernel2(p, vp, q, vq);
          case MutualForm::dots:
          default:
            return dot(vp, vq) / r2;
        }
      });
      total += s * sq(kTwoPi / n);
    }
  out.value = (form == MutualForm::dots) ? -0.25 * total : -0.5 * total;
  return out;
}

// ---------------------------------------------------------------------------
// Line-geometry routes. Lines are (r, theta) with x.u(theta) = r, r >= 0,
// theta in [0, 2pi); the invariant measure is dr dtheta.

namespace detail {

// Support-function slice of the curve system for one line direction. The
// support height h(t) = K(t).u is band-limited; breakpoints at its refined
// extrema make every piece monotone, so close root pairs near tangent lines
// are bracketed reliably.
struct LineSlice {
  std::vector<const ClosedCurve*> curves;
  Vec2 u, v;  // direction and line direction
  int n = 0;
  std::vector<std::vector<double>> bp_t;  // breakpoints per curve (sorted)
  std::vector<std::vector<double>> bp_h;  // support at breakpoints
  std::vector<double> crit;               // extremal support values (all curves)

  void build(const std::vector<const ClosedCurve*>& ks, double theta, int n_) {
    n = n_;
    u = {std::cos(theta), std::sin(theta)};
    v = perp(u);
    curves = ks;
    bp_t.assign(ks.size(), {});
    bp_h.assign(ks.size(), {});
    crit.clear();
    for (size_t c = 0; c < ks.size(); ++c) {
      const ClosedCurve& k = *ks[c];
      auto hat = [&](double t) { return dot(k.point(t).xy(), u); };
      auto hpat = [&](double t) { return dot(k.deriv(t, 1).xy(), u); };
      std::vector<double>&ts = bp_t[c], &hs = bp_h[c];
      for (int i = 0; i < n; ++i) {
        double t0 = kTwoPi * i / n, t1 = kTwoPi * (i + 1) / n;
        ts.push_back(t0);
        hs.push_back(hat(t0));
        double e0 = hpat(t0), e1 = hpat(t1);
        if (e0 == 0) e0 = 1e-300;
        if ((e0 < 0) == (e1 < 0)) continue;
        double lo = t0, hi = t1, fa = e0;
        for (int it = 0; it < 48; ++it) {
          double mid = 0.5 * (lo + hi), fm = hpat(mid);
          if ((fm < 0) == (fa < 0)) {
            lo = mid;
            fa = fm;
          } else {
            hi = mid;
          }
        }
        double te = 0.5 * (lo + hi), he = hat(te);
        ts.push_back(te);
        hs.push_back(he);
        crit.push_back(he);
      }
    }
  }

  // all intersections of the line x.u = r with curve c: (position along the
  // line, crossing sign)
  void intersections(size_t c, double r, std::vector<std::pair<double, double>>* out,
                     double* min_abs_hp) const {
    const ClosedCurve& k = *curves[c];
    auto hat = [&](double t) { return dot(k.point(t).xy(), u) - r; };
    const auto& ts = bp_t[c];
    const auto& hs = bp_h[c];
    size_t m = ts.size();
    for (size_t i = 0; i < m; ++i) {
      size_t j = (i + 1) % m;
      double ta = ts[i], tb = ts[j] + (j == 0 ? kTwoPi : 0.0);
      double a = hs[i] - r, b = hs[j] - r;
      if (a == 0) a = 1e-300;
      if ((a < 0) == (b < 0)) continue;
      double lo = ta, hi = tb, fa = a;
      for (int it = 0; it < 52; ++it) {
        double mid = 0.5 * (lo + hi), fm = hat(mid);
        if ((fm < 0) == (fa < 0)) {
          lo = mid;
          fa = fm;
        } else {
          hi = mid;
        }
      }
      double t = 0.5 * (lo + hi);
      double dh = dot(k.deriv(t, 1).xy(), u);
      *min_abs_hp = std::min(*min_abs_hp, std::abs(dh));
      out->push_back({dot(k.point(t).xy(), v), dh > 0 ? 1.0 : -1.0});
    }
  }

  const std::vector<double>& critical_values() const { return crit; }
};

}  // namespace detail

struct SegmentEnergyResult {
  double value = 0;
  std::int64_t jitter_events = 0;
};

// E(K) = -1/2 int over lines of sum_{ordered pairs p != q in l cap K}
// eps(p) eps(q) / |q - p| dl.
inline SegmentEnergyResult segment_energy(const std::vector<const ClosedCurve*>& ks,
                                          int n_theta = 384, int n_dense = 512,
                                          int gauss_pts = 32) {
  detail::check_disjoint_components(ks);
  std::vector<double> theta_vals(n_theta);
  for (int i = 0; i < n_theta; ++i) theta_vals[i] = kTwoPi * i / n_theta;

  std::vector<double> per_theta(n_theta, 0.0);
  std::vector<std::int64_t> jitters(n_theta, 0);
  parallel_for(n_theta, [&](std::int64_t it) {
    detail::LineSlice slice;
    slice.build(ks, theta_vals[it], n_dense);
    std::vector<double> crit = slice.critical_values();
    crit.push_back(0.0);
    std::sort(crit.begin(), crit.end());
    crit.erase(std::unique(crit.begin(), crit.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               crit.end());
    double sum = 0;
    const GaussRule& g = gauss_legendre(gauss_pts);
    std::vector<std::pair<double, double>> pts;
    for (size_t seg = 0; seg + 1 < crit.size(); ++seg) {
      double lo = crit[seg], hi = crit[seg + 1];
      if (hi <= 0) continue;
      lo = std::max(lo, 0.0);
      if (hi - lo < 1e-14) continue;
      double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (int iq = 0; iq < gauss_pts; ++iq) {
        double phi = 0.5 * kPi * g.x[iq];
        double r = mid + half * std::sin(phi);
        double wr = half * std::cos(phi) * 0.5 * kPi * g.w[iq];
        double S = 0;
        double r_try = r;
        for (int attempt = 0; attempt < 3; ++attempt) {
          pts.clear();
          double min_hp = 1e300;
          for (size_t c = 0; c < ks.size(); ++c)
            slice.intersections(c, r_try, &pts, &min_hp);
          if (min_hp < 1e-7 && attempt < 2) {
            r_try = r + (attempt + 1) * 1e-9;
            ++jitters[it];
            continue;
          }
          S = 0;
          for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = 0; j < pts.size(); ++j) {
              if (i == j) continue;
              S += pts[i].second * pts[j].second / std::abs(pts[i].first - pts[j].first);
            }
          break;
        }
        sum += wr * S;
      }
    }
    per_theta[it] = sum;
  });
  SegmentEnergyResult out;
  double total = 0;
  for (double v : per_theta) total += v;
  for (auto j : jitters) out.jitter_events += j;
  out.value = -0.5 * total * (kTwoPi / n_theta);
  return out;
}

// Convex-domain chord form: E(K) = int dl / chord_length over lines meeting
// the domain.
inline double convex_chord_energy(const PlanarDomain& dom, int n_theta = 512,
                                  int n_dense = 512, int gauss_pts = 48) {
  if (dom.components.size() != 1 || !dom.components[0].holes.empty())
    throw GeometryError("convex_chord_energy: domain must be a single convex component");
  const ClosedCurve& k = dom.components[0].outer;
  for (int i = 0; i < 1024; ++i)
    if (k.signed_curvature2(kTwoPi * i / 1024) < -1e-9)
      throw GeometryError("convex_chord_energy: domain is not convex");
  std::vector<const ClosedCurve*> ks{&k};
  double total = parallel_sum(n_theta, [&](std::int64_t it) {
    double theta = kTwoPi * static_cast<double>(it) / n_theta;
    detail::LineSlice slice;
    slice.build(ks, theta, n_dense);
    double hmax = -1e300, hmin = 1e300;
    for (double v : slice.bp_h[0]) {
      hmax = std::max(hmax, v);
      hmin = std::min(hmin, v);
    }
    double lo = std::max(0.0, hmin);
    if (hmax <= lo) return 0.0;
    const GaussRule& g = gauss_legendre(gauss_pts);
    double sum = 0;
    std::vector<std::pair<double, double>> pts;
    for (int iq = 0; iq < gauss_pts; ++iq) {
      // cluster at the tangent end r = hmax where the chord vanishes
      double phi = 0.25 * kPi * (g.x[iq] + 1);  // [0, pi/2]
      double r = hmax - (hmax - lo) * (1 - std::sin(phi));
      double wr = (hmax - lo) * std::cos(phi) * 0.25 * kPi * g.w[iq];
      pts.clear();
      double min_hp = 1e300;
      slice.intersections(0, r, &pts, &min_hp);
      if (pts.size() != 2) continue;
      double chord = std::abs(pts[0].first - pts[1].first);
      if (chord > 1e-13) sum += wr / chord;
    }
    return sum;
  });
  return total * (kTwoPi / n_theta);
}

// ---------------------------------------------------------------------------
// Non-trivial pair set route: E(K) = pi^2 chi / 2 + int_{NT} da dz / |z-w|^4,
// NT the pairs (w,z) such that every circle through w and z meets the
// boundary. Membership is tested by maximizing, over the pencil of circles
// through (w,z), the worst signed distance of the circle to the domain.

struct NtEnergy {
  double value = 0;
  MCEstimate estimate;  // the NT integral
  std::int64_t nt_hits = 0;
};

namespace detail {

// Signed inward clearance of the circle (c,R): min over the circle of the
// signed distance to the domain. Contact dips of a snugly inscribed circle
// are narrow (width ~ sqrt(clearance / curvature mismatch)), so the coarse
// scan is dense and the two lowest separated basins are polished by golden
// search. Returns early once the running minimum falls below `abort_below`.
inline double circle_clearance(const DistanceField& dom, Vec2 c, double R,
                               double abort_below = -1e300, int n_circle = 160) {
  auto sd = [&](double a) {
    Vec2 x = c + R * Vec2{std::cos(a), std::sin(a)};
    return dom(x);
  };
  thread_local std::vector<double> vals;
  vals.assign(n_circle, 0.0);
  double worst = 1e300;
  for (int i = 0; i < n_circle; ++i) {
    vals[i] = sd(kTwoPi * i / n_circle);
    if (vals[i] < worst) {
      worst = vals[i];
      if (worst < abort_below) return worst;
    }
  }
  // local minima of the coarse scan, two lowest basins polished
  int best1 = -1, best2 = -1;
  for (int i = 0; i < n_circle; ++i) {
    double vm = vals[(i + n_circle - 1) % n_circle], vp = vals[(i + 1) % n_circle];
    if (vals[i] <= vm && vals[i] <= vp) {
      if (best1 < 0 || vals[i] < vals[best1]) {
        best2 = best1;
        best1 = i;
      } else if (best2 < 0 || vals[i] < vals[best2]) {
        best2 = i;
      }
    }
  }
  const double gr = 0.6180339887498949;
  for (int basin : {best1, best2}) {
    if (basin < 0) continue;
    double lo = kTwoPi * (basin - 1) / n_circle, hi = kTwoPi * (basin + 1) / n_circle;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = sd(x1), f2 = sd(x2);
    for (int it = 0; it < 24; ++it) {
      if (f1 > f2) {  // minimizing
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = sd(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = sd(x1);
      }
    }
    worst = std::min({worst, f1, f2});
    if (worst < abort_below) return worst;
  }
  return worst;
}

// max over the circle pencil through (w,z) of the circle clearance; positive
// means some circle through the pair stays inside the domain. The clearance
// is concave-shaped in the pencil parameter in practice; the coarse argmax is
// refined by golden search between its grid neighbours.
inline double nt_best_margin(const DistanceField& dom, double scale, Vec2 w, Vec2 z,
                             int n_u = 49) {
  Vec2 m = 0.5 * (w + z);
  Vec2 e = perp((z - w) / norm(z - w));
  double halfchord = 0.5 * norm(z - w);
  double best = -1e300;
  auto margin = [&](double psi) {
    double uu = std::tan(psi) * 0.5 * scale;
    Vec2 c = m + uu * e;
    double R = std::sqrt(sq(halfchord) + sq(uu));
    return circle_clearance(dom, c, R, best);
  };
  double best_psi = 0;
  double dpsi = kPi / n_u;
  for (int i = 0; i < n_u; ++i) {
    double psi = -0.5 * kPi + dpsi * (i + 0.5);
    double v = margin(psi);
    if (v > best) {
      best = v;
      best_psi = psi;
    }
  }
  double lo = best_psi - dpsi, hi = best_psi + dpsi;
  const double gr = 0.6180339887498949;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = margin(x1), f2 = margin(x2);
  for (int it = 0; it < 32; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = margin(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = margin(x1);
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

}  // namespace detail

inline NtEnergy nt_energy(const PlanarDomain& dom, std::int64_t n_pairs = 20000,
                          std::uint64_t seed = 12345) {
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  for (const auto* c : dom.boundary())
    for (int i = 0; i < 256; ++i) {
      Vec2 p = c->point(kTwoPi * i / 256).xy();
      lo.x = std::min(lo.x, p.x);
      lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x);
      hi.y = std::max(hi.y, p.y);
    }
  double area_box = (hi.x - lo.x) * (hi.y - lo.y);
  double tol = 1e-3 * dom.diameter();
  DistanceField field(dom);
  std::vector<double> vals(n_pairs, 0.0);
  std::vector<std::uint8_t> discarded(n_pairs, 0), hit(n_pairs, 0);
  parallel_for(n_pairs, [&](std::int64_t i) {
    SampleStream rng(seed, i);
    Vec2 w{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
    Vec2 z{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
    if (!dom.contains(w) || !dom.contains(z)) return;
    double r2 = norm2(z - w);
    if (r2 < sq(1e-6 * dom.diameter())) return;  // diagonal is not in NT anyway
    double best = detail::nt_best_margin(field, dom.diameter(), w, z);
    if (std::abs(best) < tol) {
      discarded[i] = 1;
      return;
    }
    if (best < 0) {
      hit[i] = 1;
      vals[i] = area_box * area_box / (r2 * r2);
    }
  });
  NtEnergy out;
  out.estimate = mc_from_values(vals);
  std::int64_t nd = 0;
  for (auto d : discarded) nd += d;
  for (auto h : hit) out.nt_hits += h;
  out.estimate.discard_rate = static_cast<double>(nd) / static_cast<double>(n_pairs);
  out.value = kPi * kPi * dom.euler_characteristic() / 2.0 + out.estimate.mean;
  return out;
}

// ---------------------------------------------------------------------------
// Tangent-circle angle routes. theta(p,q) is the angle at p between the
// boundary and the circle through p and q positively tangent to the boundary
// at q; by the inscribed-angle relation it equals the (unwrapped) sum of the
// two signed chord angles, and it vanishes on the diagonal.

struct TangentCircleEnergy {
  double integral_term = 0;
  double value = 0;                 // calibrated_constant + integral_term
  double calibrated_constant = 0;   // fixed by the round-disk value
  double alternate_constant = 0;    // pi^2/2 variant carried in reports
  double max_winding_residual = 0;
};

inline TangentCircleEnergy tangent_circle_energy(const PlanarDomain& dom, int n = 512) {
  if (dom.components.size() != 1 || !dom.components[0].holes.empty())
    throw GeometryError("tangent_circle_energy: domain must be simply connected");
  const ClosedCurve& k = dom.components[0].outer;
  CurveGrid g = k.grid(n);
  TangentCircleEnergy out;
  out.calibrated_constant = kDiskDomainEnergy;
  out.alternate_constant = kPi * kPi / 2.0;
  std::vector<double> row_sum(n, 0.0), row_resid(n, 0.0);
  parallel_for(n, [&](std::int64_t i) {
    Vec2 p = g.p[i].xy(), tp = g.d1[i].xy() / g.speed[i];
    double prev = 0;
    double acc = 0;
    for (int jj = 1; jj < n; ++jj) {
      int j = (static_cast<int>(i) + jj) % n;
      Vec2 q = g.p[j].xy(), tq = g.d1[j].xy() / g.speed[j];
      Vec2 d = q - p;
      double r2 = norm2(d);
      double thp = std::atan2(cross(tp, d), dot(tp, d));
      double thq = std::atan2(cross(tq, d), dot(tq, d));
      double raw = thp + thq;
      // unwrap continuously along the row
      double delta = std::remainder(raw - prev, kTwoPi);
      if (std::abs(delta) > 0.5 * kPi)
        throw ResolutionError("tangent_circle_energy: angle jump exceeds pi/2; raise n");
      double theta = prev + delta;
      prev = theta;
      acc += theta * std::sin(theta) / r2 * g.speed[i] * g.speed[j];
    }
    row_sum[i] = acc;
    row_resid[i] = std::abs(prev);  // should return to ~0 at the far end
  });
  double total = 0;
  for (int i = 0; i < n; ++i) {
    total += row_sum[i];
    out.max_winding_residual = std::max(out.max_winding_residual, row_resid[i]);
  }
  if (out.max_winding_residual > 0.5 * kPi)
    throw ResolutionError("tangent_circle_energy: winding residual; raise n");
  out.integral_term = 0.25 * total * sq(kTwoPi / n);
  out.value = out.calibrated_constant + out.integral_term;
  return out;
}

// Pair form via the inter-circle angle theta(s,t) = theta_1 + theta_2 (the
// two signed chord angles against p_2 - p_1). Its partial derivatives are in
// closed form, so no unwrapping is needed. With this angle convention and
// both boundaries positively oriented, the pair identity calibrated on the
// two-disk closed form reads
//   E(O1,O2) = 1/8 II dtheta/ds dtheta/dt ds dt - pi^2/2,
// with II -> 4 pi^2 at infinite separation.
inline double pair_theta_energy(const PlanarDomain& d1, const PlanarDomain& d2,
                                int n = 512) {
  if (d1.components.size() != 1 || !d1.components[0].holes.empty() ||
      d2.components.size() != 1 || !d2.components[0].holes.empty())
    throw GeometryError("pair_theta_energy: domains must be simply connected");
  check_domains_disjoint(d1, d2);
  const ClosedCurve& k1 = d1.components[0].outer;
  const ClosedCurve& k2 = d2.components[0].outer;
  CurveGrid g1 = k1.grid(n), g2 = k2.grid(n);
  double total = parallel_sum(static_cast<std::int64_t>(n) * n, [&](std::int64_t idx) {
    int i = static_cast<int>(idx / n), j = static_cast<int>(idx % n);
    Vec2 c = g2.p[j].xy() - g1.p[i].xy();
    double r2 = norm2(c);
    double dth_ds = -2 * cross(c, g1.d1[i].xy()) / r2 - g1.kappa[i] * g1.speed[i];
    double dth_dt = 2 * cross(c, g2.d1[j].xy()) / r2 - g2.kappa[j] * g2.speed[j];
    return dth_ds * dth_dt;
  });
  return 0.125 * total * sq(kTwoPi / n) - kPi * kPi / 2.0;
}

}  // namespace mobius::planar
