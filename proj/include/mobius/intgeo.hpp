#pragma once

// Integral geometry over the invariant measure on circles
// (d gamma = r^-4 dr dc du) and on lines, with the Monte Carlo estimators
// that tie those measures to the chord-integral energies: linking counts,
// renormalized circle measures, Banchoff-Pohl line checks, Crofton length,
// and the chord-length distribution.

#include <atomic>
#include <numeric>
#include <vector>

#include "mobius/curve.hpp"
#include "mobius/mc.hpp"
#include "mobius/renorm.hpp"

namespace mobius::ig {

struct Circle3 {
  Vec3 center;
  double radius = 0;
  Vec3 normal;  // unit; carries the orientation
};

struct LinkCount {
  int lambda = 0;
  int hits = 0;
  bool degenerate = false;
};

// ---------------------------------------------------------------------------
// Cached curve data for the samplers and counters.

struct CurveCache {
  const ClosedCurve* k = nullptr;
  int n = 0;
  std::vector<Vec3> p;
  std::vector<double> arc_cum;  // cumulative arclength at nodes, arc_cum[0]=0
  double length = 0;

  void build(const ClosedCurve& curve, int n_) {
    k = &curve;
    n = n_;
    p.resize(n);
    arc_cum.resize(n + 1);
    arc_cum[0] = 0;
    double h = kTwoPi / n;
    for (int i = 0; i < n; ++i) p[i] = curve.point(h * i);
    for (int i = 0; i < n; ++i) {
      double sp = 0.5 * (curve.speed(h * i) + curve.speed(h * (i + 1)));
      arc_cum[i + 1] = arc_cum[i] + sp * h;
    }
    length = arc_cum[n];
  }

  double param_at_arclength(double s) const {
    s = std::fmod(s, length);
    if (s < 0) s += length;
    auto it = std::upper_bound(arc_cum.begin(), arc_cum.end(), s);
    int i = static_cast<int>(it - arc_cum.begin()) - 1;
    i = std::clamp(i, 0, n - 1);
    double frac = (s - arc_cum[i]) / (arc_cum[i + 1] - arc_cum[i]);
    return kTwoPi * (i + frac) / n;
  }

  // Total arclength of the curve inside the ball B_r(c). The squared distance
  // along the curve is band-limited, so its extrema are bracketed from sign
  // changes of the radial derivative on the grid first; entries and exits are
  // then isolated on monotone pieces. This keeps short tangential notches
  // (arcs barely leaving or entering the ball between nodes) from being
  // miscounted.
  double arclength_in_ball(Vec3 c, double r) const {
    double r2 = r * r, h = kTwoPi / n;
    auto d2at = [&](double t) { return norm2(k->point(t) - c); };
    auto ddat = [&](double t) { return dot(k->deriv(t, 1), k->point(t) - c); };
    double total = 0;
    for (int i = 0; i < n; ++i) {
      double t0 = h * i, t1 = h * (i + 1);
      double v0 = norm2(p[i] - c), v1 = norm2(p[(i + 1) % n] - c);
      double e0 = ddat(t0), e1 = ddat(t1);
      bool in0 = v0 < r2, in1 = v1 < r2;
      bool has_ext = (e0 < 0) != (e1 < 0);
      if (!has_ext && in0 == in1) {
        if (in0) total += arc_cum[i + 1] - arc_cum[i];
        continue;
      }
      // breakpoints: segment ends plus at most one refined extremum
      double pieces[3] = {t0, t1, t1};
      int np = 2;
      if (has_ext) {
        double lo = t0, hi = t1, fa = e0;
        for (int it = 0; it < 45; ++it) {
          double mid = 0.5 * (lo + hi), fm = ddat(mid);
          if ((fm < 0) == (fa < 0)) {
            lo = mid;
            fa = fm;
          } else {
            hi = mid;
          }
        }
        double te = 0.5 * (lo + hi);
        pieces[1] = te;
        pieces[2] = t1;
        np = 3;
      }
      for (int s = 0; s + 1 < np; ++s) {
        double ta = pieces[s], tb = pieces[s + 1];
        if (tb - ta < 1e-15) continue;
        bool ina = d2at(ta) < r2, inb = d2at(tb) < r2;
        double lo = ta, hi = tb;
        if (ina == inb) {
          if (!ina) continue;
          lo = ta;
          hi = tb;
        } else {
          // one crossing on the monotone piece
          double la = ta, lb = tb;
          for (int it = 0; it < 45; ++it) {
            double mid = 0.5 * (la + lb);
            if ((d2at(mid) < r2) == ina) la = mid;
            else lb = mid;
          }
          double tc = 0.5 * (la + lb);
          lo = ina ? ta : tc;
          hi = ina ? tc : tb;
        }
        total += gauss_integrate(lo, hi, 6, [&](double t) { return k->speed(t); });
      }
    }
    return total;
  }
};

// Signed crossings of the curve through the plane of gamma, kept when the
// crossing point lies inside the disk. The height g(t) = (K(t)-c).n is
// band-limited; its extrema are located first (sign changes of g' on a grid
// at 8x the mode count) so that close root pairs from nearly tangent planes
// are bracketed on monotone pieces and never missed.
inline LinkCount linking_circle(const Circle3& gamma, const ClosedCurve& k,
                                double tol_rel = 1e-9) {
  int n = std::max(64, 8 * k.modes());
  double tol = tol_rel * std::max(k.diameter(), gamma.radius);
  LinkCount out;
  Vec3 c = gamma.center, nn = gamma.normal;
  auto gat = [&](double t) { return dot(k.point(t) - c, nn); };
  auto gpat = [&](double t) { return dot(k.deriv(t, 1), nn); };
  double h = kTwoPi / n;

  // breakpoints: grid nodes plus refined extrema of g
  thread_local std::vector<std::pair<double, double>> bp;  // (t, g(t))
  bp.clear();
  thread_local std::vector<double> gv, gp;
  gv.assign(n, 0.0);
  gp.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = h * i;
    gv[i] = gat(t);
    gp[i] = gpat(t);
  }
  for (int i = 0; i < n; ++i) {
    bp.push_back({h * i, gv[i]});
    double a = gp[i], b = gp[(i + 1) % n];
    if (a == 0) a = 1e-300;
    if ((a < 0) == (b < 0)) continue;
    double lo = h * i, hi = h * (i + 1), fa = a;
    for (int it = 0; it < 40; ++it) {
      double mid = 0.5 * (lo + hi), fm = gpat(mid);
      if ((fm < 0) == (fa < 0)) {
        lo = mid;
        fa = fm;
      } else {
        hi = mid;
      }
    }
    double te = 0.5 * (lo + hi);
    bp.push_back({te, gat(te)});
  }

  size_t m = bp.size();
  for (size_t i = 0; i < m; ++i) {
    size_t j = (i + 1) % m;
    double ta = bp[i].first, tb = bp[j].first + (j == 0 ? kTwoPi : 0.0);
    if (tb - ta < 1e-15) continue;
    double a = bp[i].second, b = bp[j].second;
    if (a == 0) a = 1e-300;
    if ((a < 0) == (b < 0)) {
      // monotone piece without a crossing: flag a grazing approach
      if (std::min(std::abs(a), std::abs(b)) < tol) out.degenerate = true;
      continue;
    }
    double lo = ta, hi = tb, fa = a;
    for (int it = 0; it < 30; ++it) {
      double mid = 0.5 * (lo + hi), fm = gat(mid);
      if ((fm < 0) == (fa < 0)) {
        lo = mid;
        fa = fm;
      } else {
        hi = mid;
      }
    }
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {  // Newton polish within the bracket
      double f = gat(t), fp = gpat(t);
      if (std::abs(fp) < 1e-300) break;
      double step = f / fp;
      if (t - step < ta || t - step > tb) break;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    double fp = gpat(t);
    if (std::abs(fp) < tol) {
      out.degenerate = true;
      continue;
    }
    double din = norm(k.point(t) - c);
    if (std::abs(din - gamma.radius) < tol) {
      out.degenerate = true;
      continue;
    }
    if (din < gamma.radius) {
      ++out.hits;
      out.lambda += fp > 0 ? 1 : -1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Circle sampler. Importance scheme: the center proposal is a uniform point
// of the unit ball scaled by r around an arclength-uniform curve point, whose
// density against Lebesgue measure is ell_r(c) / (L * (4/3) pi r^3) with
// ell_r(c) the curve arclength inside B_r(c); that factor is computed exactly
// per sample. The weight hence involves no tube-volume estimate, and centers
// outside the r-tube (where every shipped integrand vanishes) are never
// proposed, which is a restriction of the measure, not a bias.

enum class RadiusLaw {
  power,       // density proportional to r^-4 (matches the measure)
  log_strata,  // stratified log-uniform; better for integrands that vanish
               // at small radii
};

struct CircleSamplerConfig {
  double r_min = 0, r_max = 0;
  RadiusLaw law = RadiusLaw::power;
  int strata = 256;
  std::uint64_t seed = 1;
};

class CircleSampler {
 public:
  CircleSampler(std::vector<const ClosedCurve*> ks, CircleSamplerConfig cfg)
      : cfg_(cfg) {
    if (!(cfg_.r_min > 0)) throw ConfigError("sample_circles: r_min must be positive");
    if (!(cfg_.r_max > cfg_.r_min)) throw ConfigError("sample_circles: r_max <= r_min");
    for (const auto* k : ks) {
      caches_.emplace_back();
      caches_.back().build(*k, std::max(1024, 16 * k->modes()));
      L_ += caches_.back().length;
    }
  }

  struct Draw {
    Circle3 circle;
    double weight = 0;  // d(measure)/d(sampling) at the sample
  };

  Draw draw(std::uint64_t index) const {
    SampleStream rng(cfg_.seed, index);
    double r, w_r;
    if (cfg_.law == RadiusLaw::power) {
      double a = std::pow(cfg_.r_min, -3.0), b = std::pow(cfg_.r_max, -3.0);
      double u = rng.u01();
      r = std::pow(a - u * (a - b), -1.0 / 3.0);
      w_r = (a - b) / 3.0;  // Z_r with p(r) = r^-4 / Z_r
    } else {
      double lnl = std::log(cfg_.r_max / cfg_.r_min);
      double stratum = static_cast<double>(index % cfg_.strata);
      double u = (stratum + rng.u01()) / cfg_.strata;
      r = cfg_.r_min * std::exp(u * lnl);
      w_r = std::pow(r, -3.0) * lnl;  // r^-4 / (1/(r lnl))
    }
    double s_arc = rng.u01() * L_;
    const CurveCache* cc = &caches_[0];
    for (const auto& c : caches_) {
      if (s_arc <= c.length) {
        cc = &c;
        break;
      }
      s_arc -= c.length;
    }
    double t0 = cc->param_at_arclength(s_arc);
    Vec3 x = cc->k->point(t0);
    Vec3 c = x + r * rng.ball_point();
    Vec3 nrm = rng.sphere_dir();
    double ell = 0;
    for (const auto& cache : caches_)
      ell += cache.arclength_in_ball(c, r);
    double vball = (4.0 / 3.0) * kPi * r * r * r;
    Draw d;
    d.circle = {c, r, nrm};
    d.weight = (ell > 0) ? w_r * (L_ * vball / ell) * (4.0 * kPi) : 0.0;
    return d;
  }

  double total_length() const { return L_; }
  const CircleSamplerConfig& config() const { return cfg_; }

 private:
  CircleSamplerConfig cfg_;
  std::vector<CurveCache> caches_;
  double L_ = 0;
};

// ---------------------------------------------------------------------------
// Circle-measure estimators.

struct CircleEstimate {
  MCEstimate mc;          // already scaled to the target quantity
  double value = 0;       // == mc.mean
  std::int64_t degenerate = 0;
};

// Generic weighted mean of f over the truncated measure window.
template <class F>
CircleEstimate circle_integral(const CircleSampler& sampler, std::int64_t n_samples,
                               F&& f) {
  std::vector<double> vals(n_samples, 0.0);
  std::vector<std::uint8_t> degen(n_samples, 0);
  parallel_for(n_samples, [&](std::int64_t i) {
    auto d = sampler.draw(i);
    bool bad = false;
    double v = f(d.circle, &bad);
    if (bad) {
      degen[i] = 1;
      return;
    }
    vals[i] = v * d.weight;
  });
  CircleEstimate out;
  out.mc = mc_from_values(vals);
  for (auto d : degen) out.degenerate += d;
  out.mc.discard_rate = static_cast<double>(out.degenerate) / n_samples;
  out.mc.r_min = sampler.config().r_min;
  out.mc.r_max = sampler.config().r_max;
  out.value = out.mc.mean;
  return out;
}

// E(K) = (3/16pi) int (hits - lambda^2) d gamma. The integrand vanishes for
// small radii almost surely, so the radius proposal is stratified
// log-uniform; the r^-4 law would put nearly all samples where the integrand
// is zero.
inline CircleEstimate mc_energy_circles(const ClosedCurve& k, std::int64_t n_samples,
                                        std::uint64_t seed, double r_min_rel = 1e-3,
                                        double r_max_rel = 200.0) {
  CircleSamplerConfig cfg;
  cfg.r_min = r_min_rel * k.diameter();
  cfg.r_max = r_max_rel * k.diameter();
  cfg.law = RadiusLaw::log_strata;
  cfg.seed = seed;
  CircleSampler sampler({&k}, cfg);
  std::atomic<int> lambda_max{0};
  auto est = circle_integral(sampler, n_samples, [&](const Circle3& g, bool* bad) {
    LinkCount lc = linking_circle(g, k);
    if (lc.degenerate) {
      *bad = true;
      return 0.0;
    }
    int al = std::abs(lc.lambda), cur = lambda_max.load(std::memory_order_relaxed);
    while (al > cur && !lambda_max.compare_exchange_weak(cur, al)) {
    }
    return static_cast<double>(lc.hits - lc.lambda * lc.lambda);
  });
  double scale = 3.0 / (16.0 * kPi);
  est.mc.mean *= scale;
  est.mc.std_error *= scale;
  // analytic large-radius tail: |int_{r>rmax} (hits - l^2)| <=
  // (1 + lambda_max) int_{r>rmax} hits = (1 + lambda_max) 2 pi^2 L / rmax
  est.mc.tail_bound =
      scale * (1.0 + lambda_max.load()) * 2.0 * kPi * kPi * k.length() / cfg.r_max;
  est.value = est.mc.mean;
  return est;
}

// Cutoff diagnostic: D(eps) = (3/16pi) int_{r>eps} lambda^2 d gamma, expected
// 3 pi L / (8 eps) - E(K).
inline std::vector<std::pair<double, double>> def_lambda2_ladder(
    const ClosedCurve& k, const std::vector<double>& eps_ladder,
    std::int64_t n_per_rung, std::uint64_t seed, double r_max_rel = 30.0) {
  std::vector<std::pair<double, double>> out;
  for (size_t j = 0; j < eps_ladder.size(); ++j) {
    CircleSamplerConfig cfg;
    cfg.r_min = eps_ladder[j];
    cfg.r_max = r_max_rel * k.diameter();
    cfg.law = RadiusLaw::power;
    cfg.seed = seed + 1000 * j;
    CircleSampler sampler({&k}, cfg);
    auto est = circle_integral(sampler, n_per_rung, [&](const Circle3& g, bool* bad) {
      LinkCount lc = linking_circle(g, k);
      if (lc.degenerate) {
        *bad = true;
        return 0.0;
      }
      return static_cast<double>(lc.lambda * lc.lambda);
    });
    out.push_back({eps_ladder[j], 3.0 / (16.0 * kPi) * est.mc.mean});
  }
  return out;
}

// int_{r>eps} hits d gamma, expected 2 pi^2 L / eps.
inline CircleEstimate measure_pierced_disks(const ClosedCurve& k, double eps,
                                            std::int64_t n_samples, std::uint64_t seed,
                                            double r_max_rel = 30.0) {
  CircleSamplerConfig cfg;
  cfg.r_min = eps;
  cfg.r_max = r_max_rel * k.diameter();
  cfg.law = RadiusLaw::power;
  cfg.seed = seed;
  CircleSampler sampler({&k}, cfg);
  auto est = circle_integral(sampler, n_samples, [&](const Circle3& g, bool* bad) {
    LinkCount lc = linking_circle(g, k);
    if (lc.degenerate) {
      *bad = true;
      return 0.0;
    }
    return static_cast<double>(lc.hits);
  });
  est.mc.tail_bound = 2.0 * kPi * kPi * k.length() / cfg.r_max;
  return est;
}

// E(K1,K2) = -(3/16pi) int lambda(g,K1) lambda(g,K2) d gamma. The product
// vanishes for radii below half the curve separation, so the window starts
// there (no truncation bias).
inline CircleEstimate mc_mutual_circles(const ClosedCurve& k1, const ClosedCurve& k2,
                                        std::int64_t n_samples, std::uint64_t seed,
                                        double r_max_rel = 30.0) {
  double gap = 1e300;
  for (int i = 0; i < 512; ++i)
    gap = std::min(gap, k1.distance_to(k2.point(kTwoPi * i / 512)));
  double diam = std::max(k1.diameter(), k2.diameter());
  CircleSamplerConfig cfg;
  cfg.r_min = std::max(1e-3 * diam, 0.45 * gap);
  cfg.r_max = r_max_rel * diam;
  cfg.law = RadiusLaw::power;
  cfg.seed = seed;
  CircleSampler sampler({&k1, &k2}, cfg);
  std::atomic<int> lmax{0};
  auto est = circle_integral(sampler, n_samples, [&](const Circle3& g, bool* bad) {
    LinkCount a = linking_circle(g, k1), b = linking_circle(g, k2);
    if (a.degenerate || b.degenerate) {
      *bad = true;
      return 0.0;
    }
    int al = std::max(std::abs(a.lambda), std::abs(b.lambda));
    int cur = lmax.load(std::memory_order_relaxed);
    while (al > cur && !lmax.compare_exchange_weak(cur, al)) {
    }
    return static_cast<double>(a.lambda * b.lambda);
  });
  double scale = -3.0 / (16.0 * kPi);
  est.mc.mean *= scale;
  est.mc.std_error = std::abs(scale) * est.mc.std_error;
  est.mc.tail_bound = std::abs(scale) * (1 + lmax.load()) * 2.0 * kPi * kPi *
                      (k1.length() + k2.length()) / cfg.r_max;
  est.value = est.mc.mean;
  return est;
}

// ---------------------------------------------------------------------------
// Lines in space: direction v on the sphere, base point b in the orthogonal
// plane; lambda(l, K) is the winding number of the projected curve around b.

struct LineFrame {
  Vec3 v, e1, e2;
};

inline LineFrame line_frame(Vec3 v) {
  LineFrame f;
  f.v = v / norm(v);
  Vec3 up = std::abs(f.v.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  f.e1 = cross(up, f.v);
  f.e1 = f.e1 / norm(f.e1);
  f.e2 = cross(f.v, f.e1);
  return f;
}

// Winding number of the projection of the cached curve around base (2D point
// in the (e1,e2) chart). Degenerate when the projection passes too close.
inline LinkCount lambda_line(const CurveCache& cache, const LineFrame& fr, Vec2 base,
                             double tol) {
  double acc = 0;
  int n = cache.n;
  double prev = 0;
  bool bad = false;
  Vec2 q0{dot(cache.p[0], fr.e1) - base.x, dot(cache.p[0], fr.e2) - base.y};
  prev = std::atan2(q0.y, q0.x);
  double mind = norm(q0);
  for (int i = 1; i <= n; ++i) {
    Vec3 p = cache.p[i % n];
    Vec2 q{dot(p, fr.e1) - base.x, dot(p, fr.e2) - base.y};
    mind = std::min(mind, norm(q));
    double ang = std::atan2(q.y, q.x);
    acc += std::remainder(ang - prev, kTwoPi);
    prev = ang;
  }
  if (mind < tol) bad = true;
  LinkCount out;
  out.lambda = static_cast<int>(std::lround(acc / kTwoPi));
  out.degenerate = bad;
  return out;
}

struct BPCheck {
  MCEstimate lhs;       // int lambda1 lambda2 dl (raw, before calibration)
  double rhs = 0;       // II cos th1 cos th2 dp dq
  double calibration = 1.0;  // multiplies lhs to match rhs conventions
  double residual_se = 0;    // |cal*lhs - rhs| in lhs standard errors
};

// One side: MC over lines of the product of winding numbers (or the square
// for a single curve).
inline MCEstimate bp_lines_lhs(const std::vector<const ClosedCurve*>& ks,
                               std::int64_t n_samples, std::uint64_t seed) {
  std::vector<CurveCache> caches(ks.size());
  for (size_t i = 0; i < ks.size(); ++i)
    caches[i].build(*ks[i], std::max(1024, 16 * ks[i]->modes()));
  double tol = 0;
  for (const auto* k : ks) tol = std::max(tol, 1e-7 * k->diameter());
  std::vector<double> vals(n_samples, 0.0);
  std::vector<std::uint8_t> degen(n_samples, 0);
  parallel_for(n_samples, [&](std::int64_t i) {
    SampleStream rng(seed, i);
    LineFrame fr = line_frame(rng.sphere_dir());
    // bounding box of all projections, inflated
    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (const auto& c : caches)
      for (int j = 0; j < c.n; j += 4) {
        Vec2 q{dot(c.p[j], fr.e1), dot(c.p[j], fr.e2)};
        lo.x = std::min(lo.x, q.x);
        lo.y = std::min(lo.y, q.y);
        hi.x = std::max(hi.x, q.x);
        hi.y = std::max(hi.y, q.y);
      }
    double margin = 0.02 * std::max(hi.x - lo.x, hi.y - lo.y);
    lo -= Vec2{margin, margin};
    hi += Vec2{margin, margin};
    double area = (hi.x - lo.x) * (hi.y - lo.y);
    Vec2 b{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
    double prod = 1;
    for (const auto& c : caches) {
      LinkCount lc = lambda_line(c, fr, b, tol);
      if (lc.degenerate) {
        degen[i] = 1;
        return;
      }
      prod *= lc.lambda;
    }
    if (ks.size() == 1) prod *= prod;  // lambda^2 for the single-curve identity
    vals[i] = prod * area * 4.0 * kPi;
  });
  MCEstimate est = mc_from_values(vals);
  std::int64_t nd = 0;
  for (auto d : degen) nd += d;
  est.discard_rate = static_cast<double>(nd) / n_samples;
  return est;
}

// II cos th_p cos th_q dp dq (no denominator), over K1 x K2 or K x K.
// In parameter form the integrand is (vp.d)(vq.d)/r^2.
inline double bp_rhs(const ClosedCurve& k1, const ClosedCurve& k2, int n = 1024) {
  CurveGrid g1 = k1.grid(n), g2 = k2.grid(n);
  bool same = (&k1 == &k2);
  double s = parallel_sum(static_cast<std::int64_t>(n) * n, [&](std::int64_t idx) {
    int i = static_cast<int>(idx / n), j = static_cast<int>(idx % n);
    if (same && i == j) return sq(g1.speed[i]);  // cos -> 1 on the diagonal
    Vec3 d = g2.p[j] - g1.p[i];
    return dot(g1.d1[i], d) * dot(g2.d1[j], d) / norm2(d);
  });
  return s * sq(kTwoPi / n);
}

// ---------------------------------------------------------------------------
// Lines in the plane: Crofton length estimator.

struct CroftonResult {
  MCEstimate integral;  // estimate of int #(l cap K) dl
  double length_estimate = 0;
};

inline CroftonResult crofton_length(const std::vector<const ClosedCurve*>& ks,
                                    std::int64_t n_samples, std::uint64_t seed) {
  // support radius
  double rmax = 0;
  for (const auto* k : ks)
    for (int i = 0; i < 256; ++i)
      rmax = std::max(rmax, norm(k->point(kTwoPi * i / 256).xy()));
  rmax *= 1.02;
  std::vector<CurveCache> caches(ks.size());
  for (size_t i = 0; i < ks.size(); ++i)
    caches[i].build(*ks[i], std::max(512, 16 * ks[i]->modes()));
  std::vector<double> vals(n_samples, 0.0);
  std::vector<std::uint8_t> degen(n_samples, 0);
  parallel_for(n_samples, [&](std::int64_t i) {
    SampleStream rng(seed, i);
    double theta = rng.uniform(0, kTwoPi), r = rng.uniform(0, rmax);
    Vec2 u{std::cos(theta), std::sin(theta)};
    int count = 0;
    for (size_t c = 0; c < ks.size(); ++c) {
      const auto& cache = caches[c];
      double prev = dot(cache.p[0].xy(), u) - r;
      for (int j = 1; j <= cache.n; ++j) {
        double cur = dot(cache.p[j % cache.n].xy(), u) - r;
        if (prev == 0) prev = 1e-300;
        if ((prev < 0) != (cur < 0)) ++count;
        if (std::abs(cur) < 1e-12) {
          degen[i] = 1;
          return;
        }
        prev = cur;
      }
    }
    vals[i] = count * kTwoPi * rmax;
  });
  CroftonResult out;
  out.integral = mc_from_values(vals);
  std::int64_t nd = 0;
  for (auto d : degen) nd += d;
  out.integral.discard_rate = static_cast<double>(nd) / n_samples;
  out.length_estimate = out.integral.mean / 2.0;
  return out;
}

// ---------------------------------------------------------------------------
// Chord-length distribution A_K(s) = (1/s) II_{|q-p|<=s} dp.dq and the
// fixed-radius linked-circle measure f(r,K).

struct ChordDistribution {
  std::vector<double> s;  // grid
  std::vector<double> a;  // A_K(s)
  double s_max = 0;       // diameter bound; A = 0 beyond
};

inline ChordDistribution chord_distribution(const ClosedCurve& k, int s_points = 256,
                                            int n = 2048) {
  CurveGrid g = k.grid(n);
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(static_cast<size_t>(n) * n);
  double w = sq(kTwoPi / n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double rho = (i == j) ? 0.0 : norm(g.p[j] - g.p[i]);
      pairs.push_back({rho, dot(g.d1[i], g.d1[j]) * w});
    }
  std::sort(pairs.begin(), pairs.end());
  ChordDistribution out;
  out.s_max = pairs.back().first;
  std::vector<double> cum(pairs.size());
  double acc = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    acc += pairs[i].second;
    cum[i] = acc;
  }
  for (int i = 0; i < s_points; ++i) {
    double s = out.s_max * (i + 1) / s_points;
    auto it = std::upper_bound(pairs.begin(), pairs.end(), std::make_pair(s, 1e300));
    double c = (it == pairs.begin()) ? 0.0 : cum[it - pairs.begin() - 1];
    out.s.push_back(s);
    out.a.push_back(c / s);
  }
  return out;
}

inline double chord_a_interp(const ChordDistribution& cd, double s) {
  if (s <= 0 || s >= cd.s_max || cd.s.empty()) return 0;
  auto it = std::upper_bound(cd.s.begin(), cd.s.end(), s);
  size_t i = it - cd.s.begin();
  if (i == 0) return cd.a.front();  // flat extension below the first node
  if (i >= cd.s.size()) return cd.a.back();
  double frac = (s - cd.s[i - 1]) / (cd.s[i] - cd.s[i - 1]);
  return cd.a[i - 1] * (1 - frac) + cd.a[i] * frac;
}

// f(r,K) = pi int_0^{2r} A_K(s) sqrt(4 r^2 - s^2) ds.
inline double dcb_radius_measure(const ChordDistribution& cd, double r,
                                 int gauss_pts = 96) {
  // s = 2 r sin(phi): f = 4 pi r^2 int_0^{pi/2} A(2 r sin phi) cos^2 phi dphi
  return 4 * kPi * r * r *
         gauss_integrate(0.0, kPi / 2, gauss_pts, [&](double phi) {
           return chord_a_interp(cd, 2 * r * std::sin(phi)) * sq(std::cos(phi));
         });
}

// Direct fixed-radius check: f(r,K) = int int lambda^2 dc dn at fixed r.
inline MCEstimate fixed_radius_linked_measure(const ClosedCurve& k, double r,
                                              std::int64_t n_samples,
                                              std::uint64_t seed) {
  CurveCache cache;
  cache.build(k, std::max(1024, 16 * k.modes()));
  std::vector<double> vals(n_samples, 0.0);
  std::vector<std::uint8_t> degen(n_samples, 0);
  double L = cache.length;
  parallel_for(n_samples, [&](std::int64_t i) {
    SampleStream rng(seed, i);
    double t0 = cache.param_at_arclength(rng.u01() * L);
    Vec3 c = k.point(t0) + r * rng.ball_point();
    Vec3 nrm = rng.sphere_dir();
    LinkCount lc = linking_circle({c, r, nrm}, k);
    if (lc.degenerate) {
      degen[i] = 1;
      return;
    }
    if (lc.lambda == 0) return;
    double ell = cache.arclength_in_ball(c, r);
    double vball = (4.0 / 3.0) * kPi * r * r * r;
    vals[i] = lc.lambda * lc.lambda * (L * vball / ell) * 4.0 * kPi;
  });
  MCEstimate est = mc_from_values(vals);
  std::int64_t nd = 0;
  for (auto d : degen) nd += d;
  est.discard_rate = static_cast<double>(nd) / n_samples;
  return est;
}

}  // namespace mobius::ig
