#pragma once

// Batch front end used by the command-line tool and the tests: reads curve or
// domain JSON, runs the requested computations, emits JSON reports and CSV
// route tables. Reports are byte-identical for identical (inputs, config,
// seed); the CSV runtime_ms column is the one intentionally volatile field.

#include <chrono>
#include <functional>

#include "mobius/corpus.hpp"
#include "mobius/intgeo.hpp"
#include "mobius/io.hpp"
#include "mobius/moebius.hpp"
#include "mobius/planar_energy.hpp"
#include "mobius/space_energy.hpp"

namespace mobius::cli {

using io::Json;
using io::RouteRow;

struct RunOutput {
  Json report;
  std::vector<RouteRow> routes;
  std::vector<std::string> warnings;
  int exit_code = 0;
};

namespace detail {

class Timer {
 public:
  Timer() : t0_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Planar routes.

struct PlanarRouteOptions {
  std::vector<std::string> routes;  // empty = all
  std::int64_t mc_samples = 20000;
  std::uint64_t seed = 1;
  int grid_n = 0;
  double delta0 = 0;
  int rungs = 6;
};

inline bool wants(const PlanarRouteOptions& o, const std::string& r) {
  if (o.routes.empty()) return true;
  for (const auto& s : o.routes)
    if (s == r || s == "all") return true;
  return false;
}

inline RunOutput run_planar_energy(const PlanarDomain& dom, const std::string& hash,
                                   PlanarRouteOptions opt = {}) {
  RunOutput out;
  out.report["kind"] = "planar_energy";
  out.report["input_hash"] = hash;
  out.report["euler_characteristic"] = dom.euler_characteristic();
  out.report["boundary_length"] = dom.boundary_length();
  double chi_term = kPi * kPi * dom.euler_characteristic() / 4.0;
  Json results = Json::object();
  auto ks = dom.boundary();

  double e_curve = 0;
  bool have_curve = false;
  if (wants(opt, "sinsin")) {
    detail::Timer t;
    e_curve = planar::curve_energy(ks, opt.grid_n);
    have_curve = true;
    results["sinsin"] = Json{{"curve_energy", e_curve},
                             {"domain_energy", e_curve + chi_term}};
    out.routes.push_back({"sinsin", e_curve, 0, 0, t.ms()});
  }
  if (wants(opt, "domain")) {
    detail::Timer t;
    planar::DomainEnergyOptions de;
    de.delta0 = opt.delta0;
    de.rungs = opt.rungs;
    auto r = planar::domain_energy_full(dom, de);
    results["domain_v_integral"] =
        Json{{"domain_energy", r.renorm.value},
             {"renorm", io::renorm_to_json(r.renorm)},
             {"counterterm_coefficient", r.counterterm_coefficient}};
    out.routes.push_back({"domain", r.renorm.value, r.renorm.error_estimate, 0, t.ms()});
    if (r.renorm.fit_residual > 1e-2)
      out.warnings.push_back("domain energy ladder fit residual is large");
  }
  for (auto form : {planar::CutForm::dots, planar::CutForm::coscos}) {
    std::string name = form == planar::CutForm::dots ? "dots" : "coscos";
    if (!wants(opt, name)) continue;
    detail::Timer t;
    auto r = planar::curve_energy_cutoff(ks, form, 0, opt.rungs);
    results[name] = Json{{"curve_energy", r.curve_convention.value},
                         {"domain_energy", r.domain_value},
                         {"kappa_term", r.kappa_term},
                         {"renorm", io::renorm_to_json(r.curve_convention)}};
    out.routes.push_back(
        {name, r.curve_convention.value, r.curve_convention.error_estimate, 0, t.ms()});
  }
  if (wants(opt, "segment")) {
    detail::Timer t;
    auto r = planar::segment_energy(ks);
    results["segment"] = Json{{"curve_energy", r.value},
                              {"jitter_events", r.jitter_events}};
    out.routes.push_back({"segment", r.value, 0, 0, t.ms()});
  }
  if (wants(opt, "convex-chord")) {
    detail::Timer t;
    try {
      double v = planar::convex_chord_energy(dom);
      results["convex_chord"] = Json{{"curve_energy", v}};
      out.routes.push_back({"convex-chord", v, 0, 0, t.ms()});
    } catch (const GeometryError&) {
      results["convex_chord"] = Json{{"skipped", "domain is not convex"}};
    }
  }
  if (wants(opt, "nt")) {
    detail::Timer t;
    auto r = planar::nt_energy(dom, opt.mc_samples, opt.seed);
    results["nt"] = Json{{"curve_energy", r.value},
                         {"nt_hits", r.nt_hits},
                         {"estimate", io::mc_to_json(r.estimate)}};
    out.routes.push_back(
        {"nt", r.value, 3 * r.estimate.std_error, r.estimate.n_samples, t.ms()});
    if (r.estimate.discard_rate > 0.01)
      out.warnings.push_back("nt membership discard rate above 1%");
  }
  if (wants(opt, "tangent-circle") && dom.components.size() == 1 &&
      dom.components[0].holes.empty()) {
    detail::Timer t;
    auto r = planar::tangent_circle_energy(dom);
    results["tangent_circle"] = Json{{"integral_term", r.integral_term},
                                     {"domain_energy", r.value},
                                     {"calibrated_constant", r.calibrated_constant},
                                     {"alternate_constant", r.alternate_constant}};
    out.routes.push_back({"tangent-circle", r.value, 0, 0, t.ms()});
  }
  out.report["results"] = results;
  if (have_curve) out.report["curve_energy"] = e_curve;
  return out;
}

// ---------------------------------------------------------------------------
// Space routes.

struct SpaceRouteOptions {
  std::vector<std::string> routes;
  std::int64_t mc_samples = 200000;
  std::uint64_t seed = 1;
  int grid_n = 0;
};

inline bool wants(const SpaceRouteOptions& o, const std::string& r) {
  if (o.routes.empty()) return true;
  for (const auto& s : o.routes)
    if (s == r || s == "all") return true;
  return false;
}

inline RunOutput run_space_energy(const ClosedCurve& k, const std::string& hash,
                                  SpaceRouteOptions opt = {}) {
  RunOutput out;
  out.report["kind"] = "space_energy";
  out.report["input_hash"] = hash;
  out.report["length"] = k.length();
  Json results = Json::object();
  if (wants(opt, "direct")) {
    detail::Timer t;
    auto r = space::space_energy(k, opt.grid_n);
    results["direct"] = Json{{"value", r.value}, {"grid_n", r.grid_n}};
    out.routes.push_back({"direct", r.value, 0, 0, t.ms()});
  }
  for (auto form : {space::SpaceCutForm::coscos, space::SpaceCutForm::dots}) {
    std::string name = form == space::SpaceCutForm::coscos ? "coscos" : "dots";
    if (!wants(opt, name)) continue;
    detail::Timer t;
    auto r = space::space_energy_cutoff({&k}, form);
    results[name] = Json{{"value", r.renorm.value},
                         {"counterterm_coefficient", r.counterterm_coefficient},
                         {"renorm", io::renorm_to_json(r.renorm)}};
    out.routes.push_back({name, r.renorm.value, r.renorm.error_estimate, 0, t.ms()});
  }
  if (wants(opt, "parallel")) {
    detail::Timer t;
    try {
      auto r = space::space_energy_parallel(k);
      results["parallel"] = Json{{"value", r.value},
                                 {"renorm", io::renorm_to_json(*r.renorm)},
                                 {"total_curvature", r.diagnostics.at("total_curvature")}};
      out.routes.push_back({"parallel", r.value, r.renorm->error_estimate, 0, t.ms()});
    } catch (const GeometryError& e) {
      results["parallel"] = Json{{"skipped", e.what()}};
      out.warnings.push_back(std::string("parallel route skipped: ") + e.what());
    }
  }
  if (wants(opt, "mc")) {
    detail::Timer t;
    auto r = ig::mc_energy_circles(k, opt.mc_samples, opt.seed);
    results["mc"] = Json{{"value", r.value}, {"estimate", io::mc_to_json(r.mc)}};
    out.routes.push_back({"mc", r.value, 3 * r.mc.std_error, r.mc.n_samples, t.ms()});
    if (r.mc.discard_rate > 0.01)
      out.warnings.push_back("circle-measure discard rate above 1%");
  }
  out.report["results"] = results;
  return out;
}

// ---------------------------------------------------------------------------
// Invariance certification.

struct InvarianceOptions {
  std::string functional;  // planar-E | planar-EOmega | space-E | writhe | mutual
  int trials = 20;
  std::uint64_t seed = 7;
};

inline RunOutput run_invariance(const io::LoadedInput& in1,
                                const io::LoadedInput* in2, InvarianceOptions opt) {
  RunOutput out;
  out.report["kind"] = "invariance";
  out.report["functional"] = opt.functional;
  out.report["trials"] = opt.trials;
  out.report["seed"] = opt.seed;
  mob::InvarianceReport rep;

  if (opt.functional == "planar-E") {
    if (in1.is_domain ? in1.domain.components.empty() : in1.curve.dimension != 2)
      throw ConfigError("planar-E expects a planar curve or domain");
    std::vector<ClosedCurve> base =
        in1.is_domain ? in1.domain.boundary_copy() : std::vector<ClosedCurve>{in1.curve};
    std::vector<const ClosedCurve*> bp;
    for (auto& c : base) bp.push_back(&c);
    double e0 = planar::curve_energy(bp);
    Vec2 cen{0, 0};
    double diam = 0;
    for (auto& c : base) {
      cen += Vec2{c.coord[0].a0, c.coord[1].a0};
      diam = std::max(diam, c.diameter());
    }
    cen = cen / static_cast<double>(base.size());
    rep = mob::invariance_scan(
        e0, opt.trials, opt.seed,
        [&](SampleStream& rng) {
          return mob::random_inversion_around(rng, Vec3(cen), diam, true);
        },
        [&](const mob::MoebiusMap& m) {
          std::vector<ClosedCurve> imgs;
          for (auto& c : base) imgs.push_back(mob::apply(m, c));
          std::vector<const ClosedCurve*> ip;
          for (auto& c : imgs) ip.push_back(&c);
          return planar::curve_energy(ip);
        });
  } else if (opt.functional == "planar-EOmega") {
    if (!in1.is_domain) throw ConfigError("planar-EOmega expects a domain");
    const PlanarDomain& dom = in1.domain;
    double e0 = planar::domain_energy(dom).value;
    Vec2 cen{0, 0};
    int ncur = 0;
    for (const auto* c : dom.boundary()) {
      cen += Vec2{c->coord[0].a0, c->coord[1].a0};
      ++ncur;
    }
    cen = cen / ncur;
    rep = mob::invariance_scan(
        e0, opt.trials, opt.seed,
        [&](SampleStream& rng) {
          return mob::random_inversion_around(rng, Vec3(cen), dom.diameter(), true);
        },
        [&](const mob::MoebiusMap& m) {
          PlanarDomain img = mob::apply(m, dom);
          return planar::domain_energy(img).value;
        });
  } else if (opt.functional == "space-E") {
    const ClosedCurve& k = in1.curve;
    double e0 = space::space_energy(k).value;
    Vec3 cen{k.coord[0].a0, k.coord[1].a0, k.coord[2].a0};
    rep = mob::invariance_scan(
        e0, opt.trials, opt.seed,
        [&](SampleStream& rng) {
          return mob::random_inversion_around(rng, cen, k.diameter(), false);
        },
        [&](const mob::MoebiusMap& m) { return space::space_energy(mob::apply(m, k)).value; });
  } else if (opt.functional == "writhe") {
    const ClosedCurve& k = in1.curve;
    double w0 = space::writhe(k);
    Vec3 cen{k.coord[0].a0, k.coord[1].a0, k.coord[2].a0};
    rep = mob::invariance_scan(
        w0, opt.trials, opt.seed,
        [&](SampleStream& rng) {
          // orientation preserving: compose two inversions
          auto m1 = mob::random_inversion_around(rng, cen, k.diameter(), false);
          auto m2 = mob::random_inversion_around(rng, cen, k.diameter(), false);
          return m1.then(m2);
        },
        [&](const mob::MoebiusMap& m) { return space::writhe(mob::apply(m, k)); });
  } else if (opt.functional == "mutual") {
    if (!in2) throw ConfigError("mutual invariance needs --in2");
    const ClosedCurve &k1 = in1.curve, &k2 = in2->curve;
    double e0 = space::mutual_energy_space(k1, k2).value;
    Vec3 cen = 0.5 * (Vec3{k1.coord[0].a0, k1.coord[1].a0, k1.coord[2].a0} +
                      Vec3{k2.coord[0].a0, k2.coord[1].a0, k2.coord[2].a0});
    double diam = std::max(k1.diameter(), k2.diameter()) +
                  norm(Vec3{k1.coord[0].a0 - k2.coord[0].a0,
                            k1.coord[1].a0 - k2.coord[1].a0,
                            k1.coord[2].a0 - k2.coord[2].a0});
    rep = mob::invariance_scan(
        e0, opt.trials, opt.seed,
        [&](SampleStream& rng) {
          return mob::random_inversion_around(rng, cen, diam, false);
        },
        [&](const mob::MoebiusMap& m) {
          return space::mutual_energy_space(mob::apply(m, k1), mob::apply(m, k2)).value;
        });
  } else {
    throw ConfigError("unknown functional: " + opt.functional);
  }

  out.report["base_value"] = rep.base_value;
  out.report["max_deviation"] = rep.max_deviation;
  out.report["threshold"] = 1e-3 * (1 + std::abs(rep.base_value));
  out.report["redraws"] = rep.redraws;
  Json trials = Json::array();
  for (const auto& t : rep.trials)
    trials.push_back(Json{{"trial", t.trial}, {"value", t.value}, {"deviation", t.deviation}});
  out.report["per_trial"] = trials;
  out.report["pass"] = rep.max_deviation < 1e-3 * (1 + std::abs(rep.base_value));
  if (!out.report["pass"].get<bool>()) {
    out.warnings.push_back("invariance deviation above threshold");
    out.exit_code = 3;
  }
  return out;
}

}  // namespace mobius::cli
