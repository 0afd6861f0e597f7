// Command-line front end: reads curve/domain JSON, runs the requested
// computation, writes a JSON report (deterministic for fixed inputs, config
// and seed) and optional CSV route tables.
//
// Exit codes: 0 ok, 2 configuration/schema error, 3 completed with
// numerical-reliability warnings.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "mobius/cli.hpp"

using namespace mobius;

namespace {

void emit(const cli::RunOutput& out, const std::string& out_path,
          const std::string& csv_path) {
  std::string text = out.report.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    io::write_file(out_path, text);
  if (!csv_path.empty()) io::write_file(csv_path, io::routes_to_csv(out.routes));
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moebius-invariant energies of planar domains and space curves"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker thread count (default: env MOBIUS_THREADS)");

  std::string in_path, in2_path, out_path, csv_path, routes_str, radii_str, point_str;
  std::int64_t samples = 200000;
  std::uint64_t seed = 0;
  int trials = 20, grid_n = 0, rungs = 6;
  double delta0 = 0;
  bool seed_given = false;

  auto add_io = [&](CLI::App* c, bool needs_in2 = false) {
    c->add_option("--in", in_path, "input JSON")->required();
    if (needs_in2) c->add_option("--in2", in2_path, "second input JSON");
    c->add_option("--out", out_path, "report JSON path (default: stdout)");
    c->add_option("--csv", csv_path, "CSV route table path");
  };
  auto add_seed = [&](CLI::App* c, bool required) {
    auto* o = c->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) {
          seed = v;
          seed_given = true;
        },
        "RNG seed (mandatory for Monte Carlo subcommands)");
    if (required) o->required();
    return o;
  };

  // energy planar|space
  auto* energy = app.add_subcommand("energy", "energy routes");
  auto* ep = energy->add_subcommand("planar", "planar domain energies");
  add_io(ep);
  ep->add_option("--routes", routes_str, "comma list or 'all'");
  ep->add_option("--samples", samples, "MC samples for the NT route");
  add_seed(ep, false);
  ep->add_option("--grid", grid_n, "quadrature grid override");
  ep->add_option("--rungs", rungs, "ladder rungs");
  ep->add_option("--delta0", delta0, "largest ladder offset");

  auto* es = energy->add_subcommand("space", "space curve energies");
  add_io(es);
  es->add_option("--routes", routes_str, "comma list or 'all'");
  es->add_option("--samples", samples, "MC samples for the mc route");
  add_seed(es, false);
  es->add_option("--grid", grid_n, "quadrature grid override");

  // planar potential|mutual|routes
  auto* planar_cmd = app.add_subcommand("planar", "planar operations");
  auto* pp = planar_cmd->add_subcommand("potential", "renormalized potential at a point");
  add_io(pp);
  pp->add_option("--point", point_str, "interior point 'x,y'")->required();
  auto* pm = planar_cmd->add_subcommand("mutual", "mutual energy of two disjoint domains");
  add_io(pm, true);
  auto* pr = planar_cmd->add_subcommand("routes", "all planar routes");
  add_io(pr);
  pr->add_option("--samples", samples, "MC samples for the NT route");
  add_seed(pr, false);

  // space writhe|mutual|routes
  auto* space_cmd = app.add_subcommand("space", "space-curve operations");
  auto* sw = space_cmd->add_subcommand("writhe", "writhe of a closed space curve");
  add_io(sw);
  auto* sm = space_cmd->add_subcommand("mutual", "mutual energy of two disjoint curves");
  add_io(sm, true);
  auto* sr = space_cmd->add_subcommand("routes", "all space routes");
  add_io(sr);
  sr->add_option("--samples", samples, "MC samples");
  add_seed(sr, false);

  // ig circles|lines|chords
  auto* ig_cmd = app.add_subcommand("ig", "integral geometry estimators");
  auto* igc = ig_cmd->add_subcommand("circles", "circle-measure energy estimator");
  add_io(igc);
  igc->add_option("--samples", samples, "MC samples");
  add_seed(igc, true);
  auto* igl = ig_cmd->add_subcommand("lines", "line-measure checks");
  add_io(igl, true);
  igl->add_option("--samples", samples, "MC samples");
  add_seed(igl, true);
  auto* igch = ig_cmd->add_subcommand("chords", "chord-length distribution and f(r)");
  add_io(igch);
  igch->add_option("--radii", radii_str, "comma list of radii for f(r)");
  igch->add_option("--samples", samples, "MC samples per radius");
  add_seed(igch, true);

  // invariance
  std::string functional;
  auto* inv = app.add_subcommand("invariance", "Moebius invariance certification");
  add_io(inv, true);
  inv->add_option("--functional", functional,
                  "planar-E | planar-EOmega | space-E | writhe | mutual")
      ->required();
  inv->add_option("--trials", trials, "number of random maps");
  add_seed(inv, true);

  // corpus
  std::string outdir;
  auto* corpus_cmd = app.add_subcommand("corpus", "write the bundled example inputs");
  corpus_cmd->add_option("--outdir", outdir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) thread_override() = threads;

  try {
    if (*corpus_cmd) {
      auto put = [&](const std::string& name, const io::Json& j) {
        io::write_file(outdir + "/" + name, j.dump(2) + "\n");
      };
      put("circle.json", io::curve_to_json(corpus::circle2()));
      put("disk.json", io::domain_to_json(corpus::disk()));
      put("ellipse.json", io::domain_to_json(corpus::ellipse_domain()));
      put("ellipse_curve.json", io::curve_to_json(corpus::ellipse2()));
      put("annulus.json", io::domain_to_json(corpus::annulus()));
      put("two_hole.json", io::domain_to_json(corpus::two_hole_domain()));
      put("two_component.json", io::domain_to_json(corpus::two_component_domain()));
      put("circle3.json", io::curve_to_json(corpus::circle3()));
      put("trefoil.json", io::curve_to_json(corpus::trefoil()));
      put("trefoil_mirror.json", io::curve_to_json(corpus::mirror_z(corpus::trefoil())));
      auto [h1, h2] = corpus::hopf_pair();
      put("hopf_a.json", io::curve_to_json(h1));
      put("hopf_b.json", io::curve_to_json(h2));
      auto [c1, c2] = corpus::coaxial_pair();
      put("coaxial_a.json", io::curve_to_json(c1));
      put("coaxial_b.json", io::curve_to_json(c2));
      return 0;
    }

    cli::RunOutput out;
    if (*ep || *pr) {
      auto in = io::load_input(in_path);
      if (!in.is_domain) throw ConfigError("expected a domain input");
      cli::PlanarRouteOptions o;
      o.routes = split_list(routes_str);
      o.mc_samples = samples;
      o.seed = seed_given ? seed : 1;
      o.grid_n = grid_n;
      o.rungs = rungs;
      o.delta0 = delta0;
      if ((o.routes.empty() || wants(o, "nt")) && !seed_given)
        throw ConfigError("--seed is mandatory when the NT Monte Carlo route runs");
      out = cli::run_planar_energy(in.domain, in.content_hash, o);
    } else if (*es || *sr) {
      auto in = io::load_input(in_path);
      if (in.is_domain || in.curve.dimension != 3)
        throw ConfigError("expected a space curve input");
      cli::SpaceRouteOptions o;
      o.routes = split_list(routes_str);
      o.mc_samples = samples;
      o.seed = seed_given ? seed : 1;
      o.grid_n = grid_n;
      if ((o.routes.empty() || wants(o, "mc")) && !seed_given)
        throw ConfigError("--seed is mandatory when the mc route runs");
      out = cli::run_space_energy(in.curve, in.content_hash, o);
    } else if (*pp) {
      auto in = io::load_input(in_path);
      if (!in.is_domain) throw ConfigError("expected a domain input");
      double x = 0, y = 0;
      if (std::sscanf(point_str.c_str(), "%lf,%lf", &x, &y) != 2)
        throw ConfigError("--point expects 'x,y'");
      auto v = planar::potential(in.domain, {x, y});
      out.report["kind"] = "planar_potential";
      out.report["input_hash"] = in.content_hash;
      out.report["point"] = io::Json::array({x, y});
      out.report["value"] = v.value;
      out.report["near_boundary_warning"] = v.near_boundary;
      if (v.near_boundary) {
        out.warnings.push_back("evaluation point is near the boundary");
        out.exit_code = 3;
      }
    } else if (*pm) {
      auto a = io::load_input(in_path), b = io::load_input(in2_path);
      if (!a.is_domain || !b.is_domain) throw ConfigError("expected two domain inputs");
      double area = planar::mutual_energy_area(a.domain, b.domain);
      auto ks1 = a.domain.boundary(), ks2 = b.domain.boundary();
      auto rere = planar::mutual_energy_contour(ks1, ks2, planar::MutualForm::rere);
      auto imim = planar::mutual_energy_contour(ks1, ks2, planar::MutualForm::imim);
      auto dots = planar::mutual_energy_contour(ks1, ks2, planar::MutualForm::dots);
      out.report["kind"] = "planar_mutual";
      out.report["input_hash"] = a.content_hash;
      out.report["input2_hash"] = b.content_hash;
      out.report["area_form"] = area;
      out.report["rere"] = rere.value;
      out.report["imim"] = imim.value;
      out.report["dots"] = dots.value;
      if (rere.near_contact_warning) {
        out.warnings.push_back("domains nearly touch; contour accuracy degraded");
        out.exit_code = 3;
      }
    } else if (*sw) {
      auto in = io::load_input(in_path);
      double w = space::writhe(in.curve);
      out.report["kind"] = "writhe";
      out.report["input_hash"] = in.content_hash;
      out.report["value"] = w;
    } else if (*sm) {
      auto a = io::load_input(in_path), b = io::load_input(in2_path);
      auto r = space::mutual_energy_space(a.curve, b.curve);
      out.report["kind"] = "space_mutual";
      out.report["input_hash"] = a.content_hash;
      out.report["input2_hash"] = b.content_hash;
      out.report["dots"] = r.value;
      out.report["coscos"] = r.value_coscos;
      if (r.near_contact_warning) {
        out.warnings.push_back("curves nearly touch");
        out.exit_code = 3;
      }
    } else if (*igc) {
      auto in = io::load_input(in_path);
      auto e = ig::mc_energy_circles(in.curve, samples, seed);
      out.report["kind"] = "ig_circles";
      out.report["input_hash"] = in.content_hash;
      out.report["energy"] = e.value;
      out.report["estimate"] = io::mc_to_json(e.mc);
      out.routes.push_back({"mc-circles", e.value, 3 * e.mc.std_error, e.mc.n_samples, 0});
      if (e.mc.discard_rate > 0.01) {
        out.warnings.push_back("discard rate above 1%");
        out.exit_code = 3;
      }
    } else if (*igl) {
      auto a = io::load_input(in_path);
      out.report["kind"] = "ig_lines";
      out.report["input_hash"] = a.content_hash;
      if (a.curve.dimension == 2 && in2_path.empty()) {
        auto cr = ig::crofton_length({&a.curve}, samples, seed);
        out.report["crofton_integral"] = io::mc_to_json(cr.integral);
        out.report["length_estimate"] = cr.length_estimate;
        out.report["length"] = a.curve.length();
      } else {
        std::vector<const ClosedCurve*> ks{&a.curve};
        io::LoadedInput b;
        if (!in2_path.empty()) {
          b = io::load_input(in2_path);
          ks.push_back(&b.curve);
          out.report["input2_hash"] = b.content_hash;
        }
        auto lhs = ig::bp_lines_lhs(ks, samples, seed);
        double rhs = ks.size() == 2 ? ig::bp_rhs(*ks[0], *ks[1]) : ig::bp_rhs(*ks[0], *ks[0]);
        out.report["lhs"] = io::mc_to_json(lhs);
        out.report["rhs"] = rhs;
      }
    } else if (*igch) {
      auto in = io::load_input(in_path);
      auto cd = ig::chord_distribution(in.curve);
      out.report["kind"] = "ig_chords";
      out.report["input_hash"] = in.content_hash;
      out.report["length"] = in.curve.length();
      out.report["a_small_s"] = ig::chord_a_interp(cd, 0.05 * cd.s_max);
      io::Json rows = io::Json::array();
      std::ostringstream csv;
      csv << "r,f_formula,f_mc,f_mc_stderr\n";
      for (const auto& rs : split_list(radii_str)) {
        double r = std::stod(rs);
        double ff = ig::dcb_radius_measure(cd, r);
        auto fm = ig::fixed_radius_linked_measure(in.curve, r, samples, seed);
        rows.push_back(io::Json{{"r", r},
                                {"f_formula", ff},
                                {"f_mc", fm.mean},
                                {"f_mc_stderr", fm.std_error}});
        csv << r << "," << ff << "," << fm.mean << "," << fm.std_error << "\n";
      }
      out.report["radii"] = rows;
      if (!csv_path.empty()) io::write_file(csv_path, csv.str());
      csv_path.clear();
    } else if (*inv) {
      auto a = io::load_input(in_path);
      io::LoadedInput b;
      bool has_b = !in2_path.empty();
      if (has_b) b = io::load_input(in2_path);
      cli::InvarianceOptions o;
      o.functional = functional;
      o.trials = trials;
      o.seed = seed;
      out = cli::run_invariance(a, has_b ? &b : nullptr, o);
    }
    emit(out, out_path, csv_path);
    return out.exit_code;
  } catch (const ConfigError& e) {
    io::Json err{{"error", "config"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const Error& e) {
    io::Json err{{"error", "numeric"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    io::Json err{{"error", "schema"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  }
}
