#include <doctest.h>

#include "mobius/corpus.hpp"
#include "mobius/moebius.hpp"
#include "mobius/planar_energy.hpp"

using namespace mobius;
using namespace mobius::planar;

namespace {

constexpr double kEO_disk = 3 * kPi * kPi / 4;  // E(Omega) of a round disk
constexpr double kEK_circle = kPi * kPi / 2;    // E(K) of a circle

// Mutual energy of two disjoint round disks, reduced to the concentric
// configuration through the inversive distance I: with x = I + sqrt(I^2-1)
// (the radius ratio of the concentric model), E = pi^2 / (x^2 - 1).
double two_disk_mutual(double r1, double r2, double d) {
  double I = (d * d - r1 * r1 - r2 * r2) / (2 * r1 * r2);
  double x = I + std::sqrt(I * I - 1);
  return kPi * kPi / (x * x - 1);
}

// Independent oracle for V(w, Omega): polar cutoff integral of r^-4 about w
// with the radial part in closed form per ray; the counterterm cancels the
// eps ladder exactly, which the extrapolation confirms.
double potential_polar_oracle(const std::function<double(double)>& boundary_radius,
                              int n_theta = 4096) {
  std::vector<std::pair<double, double>> ladder;
  for (double eps : geometric_ladder(0.05, 5)) {
    double acc = 0;
    for (int i = 0; i < n_theta; ++i) {
      double th = kTwoPi * i / n_theta;
      double R = boundary_radius(th);
      acc += (0.5 / (eps * eps) - 0.5 / (R * R)) * (kTwoPi / n_theta);
    }
    ladder.push_back({eps, acc - kPi / (eps * eps)});
  }
  return extrapolate(ladder, DivergenceModel::constant_plus_linear()).value;
}

}  // namespace

TEST_SUITE("planar") {
  TEST_CASE("potential of the disk") {
    PlanarDomain disk = corpus::disk();
    CHECK(potential(disk, {0, 0}).value == doctest::Approx(-kPi).epsilon(1e-12));
    for (double rho : {0.3, 0.5, 0.8}) {
      double expect = -kPi / sq(1 - rho * rho);
      CHECK(potential(disk, {rho, 0}).value == doctest::Approx(expect).epsilon(1e-10));
      CHECK(potential(disk, {0, -rho}).value == doctest::Approx(expect).epsilon(1e-10));
    }
    CHECK(potential(disk, {0.25, 0.25}).value < 0);
    CHECK_THROWS_AS(potential(disk, {2, 0}), GeometryError);
    CHECK(potential(disk, {1 - 5e-4, 0}).near_boundary);
    CHECK(!potential(disk, {0.2, 0}).near_boundary);
  }

  TEST_CASE("potential matches the polar cutoff oracle") {
    PlanarDomain disk = corpus::disk();
    Vec2 w{0.2, 0.1};
    double oracle = potential_polar_oracle([&](double th) {
      // ray from w in direction th exits the unit circle at distance R
      Vec2 d{std::cos(th), std::sin(th)};
      double b = dot(w, d);
      return -b + std::sqrt(b * b + 1 - norm2(w));
    });
    CHECK(potential(disk, w).value == doctest::Approx(oracle).epsilon(1e-6));

    PlanarDomain ell = corpus::ellipse_domain();
    Vec2 we{0.5, 0.2};
    double oracle_e = potential_polar_oracle([&](double th) {
      Vec2 d{std::cos(th), std::sin(th)};
      double A = sq(d.x / 2) + sq(d.y);
      double B = 2 * (we.x * d.x / 4 + we.y * d.y);
      double C = sq(we.x / 2) + sq(we.y) - 1;
      return (-B + std::sqrt(B * B - 4 * A * C)) / (2 * A);
    });
    CHECK(potential(ell, we).value == doctest::Approx(oracle_e).epsilon(1e-6));
  }

  TEST_CASE("potential boundary asymptotics") {
    PlanarDomain disk = corpus::disk();
    auto prof = potential_asymptotics(disk, disk.components[0].outer, 0.0);
    CHECK(prof.c2 == doctest::Approx(-kPi / 4).epsilon(0.02));
    CHECK(prof.c1 == doctest::Approx(-kPi / 4).epsilon(0.05));

    PlanarDomain ell = corpus::ellipse_domain();
    auto pe = potential_asymptotics(ell, ell.components[0].outer, 0.0);
    CHECK(pe.kappa == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(pe.c1 / pe.c2 == doctest::Approx(2.0).epsilon(0.02));

    PlanarDomain big = corpus::disk(2.0);
    auto pb = potential_asymptotics(big, big.components[0].outer, 1.0);
    CHECK(pb.c2 == doctest::Approx(-kPi / 4).epsilon(0.02));  // kappa-independent
    CHECK(pb.c1 == doctest::Approx(-kPi / 8).epsilon(0.05));  // kappa = 1/2
  }

  TEST_CASE("domain energy of disks") {
    DomainEnergyOptions deep;
    deep.delta0 = 2.0 / 64;
    deep.rungs = 7;
    auto r = domain_energy(corpus::disk(), deep);
    CHECK(r.value == doctest::Approx(kEO_disk).epsilon(5e-5));
    DomainEnergyOptions deep3;
    deep3.delta0 = 6.0 / 64;
    deep3.rungs = 7;
    auto r3 = domain_energy(corpus::disk(3.0), deep3);
    CHECK(r3.value == doctest::Approx(kEO_disk).epsilon(5e-5));  // scale invariant
  }

  TEST_CASE("curve energy of circles") {
    ClosedCurve c = corpus::circle2();
    CHECK(curve_energy({&c}) == doctest::Approx(kEK_circle).epsilon(1e-10));
    PlanarDomain big = corpus::disk(5.0);
    CHECK(curve_energy(big) == doctest::Approx(kEK_circle).epsilon(1e-10));
  }

  TEST_CASE("relation between domain and curve energies") {
    // disk: chi = 1
    DomainEnergyOptions deep;
    deep.delta0 = 2.0 / 64;
    deep.rungs = 7;
    double eo = domain_energy(corpus::disk(), deep).value;
    double ek = curve_energy(corpus::disk());
    CHECK(eo - ek == doctest::Approx(kPi * kPi / 4).epsilon(2e-4));
  }

  TEST_CASE("relation on the annulus") {
    PlanarDomain ann = corpus::annulus();
    DomainEnergyOptions deep;
    deep.delta0 = ann.diameter() / 128;
    deep.rungs = 7;
    double eo = domain_energy(ann, deep).value;
    double ek = curve_energy(ann);
    // chi = 0: the two routes must agree
    CHECK(std::abs(eo - ek) < 1e-4 * (1 + std::abs(ek)));
  }

  TEST_CASE("relation on the two-component domain") {
    PlanarDomain two = corpus::two_component_domain();
    DomainEnergyOptions deep;
    deep.delta0 = 1.0 / 32;
    deep.rungs = 7;
    double eo = domain_energy(two, deep).value;
    double ek = curve_energy(two);
    CHECK(eo - ek == doctest::Approx(kPi * kPi / 2).epsilon(2e-3));
  }

  TEST_CASE("cutoff routes on the circle") {
    PlanarDomain disk = corpus::disk();
    auto ks = disk.boundary();
    auto dots = curve_energy_cutoff(ks, CutForm::dots);
    CHECK(dots.curve_convention.value == doctest::Approx(kEK_circle).epsilon(1e-4));
    auto cc = curve_energy_cutoff(ks, CutForm::coscos);
    CHECK(cc.kappa_term == doctest::Approx(kPi * kPi / 4).epsilon(1e-10));
    CHECK(cc.domain_value == doctest::Approx(kEO_disk).epsilon(1e-4));
    // diagnostic: divergent coefficients of the raw cutoff integrals
    auto raw_dots = extrapolate(dots.raw_ladder, DivergenceModel{{-1, 0, 1}, {}});
    CHECK(raw_dots.coefficients.at(-1) ==
          doctest::Approx(ks[0]->length() / 2).epsilon(0.01));
    auto raw_cc = extrapolate(cc.raw_ladder, DivergenceModel{{-1, 0, 1}, {}});
    CHECK(raw_cc.coefficients.at(-1) == doctest::Approx(ks[0]->length()).epsilon(0.01));
  }

  TEST_CASE("three-way route agreement on the ellipse") {
    PlanarDomain ell = corpus::ellipse_domain();
    double ek = curve_energy(ell);
    auto dots = curve_energy_cutoff(ell.boundary(), CutForm::dots);
    auto cc = curve_energy_cutoff(ell.boundary(), CutForm::coscos);
    CHECK(dots.curve_convention.value == doctest::Approx(ek).epsilon(1e-3));
    CHECK(cc.curve_convention.value == doctest::Approx(ek).epsilon(1e-3));
    DomainEnergyOptions deep;
    deep.delta0 = 4.0 / 128;
    deep.rungs = 7;
    double eo = domain_energy(ell, deep).value;
    CHECK(dots.domain_value == doctest::Approx(eo).epsilon(1e-3));
    CHECK(cc.domain_value == doctest::Approx(eo).epsilon(1e-3));
  }

  TEST_CASE("mutual energy of two disks against the closed form") {
    PlanarDomain a = corpus::disk(1.0, {0, 0}), b = corpus::disk(1.0, {3, 0});
    double expect = two_disk_mutual(1, 1, 3);
    double area = mutual_energy_area(a, b);
    CHECK(area == doctest::Approx(expect).epsilon(1e-5));
    auto ka = a.boundary(), kb = b.boundary();
    double rere = mutual_energy_contour(ka, kb, MutualForm::rere).value;
    double imim = mutual_energy_contour(ka, kb, MutualForm::imim).value;
    double dots = mutual_energy_contour(ka, kb, MutualForm::dots).value;
    CHECK(rere == doctest::Approx(expect).epsilon(1e-10));
    CHECK(imim == doctest::Approx(rere).epsilon(1e-8));
    CHECK(dots == doctest::Approx(rere).epsilon(1e-8));
    // swap symmetry
    CHECK(mutual_energy_contour(kb, ka, MutualForm::dots).value ==
          doctest::Approx(dots).epsilon(1e-10));
    // orientation flip changes the sign of every contour form
    ClosedCurve rb = b.boundary()[0]->reversed();
    std::vector<const ClosedCurve*> kbr{&rb};
    CHECK(mutual_energy_contour(ka, kbr, MutualForm::rere).value ==
          doctest::Approx(-rere).epsilon(1e-8));
    CHECK(mutual_energy_contour(ka, kbr, MutualForm::imim).value ==
          doctest::Approx(-imim).epsilon(1e-8));
    CHECK(mutual_energy_contour(ka, kbr, MutualForm::dots).value ==
          doctest::Approx(-dots).epsilon(1e-8));
  }

  TEST_CASE("mutual energy bounds and rigid invariance") {
    PlanarDomain a = corpus::disk(1.0, {0, 0}), b = corpus::disk(1.0, {10, 0});
    double e = mutual_energy_area(a, b);
    CHECK(e > 0);
    CHECK(e <= sq(kPi) / std::pow(8.0, 4));  // area1*area2/dmin^4
    CHECK(e == doctest::Approx(two_disk_mutual(1, 1, 10)).epsilon(1e-4));
    // common rigid motion
    Mat3 rot = Mat3::rotation({0, 0, 1}, 0.7);
    Vec3 shift{0.3, -1.2, 0};
    PlanarDomain a2(a.boundary()[0]->transformed(rot, shift));
    PlanarDomain b2(b.boundary()[0]->transformed(rot, shift));
    double e2 = mutual_energy_contour(a2.boundary(), b2.boundary(), MutualForm::dots).value;
    double e1 = mutual_energy_contour(a.boundary(), b.boundary(), MutualForm::dots).value;
    CHECK(e2 == doctest::Approx(e1).epsilon(1e-12));
    // overlap is rejected
    CHECK_THROWS_AS(mutual_energy_area(corpus::disk(), corpus::disk(1.0, {0.5, 0})),
                    GeometryError);
  }

  TEST_CASE("convex chord route") {
    CHECK(convex_chord_energy(corpus::disk()) == doctest::Approx(kEK_circle).epsilon(1e-6));
    CHECK(convex_chord_energy(corpus::disk(2.0)) ==
          doctest::Approx(kEK_circle).epsilon(1e-6));
    PlanarDomain ell = corpus::ellipse_domain();
    CHECK(convex_chord_energy(ell) == doctest::Approx(curve_energy(ell)).epsilon(1e-4));
    CHECK_THROWS_AS(convex_chord_energy(corpus::two_hole_domain()), GeometryError);
  }

  TEST_CASE("segment (line-geometry) route") {
    auto disk = corpus::disk();
    auto r = segment_energy(disk.boundary());
    CHECK(r.value == doctest::Approx(kEK_circle).epsilon(1e-4));
    // additivity across far components: the cross term is the imim mutual
    PlanarDomain pair = corpus::two_component_domain(8.0);
    auto rp = segment_energy(pair.boundary());
    auto ka = std::vector<const ClosedCurve*>{pair.boundary()[0]};
    auto kb = std::vector<const ClosedCurve*>{pair.boundary()[1]};
    double cross_term = mutual_energy_contour(ka, kb, MutualForm::imim).value;
    CHECK(rp.value ==
          doctest::Approx(2 * kEK_circle + 2 * cross_term).epsilon(5e-4));
  }

  TEST_CASE("nt route on the disk is exact") {
    auto r = nt_energy(corpus::disk(), 4000, 99);
    CHECK(r.nt_hits == 0);  // every sampled pair admits an inscribed circle
    CHECK(r.estimate.discard_rate < 0.005);
    CHECK(r.value == doctest::Approx(kEK_circle).epsilon(1e-9));
  }

  TEST_CASE("nt route on the 3:1 ellipse") {
    PlanarDomain ell = corpus::ellipse_domain(3.0, 1.0);
    double ek = curve_energy(ell);
    auto r = nt_energy(ell, 30000, 7);
    CHECK(r.nt_hits > 0);
    CHECK(std::abs(r.value - ek) <
          3 * r.estimate.std_error + 0.02 * std::abs(ek));
  }

  TEST_CASE("tangent-circle route") {
    auto disk = tangent_circle_energy(corpus::disk());
    CHECK(std::abs(disk.integral_term) < 1e-10);
    CHECK(disk.value == doctest::Approx(kEO_disk).epsilon(1e-12));
    CHECK(disk.alternate_constant == doctest::Approx(kPi * kPi / 2).epsilon(1e-14));

    PlanarDomain ell = corpus::ellipse_domain();
    auto te = tangent_circle_energy(ell, 768);
    DomainEnergyOptions deep;
    deep.delta0 = 4.0 / 128;
    deep.rungs = 7;
    double eo = domain_energy(ell, deep).value;
    CHECK(te.value == doctest::Approx(eo).epsilon(1e-3));
  }

  TEST_CASE("tangent-circle angle vanishes linearly at the diagonal") {
    ClosedCurve e = corpus::ellipse2();
    auto theta = [&](double s, double dt) {
      ChordData cd = e.chord(s, s + dt);
      return cd.theta_p + cd.theta_q;
    };
    double t2 = theta(0.7, 1e-2), t3 = theta(0.7, 1e-3);
    CHECK(std::abs(t3) < std::abs(t2) / 8);  // at least first-order decay
    CHECK(std::abs(t2) < 1e-3);
  }

  TEST_CASE("pair tangent-angle route") {
    PlanarDomain a = corpus::disk(1.0, {0, 0}), b = corpus::disk(1.0, {4, 0});
    double e_pair = pair_theta_energy(a, b);
    double e_area = mutual_energy_area(a, b);
    CHECK(e_pair == doctest::Approx(e_area).epsilon(1e-3));
    CHECK(pair_theta_energy(b, a) == doctest::Approx(e_pair).epsilon(1e-10));
    // decay at large separation
    PlanarDomain far_b = corpus::disk(1.0, {40, 0});
    double e_far = pair_theta_energy(a, far_b);
    CHECK(std::abs(e_far) < 2e-3);
    CHECK(e_far == doctest::Approx(two_disk_mutual(1, 1, 40)).epsilon(0.05));
  }

  TEST_CASE("moebius invariance spot check") {
    PlanarDomain ell = corpus::ellipse_domain();
    double base = curve_energy(ell);
    SampleStream rng(31, 4);
    auto m = mob::random_inversion_around(rng, {0, 0, 0}, ell.diameter(), true);
    PlanarDomain img = mob::apply(m, ell);
    double mapped = curve_energy(img);
    CHECK(std::abs(mapped - base) < 1e-3 * (1 + std::abs(base)));
  }

  TEST_CASE("disk minimality probe (small sample)") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
      PlanarDomain blob = corpus::random_blob(seed);
      double eo = curve_energy(blob) + kPi * kPi / 4;
      CHECK(eo >= kEO_disk - 1e-6);
    }
  }
}
