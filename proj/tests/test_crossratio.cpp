#include <doctest.h>

#include "mobius/crossratio.hpp"

using namespace mobius;
using namespace mobius::cr;

TEST_SUITE("crossratio") {
  TEST_CASE("unit example") {
    Complex v = eval_omega_cr({0, 0}, {1, 0}, {1, 0}, {1, 0});
    CHECK(std::abs(v - Complex{1, 0}) < 1e-15);
  }

  TEST_CASE("coincident points rejected") {
    CHECK_THROWS_AS(eval_omega_cr({1, 1}, {1, 1}, {1, 0}, {1, 0}), GeometryError);
  }

  TEST_CASE("antisymmetry in the two slots") {
    SampleStream rng(2, 0);
    for (int i = 0; i < 100; ++i) {
      Complex w{rng.uniform(-2, 2), rng.uniform(-2, 2)};
      Complex z = w + Complex{rng.uniform(0.2, 2), rng.uniform(0.2, 2)};
      Complex x1{rng.normal(), rng.normal()}, z1{rng.normal(), rng.normal()};
      Complex x2{rng.normal(), rng.normal()}, z2{rng.normal(), rng.normal()};
      Complex a = omega_cr_on(w, z, x1, z1, x2, z2);
      Complex b = omega_cr_on(w, z, x2, z2, x1, z1);
      CHECK(std::abs(a + b) < 1e-12 * (1 + std::abs(a)));
    }
  }

  TEST_CASE("invariance under the diagonal action of 1/z") {
    SampleStream rng(7, 0);
    for (int i = 0; i < 300; ++i) {
      Complex w{rng.uniform(0.5, 2), rng.uniform(0.5, 2)};
      Complex z{rng.uniform(-2, -0.5), rng.uniform(0.5, 2)};
      Complex dw{rng.normal(), rng.normal()}, dz{rng.normal(), rng.normal()};
      Complex before = eval_omega_cr(w, z, dw, dz);
      // h(zeta) = 1/zeta, pushforward of tangents by h'(zeta) = -1/zeta^2
      Complex hw = 1.0 / w, hz = 1.0 / z;
      Complex dhw = -dw / (w * w), dhz = -dz / (z * z);
      Complex after = eval_omega_cr(hw, hz, dhw, dhz);
      CHECK(std::abs(before - after) < 1e-12 * (1 + std::abs(before)));
    }
  }

  TEST_CASE("wedge squares identity") {
    SampleStream rng(13, 0);
    for (int i = 0; i < 1000; ++i) {
      TangentPairFrame f;
      f.w = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
      f.z = f.w + Complex{rng.uniform(0.3, 3), rng.uniform(0.3, 3)};
      f.dw1 = {rng.normal(), rng.normal()};
      f.dw2 = {rng.normal(), rng.normal()};
      f.dz1 = {rng.normal(), rng.normal()};
      f.dz2 = {rng.normal(), rng.normal()};
      double ref = area_pair_form(f);
      REQUIRE(std::abs(wedge_square_re(f) - ref) < 1e-12 * (1 + std::abs(ref)));
      REQUIRE(std::abs(wedge_square_im(f) - ref) < 1e-12 * (1 + std::abs(ref)));
    }
  }
}
