#include <doctest.h>

#include "mobius/renorm.hpp"

using namespace mobius;

namespace {

std::vector<std::pair<double, double>> ladder_of(const std::function<double(double)>& f,
                                                 double eps0 = 0.4, int rungs = 6) {
  std::vector<std::pair<double, double>> out;
  for (double e : geometric_ladder(eps0, rungs)) out.push_back({e, f(e)});
  return out;
}

}  // namespace

TEST_SUITE("renorm") {
  TEST_CASE("exact linear data") {
    auto r = extrapolate(ladder_of([](double e) { return 5.0 + e; }),
                         DivergenceModel::constant_plus_linear());
    CHECK(r.value == doctest::Approx(5.0).epsilon(1e-13));
    CHECK(r.fit_residual < 1e-12);
    CHECK(r.coefficients.at(1) == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("divergent term recovered") {
    auto r = extrapolate(ladder_of([](double e) { return 1.0 / e + 7.0; }),
                         DivergenceModel{{-1, 0}, {}});
    CHECK(r.value == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(r.coefficients.at(-1) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("disk potential ladder") {
    // cutoff integral of r^-4 over the unit disk at the center minus the
    // counterterm is exactly -pi for every eps < 1
    auto r = extrapolate(ladder_of([](double e) {
                           double cutoff_integral = kPi * (1.0 / (e * e) - 1.0);
                           return cutoff_integral - kPi / (e * e);
                         }),
                         DivergenceModel::constant_plus_linear());
    CHECK(r.value == doctest::Approx(-kPi).epsilon(1e-8));
  }

  TEST_CASE("pinned counterterm verification mode") {
    auto samples = ladder_of([](double e) { return 3.0 / e + 2.0 + 0.5 * e; });
    DivergenceModel m{{-1, 0, 1}, {{-1, 3.0}}};
    auto r = extrapolate(samples, m);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
    // residual divergent coefficient is statistically zero; reported value
    // includes the pinned part back
    CHECK(r.coefficients.at(-1) == doctest::Approx(3.0).epsilon(1e-9));
  }

  TEST_CASE("quadratic contamination bounded by the error estimate") {
    auto r = extrapolate(ladder_of([](double e) { return 2.0 + e + 0.3 * e * e; }, 0.1),
                         DivergenceModel::constant_plus_linear());
    CHECK(std::abs(r.value - 2.0) < 10 * std::max(r.error_estimate, 1e-6));
  }

  TEST_CASE("ladder preconditions") {
    std::vector<std::pair<double, double>> three{{0.4, 1}, {0.2, 1}, {0.05, 1}};
    CHECK_THROWS_AS(extrapolate(three, DivergenceModel::constant_plus_linear()),
                    ConfigError);
    std::vector<std::pair<double, double>> narrow{{0.4, 1}, {0.3, 1}, {0.2, 1}, {0.15, 1}};
    CHECK_THROWS_AS(extrapolate(narrow, DivergenceModel::constant_plus_linear()),
                    ConfigError);
    CHECK_THROWS_AS(extrapolate(ladder_of([](double e) { return e; }),
                                DivergenceModel{{1, 1, 0}, {}}),
                    ExtrapolationError);  // duplicated basis column
    CHECK_THROWS_AS(extrapolate(ladder_of([](double e) { return e; }),
                                DivergenceModel{{-1, 1}, {}}),
                    ConfigError);  // no constant term
  }

  TEST_CASE("error estimate reflects dropping the smallest rung") {
    auto samples = ladder_of([](double e) { return 1.0 + e + 0.05 * e * e; });
    auto r = extrapolate(samples, DivergenceModel::constant_plus_linear());
    auto r2 = extrapolate(
        std::vector<std::pair<double, double>>(samples.begin(), samples.end() - 1),
        DivergenceModel::constant_plus_linear());
    CHECK(r.error_estimate == doctest::Approx(std::abs(r.value - r2.value)).epsilon(1e-12));
  }
}
