// Reference values computed with 50-digit mpmath gamma functions.

#include <cmath>
#include <vector>

#include "doctest.h"
#include "pagraph/errors.hpp"
#include "pagraph/theory.hpp"
#include "pagraph/verify.hpp"

using namespace pagraph;
using namespace pagraph::theory;
using doctest::Approx;

namespace {
Approx rel(double v, double eps = 1e-10) { return Approx(v).epsilon(eps); }
}  // namespace

TEST_CASE("regime constants") {
  const auto log_rc = regime_constants(2, 0.0);
  CHECK(log_rc.gamma == Approx(0.5));
  CHECK(log_rc.gamma1 == rel(0.14644660940672624));
  CHECK(log_rc.gamma2 == rel(0.85355339059327376));
  CHECK(log_rc.regime == Regime::logarithmic);
  CHECK(to_string(log_rc.regime) == "logarithmic");

  const auto static_rc = regime_constants(2, 1.5);
  CHECK(static_rc.gamma == rel(2.0 / 5.5));
  CHECK(static_rc.regime == Regime::static_limit);

  const auto power_rc = regime_constants(2, -1.5);
  CHECK(power_rc.gamma == rel(0.8));
  CHECK(power_rc.power_exponent() == rel(0.6));
  CHECK(power_rc.regime == Regime::power_law);

  CHECK_THROWS_AS(regime_constants(2, -2.0), DomainError);
}

TEST_CASE("gamma ratios") {
  CHECK(gamma_ratio(1.0, 1.0) == rel(1.0));
  CHECK(gamma_ratio(2.0, 0.5) == rel(1.3293403881791370));
  CHECK(gamma_ratio(1000.0, 0.5) == rel(31.618824001815913));
  CHECK(gamma_ratio(1e9, 0.3) == rel(501.18723357464763));
  CHECK(gamma_ratio(12.5, -0.7) == rel(0.17927688702505410));
  // the switch between lgamma differences and the asymptotic form is seamless
  CHECK(gamma_ratio(9.999999, 0.25) == rel(1.7615536325784911707));
  CHECK(gamma_ratio(10.000001, 0.25) == rel(1.7615537240108835494));
  CHECK(gamma_ratio(10.0, -0.4) == rel(0.40976669197149719166));
}

TEST_CASE("expected degree limits") {
  const auto rc = regime_constants(2, 0.0);
  const auto e2 = expected_degree_limit(2, rc);
  CHECK(e2.value == rel(1.5045055561273501));
  CHECK_FALSE(e2.node_one_caveat);
  const auto e1 = expected_degree_limit(1, rc);
  CHECK(e1.value == rel(2.2567583341910251));
  CHECK(e1.node_one_caveat);
  CHECK(expected_degree_limit(2, regime_constants(3, -1.0)).value == rel(1.3989686925876528));
}

TEST_CASE("exact expected shifted degree") {
  const auto rc = regime_constants(2, 0.0);
  CHECK(exact_expected_x(2, 2, rc) == rel(2.0));
  CHECK(exact_expected_x(2, 4, rc) == rel(35.0 / 12.0));
  CHECK(exact_expected_x(2, 1000, rc) == rel(47.570696388944855));
  CHECK_THROWS_AS(exact_expected_x(1, 10, rc), DomainError);
  CHECK_THROWS_AS(exact_expected_x(5, 4, rc), DomainError);
}

TEST_CASE("product expectations") {
  const auto rc = regime_constants(2, 0.0);
  CHECK(product_limit_mean(2, 3, rc).value == rel(1.7374149190442977));
  const auto c12 = product_limit_mean(1, 2, rc);
  CHECK(c12.value == rel(3.1924999137438970));
  CHECK(c12.node_one_caveat);
  CHECK(expected_y_at_creation(2, 3, rc) == rel(5.0));
  CHECK(exact_expected_y(2, 3, 3, rc) == rel(5.0));
  CHECK(exact_expected_y(2, 3, 10, rc) == rel(17.158368615237518));
  CHECK(exact_expected_y(2, 3, 100, rc) == rel(173.52445117042627));
  CHECK(exact_expected_y(2, 3, 1000, rc) == rel(1737.1977557569296));
  const double n = 1e6;
  const double gap = exact_expected_y(2, 3, 1000000, rc) / std::pow(n, 2.0 * rc.gamma) / product_limit_mean(2, 3, rc).value;
  CHECK(gap == rel(0.99999987500, 1e-9));
  CHECK(std::abs(gap - 1.0) < 1e-5);

  const auto st = regime_constants(2, 1.5);
  CHECK(product_limit_mean(10, 20, st).value == rel(1.8093238602301046));
  CHECK(product_limit_mean(2, 3, st).value == rel(6.8802813796444630));
}

TEST_CASE("limit coefficients") {
  const auto rc = regime_constants(2, 0.0);
  CHECK(limit_coefficient(rc) == rel(0.125));
  CHECK(limit_coefficient_mean(2, 3, rc).value == rel(0.21717686488053721));
  const auto m12 = limit_coefficient_mean(1, 2, rc);
  CHECK(m12.value == rel(0.39906248921798712));
  CHECK(m12.node_one_caveat);
  CHECK(limit_coefficient(regime_constants(1, 0.5)) == 0.0);
}

TEST_CASE("increment probability and its bounds") {
  CHECK(increment_probability(0.0, 0.3, 4) == 0.0);
  CHECK(increment_probability(0.2, 0.3, 2) == rel(0.12));
  CHECK(increment_probability(0.1, 0.1, 3) == rel(0.054));
  const auto b3 = increment_bounds(0.1, 0.1, 3);
  CHECK(b3.upper == rel(0.06));
  CHECK(b3.lower == rel(0.054));

  const double q4 = increment_probability(0.05, 0.02, 4);
  CHECK(q4 == rel(1.0 - std::pow(0.95, 4) - std::pow(0.98, 4) + std::pow(0.93, 4), 1e-12));
  CHECK(q4 == rel(0.0111776, 1e-5));
  const auto b4 = increment_bounds(0.05, 0.02, 4);
  CHECK(b4.upper == rel(0.012));
  CHECK(b4.lower == rel(0.01116));
  CHECK(b4.lower <= q4);
  CHECK(q4 <= b4.upper);
  CHECK(verify::enumerate_increment_probability(0.05, 0.02, 4) == rel(q4, 1e-12));
  CHECK(increment_probability(0.3, 0.2, 1) == 0.0);
}

TEST_CASE("one-step product expectation and martingale statistic") {
  const auto rc = regime_constants(2, 0.0);
  CHECK(conditional_product_expectation(2.0, 2.0, 10, rc) == rel(4.405));
  CHECK(verify::enumerate_product_expectation(2.0, 2.0, 10, 2, 0.0) == rel(4.405, 1e-12));
  const double c23 = product_limit_mean(2, 3, rc).value;
  CHECK(martingale_statistic(exact_expected_y(2, 3, 500, rc), 500, c23, rc) == rel(1.0));
}

TEST_CASE("exact C=2 increment sums") {
  const std::vector<std::uint64_t> ns{3, 1000};
  const auto sums = expected_upper_increment_sums(2, 3, ns, regime_constants(2, 0.0));
  CHECK(sums[0] == 0.0);
  CHECK(sums[1] == rel(1.2891344135670148));

  const std::vector<std::uint64_t> doubling{125, 250, 500, 1000};
  const auto st = expected_upper_increment_sums(2, 3, doubling, regime_constants(2, 1.5));
  CHECK(st[0] == Approx(0.8311).epsilon(1e-3));
  CHECK(st[3] == Approx(1.0249).epsilon(1e-3));
  const auto pw = expected_upper_increment_sums(10, 20, std::vector<std::uint64_t>{250, 4000}, regime_constants(2, -1.5));
  CHECK(pw[0] == Approx(0.04126).epsilon(1e-3));
  CHECK(pw[1] == Approx(0.26647).epsilon(1e-3));
}

TEST_CASE("normalizer and estimator factor") {
  const auto log_rc = regime_constants(2, 0.0);
  CHECK(regime_normalizer(1000, log_rc) == rel(std::log(1000.0)));
  CHECK(regime_normalizer(100, regime_constants(2, 1.5)) == 1.0);
  const auto pw = regime_constants(2, -1.5);
  CHECK(regime_normalizer(100, pw) == rel(std::pow(100.0, 0.6) / 0.6));
  CHECK(estimator_factor(4.0, pw) == rel(2.2973967099940700));
  CHECK(estimator_factor(2.0, log_rc) == 1.0);
  CHECK(estimator_factor(2.0, regime_constants(2, 1.5)) == 1.0);
  CHECK_THROWS_AS(estimator_factor(1.0, pw), DomainError);
}
