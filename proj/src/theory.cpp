#include "pagraph/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pagraph/errors.hpp"

namespace pagraph::theory {

namespace {

// Tail of the Stirling series for log Gamma(y), y >= 10:
// 1/(12y) - 1/(360y^3) + 1/(1260y^5) - 1/(1680y^7) + 1/(1188y^9).
double stirling_tail(double y) {
  const double inv = 1.0 / y;
  const double inv2 = inv * inv;
  return inv * (1.0 / 12 + inv2 * (-1.0 / 360 + inv2 * (1.0 / 1260 + inv2 * (-1.0 / 1680 + inv2 / 1188))));
}

void require_pair(NodeId i, NodeId j, NodeId min_i) {
  if (i < min_i) throw DomainError("node i must be at least " + std::to_string(min_i));
  if (j <= i) throw DomainError("pair requires i < j");
}

}  // namespace

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::static_limit:
      return "static";
    case Regime::logarithmic:
      return "logarithmic";
    case Regime::power_law:
      return "power";
  }
  return "unknown";
}

RegimeConstants regime_constants(std::uint32_t edges_per_arrival, double delta) {
  ModelParams{edges_per_arrival, delta}.validate();
  RegimeConstants rc;
  rc.edges_per_arrival = edges_per_arrival;
  rc.delta = delta;
  const double c = edges_per_arrival;
  rc.gamma = c / (2.0 * c + delta);
  const double spread = 1.0 / std::sqrt(c);
  rc.gamma1 = (1.0 - spread) * rc.gamma;
  rc.gamma2 = (1.0 + spread) * rc.gamma;
  rc.regime = delta > 0 ? Regime::static_limit : delta < 0 ? Regime::power_law : Regime::logarithmic;
  return rc;
}

double log_gamma_ratio(double x, double a) {
  if (!std::isfinite(x) || !std::isfinite(a) || !(x > 0.0) || !(x + a > 0.0)) {
    throw DomainError("gamma ratio needs x > 0 and x + a > 0");
  }
  if (a == 0.0) return 0.0;
  const double y = x + a;
  if (std::min(x, y) < 10.0) return std::lgamma(y) - std::lgamma(x);
  // Difference of Stirling expansions, arranged so the large terms cancel
  // analytically: (x - 1/2) log1p(a/x) + a log(y) - a + tail(y) - tail(x).
  return (x - 0.5) * std::log1p(a / x) + a * std::log(y) - a + (stirling_tail(y) - stirling_tail(x));
}

double gamma_ratio(double x, double a) { return std::exp(log_gamma_ratio(x, a)); }

Flagged expected_degree_limit(NodeId i, const RegimeConstants& rc) {
  if (i < 1) throw DomainError("node ids start at 1");
  const double c_plus_delta = rc.edges_per_arrival + rc.delta;
  return {c_plus_delta * std::exp(-log_gamma_ratio(i, rc.gamma)), i == 1};
}

double exact_expected_x(NodeId i, std::uint64_t n, const RegimeConstants& rc) {
  if (i < 2) throw DomainError("exact E[X_i(n)] is derived for i >= 2");
  if (n < i) throw DomainError("exact E[X_i(n)] needs n >= i");
  const double c_plus_delta = rc.edges_per_arrival + rc.delta;
  return c_plus_delta * std::exp(log_gamma_ratio(static_cast<double>(n), rc.gamma) - log_gamma_ratio(i, rc.gamma));
}

double expected_y_at_creation(NodeId i, NodeId j, const RegimeConstants& rc) {
  require_pair(i, j, 2);
  const double c_plus_delta = rc.edges_per_arrival + rc.delta;
  return c_plus_delta * c_plus_delta * std::exp(log_gamma_ratio(j, rc.gamma) - log_gamma_ratio(i, rc.gamma));
}

Flagged product_limit_mean(NodeId i, NodeId j, const RegimeConstants& rc) {
  require_pair(i, j, 1);
  const double c_plus_delta = rc.edges_per_arrival + rc.delta;
  const double log_ratio = -log_gamma_ratio(i, rc.gamma) + log_gamma_ratio(j, rc.gamma) -
                           log_gamma_ratio(j, rc.gamma1) - log_gamma_ratio(j, rc.gamma2);
  return {c_plus_delta * c_plus_delta * std::exp(log_ratio), i == 1};
}

double exact_expected_y(NodeId i, NodeId j, std::uint64_t n, const RegimeConstants& rc) {
  require_pair(i, j, 2);
  if (n < j) throw DomainError("exact E[Y_ij(n)] needs n >= j");
  const double x = static_cast<double>(n);
  return product_limit_mean(i, j, rc).value * std::exp(log_gamma_ratio(x, rc.gamma1) + log_gamma_ratio(x, rc.gamma2));
}

double limit_coefficient(const RegimeConstants& rc) {
  const double c = rc.edges_per_arrival;
  const double w = rc.weight_per_node();
  return c * (c - 1.0) / (w * w);
}

Flagged limit_coefficient_mean(NodeId i, NodeId j, const RegimeConstants& rc) {
  const Flagged c_ij = product_limit_mean(i, j, rc);
  return {limit_coefficient(rc) * c_ij.value, c_ij.node_one_caveat};
}

namespace {
void require_probabilities(double p_i, double p_j) {
  if (!(p_i >= 0.0) || !(p_j >= 0.0) || !(p_i + p_j <= 1.0 + 1e-12)) {
    throw DomainError("attachment probabilities must be nonnegative with p_i + p_j <= 1");
  }
}
}  // namespace

double increment_probability(double p_i, double p_j, std::uint32_t edges_per_arrival) {
  require_probabilities(p_i, p_j);
  if (edges_per_arrival < 1) throw DomainError("C must be at least 1");
  const double miss_i = 1.0 - p_i;
  if (p_i == 0.0 || p_j == 0.0 || miss_i <= 0.0) return 0.0;
  // Condition on k >= 1 stubs landing on i; each of the remaining C - k stubs
  // hits j with probability p_j / (1 - p_i).
  const double log_miss_j = std::log1p(-std::min(1.0, p_j / miss_i));
  const std::uint32_t c = edges_per_arrival;
  double total = 0.0;
  double binom = 1.0;
  for (std::uint32_t k = 1; k < c; ++k) {
    binom = binom * (c - k + 1) / k;
    const double p_k = binom * std::pow(p_i, k) * std::pow(miss_i, c - k);
    total += p_k * -std::expm1((c - k) * log_miss_j);
  }
  return total;
}

IncrementBounds increment_bounds(double p_i, double p_j, std::uint32_t edges_per_arrival) {
  require_probabilities(p_i, p_j);
  const double c = edges_per_arrival;
  const double upper = c * (c - 1.0) * p_i * p_j;
  return {upper * (1.0 - (c - 2.0) / 2.0 * (p_i + p_j)), upper};
}

IncrementBounds increment_bounds(double x_i, double x_j, std::uint64_t n, const RegimeConstants& rc) {
  if (n < 1) throw DomainError("n must be positive");
  const double total = rc.weight_per_node() * static_cast<double>(n);
  return increment_bounds(x_i / total, x_j / total, rc.edges_per_arrival);
}

double conditional_product_expectation(double x_i, double x_j, std::uint64_t n, const RegimeConstants& rc) {
  if (n < 1) throw DomainError("n must be positive");
  const double m = static_cast<double>(n);
  return x_i * x_j * ((m + rc.gamma1) / m) * ((m + rc.gamma2) / m);
}

double martingale_statistic(double y_ij, std::uint64_t n, double c_ij, const RegimeConstants& rc) {
  if (n < 1) throw DomainError("n must be positive");
  if (!(c_ij > 0.0)) throw DomainError("C_ij must be positive");
  const double m = static_cast<double>(n);
  return y_ij / c_ij * std::exp(-log_gamma_ratio(m, rc.gamma1) - log_gamma_ratio(m, rc.gamma2));
}

std::vector<double> expected_upper_increment_sums(NodeId i, NodeId j, std::span<const std::uint64_t> ns,
                                                  const RegimeConstants& rc) {
  require_pair(i, j, 2);
  const double c = rc.edges_per_arrival;
  const double w = rc.weight_per_node();
  const double scale = c * (c - 1.0) / (w * w);
  std::vector<double> out;
  out.reserve(ns.size());
  double sum = 0.0;
  std::uint64_t k = j;
  for (std::uint64_t n : ns) {
    if (n < j) throw DomainError("summation endpoints must be >= j");
    if (!out.empty() && n < k) throw DomainError("summation endpoints must be ascending");
    for (; k < n; ++k) {
      const double kk = static_cast<double>(k);
      sum += scale * exact_expected_y(i, j, k, rc) / (kk * kk);
    }
    out.push_back(sum);
  }
  return out;
}

double regime_normalizer(std::uint64_t n, const RegimeConstants& rc) {
  if (n < 2) throw DomainError("regime normalizer needs n >= 2");
  const double m = static_cast<double>(n);
  switch (rc.regime) {
    case Regime::static_limit:
      return 1.0;
    case Regime::logarithmic:
      return std::log(m);
    case Regime::power_law: {
      const double e = rc.power_exponent();
      return std::pow(m, e) / e;
    }
  }
  return 1.0;
}

double estimator_factor(double k, const RegimeConstants& rc) {
  if (!(k > 1.0) || !std::isfinite(k)) throw DomainError("estimator needs k > 1");
  return rc.delta >= 0 ? 1.0 : std::pow(k, rc.power_exponent());
}

ExpectationConstants expectation_constants(NodeId i, NodeId j, const RegimeConstants& rc) {
  require_pair(i, j, 1);
  ExpectationConstants ec;
  ec.i = i;
  ec.j = j;
  ec.e_d_inf_i = expected_degree_limit(i, rc);
  ec.e_d_inf_j = expected_degree_limit(j, rc);
  ec.c_ij = product_limit_mean(i, j, rc);
  ec.limit_coeff_mean = limit_coefficient_mean(i, j, rc);
  return ec;
}

}  // namespace pagraph::theory
