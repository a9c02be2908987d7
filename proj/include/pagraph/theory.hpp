#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pagraph/graph.hpp"

// Closed-form quantities of the linear preferential attachment model. All
// gamma-function expressions are evaluated as log-ratios so that node ages up
// to 1e9 stay finite and accurate.
namespace pagraph::theory {

// Growth phase of the common-friend count N_ij(n), fixed by the sign of delta.
enum class Regime { static_limit, logarithmic, power_law };

std::string_view to_string(Regime regime);

struct RegimeConstants {
  std::uint32_t edges_per_arrival = 2;
  double delta = 0.0;
  double gamma = 0.5;   // C / (2C + delta)
  double gamma1 = 0.0;  // (1 - 1/sqrt C) gamma
  double gamma2 = 0.0;  // (1 + 1/sqrt C) gamma
  Regime regime = Regime::logarithmic;

  double power_exponent() const { return 2.0 * gamma - 1.0; }
  double weight_per_node() const { return 2.0 * edges_per_arrival + delta; }
};

RegimeConstants regime_constants(std::uint32_t edges_per_arrival, double delta);
inline RegimeConstants regime_constants(const ModelParams& p) {
  return regime_constants(p.edges_per_arrival, p.delta);
}

/// log(Gamma(x + a) / Gamma(x)); requires x > 0 and x + a > 0.
double log_gamma_ratio(double x, double a);
/// Gamma(x + a) / Gamma(x).
double gamma_ratio(double x, double a);

// A value whose formula was derived for nodes i >= 2. Node 1 starts with 2C
// self-loop stubs instead of C, so i == 1 results are computed as written
// and flagged.
struct Flagged {
  double value = 0.0;
  bool node_one_caveat = false;
};

/// E[D_i(inf)] = (C + delta) Gamma(i) / Gamma(i + gamma).
Flagged expected_degree_limit(NodeId i, const RegimeConstants& rc);

/// E[X_i(n)] for n >= i >= 2, X_i = D_i + delta.
double exact_expected_x(NodeId i, std::uint64_t n, const RegimeConstants& rc);

/// E[Y_ij(j)] = (C + delta)^2 Gamma(i) Gamma(j + gamma) / (Gamma(j) Gamma(i + gamma)).
double expected_y_at_creation(NodeId i, NodeId j, const RegimeConstants& rc);

/// C_ij = E[Y_ij(inf)], the mean of D_i(inf) D_j(inf).
Flagged product_limit_mean(NodeId i, NodeId j, const RegimeConstants& rc);

/// E[Y_ij(n)] = C_ij Gamma(n + gamma1) Gamma(n + gamma2) / Gamma(n)^2 for n >= j > i >= 2.
double exact_expected_y(NodeId i, NodeId j, std::uint64_t n, const RegimeConstants& rc);

/// C (C - 1) / (2C + delta)^2.
double limit_coefficient(const RegimeConstants& rc);

/// Mean of the a.s. limit of the regime-scaled N_ij: limit_coefficient * C_ij.
Flagged limit_coefficient_mean(NodeId i, NodeId j, const RegimeConstants& rc);

/// Exact P(next arrival befriends both i and j | state):
/// 1 - (1 - p_i)^C - (1 - p_j)^C + (1 - p_i - p_j)^C, summed without cancellation.
double increment_probability(double p_i, double p_j, std::uint32_t edges_per_arrival);

struct IncrementBounds {
  double lower = 0.0;  // R [1 - (C - 2)/2 (p_i + p_j)]
  double upper = 0.0;  // C (C - 1) p_i p_j
};

IncrementBounds increment_bounds(double p_i, double p_j, std::uint32_t edges_per_arrival);
/// Same, with p = x / ((2C + delta) n).
IncrementBounds increment_bounds(double x_i, double x_j, std::uint64_t n, const RegimeConstants& rc);

/// E[Y_ij(n + 1) | state] = x_i x_j (n + gamma1)(n + gamma2) / n^2.
double conditional_product_expectation(double x_i, double x_j, std::uint64_t n, const RegimeConstants& rc);

/// W_ij(n) = Y_ij(n) / C_ij * Gamma(n)^2 / (Gamma(n + gamma1) Gamma(n + gamma2)).
double martingale_statistic(double y_ij, std::uint64_t n, double c_ij, const RegimeConstants& rc);

/// sum_{k=j}^{n-1} C (C - 1) E[Y_ij(k)] / ((2C + delta)^2 k^2) for each n in
/// `ns` (ascending, each >= j). This is E[sum of upper bounds R_k]; for C == 2
/// it is exactly E[N_ij(n)] - E[N_ij(j)].
std::vector<double> expected_upper_increment_sums(NodeId i, NodeId j, std::span<const std::uint64_t> ns,
                                                  const RegimeConstants& rc);

/// 1, log n or n^(2 gamma - 1) / (2 gamma - 1) depending on the regime; n >= 2.
double regime_normalizer(std::uint64_t n, const RegimeConstants& rc);

/// 1 when delta >= 0, k^(2 gamma - 1) otherwise; k must exceed 1.
double estimator_factor(double k, const RegimeConstants& rc);

struct ExpectationConstants {
  NodeId i = 0;
  NodeId j = 0;
  Flagged e_d_inf_i;
  Flagged e_d_inf_j;
  Flagged c_ij;
  Flagged limit_coeff_mean;
};

ExpectationConstants expectation_constants(NodeId i, NodeId j, const RegimeConstants& rc);

}  // namespace pagraph::theory
