#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "pagraph/montecarlo.hpp"

// Checks Monte Carlo output against the closed forms of pagraph::theory and
// runs the deterministic identity suite.
namespace pagraph::verify {

// Thresholds for every check. Statistical checks use z_sigma standard errors;
// the asymptotic-regime windows were calibrated on pilot runs and live in
// data/tolerances.json.
struct Tolerances {
  int version = 1;
  double z_sigma = 3.0;
  double exact_relative = 1e-10;
  double enumeration_relative = 1e-12;
  double power_stability_relative = 0.20;
  double scaled_ratio_lo = 0.8;
  double scaled_ratio_hi = 1.25;
  double estimator_median_lo = 0.9;
  double estimator_median_hi = 1.1;
  double heavy_tail_skewness_min = 1.0;
  double heavy_tail_max_over_median_min = 3.0;
  double cesaro_relative_change = 0.10;
  double regime_correlation_min = 0.5;
};

Tolerances load_tolerances(const std::filesystem::path& path);
nlohmann::json to_json(const Tolerances& tol);

struct CheckResult {
  std::string suite;
  std::string name;
  bool hard = false;  // exact/invariant check rather than a statistical one
  bool passed = false;
  double target = 0.0;
  double achieved = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

class Report {
 public:
  void add(CheckResult result) { results_.push_back(std::move(result)); }
  void merge(const Report& other);
  const std::vector<CheckResult>& results() const { return results_; }
  bool hard_failure() const;
  bool all_passed() const;
  /// First result whose name starts with `prefix`; throws if none.
  const CheckResult& find(const std::string& prefix) const;
  std::vector<const CheckResult*> find_all(const std::string& prefix) const;
  nlohmann::json to_json() const;

 private:
  std::vector<CheckResult> results_;
};

// Experiment presets used by the suites and the acceptance tests.
montecarlo::ExperimentConfig means_config(std::uint64_t seed);        // C=2, delta=0, (2,3), R=5000
montecarlo::ExperimentConfig heavy_tail_config(std::uint64_t seed);   // C=2, delta=-1.5, (10,20), n=500, R=2500
montecarlo::ExperimentConfig estimator_config(std::uint64_t seed);    // C=2, delta=1.5, k in {2,4}, R=500
montecarlo::ExperimentConfig regime_config(double delta, std::uint64_t seed);  // C=2, (2,3) and (10,20)

/// Multinomial enumeration of E[(x_i + k)(x_j + l)] over the C stubs of one arrival.
double enumerate_product_expectation(double x_i, double x_j, std::uint64_t n, std::uint32_t c, double delta);
/// P(k >= 1 and l >= 1) by the same enumeration.
double enumerate_increment_probability(double p_i, double p_j, std::uint32_t c);

Report check_identities(const Tolerances& tol);
Report check_exact_means(const montecarlo::ReplicationSummary& s, const Tolerances& tol);
Report check_common_friend_mean(const montecarlo::ReplicationSummary& s, const Tolerances& tol);
Report check_heavy_tail(const montecarlo::ReplicationSummary& s, const Tolerances& tol);
Report check_estimator(const montecarlo::ReplicationSummary& s, const Tolerances& tol);
Report check_regimes(const montecarlo::ReplicationSummary& positive, const montecarlo::ReplicationSummary& zero,
                     const montecarlo::ReplicationSummary& negative, const Tolerances& tol);
Report cesaro_diagnostics(const montecarlo::ReplicationSummary& s, const Tolerances& tol);

enum class Suite { identities, means, regimes, estimator, all };
Suite parse_suite(const std::string& name);

Report run_suite(Suite suite, std::uint64_t seed, const Tolerances& tol, unsigned threads = 0);

}  // namespace pagraph::verify
