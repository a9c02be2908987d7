#include "pagraph/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pagraph/errors.hpp"
#include "pagraph/theory.hpp"

namespace pagraph::verify {

using montecarlo::ExperimentConfig;
using montecarlo::Field;
using montecarlo::ReplicationSummary;

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

std::string pair_tag(const montecarlo::PairSpec& p) {
  return "i=" + std::to_string(p.i) + ",j=" + std::to_string(p.j);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Two-sided z check of a Monte Carlo mean against an exact target. A zero
// standard error means the quantity is deterministic and the check is exact.
CheckResult z_check(std::string suite, std::string name, double target, const stats::Moments& m,
                    const Tolerances& tol) {
  CheckResult r;
  r.suite = std::move(suite);
  r.name = std::move(name);
  r.target = target;
  r.achieved = m.mean;
  if (m.se == 0.0) {
    r.hard = true;
    r.tolerance = tol.exact_relative * std::max(1.0, std::abs(target));
    r.passed = std::abs(m.mean - target) <= r.tolerance;
    r.detail = "deterministic quantity";
  } else {
    r.tolerance = tol.z_sigma * m.se;
    r.passed = std::abs(m.mean - target) <= r.tolerance;
    r.detail = "z=" + fmt((m.mean - target) / m.se) + " se=" + fmt(m.se) + " R=" + std::to_string(m.count);
  }
  return r;
}

std::vector<double> difference(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

// Ratio of mean increments b / a with a delta-method standard error.
struct RatioEstimate {
  double ratio = 0.0;
  double se = 0.0;
};

RatioEstimate ratio_of_means(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ma = stats::moments(a);
  const auto mb = stats::moments(b);
  double cov = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) cov += (a[k] - ma.mean) * (b[k] - mb.mean);
  cov /= static_cast<double>(a.size() - 1);
  const double rho = mb.mean / ma.mean;
  const double var = (mb.sd * mb.sd + rho * rho * ma.sd * ma.sd - 2.0 * rho * cov) /
                     (ma.mean * ma.mean * static_cast<double>(a.size()));
  return {rho, std::sqrt(std::max(var, 0.0))};
}

// A small graph state with a random pair, for the one-step identities.
struct RandomState {
  std::uint32_t c;
  double delta;
  std::uint64_t n;
  NodeId i;
  NodeId j;
  double x_i;
  double x_j;
};

std::vector<RandomState> random_states(std::uint64_t seed, std::size_t per_c) {
  std::vector<RandomState> out;
  for (std::uint32_t c = 2; c <= 5; ++c) {
    Philox rng = Philox::for_stream(seed, c);
    for (std::size_t s = 0; s < per_c; ++s) {
      const double delta = -static_cast<double>(c) + 0.25 + rng.uniform01() * (c + 2.75);
      const std::uint64_t n = 3 + (rng() % 298);
      GraphOptions options;
      options.keep_adjacency = false;
      GraphState g(ModelParams{c, delta}, Philox::for_stream(rng(), 0), options);
      evolve(g, n);
      const auto j = static_cast<NodeId>(3 + rng() % (n - 2));
      const auto i = static_cast<NodeId>(2 + rng() % (j - 2));
      out.push_back({c, delta, n, i, j, g.shifted_degree(i), g.shifted_degree(j)});
    }
  }
  return out;
}

double closed_form_increment(double a, double b, std::uint32_t c) {
  return 1.0 - std::pow(1.0 - a, c) - std::pow(1.0 - b, c) + std::pow(1.0 - a - b, c);
}

}  // namespace

Tolerances load_tolerances(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tolerance file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("tolerance file " + path.string() + ": " + e.what());
  }
  Tolerances t;
  const Tolerances defaults;
  auto take = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  if (!j.contains("version") || j.at("version").get<int>() != defaults.version) {
    throw FormatError("tolerance file version mismatch");
  }
  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"version",
                                  "z_sigma",
                                  "exact_relative",
                                  "enumeration_relative",
                                  "power_stability_relative",
                                  "scaled_ratio_lo",
                                  "scaled_ratio_hi",
                                  "estimator_median_lo",
                                  "estimator_median_hi",
                                  "heavy_tail_skewness_min",
                                  "heavy_tail_max_over_median_min",
                                  "cesaro_relative_change",
                                  "regime_correlation_min",
                                  "notes"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known)) {
      throw FormatError("unknown tolerance key '" + key + "'");
    }
  }
  take("z_sigma", t.z_sigma);
  take("exact_relative", t.exact_relative);
  take("enumeration_relative", t.enumeration_relative);
  take("power_stability_relative", t.power_stability_relative);
  take("scaled_ratio_lo", t.scaled_ratio_lo);
  take("scaled_ratio_hi", t.scaled_ratio_hi);
  take("estimator_median_lo", t.estimator_median_lo);
  take("estimator_median_hi", t.estimator_median_hi);
  take("heavy_tail_skewness_min", t.heavy_tail_skewness_min);
  take("heavy_tail_max_over_median_min", t.heavy_tail_max_over_median_min);
  take("cesaro_relative_change", t.cesaro_relative_change);
  take("regime_correlation_min", t.regime_correlation_min);
  return t;
}

nlohmann::json to_json(const Tolerances& t) {
  return {{"version", t.version},
          {"z_sigma", t.z_sigma},
          {"exact_relative", t.exact_relative},
          {"enumeration_relative", t.enumeration_relative},
          {"power_stability_relative", t.power_stability_relative},
          {"scaled_ratio_lo", t.scaled_ratio_lo},
          {"scaled_ratio_hi", t.scaled_ratio_hi},
          {"estimator_median_lo", t.estimator_median_lo},
          {"estimator_median_hi", t.estimator_median_hi},
          {"heavy_tail_skewness_min", t.heavy_tail_skewness_min},
          {"heavy_tail_max_over_median_min", t.heavy_tail_max_over_median_min},
          {"cesaro_relative_change", t.cesaro_relative_change},
          {"regime_correlation_min", t.regime_correlation_min}};
}

void Report::merge(const Report& other) {
  results_.insert(results_.end(), other.results_.begin(), other.results_.end());
}

bool Report::hard_failure() const {
  return std::any_of(results_.begin(), results_.end(), [](const CheckResult& r) { return r.hard && !r.passed; });
}

bool Report::all_passed() const {
  return std::all_of(results_.begin(), results_.end(), [](const CheckResult& r) { return r.passed; });
}

const CheckResult& Report::find(const std::string& prefix) const {
  for (const auto& r : results_) {
    if (r.name.rfind(prefix, 0) == 0) return r;
  }
  throw DomainError("no check named " + prefix);
}

std::vector<const CheckResult*> Report::find_all(const std::string& prefix) const {
  std::vector<const CheckResult*> out;
  for (const auto& r : results_) {
    if (r.name.rfind(prefix, 0) == 0) out.push_back(&r);
  }
  return out;
}

nlohmann::json Report::to_json() const {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& r : results_) {
    checks.push_back({{"suite", r.suite},
                      {"name", r.name},
                      {"kind", r.hard ? "hard" : "statistical"},
                      {"passed", r.passed},
                      {"target", r.target},
                      {"achieved", r.achieved},
                      {"tolerance", r.tolerance},
                      {"detail", r.detail}});
  }
  return {{"passed", all_passed()}, {"hard_failure", hard_failure()}, {"checks", checks}};
}

ExperimentConfig means_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.params = {2, 0.0};
  c.pairs = {{2, 3}};
  c.n_max = 1000;
  c.checkpoints = {3, 10, 100, 1000};
  c.replicates = 5000;
  c.master_seed = seed;
  return c;
}

ExperimentConfig heavy_tail_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.params = {2, -1.5};
  c.pairs = {{10, 20}};
  c.n_max = 500;
  c.checkpoints = {100, 250, 500};
  c.replicates = 2500;
  c.master_seed = seed;
  c.trajectory_count = 5;
  c.trajectory = {Spacing::linear, 1};
  return c;
}

ExperimentConfig estimator_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.params = {2, 1.5};
  c.pairs = {{10, 20}};
  c.n_max = 4000;
  c.checkpoints = {1000, 2000, 4000};
  c.estimator_k = {2.0, 4.0};
  c.replicates = 500;
  c.master_seed = seed;
  return c;
}

ExperimentConfig regime_config(double delta, std::uint64_t seed) {
  ExperimentConfig c;
  c.params = {2, delta};
  c.pairs = {{2, 3}, {10, 20}};
  c.n_max = 1000;
  c.checkpoints = {125, 250, 500, 1000};
  c.replicates = 20000;
  c.master_seed = seed;
  return c;
}

double enumerate_product_expectation(double x_i, double x_j, std::uint64_t n, std::uint32_t c, double delta) {
  const double total = (2.0 * c + delta) * static_cast<double>(n);
  const double p_i = x_i / total;
  const double p_j = x_j / total;
  double sum = 0.0;
  for (std::uint32_t k = 0; k <= c; ++k) {
    for (std::uint32_t l = 0; k + l <= c; ++l) {
      const double coef = std::exp(std::lgamma(c + 1.0) - std::lgamma(k + 1.0) - std::lgamma(l + 1.0) -
                                   std::lgamma(c - k - l + 1.0));
      const double pmf = coef * std::pow(p_i, k) * std::pow(p_j, l) * std::pow(1.0 - p_i - p_j, c - k - l);
      sum += pmf * (x_i + k) * (x_j + l);
    }
  }
  return sum;
}

double enumerate_increment_probability(double p_i, double p_j, std::uint32_t c) {
  double sum = 0.0;
  for (std::uint32_t k = 1; k <= c; ++k) {
    for (std::uint32_t l = 1; k + l <= c; ++l) {
      const double coef = std::exp(std::lgamma(c + 1.0) - std::lgamma(k + 1.0) - std::lgamma(l + 1.0) -
                                   std::lgamma(c - k - l + 1.0));
      sum += coef * std::pow(p_i, k) * std::pow(p_j, l) * std::pow(1.0 - p_i - p_j, c - k - l);
    }
  }
  return sum;
}

Report check_identities(const Tolerances& tol) {
  Report report;
  const std::string suite = "identities";

  // L <= Q <= R on the probability grid, equality at C = 2; Q agrees with the
  // displayed closed form and with the multinomial enumeration.
  for (std::uint32_t c = 2; c <= 6; ++c) {
    double worst_violation = 0.0;
    double worst_equality = 0.0;
    double worst_routes = 0.0;
    for (int a = 0; a <= 50; ++a) {
      for (int b = 0; b <= 50; ++b) {
        const double pa = a / 100.0;
        const double pb = b / 100.0;
        const double q = theory::increment_probability(pa, pb, c);
        const auto bounds = theory::increment_bounds(pa, pb, c);
        const double slack = tol.enumeration_relative * std::max(bounds.upper, 1e-300);
        worst_violation = std::max({worst_violation, bounds.lower - q - slack, q - bounds.upper - slack});
        worst_routes = std::max({worst_routes, std::abs(q - closed_form_increment(pa, pb, c)),
                                 std::abs(q - enumerate_increment_probability(pa, pb, c))});
        if (c == 2) {
          worst_equality = std::max({worst_equality, relative_error(q, bounds.upper),
                                     relative_error(bounds.lower, bounds.upper)});
        }
      }
    }
    CheckResult r{suite, "identities.sandwich(C=" + std::to_string(c) + ")", true, false, 0.0, 0.0, 0.0, ""};
    r.achieved = std::max(worst_violation, 0.0);
    r.passed = worst_violation <= 0.0 && worst_routes <= 1e-12 && worst_equality <= tol.exact_relative;
    r.tolerance = tol.exact_relative;
    r.detail = "max bound violation " + fmt(std::max(worst_violation, 0.0)) + ", route disagreement " +
               fmt(worst_routes) + (c == 2 ? ", C=2 equality error " + fmt(worst_equality) : "");
    report.add(r);
  }

  {
    const double q = theory::increment_probability(0.1, 0.1, 3);
    const auto b = theory::increment_bounds(0.1, 0.1, 3);
    const bool ok = relative_error(q, 0.054) <= tol.exact_relative && relative_error(b.lower, 0.054) <= tol.exact_relative &&
                    relative_error(b.upper, 0.06) <= tol.exact_relative && q < b.upper;
    report.add({suite, "identities.sandwich_symmetric(C=3,p=0.1)", true, ok, 0.054, q, tol.exact_relative,
                "L=" + fmt(b.lower) + " R=" + fmt(b.upper)});
  }

  const auto states = random_states(0x1DE17, 25);
  double worst_enum = 0.0;
  double worst_martingale = 0.0;
  for (const RandomState& st : states) {
    const auto rc = theory::regime_constants(st.c, st.delta);
    const double formula = theory::conditional_product_expectation(st.x_i, st.x_j, st.n, rc);
    const double oracle = enumerate_product_expectation(st.x_i, st.x_j, st.n, st.c, st.delta);
    worst_enum = std::max(worst_enum, relative_error(formula, oracle));

    // E[W(n+1) | state] = W(n), with the expectation taken by enumeration.
    const double c_ij = theory::product_limit_mean(st.i, st.j, rc).value;
    const double w_now = theory::martingale_statistic(st.x_i * st.x_j, st.n, c_ij, rc);
    const double w_next = theory::martingale_statistic(oracle, st.n + 1, c_ij, rc);
    worst_martingale = std::max(worst_martingale, relative_error(w_now, w_next));
  }
  report.add({suite, "identities.product_enumeration", true, worst_enum <= tol.enumeration_relative, 0.0, worst_enum,
              tol.enumeration_relative, std::to_string(states.size()) + " random states, C in 2..5"});
  report.add({suite, "identities.martingale_one_step", true, worst_martingale <= tol.exact_relative, 0.0,
              worst_martingale, tol.exact_relative, std::to_string(states.size()) + " random states"});

  {
    const std::uint32_t cs[] = {2, 3, 5};
    const double deltas[] = {-1.5, 0.0, 1.5};
    double worst_x = 0.0;
    double worst_y = 0.0;
    double worst_product = 0.0;
    for (std::uint32_t c : cs) {
      for (double d : deltas) {
        const auto rc = theory::regime_constants(c, d);
        for (NodeId i : {2u, 5u, 40u}) {
          worst_x = std::max(worst_x, relative_error(theory::exact_expected_x(i, i, rc), c + d));
          const NodeId j = i + 3;
          worst_y = std::max(worst_y, relative_error(theory::exact_expected_y(i, j, j, rc),
                                                     theory::expected_y_at_creation(i, j, rc)));
          // Independent route: multiply the one-step factors out.
          double ex = c + d;
          double ey = theory::expected_y_at_creation(i, j, rc);
          for (std::uint64_t k = i; k < 600; ++k) {
            const double kk = static_cast<double>(k);
            ex *= (kk + rc.gamma) / kk;
            if (k >= j) ey *= (kk + rc.gamma1) * (kk + rc.gamma2) / (kk * kk);
          }
          worst_product = std::max({worst_product, relative_error(ex, theory::exact_expected_x(i, 600, rc)),
                                    relative_error(ey, theory::exact_expected_y(i, j, 600, rc))});
        }
      }
    }
    double worst_inverse = 0.0;
    for (double x : {0.5, 1.0, 2.5, 9.99, 10.0, 12.5, 1e3, 1e6, 1e9}) {
      for (double a : {-0.4, 0.3, 0.8536}) {
        worst_inverse = std::max(worst_inverse,
                                 std::abs(theory::gamma_ratio(x, a) * theory::gamma_ratio(x + a, -a) - 1.0));
      }
    }
    report.add({suite, "identities.telescoping_x", true, worst_x <= tol.exact_relative, 0.0, worst_x,
                tol.exact_relative, "E[X_i(i)] = C + delta"});
    report.add({suite, "identities.telescoping_y", true, worst_y <= tol.exact_relative, 0.0, worst_y,
                tol.exact_relative, "E[Y_ij(j)] against its creation-time form"});
    report.add({suite, "identities.product_recursion", true, worst_product <= tol.exact_relative, 0.0, worst_product,
                tol.exact_relative, "gamma-ratio forms against multiplied one-step factors up to n = 600"});
    report.add({suite, "identities.gamma_ratio_inverse", true, worst_inverse <= tol.exact_relative, 0.0, worst_inverse,
                tol.exact_relative, "gamma_ratio(x, a) gamma_ratio(x + a, -a) = 1"});
  }
  return report;
}

Report check_exact_means(const ReplicationSummary& s, const Tolerances& tol) {
  Report report;
  const auto& rc = s.constants;
  for (std::size_t p = 0; p < s.pairs.size(); ++p) {
    const auto& pair = s.pairs[p].pair;
    for (const auto& cs : s.pairs[p].checkpoints) {
      const std::string at = "(" + pair_tag(pair) + ",n=" + std::to_string(cs.n) + ")";
      if (pair.i >= 2) {
        report.add(z_check("means", "means.x_i" + at, theory::exact_expected_x(pair.i, cs.n, rc), cs.x_i, tol));
        report.add(z_check("means", "means.y_ij" + at, theory::exact_expected_y(pair.i, pair.j, cs.n, rc), cs.y_ij, tol));
      }
      report.add(z_check("means", "means.x_j" + at, theory::exact_expected_x(pair.j, cs.n, rc), cs.x_j, tol));
    }
  }
  return report;
}

Report check_common_friend_mean(const ReplicationSummary& s, const Tolerances& tol) {
  Report report;
  const auto& rc = s.constants;
  const auto cps = s.config.effective_checkpoints();
  const bool equality = rc.edges_per_arrival == 2;
  for (std::size_t p = 0; p < s.pairs.size(); ++p) {
    const auto& pair = s.pairs[p].pair;
    if (pair.i < 2) continue;
    const auto upper = theory::expected_upper_increment_sums(pair.i, pair.j, cps, rc);
    for (std::size_t c = 0; c < cps.size(); ++c) {
      const auto& cs = s.pairs[p].checkpoints[c];
      const std::string at = "(" + pair_tag(pair) + ",n=" + std::to_string(cs.n) + ")";
      if (equality) {
        auto r = z_check("means", "common_friends.c2" + at, upper[c], cs.increment, tol);
        r.detail += "; target = exact C=2 sum of 2 E[Y(k)] / ((2C+delta)^2 k^2)";
        report.add(r);
      } else {
        const auto inc = s.column(p, c, Field::increment);
        const auto above_lower = stats::moments(difference(inc, s.column(p, c, Field::sum_lower)));
        CheckResult lo{"means", "common_friends.lower_bound" + at, false, false, 0.0, above_lower.mean,
                       tol.z_sigma * above_lower.se, "mean of N(n)-N(j) minus Monte Carlo E[sum L_k]"};
        lo.passed = above_lower.mean >= -lo.tolerance;
        report.add(lo);
        CheckResult hi{"means", "common_friends.upper_bound" + at, false, false, upper[c], cs.increment.mean,
                       tol.z_sigma * cs.increment.se, "against the exact E[sum R_k]"};
        hi.passed = cs.increment.mean <= upper[c] + hi.tolerance;
        report.add(hi);
      }
      // N(n) - N(j) - sum Q_k is a martingale started at 0.
      const auto compensated =
          stats::moments(difference(s.column(p, c, Field::increment), s.column(p, c, Field::sum_exact)));
      report.add(z_check("means", "common_friends.compensator" + at, 0.0, compensated, tol));
    }
  }
  return report;
}

Report check_heavy_tail(const ReplicationSummary& s, const Tolerances& tol) {
  Report report;
  const std::size_t last = s.config.effective_checkpoints().size() - 1;
  for (std::size_t p = 0; p < s.pairs.size(); ++p) {
    const auto& pair = s.pairs[p].pair;
    const auto& cs = s.pairs[p].checkpoints[last];
    const std::string at = "(" + pair_tag(pair) + ",n=" + std::to_string(cs.n) + ")";
    report.add({"regimes", "heavy_tail.skewness" + at, false, cs.n_ij.skewness > tol.heavy_tail_skewness_min,
                tol.heavy_tail_skewness_min, cs.n_ij.skewness, 0.0, "sample skewness of N_ij(n)"});
    const auto q = stats::quartiles(s.column(p, last, Field::n_ij));
    const double ratio = q.median > 0.0 ? cs.n_ij.max / q.median : std::numeric_limits<double>::infinity();
    report.add({"regimes", "heavy_tail.max_over_median" + at, false,
                q.median > 0.0 && ratio > tol.heavy_tail_max_over_median_min, tol.heavy_tail_max_over_median_min,
                ratio, 0.0, "max " + fmt(cs.n_ij.max) + " / median " + fmt(q.median)});

    // Hard invariant: N_ij never decreases and gains at most one per arrival.
    std::size_t violations = 0;
    std::size_t checked = 0;
    for (const auto& rep : s.replicates) {
      const auto& rs = rep.records[p];
      for (std::size_t k = 1; k < rs.size(); ++k) {
        ++checked;
        if (rs[k].n_ij < rs[k - 1].n_ij || rs[k].n_ij - rs[k - 1].n_ij > rs[k].n - rs[k - 1].n) ++violations;
      }
      for (const auto& t : rep.trajectories) {
        if (t.i() != pair.i || t.j() != pair.j) continue;
        const auto pts = t.trajectory();
        for (std::size_t k = 1; k < pts.size(); ++k) {
          ++checked;
          if (pts[k].n_ij < pts[k - 1].n_ij || pts[k].n_ij - pts[k - 1].n_ij > pts[k].n - pts[k - 1].n) ++violations;
        }
      }
    }
    report.add({"regimes", "heavy_tail.trajectories_monotone" + at, true, violations == 0, 0.0,
                static_cast<double>(violations), 0.0,
                std::to_string(checked) + " consecutive recorded pairs checked for nondecreasing 0/1 steps"});
  }
  return report;
}

Report check_estimator(const ReplicationSummary& s, const Tolerances& tol) {
  Report report;
  const auto cps = s.config.effective_checkpoints();
  for (std::size_t p = 0; p < s.pairs.size(); ++p) {
    const auto& pair = s.pairs[p].pair;
    for (std::size_t kk = 0; kk < s.config.estimator_k.size(); ++kk) {
      const double k = s.config.estimator_k[kk];
      const std::string tag = "(" + pair_tag(pair) + ",k=" + fmt(k) + ")";
      bool shrinking = true;
      std::string trail;
      for (std::size_t c = 0; c < cps.size(); ++c) {
        const auto& r = s.pairs[p].checkpoints[c].ratios[kk];
        trail += "n=" + std::to_string(cps[c]) + ": iqr=" + fmt(r.quartiles.iqr()) + " median=" +
                 fmt(r.quartiles.median) + " conditioned=" + std::to_string(r.conditioned) + "/" +
                 std::to_string(s.replicates.size()) + "; ";
        if (r.conditioned == 0) shrinking = false;
        if (c > 0 && !(r.quartiles.iqr() < s.pairs[p].checkpoints[c - 1].ratios[kk].quartiles.iqr())) {
          shrinking = false;
        }
      }
      const auto& last = s.pairs[p].checkpoints.back().ratios[kk];
      report.add({"estimator", "estimator.iqr_shrinks" + tag, false, shrinking, 0.0, last.quartiles.iqr(), 0.0, trail});
      CheckResult med{"estimator",
                      "estimator.median" + tag + ",n=" + std::to_string(cps.back()),
                      false,
                      false,
                      1.0,
                      last.quartiles.median,
                      0.0,
                      "window [" + fmt(tol.estimator_median_lo) + ", " + fmt(tol.estimator_median_hi) +
                          "], conditioning rate " + fmt(last.conditioning_rate)};
      med.passed = last.conditioned > 0 && last.quartiles.median >= tol.estimator_median_lo &&
                   last.quartiles.median <= tol.estimator_median_hi;
      med.tolerance = tol.estimator_median_hi - 1.0;
      report.add(med);
    }
  }
  return report;
}

namespace {

theory::Regime classify_growth(const ReplicationSummary& s, std::size_t pair, const Tolerances& tol, RatioEstimate& est) {
  const std::size_t m = s.config.effective_checkpoints().size();
  if (m < 3) throw DomainError("regime classification needs three checkpoints");
  const auto n1 = s.column(pair, m - 3, Field::n_ij);
  const auto n2 = s.column(pair, m - 2, Field::n_ij);
  const auto n3 = s.column(pair, m - 1, Field::n_ij);
  est = ratio_of_means(difference(n2, n1), difference(n3, n2));
  if (est.ratio + tol.z_sigma * est.se < 1.0) return theory::Regime::static_limit;
  if (est.ratio - tol.z_sigma * est.se > 1.0) return theory::Regime::power_law;
  return theory::Regime::logarithmic;
}

void add_classification(Report& report, const ReplicationSummary& s, const Tolerances& tol) {
  RatioEstimate est;
  const auto got = classify_growth(s, 0, tol, est);
  const auto want = s.constants.regime;
  report.add({"regimes",
              "regimes.classification(delta=" + fmt(s.constants.delta) + ")",
              false,
              got == want,
              std::exp2(s.constants.power_exponent()),
              est.ratio,
              tol.z_sigma * est.se,
              std::string("doubling-increment ratio classified as ") + std::string(theory::to_string(got)) +
                  ", expected " + std::string(theory::to_string(want)) + " (pair " + pair_tag(s.pairs[0].pair) + ")"});
}

}  // namespace

Report check_regimes(const ReplicationSummary& positive, const ReplicationSummary& zero,
                     const ReplicationSummary& negative, const Tolerances& tol) {
  Report report;
  if (positive.constants.regime != theory::Regime::static_limit || zero.constants.regime != theory::Regime::logarithmic ||
      negative.constants.regime != theory::Regime::power_law) {
    throw DomainError("check_regimes needs delta > 0, delta = 0 and delta < 0 runs in that order");
  }
  add_classification(report, positive, tol);
  add_classification(report, zero, tol);
  add_classification(report, negative, tol);

  // Static: mean increments over successive doublings decrease.
  {
    const auto cps = positive.config.effective_checkpoints();
    std::vector<double> means;
    for (std::size_t c = 1; c < cps.size(); ++c) {
      means.push_back(stats::moments(difference(positive.column(0, c, Field::n_ij), positive.column(0, c - 1, Field::n_ij))).mean);
    }
    bool decreasing = true;
    std::string trail;
    for (std::size_t c = 0; c < means.size(); ++c) {
      trail += fmt(means[c]) + (c + 1 < means.size() ? " > " : "");
      if (c > 0 && !(means[c] < means[c - 1])) decreasing = false;
    }
    report.add({"regimes", "regimes.static.decreasing_increments(" + pair_tag(positive.pairs[0].pair) + ")", false,
                decreasing, 0.0, means.empty() ? 0.0 : means.back(), 0.0, "mean increments per doubling: " + trail});

    const auto& pair = positive.pairs[0].pair;
    if (positive.constants.edges_per_arrival == 2 && pair.i >= 2 && cps.size() >= 3) {
      const auto sums = theory::expected_upper_increment_sums(pair.i, pair.j, cps, positive.constants);
      const std::size_t m = cps.size();
      const double exact_ratio = (sums[m - 1] - sums[m - 2]) / (sums[m - 2] - sums[m - 3]);
      RatioEstimate est;
      classify_growth(positive, 0, tol, est);
      report.add({"regimes", "regimes.static.doubling_ratio(" + pair_tag(pair) + ")", false,
                  std::abs(est.ratio - exact_ratio) <= tol.z_sigma * est.se, exact_ratio, est.ratio,
                  tol.z_sigma * est.se,
                  "summable tail k^-(1+delta/(2C+delta)) predicts " + fmt(std::exp2(positive.constants.power_exponent()))});
    }
  }

  // Logarithmic: slope of mean N against log n.
  {
    const auto cps = zero.config.effective_checkpoints();
    const auto& pair = zero.pairs[0].pair;
    const std::size_t m = cps.size();
    const double span_log = std::log(static_cast<double>(cps[m - 1]) / static_cast<double>(cps[0]));
    auto diff = difference(zero.column(0, m - 1, Field::n_ij), zero.column(0, 0, Field::n_ij));
    for (double& d : diff) d /= span_log;
    const auto slope = stats::moments(diff);
    if (zero.constants.edges_per_arrival == 2 && pair.i >= 2) {
      const auto sums = theory::expected_upper_increment_sums(pair.i, pair.j, cps, zero.constants);
      auto r = z_check("regimes", "regimes.log.slope(" + pair_tag(pair) + ")", (sums[m - 1] - sums[0]) / span_log,
                       slope, tol);
      r.detail += "; asymptotic coefficient " +
                  fmt(theory::limit_coefficient_mean(pair.i, pair.j, zero.constants).value);
      report.add(r);
    } else {
      report.add({"regimes", "regimes.log.slope(" + pair_tag(pair) + ")", false, slope.mean > tol.z_sigma * slope.se,
                  0.0, slope.mean, tol.z_sigma * slope.se, "C != 2: positive slope only"});
    }
  }

  // Power: scaled statistic stabilizes on the classification pair and tracks
  // the plug-in limit. Later pairs are reported in the detail only: for j >> 1
  // the count present at creation dominates N_ij until n is far above 10^3.
  {
    auto stability = [&](std::size_t p) {
      const auto& cks = negative.pairs[p].checkpoints;
      const std::size_t m = cks.size();
      return cks[m - 1].scaled.mean / cks[m - 2].scaled.mean;
    };
    const auto& pair = negative.pairs[0].pair;
    const auto& cks = negative.pairs[0].checkpoints;
    const std::size_t m = cks.size();
    const double ratio = stability(0);
    const bool stable = std::abs(ratio - 1.0) <= tol.power_stability_relative && ratio >= tol.scaled_ratio_lo &&
                        ratio <= tol.scaled_ratio_hi;
    std::string others;
    for (std::size_t p = 1; p < negative.pairs.size(); ++p) {
      others += "; pair " + pair_tag(negative.pairs[p].pair) + " ratio " + fmt(stability(p)) + " (not gated)";
    }
    report.add({"regimes", "regimes.power.scaled_stability(" + pair_tag(pair) + ")", false, stable, 1.0, ratio,
                tol.power_stability_relative,
                "mean scaled N at n=" + std::to_string(cks[m - 2].n) + ": " + fmt(cks[m - 2].scaled.mean) +
                    ", n=" + std::to_string(cks[m - 1].n) + ": " + fmt(cks[m - 1].scaled.mean) + others});
    const auto scaled_values = negative.column(0, m - 1, Field::scaled);
    auto limit = negative.column(0, m - 1, Field::y_inf_hat);
    const double coef = theory::limit_coefficient(negative.constants);
    for (double& v : limit) v *= coef;
    const double r = stats::pearson(scaled_values, limit);
    report.add({"regimes", "regimes.power.correlation(" + pair_tag(pair) + ")", false, r >= tol.regime_correlation_min,
                tol.regime_correlation_min, r, 0.0, "Pearson r of scaled N against C(C-1)/(2C+delta)^2 * y_inf_hat"});
  }
  return report;
}

Report cesaro_diagnostics(const ReplicationSummary& s, const Tolerances& tol) {
  Report report;
  if (s.constants.regime == theory::Regime::static_limit) return report;
  for (const auto& ps : s.pairs) {
    const auto& cks = ps.checkpoints;
    if (cks.size() < 2) continue;
    const auto& a = cks[cks.size() - 2];
    const auto& b = cks.back();
    const std::string tag = "(" + pair_tag(ps.pair) + ",delta=" + fmt(s.constants.delta) + ")";
    const double change_y = std::abs(b.cesaro_y.mean / a.cesaro_y.mean - 1.0);
    const double change_ystar = std::abs(b.cesaro_ystar.mean / a.cesaro_ystar.mean - 1.0);
    report.add({"regimes", "cesaro.y" + tag, false, change_y < tol.cesaro_relative_change, b.y_inf_hat.mean,
                b.cesaro_y.mean, tol.cesaro_relative_change,
                "relative change over the last checkpoint " + fmt(change_y) + "; target is mean y_inf_hat"});
    report.add({"regimes", "cesaro.ystar" + tag, false, change_ystar < tol.cesaro_relative_change, b.y_inf_hat.mean,
                b.cesaro_ystar.mean, tol.cesaro_relative_change,
                "relative change over the last checkpoint " + fmt(change_ystar)});
  }
  return report;
}

Suite parse_suite(const std::string& name) {
  if (name == "identities") return Suite::identities;
  if (name == "means") return Suite::means;
  if (name == "regimes") return Suite::regimes;
  if (name == "estimator") return Suite::estimator;
  if (name == "all") return Suite::all;
  throw DomainError("unknown suite '" + name + "'");
}

Report run_suite(Suite suite, std::uint64_t seed, const Tolerances& tol, unsigned threads) {
  Report report;
  const montecarlo::RunOptions options{threads};
  const bool all = suite == Suite::all;
  if (all || suite == Suite::identities) report.merge(check_identities(tol));
  if (all || suite == Suite::means) {
    const auto s = montecarlo::run(means_config(mix_seed(seed, 1)), options);
    report.merge(check_exact_means(s, tol));
    report.merge(check_common_friend_mean(s, tol));
  }
  if (all || suite == Suite::regimes) {
    const auto pos = montecarlo::run(regime_config(1.5, mix_seed(seed, 2)), options);
    const auto zero = montecarlo::run(regime_config(0.0, mix_seed(seed, 3)), options);
    const auto neg = montecarlo::run(regime_config(-1.5, mix_seed(seed, 4)), options);
    report.merge(check_regimes(pos, zero, neg, tol));
    report.merge(cesaro_diagnostics(zero, tol));
    report.merge(cesaro_diagnostics(neg, tol));
    report.merge(check_heavy_tail(montecarlo::run(heavy_tail_config(mix_seed(seed, 5)), options), tol));
  }
  if (all || suite == Suite::estimator) {
    report.merge(check_estimator(montecarlo::run(estimator_config(mix_seed(seed, 6)), options), tol));
  }
  return report;
}

}  // namespace pagraph::verify
