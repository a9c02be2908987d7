// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// All tolerances are pinned here; the Monte Carlo checks use the same seed
// derivation as `pagraph verify --seed 20240611`.

#include <sys/resource.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pagraph/graph.hpp"
#include "pagraph/montecarlo.hpp"
#include "pagraph/tracker.hpp"
#include "pagraph/verify.hpp"

using namespace pagraph;

namespace {

constexpr std::uint64_t kSeed = 20240611;
constexpr double kPerfSeconds = 10.0;
constexpr double kPerfBytesPerNode = 200.0;

verify::Tolerances pinned() {
  verify::Tolerances t;
  t.z_sigma = 3.0;
  t.exact_relative = 1e-10;
  t.enumeration_relative = 1e-12;
  t.power_stability_relative = 0.20;
  t.scaled_ratio_lo = 0.8;
  t.scaled_ratio_hi = 1.25;
  t.estimator_median_lo = 0.9;
  t.estimator_median_hi = 1.1;
  t.heavy_tail_skewness_min = 1.0;
  t.heavy_tail_max_over_median_min = 3.0;
  t.cesaro_relative_change = 0.10;
  t.regime_correlation_min = 0.5;
  return t;
}

int failures = 0;

void line(int id, const std::string& title, bool ok, const std::string& detail) {
  std::printf("%s  %d  %s  | %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string describe(const verify::CheckResult& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s: %s achieved=%.6g target=%.6g tol=%.3g", r.name.c_str(),
                r.passed ? "ok" : "failed", r.achieved, r.target, r.tolerance);
  return buf;
}

// All checks whose names start with one of the prefixes; fails if any is
// missing or failed.
void criterion(int id, const std::string& title, const verify::Report& report, const std::vector<std::string>& names) {
  bool ok = true;
  std::string detail;
  for (const auto& name : names) {
    const auto found = report.find_all(name);
    if (found.empty()) {
      ok = false;
      detail += name + ": missing; ";
      continue;
    }
    for (const auto* r : found) {
      ok = ok && r->passed;
      detail += describe(*r) + "; ";
    }
  }
  line(id, title, ok, detail);
}

long peak_rss_kb() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return ru.ru_maxrss;
}

// Runs first so the peak-RSS growth is not hidden by later, larger runs.
std::pair<bool, std::string> performance() {
  montecarlo::ExperimentConfig c;
  c.params = {2, 0.0};
  c.pairs = {{10, 20}, {2, 3}};
  c.n_max = 1000000;
  c.master_seed = kSeed;
  const long before = peak_rss_kb();
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = montecarlo::run_replicate(c, 0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double bytes_per_node = static_cast<double>(peak_rss_kb() - before) * 1024.0 / 1e6;
  char buf[256];
  std::snprintf(buf, sizeof buf, "n=1e6, C=2, 2 pairs: %.2f s (limit %.0f s), peak RSS growth %.1f B/node (limit %.0f), N_10,20=%llu",
                secs, kPerfSeconds, bytes_per_node, kPerfBytesPerNode,
                static_cast<unsigned long long>(rep.records[0].back().n_ij));
  return {secs < kPerfSeconds && bytes_per_node < kPerfBytesPerNode, buf};
}

void oracle_equivalence() {
  std::mt19937_64 pick(kSeed);
  std::size_t compared = 0;
  std::size_t mismatches = 0;
  for (int run = 0; run < 100; ++run) {
    const std::uint32_t c = 1 + static_cast<std::uint32_t>(pick() % 4);
    const double delta = -static_cast<double>(c) + 0.1 + std::uniform_real_distribution<double>(0.0, c + 3.0)(pick);
    auto g = new_graph({c, delta}, kSeed + run);
    evolve(g, 60);
    std::vector<PairTracker> ts;
    for (int p = 0; p < 3; ++p) {
      const NodeId j = 2 + static_cast<NodeId>(pick() % 59);
      const NodeId i = 1 + static_cast<NodeId>(pick() % (j - 1));
      ts.push_back(init_pair(g, i, j));
    }
    StepOutcome out;
    while (g.n() < 10000) {
      g.step_into(out);
      for (auto& t : ts) t.on_step(out);
      if (g.n() % 500 == 0) {
        for (const auto& t : ts) {
          ++compared;
          if (t.n_ij() != common_friends_bruteforce(g, t.i(), t.j())) ++mismatches;
        }
      }
    }
  }
  line(9, "oracle equivalence", mismatches == 0,
       std::to_string(compared) + " checkpoint comparisons over 100 trajectories to n=1e4, " +
           std::to_string(mismatches) + " mismatches");
}

}  // namespace

int main() {
  const auto tol = pinned();
  std::printf("acceptance seed %llu\n", static_cast<unsigned long long>(kSeed));
  const auto perf = performance();

  const auto means = verify::run_suite(verify::Suite::means, kSeed, tol);
  criterion(1, "exact-mean degree", means, {"means.x_i(i=2,j=3,n=1000)"});
  criterion(2, "exact-mean product", means,
            {"means.y_ij(i=2,j=3,n=3)", "means.y_ij(i=2,j=3,n=10)", "means.y_ij(i=2,j=3,n=100)",
             "means.y_ij(i=2,j=3,n=1000)"});
  criterion(3, "common-friend mean (C=2)", means, {"common_friends.c2(i=2,j=3,n=1000)"});

  const auto identities = verify::run_suite(verify::Suite::identities, kSeed, tol);
  criterion(4, "identity suite", identities, {"identities."});

  const auto regimes = verify::run_suite(verify::Suite::regimes, kSeed, tol);
  criterion(5, "heavy-tail histogram", regimes, {"heavy_tail."});

  const auto estimator = verify::run_suite(verify::Suite::estimator, kSeed, tol);
  criterion(6, "estimator concentration", estimator,
            {"estimator.iqr_shrinks(i=10,j=20,k=2)", "estimator.iqr_shrinks(i=10,j=20,k=4)",
             "estimator.median(i=10,j=20,k=2),n=4000"});

  criterion(7, "regime discrimination", regimes, {"regimes.classification", "regimes.power.scaled_stability"});

  line(8, "performance", perf.first, perf.second);
  oracle_equivalence();

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
