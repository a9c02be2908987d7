#include <cmath>
#include <sstream>

#include "doctest.h"
#include "pagraph/errors.hpp"
#include "pagraph/io.hpp"
#include "pagraph/montecarlo.hpp"
#include "pagraph/stats.hpp"
#include "pagraph/verify.hpp"

using namespace pagraph;
using montecarlo::ExperimentConfig;
using montecarlo::Field;

TEST_CASE("moments and quantiles") {
  const std::vector<double> xs{1, 2, 3, 4, 10};
  const auto m = stats::moments(xs);
  CHECK(m.count == 5);
  CHECK(m.mean == doctest::Approx(4.0));
  CHECK(m.sd == doctest::Approx(std::sqrt(12.5)));
  CHECK(m.se == doctest::Approx(std::sqrt(12.5 / 5.0)));
  CHECK(m.min == 1.0);
  CHECK(m.max == 10.0);
  // m2 = 10, m3 = 36 -> g1 = 36 / 10^1.5
  CHECK(m.skewness == doctest::Approx(36.0 / std::pow(10.0, 1.5)));

  const auto q = stats::quartiles({4, 1, 3, 2});
  CHECK(q.q25 == doctest::Approx(1.75));
  CHECK(q.median == doctest::Approx(2.5));
  CHECK(q.q75 == doctest::Approx(3.25));
  CHECK(stats::pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 7}) ==
        doctest::Approx(0.9933992677987828));

  stats::Histogram h(0.0, 1.0, 4);
  for (double x : {-0.1, 0.0, 0.3, 0.99, 1.0, 2.0}) h.add(x);
  CHECK(h.counts == std::vector<std::uint64_t>{1, 1, 0, 1});
  CHECK(h.underflow == 1);
  CHECK(h.overflow == 2);
  CHECK(h.total() == 6);
}

namespace {
ExperimentConfig small_config() {
  ExperimentConfig c;
  c.params = {2, -0.5};
  c.pairs = {{2, 3}, {5, 9}};
  c.n_max = 400;
  c.checkpoints = {50, 100, 400};
  c.replicates = 24;
  c.master_seed = 31337;
  c.estimator_k = {2.0, 3.0};
  c.trajectory_count = 3;
  return c;
}
}  // namespace

TEST_CASE("config validation") {
  auto c = small_config();
  CHECK_NOTHROW(c.validate());
  auto bad = c;
  bad.checkpoints = {100, 50};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = c;
  bad.pairs = {{1, 2}};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.allow_node_one = true;
  CHECK_NOTHROW(bad.validate());
  bad = c;
  bad.estimator_k = {1.0};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = c;
  bad.checkpoints = {5, 400};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = c;
  bad.n_max = 3'000'000'000ull;
  bad.checkpoints = {};
  CHECK_THROWS_AS(bad.validate(), ResourceError);
  bad.n_max = 5'000'000'000ull;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = c;
  bad.replicates = 2'000'000'000ull;
  CHECK_THROWS_AS(bad.validate(), ResourceError);
}

TEST_CASE("a single replicate equals evolve plus trackers on the same stream") {
  auto c = small_config();
  c.replicates = 1;
  c.trajectory_count = 0;
  const auto s = montecarlo::run(c, {1});
  REQUIRE(s.replicates.size() == 1);

  GraphOptions options;
  options.keep_adjacency = false;
  GraphState g(c.params, Philox::for_stream(c.master_seed, 0), options);
  evolve(g, 3);
  auto t23 = init_pair(g, 2, 3);
  StepOutcome out;
  while (g.n() < 9) {
    g.step_into(out);
    t23.on_step(out);
  }
  auto t59 = init_pair(g, 5, 9);
  while (g.n() < 400) {
    g.step_into(out);
    t23.on_step(out);
    t59.on_step(out);
    if (g.n() == 100) {
      CHECK(s.replicates[0].at(0, 100).n_ij == t23.n_ij());
      CHECK(s.replicates[0].at(1, 100).n_ij == t59.n_ij());
    }
  }
  const auto& r = s.replicates[0].at(0, 400);
  CHECK(r.n_ij == t23.n_ij());
  CHECK(r.degree_i == t23.degree_i());
  CHECK(r.sum_exact == doctest::Approx(t23.sum_exact()));
  CHECK(s.replicates[0].at(1, 400).n_ij == t59.n_ij());
  CHECK(s.pairs[0].checkpoints.back().n_ij.mean == static_cast<double>(t23.n_ij()));
}

TEST_CASE("results do not depend on the thread count") {
  const auto c = small_config();
  const auto one = montecarlo::run(c, {1});
  const auto four = montecarlo::run(c, {4});
  CHECK(montecarlo::summary_to_json(one).dump() == montecarlo::summary_to_json(four).dump());
  std::ostringstream a;
  std::ostringstream b;
  montecarlo::write_trajectories_csv(a, one, 3);
  montecarlo::write_trajectories_csv(b, four, 3);
  CHECK(a.str() == b.str());
  std::ostringstream ha;
  std::ostringstream hb;
  montecarlo::write_histogram_csv(ha, one);
  montecarlo::write_histogram_csv(hb, four);
  CHECK(ha.str() == hb.str());
}

TEST_CASE("summary columns and ratios") {
  const auto s = montecarlo::run(small_config(), {2});
  const auto cp = s.checkpoint_index(400);
  CHECK(cp == 2);
  CHECK_THROWS(s.checkpoint_index(401));
  const auto n = s.column(0, cp, Field::n_ij);
  const auto inc = s.column(0, cp, Field::increment);
  REQUIRE(n.size() == 24);
  for (std::size_t r = 0; r < n.size(); ++r) {
    CHECK(inc[r] == n[r] - static_cast<double>(s.replicates[r].records[0].front().n_ij));
  }
  const auto& ratio = s.pairs[0].checkpoints[cp].ratios[0];
  CHECK(ratio.k == 2.0);
  CHECK(ratio.subsample_n == 200);
  CHECK(ratio.conditioned + ratio.excluded == 24);
  CHECK(s.ratios(0, cp, 2.0).size() == ratio.conditioned);

  std::ostringstream t;
  montecarlo::write_trajectories_csv(t, s, 0);
  CHECK(t.str() == "replicate,n,pair_i,pair_j,n_ij,x_i,x_j,y_ij,scaled\n");
  const auto j = montecarlo::summary_to_json(s);
  CHECK(j.contains("constants"));
  CHECK(j["pairs"].size() == 2);
}

TEST_CASE("edge list and degree csv") {
  auto g = new_graph({2, -1.5}, 1);
  std::ostringstream one;
  write_edge_list(one, g);
  CHECK(one.str() == "source,target,multiplicity\n1,1,2\n");
  evolve(g, 20);
  std::ostringstream edges;
  write_edge_list(edges, g);
  std::istringstream in(edges.str());
  std::string line;
  std::getline(in, line);
  std::uint64_t stubs = 0;
  while (std::getline(in, line)) stubs += 2 * std::stoull(line.substr(line.rfind(',') + 1));
  CHECK(stubs == 80);
  std::ostringstream degrees;
  write_degrees(degrees, g);
  CHECK(degrees.str().rfind("node,degree\n1,", 0) == 0);

  const auto meta = metadata_block({"simulate --n 20", {2, -1.5}, 1});
  CHECK(meta["seed"] == 1);
  CHECK(meta["params"]["delta"] == -1.5);
  CHECK(meta.contains("build_id"));
}

TEST_CASE("tolerance file parsing") {
  const auto path = std::filesystem::temp_directory_path() / "pagraph_tol.json";
  {
    std::ofstream out(path);
    out << R"({"version": 1, "z_sigma": 4.0, "heavy_tail_skewness_min": 0.5})";
  }
  const auto t = verify::load_tolerances(path);
  CHECK(t.z_sigma == 4.0);
  CHECK(t.heavy_tail_skewness_min == 0.5);
  CHECK(t.exact_relative == 1e-10);
  {
    std::ofstream out(path);
    out << R"({"version": 1, "zsigma": 4.0})";
  }
  CHECK_THROWS_AS(verify::load_tolerances(path), FormatError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(verify::load_tolerances("/nonexistent/tol.json"), IoError);
  CHECK(verify::parse_suite("regimes") == verify::Suite::regimes);
  CHECK_THROWS_AS(verify::parse_suite("everything"), DomainError);
}

TEST_CASE("identity suite passes exactly") {
  const auto report = verify::check_identities(verify::Tolerances{});
  CHECK(report.results().size() >= 10);
  for (const auto& r : report.results()) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.hard);
    CHECK(r.passed);
  }
}

TEST_CASE("bound mode for C = 3") {
  ExperimentConfig c;
  c.params = {3, 0.0};
  c.pairs = {{2, 3}};
  c.n_max = 300;
  c.checkpoints = {3, 100, 300};
  c.replicates = 2000;
  c.master_seed = 5;
  const auto s = montecarlo::run(c);
  const auto report = verify::check_common_friend_mean(s, verify::Tolerances{});
  CHECK(report.find_all("common_friends.lower_bound").size() == 3);
  CHECK(report.find_all("common_friends.upper_bound").size() == 3);
  for (const auto& r : report.results()) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}
