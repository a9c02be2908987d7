#include <cmath>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "pagraph/errors.hpp"
#include "pagraph/tracker.hpp"

using namespace pagraph;
using testing::build_graph;
using testing::make_outcome;

TEST_CASE("on_step counts one common friend per arrival hitting both") {
  const ModelParams c2{2, 0.0};
  PairTracker t(2, 3, c2, 3, 0, 3, 2);
  t.on_step(make_outcome(4, {2, 2}));
  CHECK(t.n_ij() == 0);
  CHECK(t.degree_i() == 5);
  t.on_step(make_outcome(5, {2, 3}));
  CHECK(t.n_ij() == 1);
  CHECK(t.n() == 5);
  CHECK_THROWS_AS(t.on_step(make_outcome(7, {1, 1})), DomainError);

  const ModelParams c3{3, 0.0};
  PairTracker u(2, 3, c3, 3, 0, 4, 3);
  u.on_step(make_outcome(4, {2, 2, 3}));
  CHECK(u.n_ij() == 1);
  CHECK(u.degree_i() == 6);
  CHECK(u.degree_j() == 4);
}

TEST_CASE("increment sums use the pre-step probabilities") {
  const ModelParams c2{2, 0.0};
  PairTracker t(2, 3, c2, 3, 0, 3, 2);
  t.on_step(make_outcome(4, {1, 1}));
  const double total = 4.0 * 3.0;
  CHECK(t.sum_exact() == doctest::Approx(2.0 * (3.0 / total) * (2.0 / total)));
  CHECK(t.sum_lower() == doctest::Approx(t.sum_exact()));
  CHECK(t.sum_upper() == doctest::Approx(t.sum_exact()));
  CHECK(t.cesaro_y() == doctest::Approx(6.0 / 9.0 + 6.0 / 16.0));
}

TEST_CASE("init_pair on hand-built graphs") {
  const ModelParams c2{2, 0.0};
  const auto g = build_graph(c2, {{1, 1}, {1, 2}});
  CHECK(init_pair(g, 2, 3).n_ij() == 1);
  CHECK(init_pair(g, 1, 2).n_ij() == 1);
  CHECK(common_friends_bruteforce(g, 1, 2) == 1);

  const auto two = build_graph(c2, {{1, 1}});
  CHECK(init_pair(two, 1, 2).n_ij() == 0);

  const auto star = build_graph(c2, {{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  CHECK(init_pair(star, 2, 3).n_ij() == 1);
  CHECK(init_pair(star, 4, 5).n_ij() == 1);

  const auto disjoint = build_graph(c2, {{1, 1}, {1, 1}, {2, 2}, {3, 3}});
  CHECK(init_pair(disjoint, 4, 5).n_ij() == 0);
  CHECK(common_friends_bruteforce(disjoint, 4, 5) == 0);

  const auto sparse = build_graph(c2, {{1, 1}, {1, 2}}, false);
  CHECK(init_pair(sparse, 2, 3).n_ij() == 1);
  CHECK(common_friends_bruteforce(sparse, 1, 2) == 1);

  CHECK_THROWS_AS(init_pair(g, 3, 2), DomainError);
  CHECK_THROWS_AS(init_pair(g, 2, 4), DomainError);
}

TEST_CASE("incremental tracking agrees with recounting at every step") {
  for (std::uint32_t c : {1u, 2u, 3u, 4u}) {
    for (double delta : {-0.9, 0.0, 2.0}) {
      auto g = new_graph({c, delta}, 1000 + c);
      evolve(g, 12);
      std::vector<PairTracker> ts{init_pair(g, 1, 2), init_pair(g, 2, 3), init_pair(g, 3, 11), init_pair(g, 5, 12)};
      StepOutcome out;
      while (g.n() < 1500) {
        g.step_into(out);
        for (auto& t : ts) t.on_step(out);
        if (g.n() % 50 == 0) {
          for (const auto& t : ts) {
            REQUIRE(t.n_ij() == common_friends_bruteforce(g, t.i(), t.j()));
            REQUIRE(t.degree_i() == g.degree(t.i()));
            REQUIRE(t.degree_j() == g.degree(t.j()));
          }
        }
      }
    }
  }
}

TEST_CASE("trajectory spacing") {
  auto g = new_graph({2, -1.5}, 4);
  evolve(g, 20);
  auto geo = init_pair(g, 10, 20, {Spacing::geometric, 1});
  auto lin = init_pair(g, 10, 20, {Spacing::linear, 7});
  StepOutcome out;
  while (g.n() < 500) {
    g.step_into(out);
    geo.on_step(out);
    lin.on_step(out);
  }
  std::vector<std::uint64_t> ns;
  for (const auto& p : geo.trajectory()) ns.push_back(p.n);
  CHECK(ns == std::vector<std::uint64_t>{20, 40, 80, 160, 320});
  CHECK(lin.trajectory().size() == (500 - 20) / 7 + 1);
  CHECK(lin.trajectory().back().n == 20 + 7 * ((500 - 20) / 7));
  for (std::size_t k = 1; k < lin.trajectory().size(); ++k) {
    CHECK(lin.trajectory()[k].n_ij >= lin.trajectory()[k - 1].n_ij);
  }

  std::ostringstream csv;
  write_trajectory_header(csv);
  CHECK(csv.str() == "n,pair_i,pair_j,n_ij,x_i,x_j,y_ij,scaled\n");
  write_trajectory_rows(csv, geo, theory::regime_constants(2, -1.5));
  std::size_t lines = 0;
  for (char ch : csv.str()) lines += ch == '\n';
  CHECK(lines == 6);
}

TEST_CASE("scaled statistic and subsample estimator") {
  const auto log_rc = theory::regime_constants(2, 0.0);
  const auto pw = theory::regime_constants(2, -1.5);
  const auto st = theory::regime_constants(2, 1.5);

  const auto s_log = scaled(5, 1000, log_rc);
  CHECK(s_log.value == doctest::Approx(5.0 / std::log(1000.0)));
  CHECK(s_log.regime == theory::Regime::logarithmic);
  CHECK(scaled(12, 100, pw).value == doctest::Approx(0.45428928802573914).epsilon(1e-12));
  CHECK(scaled(3, 100, st).value == 3.0);

  CHECK(estimate(3, 2.0, st) == 3.0);
  CHECK(estimate(5, 4.0, pw) == doctest::Approx(11.486983549970350).epsilon(1e-12));
  CHECK(estimate(0, 3.0, log_rc) == 0.0);
  CHECK_THROWS_AS(estimate(1, 1.0, st), DomainError);
}

TEST_CASE("plug-in limit estimates") {
  const auto rc = theory::regime_constants(2, 0.0);
  PairTracker t(2, 3, {2, 0.0}, 1000, 4, 40, 30);
  const auto e = limit_estimate(t, rc);
  CHECK(e.d_i_inf_hat == doctest::Approx(40.0 / std::pow(1000.0, 0.5)));
  CHECK(e.d_j_inf_hat == doctest::Approx(30.0 / std::pow(1000.0, 0.5)));
  CHECK(e.y_inf_hat == doctest::Approx(e.d_i_inf_hat * e.d_j_inf_hat));
}
