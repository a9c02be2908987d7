// pagraph command line: simulate, trajectory, montecarlo, estimate, constants, verify.
//
// Every subcommand accepts --config FILE with flat `key = value` lines naming
// the long options of that subcommand; flags on the command line win.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pagraph/errors.hpp"
#include "pagraph/graph.hpp"
#include "pagraph/io.hpp"
#include "pagraph/montecarlo.hpp"
#include "pagraph/snapshot.hpp"
#include "pagraph/theory.hpp"
#include "pagraph/tracker.hpp"
#include "pagraph/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pagraph;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kVerifyFailed = 2, kIo = 3 };

int verbosity = 0;

void note(const std::string& msg) {
  if (verbosity > 0) std::cerr << msg << '\n';
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Model {
  std::uint32_t c = 2;
  double delta = 0.0;
  std::uint64_t seed = 0;
  ModelParams params() const { return {c, delta}; }
};

void add_model(CLI::App* sub, Model& m) {
  sub->add_option("--c", m.c, "edges per arrival C")->capture_default_str();
  sub->add_option("--delta", m.delta, "attachment shift, delta > -C")->capture_default_str();
  sub->add_option("--seed", m.seed, "master seed")->capture_default_str();
}

// Flat config keys belong to whichever subcommand was selected.
class SubcommandConfig : public CLI::ConfigTOML {
 public:
  explicit SubcommandConfig(const CLI::App* root) : root_(root) {}
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigTOML::from_config(input);
    const auto selected = root_->get_subcommands();
    if (!selected.empty()) {
      for (auto& item : items) {
        if (item.parents.empty()) item.parents.push_back(selected.front()->get_name());
      }
    }
    return items;
  }

 private:
  const CLI::App* root_;
};

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int k = 1; k < argc; ++k) {
    if (k > 1) s += ' ';
    s += argv[k];
  }
  return s;
}

montecarlo::PairSpec parse_pair(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("pair must be i:j, got '" + text + "'");
  try {
    std::size_t used_i = 0;
    std::size_t used_j = 0;
    const auto i = std::stoul(text.substr(0, colon), &used_i);
    const auto j = std::stoul(text.substr(colon + 1), &used_j);
    if (used_i != colon || used_j != text.size() - colon - 1) throw std::invalid_argument(text);
    return {static_cast<NodeId>(i), static_cast<NodeId>(j)};
  } catch (const std::logic_error&) {
    throw UsageError("pair must be i:j, got '" + text + "'");
  }
}

std::vector<montecarlo::PairSpec> parse_pairs(const std::vector<std::string>& texts) {
  std::vector<montecarlo::PairSpec> out;
  for (const auto& t : texts) out.push_back(parse_pair(t));
  return out;
}

void check_pair(const montecarlo::PairSpec& p, std::uint64_t n) {
  if (p.i < 1 || p.i >= p.j) throw UsageError("pair needs 1 <= i < j");
  if (p.j > n) throw UsageError("pair node " + std::to_string(p.j) + " exceeds n = " + std::to_string(n));
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  Model model;
  std::uint64_t n = 20;
  std::string out = ".";
  std::string format = "csv";
  std::string snapshot;
};

void run_simulate(const SimulateArgs& a, const std::string& cmd) {
  if (a.n < 1) throw UsageError("n must be >= 1");
  GraphState g = new_graph(a.model.params(), a.model.seed);
  evolve(g, a.n);
  const RunInfo info{cmd, a.model.params(), a.model.seed};
  fs::create_directories(a.out);
  const fs::path dir(a.out);
  if (a.format == "csv") {
    auto edges = open_output(dir / "edges.csv");
    write_edge_list(edges, g);
    auto degrees = open_output(dir / "degrees.csv");
    write_degrees(degrees, g);
    write_json(dir / "metadata.json", metadata_block(info));
  } else {
    json edges = json::array();
    for (NodeId v = 1; v <= g.n(); ++v) {
      const auto t = g.arrival_targets(v);
      for (std::size_t k = 0; k < t.size();) {
        std::size_t run = 1;
        while (k + run < t.size() && t[k + run] == t[k]) ++run;
        edges.push_back({{"source", v}, {"target", t[k]}, {"multiplicity", run}});
        k += run;
      }
    }
    const auto d = g.degrees();
    write_json(dir / "graph.json", {{"metadata", metadata_block(info)},
                                    {"edges", edges},
                                    {"degrees", std::vector<std::uint64_t>(d.begin(), d.end())}});
  }
  if (!a.snapshot.empty()) save_snapshot(g, a.snapshot);
  note("simulated n=" + std::to_string(g.n()) + " into " + dir.string());
}

// --- trajectory -------------------------------------------------------------

struct TrajectoryArgs {
  Model model;
  std::uint64_t n = 1000;
  std::vector<std::string> pairs{"10:20"};
  std::string spacing = "geometric";
  std::uint64_t stride = 1;
  std::string out;
  std::string format = "csv";
};

void run_trajectory(const TrajectoryArgs& a, const std::string& cmd) {
  const auto pairs = parse_pairs(a.pairs);
  for (const auto& p : pairs) check_pair(p, a.n);
  if (a.stride < 1) throw UsageError("stride must be >= 1");
  const TrajectoryOptions opts{a.spacing == "linear" ? Spacing::linear : Spacing::geometric, a.stride};
  const auto params = a.model.params();
  const auto rc = theory::regime_constants(params);

  GraphState g = new_graph(params, a.model.seed);
  std::vector<PairTracker> trackers;
  std::vector<bool> started(pairs.size(), false);
  auto start_ready = [&] {
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (!started[k] && g.n() == pairs[k].j) {
        trackers.push_back(init_pair(g, pairs[k].i, pairs[k].j, opts));
        started[k] = true;
      }
    }
  };
  start_ready();
  StepOutcome outcome;
  while (g.n() < a.n) {
    g.step_into(outcome);
    for (auto& t : trackers) t.on_step(outcome);
    start_ready();
  }

  std::ofstream file;
  if (!a.out.empty()) file = open_output(a.out);
  std::ostream& out = a.out.empty() ? std::cout : file;
  const RunInfo info{cmd, params, a.model.seed};
  if (a.format == "csv") {
    write_metadata_comment(out, info);
    write_trajectory_header(out);
    for (const auto& t : trackers) write_trajectory_rows(out, t, rc);
  } else {
    json rows = json::array();
    for (const auto& t : trackers) {
      for (const auto& pt : t.trajectory()) {
        const double xi = static_cast<double>(pt.degree_i) + params.delta;
        const double xj = static_cast<double>(pt.degree_j) + params.delta;
        rows.push_back({{"n", pt.n},
                        {"pair_i", t.i()},
                        {"pair_j", t.j()},
                        {"n_ij", pt.n_ij},
                        {"x_i", xi},
                        {"x_j", xj},
                        {"y_ij", xi * xj},
                        {"scaled", scaled(pt.n_ij, pt.n, rc).value}});
      }
    }
    out << json{{"metadata", metadata_block(info)}, {"trajectory", rows}}.dump(2) << '\n';
  }
}

// --- montecarlo -------------------------------------------------------------

struct MonteCarloArgs {
  Model model;
  std::uint64_t n = 500;
  std::vector<std::string> pairs;
  std::vector<std::uint64_t> checkpoints;
  std::uint64_t replicates = 100;
  std::vector<double> k;
  std::size_t trajectories = 10;
  std::string spacing = "geometric";
  std::uint64_t stride = 1;
  unsigned threads = 0;
  bool allow_node_one = false;
  std::string out = "mc_out";
};

void run_montecarlo(const MonteCarloArgs& a, const std::string& cmd) {
  montecarlo::ExperimentConfig cfg;
  cfg.params = a.model.params();
  if (!a.pairs.empty()) cfg.pairs = parse_pairs(a.pairs);
  cfg.n_max = a.n;
  cfg.checkpoints = a.checkpoints;
  cfg.replicates = a.replicates;
  cfg.master_seed = a.model.seed;
  cfg.estimator_k = a.k;
  cfg.trajectory_count = std::min<std::size_t>(a.trajectories, a.replicates);
  cfg.trajectory = {a.spacing == "linear" ? Spacing::linear : Spacing::geometric, a.stride};
  cfg.allow_node_one = a.allow_node_one;
  cfg.validate();

  note("running " + std::to_string(cfg.replicates) + " replicates to n=" + std::to_string(cfg.n_max));
  const auto summary = montecarlo::run(cfg, {a.threads});
  const RunInfo info{cmd, cfg.params, cfg.master_seed};
  const fs::path dir(a.out);
  fs::create_directories(dir);
  auto j = montecarlo::summary_to_json(summary);
  j["metadata"] = metadata_block(info);
  write_json(dir / "summary.json", j);
  {
    auto h = open_output(dir / "histogram.csv");
    write_metadata_comment(h, info);
    montecarlo::write_histogram_csv(h, summary);
  }
  {
    auto t = open_output(dir / "trajectories.csv");
    write_metadata_comment(t, info);
    montecarlo::write_trajectories_csv(t, summary, cfg.trajectory_count);
  }
  write_json(dir / "metadata.json", metadata_block(info));
  note("wrote summary.json, histogram.csv, trajectories.csv, metadata.json to " + dir.string());
}

// --- estimate ---------------------------------------------------------------

struct EstimateArgs {
  Model model;
  std::uint64_t n = 0;
  double k = 2.0;
  std::vector<std::string> pairs{"10:20"};
  std::string snapshot;
  bool c_given = false;
  bool delta_given = false;
};

json run_estimate(const EstimateArgs& a, const std::string& cmd) {
  if (!(a.k > 1.0)) throw UsageError("k must be > 1");
  if (a.n < 1) throw UsageError("--n is required");
  const auto m = static_cast<std::uint64_t>(std::floor(static_cast<double>(a.n) / a.k));
  const std::string source = a.snapshot.empty() ? "simulated" : "snapshot";
  GraphState g = a.snapshot.empty() ? new_graph(a.model.params(), a.model.seed) : load_snapshot(a.snapshot);
  if (!a.snapshot.empty()) {
    if ((a.c_given && g.params().edges_per_arrival != a.model.c) || (a.delta_given && g.params().delta != a.model.delta)) {
      throw UsageError("snapshot parameters (C=" + std::to_string(g.params().edges_per_arrival) +
                       ", delta=" + std::to_string(g.params().delta) + ") differ from the flags");
    }
    if (g.n() != m) {
      throw UsageError("snapshot holds n = " + std::to_string(g.n()) + " but floor(n/k) = " + std::to_string(m));
    }
  } else {
    evolve(g, std::max<std::uint64_t>(m, 1));
  }
  const auto params = g.params();
  const auto rc = theory::regime_constants(params);
  const double factor = theory::estimator_factor(a.k, rc);
  json pairs = json::array();
  for (const auto& p : parse_pairs(a.pairs)) {
    check_pair(p, m);
    const auto count = common_friends_bruteforce(g, p.i, p.j);
    pairs.push_back({{"pair_i", p.i},
                     {"pair_j", p.j},
                     {"n_ij_at_subsample", count},
                     {"n_hat", estimate(count, a.k, rc)}});
  }
  return {{"metadata", metadata_block({cmd, params, a.model.seed})},
          {"source", source},
          {"n", a.n},
          {"k", a.k},
          {"subsample_n", m},
          {"regime", std::string(theory::to_string(rc.regime))},
          {"gamma", rc.gamma},
          {"factor", factor},
          {"pairs", pairs}};
}

// --- constants --------------------------------------------------------------

struct ConstantsArgs {
  Model model;
  NodeId i = 10;
  NodeId j = 20;
};

json flagged(const theory::Flagged& f) { return {{"value", f.value}, {"node_one_caveat", f.node_one_caveat}}; }

json run_constants(const ConstantsArgs& a) {
  const auto rc = theory::regime_constants(a.model.c, a.model.delta);
  if (a.i < 1 || a.i >= a.j) throw UsageError("need 1 <= i < j");
  const auto ec = theory::expectation_constants(a.i, a.j, rc);
  return {{"regime_constants",
           {{"edges_per_arrival", rc.edges_per_arrival},
            {"delta", rc.delta},
            {"gamma", rc.gamma},
            {"gamma1", rc.gamma1},
            {"gamma2", rc.gamma2},
            {"regime", std::string(theory::to_string(rc.regime))},
            {"power_exponent", rc.power_exponent()},
            {"limit_coefficient", theory::limit_coefficient(rc)}}},
          {"expectation_constants",
           {{"i", ec.i},
            {"j", ec.j},
            {"e_d_inf_i", flagged(ec.e_d_inf_i)},
            {"e_d_inf_j", flagged(ec.e_d_inf_j)},
            {"c_ij", flagged(ec.c_ij)},
            {"limit_coefficient_mean", flagged(ec.limit_coeff_mean)}}}};
}

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "all";
  std::uint64_t seed = 20240611;
  std::string out;
  std::string tolerances;
  bool strict = false;
  unsigned threads = 0;
};

int run_verify(const VerifyArgs& a, const std::string& cmd) {
  const auto suite = verify::parse_suite(a.suite);
  const auto tol = a.tolerances.empty() ? verify::Tolerances{} : verify::load_tolerances(a.tolerances);
  const auto report = verify::run_suite(suite, a.seed, tol, a.threads);
  for (const auto& r : report.results()) {
    std::cout << (r.passed ? "PASS " : (r.hard ? "FAIL " : "WARN ")) << r.name << "  achieved=" << r.achieved
              << " target=" << r.target << " tol=" << r.tolerance << "  " << r.detail << '\n';
  }
  if (!a.out.empty()) {
    auto j = report.to_json();
    j["metadata"] = metadata_block({cmd, {}, a.seed});
    j["metadata"].erase("params");
    j["suite"] = a.suite;
    j["tolerances"] = verify::to_json(tol);
    write_json(a.out, j);
  }
  if (report.hard_failure()) return kVerifyFailed;
  if (a.strict && !report.all_passed()) return kVerifyFailed;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear preferential attachment simulator"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", verbosity, "progress notes on stderr (repeatable)");
  app.set_version_flag("--version", std::string(version()) + " (" + std::string(build_id()) + ")");
  app.set_config("--config", "", "flat key = value file with option defaults for the subcommand");
  app.config_formatter(std::make_shared<SubcommandConfig>(&app));
  app.allow_config_extras(CLI::config_extras_mode::error);
  const std::string cmd = command_line(argc, argv);

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "evolve one graph and write its edge list and degrees");
  add_model(s_sim, sim.model);
  s_sim->add_option("--n", sim.n, "number of nodes")->capture_default_str();
  s_sim->add_option("--out", sim.out, "output directory")->capture_default_str();
  s_sim->add_option("--format", sim.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  s_sim->add_option("--snapshot", sim.snapshot, "also write a binary snapshot here");
  s_sim->fallthrough();

  TrajectoryArgs traj;
  auto* s_traj = app.add_subcommand("trajectory", "track N_ij along one graph");
  add_model(s_traj, traj.model);
  s_traj->add_option("--n", traj.n)->capture_default_str();
  s_traj->add_option("--pair", traj.pairs, "i:j, repeatable")->capture_default_str();
  s_traj->add_option("--spacing", traj.spacing)->check(CLI::IsMember({"geometric", "linear"}))->capture_default_str();
  s_traj->add_option("--stride", traj.stride, "linear spacing stride")->capture_default_str();
  s_traj->add_option("--out", traj.out, "output file (default stdout)");
  s_traj->add_option("--format", traj.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  s_traj->fallthrough();

  MonteCarloArgs mc;
  auto* s_mc = app.add_subcommand("montecarlo", "independent replicates with per-checkpoint summaries");
  add_model(s_mc, mc.model);
  s_mc->add_option("--n", mc.n)->capture_default_str();
  s_mc->add_option("--pair", mc.pairs, "i:j, repeatable (default 10:20)");
  s_mc->add_option("--checkpoints", mc.checkpoints, "ascending times (default n)")->delimiter(',');
  s_mc->add_option("--replicates", mc.replicates)->capture_default_str();
  s_mc->add_option("--k", mc.k, "subsample factor, repeatable");
  s_mc->add_option("--trajectories", mc.trajectories, "replicates whose trajectories are written")->capture_default_str();
  s_mc->add_option("--spacing", mc.spacing)->check(CLI::IsMember({"geometric", "linear"}))->capture_default_str();
  s_mc->add_option("--stride", mc.stride)->capture_default_str();
  s_mc->add_option("--threads", mc.threads, "0 = hardware concurrency")->capture_default_str();
  s_mc->add_flag("--allow-node-one", mc.allow_node_one, "permit pairs with i = 1");
  s_mc->add_option("--out", mc.out, "output directory")->capture_default_str();
  s_mc->fallthrough();

  EstimateArgs est;
  auto* s_est = app.add_subcommand("estimate", "subsample estimate of N_ij(n) from the graph at floor(n/k)");
  auto* c_opt = s_est->add_option("--c", est.model.c);
  auto* d_opt = s_est->add_option("--delta", est.model.delta);
  s_est->add_option("--seed", est.model.seed);
  s_est->add_option("--n", est.n, "target time n")->required();
  s_est->add_option("--k", est.k, "subsample factor > 1")->capture_default_str();
  s_est->add_option("--pair", est.pairs, "i:j, repeatable")->capture_default_str();
  s_est->add_option("--snapshot", est.snapshot, "snapshot taken at floor(n/k)");
  s_est->fallthrough();

  ConstantsArgs con;
  auto* s_con = app.add_subcommand("constants", "print regime and expectation constants as JSON");
  s_con->add_option("--c", con.model.c)->capture_default_str();
  s_con->add_option("--delta", con.model.delta)->capture_default_str();
  s_con->add_option("--i", con.i)->capture_default_str();
  s_con->add_option("--j", con.j)->capture_default_str();
  s_con->fallthrough();

  VerifyArgs ver;
  auto* s_ver = app.add_subcommand("verify", "run verification suites");
  s_ver->add_option("--suite", ver.suite)
      ->check(CLI::IsMember({"identities", "means", "regimes", "estimator", "all"}))
      ->capture_default_str();
  s_ver->add_option("--seed", ver.seed)->capture_default_str();
  s_ver->add_option("--out", ver.out, "report.json path");
  s_ver->add_option("--tolerances", ver.tolerances, "tolerance JSON file");
  s_ver->add_flag("--strict", ver.strict, "statistical failures also fail the run");
  s_ver->add_option("--threads", ver.threads)->capture_default_str();
  s_ver->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s_sim) run_simulate(sim, cmd);
    if (*s_traj) run_trajectory(traj, cmd);
    if (*s_mc) run_montecarlo(mc, cmd);
    if (*s_est) {
      est.c_given = c_opt->count() > 0;
      est.delta_given = d_opt->count() > 0;
      std::cout << run_estimate(est, cmd).dump(2) << '\n';
    }
    if (*s_con) std::cout << run_constants(con).dump(2) << '\n';
    if (*s_ver) return run_verify(ver, cmd);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
