#include "pagraph/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <new>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "pagraph/errors.hpp"

namespace pagraph::montecarlo {

namespace {

std::uint64_t subsample_time(std::uint64_t n, double k) {
  return static_cast<std::uint64_t>(std::floor(static_cast<double>(n) / k));
}

// Times at which pair p is recorded: its creation time j, every checkpoint
// and every subsample time floor(n/k) >= j the estimator needs.
std::vector<std::uint64_t> record_times(const ExperimentConfig& config, const PairSpec& pair) {
  std::set<std::uint64_t> times{pair.j};
  for (std::uint64_t n : config.effective_checkpoints()) {
    times.insert(n);
    for (double k : config.estimator_k) {
      const std::uint64_t sub = subsample_time(n, k);
      if (sub >= pair.j) times.insert(sub);
    }
  }
  return {times.begin(), times.end()};
}

PairRecord make_record(const PairTracker& t) {
  return {t.n(),         t.n_ij(),      t.degree_i(), t.degree_j(), t.sum_lower(),
          t.sum_exact(), t.sum_upper(), t.cesaro_y(), t.cesaro_ystar()};
}

nlohmann::json moments_json(const stats::Moments& m) {
  return {{"count", m.count}, {"mean", m.mean}, {"sd", m.sd},     {"se", m.se},
          {"min", m.min},     {"max", m.max},   {"skewness", m.skewness}};
}

}  // namespace

std::vector<std::uint64_t> ExperimentConfig::effective_checkpoints() const {
  if (checkpoints.empty()) return {n_max};
  return checkpoints;
}

void ExperimentConfig::validate() const {
  params.validate();
  if (pairs.empty()) throw DomainError("at least one pair is required");
  if (replicates < 1) throw DomainError("replicates must be at least 1");
  if (n_max < 2) throw DomainError("n must be at least 2");
  if (n_max > std::numeric_limits<NodeId>::max()) throw DomainError("n exceeds the node id range");
  NodeId max_j = 0;
  for (const PairSpec& p : pairs) {
    if (p.i < 1 || p.j <= p.i) throw DomainError("pair requires 1 <= i < j");
    if (p.i < 2 && !allow_node_one) {
      throw DomainError("pairs with i = 1 need the node-one override (its exact formulas carry a caveat)");
    }
    if (p.j > n_max) throw DomainError("pair node exceeds n");
    max_j = std::max(max_j, p.j);
  }
  const auto cps = effective_checkpoints();
  for (std::size_t c = 0; c < cps.size(); ++c) {
    if (c > 0 && cps[c] <= cps[c - 1]) throw DomainError("checkpoints must be strictly ascending");
    if (cps[c] > n_max) throw DomainError("checkpoint exceeds n");
    if (cps[c] < max_j) throw DomainError("checkpoint precedes the creation of a tracked pair");
  }
  for (double k : estimator_k) {
    if (!(k > 1.0) || !std::isfinite(k)) throw DomainError("estimator k must exceed 1");
  }
  if (trajectory_count > replicates) throw DomainError("trajectory count exceeds replicates");
  if (stat_bins == 0 || ratio_bins == 0 || !(ratio_max > 0.0)) throw DomainError("histogram binning invalid");
  if (trajectory.spacing == Spacing::linear && trajectory.stride == 0) throw DomainError("stride must be positive");

  // One live graph per worker: degree, arrival targets and a weight cell per node.
  const double graph_bytes = static_cast<double>(n_max) * (16.0 + 4.0 * params.edges_per_arrival);
  if (graph_bytes > 8e9) {
    throw ResourceError("a graph with n = " + std::to_string(n_max) + " needs about " +
                        std::to_string(graph_bytes / 1e9) + " GB");
  }
  // Raw per-replicate records are retained for the verification checks.
  std::uint64_t slots = 0;
  for (const PairSpec& p : pairs) slots += record_times(*this, p).size();
  const double bytes = static_cast<double>(slots) * static_cast<double>(replicates) * sizeof(PairRecord);
  if (bytes > 8e9) {
    throw ResourceError("requested run would retain " + std::to_string(bytes / 1e9) + " GB of replicate records");
  }
}

const PairRecord& ReplicateResult::at(std::size_t pair, std::uint64_t n) const {
  const auto& rs = records.at(pair);
  auto it = std::lower_bound(rs.begin(), rs.end(), n, [](const PairRecord& r, std::uint64_t t) { return r.n < t; });
  if (it == rs.end() || it->n != n) throw DomainError("time " + std::to_string(n) + " was not recorded");
  return *it;
}

ReplicateResult run_replicate(const ExperimentConfig& config, std::uint64_t id) {
  const std::size_t num_pairs = config.pairs.size();
  std::vector<std::vector<std::uint64_t>> times(num_pairs);
  std::set<std::uint64_t> events;
  for (std::size_t p = 0; p < num_pairs; ++p) {
    times[p] = record_times(config, config.pairs[p]);
    events.insert(times[p].begin(), times[p].end());
  }
  events.insert(config.n_max);

  GraphOptions options;
  options.keep_adjacency = false;
  GraphState state(config.params, Philox::for_stream(config.master_seed, id), options);
  const TrajectoryOptions trajectory = id < config.trajectory_count ? config.trajectory : TrajectoryOptions{};

  ReplicateResult result;
  result.id = id;
  result.records.resize(num_pairs);
  std::vector<std::optional<PairTracker>> trackers(num_pairs);
  std::vector<std::size_t> cursor(num_pairs, 0);

  for (std::uint64_t t : events) {
    evolve_with(state, t, [&](const StepOutcome& outcome, const GraphState&) {
      for (auto& tracker : trackers) {
        if (tracker) tracker->on_step(outcome);
      }
    });
    for (std::size_t p = 0; p < num_pairs; ++p) {
      const PairSpec& pair = config.pairs[p];
      if (!trackers[p] && pair.j == t) trackers[p] = init_pair(state, pair.i, pair.j, trajectory);
      if (trackers[p] && cursor[p] < times[p].size() && times[p][cursor[p]] == t) {
        result.records[p].push_back(make_record(*trackers[p]));
        ++cursor[p];
      }
    }
  }
  if (id < config.trajectory_count) {
    for (auto& tracker : trackers) result.trajectories.push_back(std::move(*tracker));
  }
  return result;
}

std::size_t ReplicationSummary::checkpoint_index(std::uint64_t n) const {
  const auto cps = config.effective_checkpoints();
  auto it = std::find(cps.begin(), cps.end(), n);
  if (it == cps.end()) throw DomainError("no checkpoint at n = " + std::to_string(n));
  return static_cast<std::size_t>(it - cps.begin());
}

std::vector<double> ReplicationSummary::column(std::size_t pair, std::size_t checkpoint, Field field) const {
  const std::uint64_t n = config.effective_checkpoints().at(checkpoint);
  const double delta = config.params.delta;
  const double scale = std::pow(static_cast<double>(n), constants.gamma);
  std::vector<double> out;
  out.reserve(replicates.size());
  for (const ReplicateResult& rep : replicates) {
    const PairRecord& r = rep.at(pair, n);
    const double xi = static_cast<double>(r.degree_i) + delta;
    const double xj = static_cast<double>(r.degree_j) + delta;
    double v = 0.0;
    switch (field) {
      case Field::n_ij:
        v = static_cast<double>(r.n_ij);
        break;
      case Field::increment:
        v = static_cast<double>(r.n_ij) - static_cast<double>(rep.records[pair].front().n_ij);
        break;
      case Field::x_i:
        v = xi;
        break;
      case Field::x_j:
        v = xj;
        break;
      case Field::y_ij:
        v = xi * xj;
        break;
      case Field::scaled:
        v = scaled(r.n_ij, n, constants).value;
        break;
      case Field::y_inf_hat:
        v = (xi / scale) * (xj / scale);
        break;
      case Field::sum_lower:
        v = r.sum_lower;
        break;
      case Field::sum_exact:
        v = r.sum_exact;
        break;
      case Field::sum_upper:
        v = r.sum_upper;
        break;
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> ReplicationSummary::ratios(std::size_t pair, std::size_t checkpoint, double k) const {
  const std::uint64_t n = config.effective_checkpoints().at(checkpoint);
  const std::uint64_t sub = subsample_time(n, k);
  std::vector<double> out;
  if (sub < config.pairs.at(pair).j) return out;
  for (const ReplicateResult& rep : replicates) {
    const double hat = estimate(rep.at(pair, sub).n_ij, k, constants);
    if (hat > 0.0) out.push_back(static_cast<double>(rep.at(pair, n).n_ij) / hat);
  }
  return out;
}

ReplicationSummary summarize(const ExperimentConfig& config, std::vector<ReplicateResult> replicates) {
  ReplicationSummary s;
  s.config = config;
  s.constants = theory::regime_constants(config.params);
  s.replicates = std::move(replicates);
  const auto cps = config.effective_checkpoints();
  const double reps = static_cast<double>(s.replicates.size());

  for (std::size_t p = 0; p < config.pairs.size(); ++p) {
    PairSummary ps;
    ps.pair = config.pairs[p];
    std::vector<double> initial;
    for (const auto& rep : s.replicates) initial.push_back(static_cast<double>(rep.records[p].front().n_ij));
    ps.initial_n_ij = stats::moments(initial);

    for (std::size_t c = 0; c < cps.size(); ++c) {
      CheckpointSummary cs;
      cs.n = cps[c];
      const auto n_ij = s.column(p, c, Field::n_ij);
      cs.n_ij = stats::moments(n_ij);
      cs.increment = stats::moments(s.column(p, c, Field::increment));
      cs.x_i = stats::moments(s.column(p, c, Field::x_i));
      cs.x_j = stats::moments(s.column(p, c, Field::x_j));
      cs.y_ij = stats::moments(s.column(p, c, Field::y_ij));
      const auto scaled_values = s.column(p, c, Field::scaled);
      cs.scaled = stats::moments(scaled_values);
      const auto y_inf = s.column(p, c, Field::y_inf_hat);
      cs.y_inf_hat = stats::moments(y_inf);
      cs.sum_lower = stats::moments(s.column(p, c, Field::sum_lower));
      cs.sum_exact = stats::moments(s.column(p, c, Field::sum_exact));
      cs.sum_upper = stats::moments(s.column(p, c, Field::sum_upper));

      const double norm = theory::regime_normalizer(cs.n, s.constants);
      std::vector<double> ces_y;
      std::vector<double> ces_ystar;
      for (const auto& rep : s.replicates) {
        const PairRecord& r = rep.at(p, cs.n);
        ces_y.push_back(r.cesaro_y / norm);
        ces_ystar.push_back(r.cesaro_ystar / norm);
      }
      cs.cesaro_y = stats::moments(ces_y);
      cs.cesaro_ystar = stats::moments(ces_ystar);

      for (double v : n_ij) cs.n_ij_histogram.add(static_cast<std::uint64_t>(v));
      cs.scaled_histogram = stats::auto_histogram(scaled_values, config.stat_bins);
      cs.y_inf_hat_histogram = stats::auto_histogram(y_inf, config.stat_bins);

      for (double k : config.estimator_k) {
        RatioSummary rs;
        rs.k = k;
        rs.subsample_n = subsample_time(cs.n, k);
        const auto ratio = s.ratios(p, c, k);
        rs.conditioned = ratio.size();
        rs.excluded = s.replicates.size() - ratio.size();
        rs.conditioning_rate = static_cast<double>(ratio.size()) / reps;
        rs.moments = stats::moments(ratio);
        if (!ratio.empty()) rs.quartiles = stats::quartiles(ratio);
        rs.histogram = stats::Histogram(0.0, config.ratio_max, config.ratio_bins);
        for (double r : ratio) rs.histogram.add(r);
        cs.ratios.push_back(std::move(rs));
      }
      ps.checkpoints.push_back(std::move(cs));
    }
    s.pairs.push_back(std::move(ps));
  }
  return s;
}

ReplicationSummary run(const ExperimentConfig& config, RunOptions options) {
  config.validate();
  std::vector<ReplicateResult> results;
  try {
    results.resize(config.replicates);
  } catch (const std::bad_alloc&) {
    throw ResourceError("cannot allocate " + std::to_string(config.replicates) + " replicate slots");
  }

  unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, config.replicates));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t id = next.fetch_add(1);
      if (id >= config.replicates) return;
      try {
        results[id] = run_replicate(config, id);
      } catch (const std::bad_alloc&) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::make_exception_ptr(ResourceError("out of memory in replicate " + std::to_string(id)));
        next = config.replicates;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.replicates;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return summarize(config, std::move(results));
}

nlohmann::json summary_to_json(const ReplicationSummary& s) {
  using nlohmann::json;
  const auto& rc = s.constants;
  json out;
  out["constants"] = {{"c", rc.edges_per_arrival}, {"delta", rc.delta},   {"gamma", rc.gamma},
                      {"gamma1", rc.gamma1},       {"gamma2", rc.gamma2}, {"regime", theory::to_string(rc.regime)}};
  json pairs_json = json::array();
  for (const auto& ps : s.config.pairs) pairs_json.push_back({ps.i, ps.j});
  out["config"] = {{"c", s.config.params.edges_per_arrival},
                   {"delta", s.config.params.delta},
                   {"pairs", pairs_json},
                   {"n", s.config.n_max},
                   {"checkpoints", s.config.effective_checkpoints()},
                   {"replicates", s.config.replicates},
                   {"seed", s.config.master_seed},
                   {"k", s.config.estimator_k}};
  out["binning"] = {{"n_ij", "integer bins [v, v+1)"},
                    {"scaled_and_y_inf_hat", std::to_string(s.config.stat_bins) + " uniform bins over [0, sample max]"},
                    {"ratio", std::to_string(s.config.ratio_bins) + " uniform bins over [0, " +
                                  std::to_string(s.config.ratio_max) + ") plus overflow"}};
  json pairs = json::array();
  for (const auto& ps : s.pairs) {
    json pj;
    pj["i"] = ps.pair.i;
    pj["j"] = ps.pair.j;
    pj["initial_n_ij"] = moments_json(ps.initial_n_ij);
    json cps = json::array();
    for (const auto& cs : ps.checkpoints) {
      json cj;
      cj["n"] = cs.n;
      cj["n_ij"] = moments_json(cs.n_ij);
      cj["increment"] = moments_json(cs.increment);
      cj["x_i"] = moments_json(cs.x_i);
      cj["x_j"] = moments_json(cs.x_j);
      cj["y_ij"] = moments_json(cs.y_ij);
      cj["scaled"] = moments_json(cs.scaled);
      cj["y_inf_hat"] = moments_json(cs.y_inf_hat);
      cj["sum_lower"] = moments_json(cs.sum_lower);
      cj["sum_exact"] = moments_json(cs.sum_exact);
      cj["sum_upper"] = moments_json(cs.sum_upper);
      cj["cesaro_y"] = moments_json(cs.cesaro_y);
      cj["cesaro_ystar"] = moments_json(cs.cesaro_ystar);
      json ratios = json::array();
      for (const auto& r : cs.ratios) {
        ratios.push_back({{"k", r.k},
                          {"subsample_n", r.subsample_n},
                          {"conditioned", r.conditioned},
                          {"excluded", r.excluded},
                          {"conditioning_rate", r.conditioning_rate},
                          {"moments", moments_json(r.moments)},
                          {"q25", r.quartiles.q25},
                          {"median", r.quartiles.median},
                          {"q75", r.quartiles.q75},
                          {"iqr", r.quartiles.iqr()}});
      }
      cj["ratios"] = std::move(ratios);
      cps.push_back(std::move(cj));
    }
    pj["checkpoints"] = std::move(cps);
    pairs.push_back(std::move(pj));
  }
  out["pairs"] = std::move(pairs);
  return out;
}

void write_histogram_csv(std::ostream& out, const ReplicationSummary& s) {
  const auto old_precision = out.precision(12);
  out << "n,pair_i,pair_j,quantity,k,bin_lo,bin_hi,count\n";
  auto real_rows = [&](std::uint64_t n, const PairSpec& pair, const char* name, const std::string& k,
                       const stats::Histogram& h) {
    const std::string prefix = std::to_string(n) + ',' + std::to_string(pair.i) + ',' + std::to_string(pair.j) + ',';
    if (h.underflow > 0) out << prefix << name << ',' << k << ",-inf," << h.lo << ',' << h.underflow << '\n';
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      out << prefix << name << ',' << k << ',' << h.lo + h.width() * static_cast<double>(b) << ','
          << h.lo + h.width() * static_cast<double>(b + 1) << ',' << h.counts[b] << '\n';
    }
    out << prefix << name << ',' << k << ',' << h.hi << ",inf," << h.overflow << '\n';
  };
  for (const auto& ps : s.pairs) {
    for (const auto& cs : ps.checkpoints) {
      for (std::size_t v = 0; v < cs.n_ij_histogram.counts.size(); ++v) {
        out << cs.n << ',' << ps.pair.i << ',' << ps.pair.j << ",n_ij,," << v << ',' << v + 1 << ','
            << cs.n_ij_histogram.counts[v] << '\n';
      }
      real_rows(cs.n, ps.pair, "scaled", "", cs.scaled_histogram);
      real_rows(cs.n, ps.pair, "y_inf_hat", "", cs.y_inf_hat_histogram);
      for (const auto& r : cs.ratios) {
        std::ostringstream k;
        k.precision(12);
        k << r.k;
        real_rows(cs.n, ps.pair, "ratio", k.str(), r.histogram);
      }
    }
  }
  out.precision(old_precision);
}

void write_trajectories_csv(std::ostream& out, const ReplicationSummary& s, std::size_t count) {
  const auto old_precision = out.precision(12);
  out << "replicate,n,pair_i,pair_j,n_ij,x_i,x_j,y_ij,scaled\n";
  const std::size_t limit = std::min(count, s.replicates.size());
  for (std::size_t r = 0; r < limit; ++r) {
    for (const PairTracker& t : s.replicates[r].trajectories) {
      for (const TrajectoryPoint& p : t.trajectory()) {
        const double xi = static_cast<double>(p.degree_i) + s.constants.delta;
        const double xj = static_cast<double>(p.degree_j) + s.constants.delta;
        out << r << ',' << p.n << ',' << t.i() << ',' << t.j() << ',' << p.n_ij << ',' << xi << ',' << xj << ','
            << xi * xj << ',' << scaled(p.n_ij, p.n, s.constants).value << '\n';
      }
    }
  }
  out.precision(old_precision);
}

}  // namespace pagraph::montecarlo
