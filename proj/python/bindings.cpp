#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "pagraph/errors.hpp"
#include "pagraph/graph.hpp"
#include "pagraph/io.hpp"
#include "pagraph/montecarlo.hpp"
#include "pagraph/snapshot.hpp"
#include "pagraph/theory.hpp"
#include "pagraph/tracker.hpp"
#include "pagraph/verify.hpp"

namespace py = pybind11;
using namespace pagraph;

namespace {

// JSON crosses the boundary as text; json.loads keeps the bindings free of a
// second converter.
py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

montecarlo::ExperimentConfig make_config(std::uint32_t c, double delta, const std::vector<std::pair<NodeId, NodeId>>& pairs,
                                         std::uint64_t n, std::vector<std::uint64_t> checkpoints,
                                         std::uint64_t replicates, std::uint64_t seed, std::vector<double> k,
                                         std::size_t trajectories, bool allow_node_one) {
  montecarlo::ExperimentConfig cfg;
  cfg.params = {c, delta};
  cfg.pairs.clear();
  for (const auto& [i, j] : pairs) cfg.pairs.push_back({i, j});
  cfg.n_max = n;
  cfg.checkpoints = std::move(checkpoints);
  cfg.replicates = replicates;
  cfg.master_seed = seed;
  cfg.estimator_k = std::move(k);
  cfg.trajectory_count = trajectories;
  cfg.allow_node_one = allow_node_one;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(pagraph, m) {
  m.doc() = "Linear preferential attachment graphs: simulation, exact theory and Monte Carlo checks";
  m.attr("__version__") = std::string(version());

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](std::uint32_t c, double delta) {
             ModelParams p{c, delta};
             p.validate();
             return p;
           }),
           py::arg("c") = 2, py::arg("delta") = 0.0)
      .def_readonly("c", &ModelParams::edges_per_arrival)
      .def_readonly("delta", &ModelParams::delta)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(c=" + std::to_string(p.edges_per_arrival) + ", delta=" + std::to_string(p.delta) + ")";
      });

  py::class_<GraphState>(m, "Graph")
      .def(py::init([](std::uint32_t c, double delta, std::uint64_t seed, bool keep_adjacency) {
             GraphOptions options;
             options.keep_adjacency = keep_adjacency;
             return new_graph({c, delta}, seed, options);
           }),
           py::arg("c") = 2, py::arg("delta") = 0.0, py::arg("seed") = 0, py::arg("keep_adjacency") = true)
      .def_property_readonly("n", &GraphState::n)
      .def_property_readonly("params", &GraphState::params)
      .def_property_readonly("total_weight", &GraphState::total_weight)
      .def("degree", &GraphState::degree, py::arg("node"))
      .def("degrees", [](const GraphState& g) {
        const auto d = g.degrees();
        return std::vector<std::uint64_t>(d.begin(), d.end());
      })
      .def("attach_probability", &GraphState::attach_probability, py::arg("node"))
      .def("arrival_targets", [](const GraphState& g, NodeId v) {
        const auto t = g.arrival_targets(v);
        return std::vector<NodeId>(t.begin(), t.end());
      })
      .def("neighbors", [](const GraphState& g, NodeId v) {
        const auto t = g.neighbors(v);
        return std::vector<NodeId>(t.begin(), t.end());
      })
      .def("step", [](GraphState& g) { return g.step().targets; }, "Adds one node; returns its sorted targets.")
      .def("evolve", [](GraphState& g, std::uint64_t n) {
            py::gil_scoped_release release;
            evolve(g, n);
          }, py::arg("n"))
      .def("common_friends", &common_friends_bruteforce, py::arg("i"), py::arg("j"))
      .def("snapshot", [](const GraphState& g) {
        const auto s = snapshot(g);
        return py::bytes(reinterpret_cast<const char*>(s.bytes.data()), s.bytes.size());
      })
      .def_static("restore", [](py::bytes data) {
        const std::string raw = data;
        Snapshot s;
        s.bytes.assign(raw.begin(), raw.end());
        return restore(s);
      })
      .def("save", [](const GraphState& g, const std::string& path) { save_snapshot(g, path); })
      .def_static("load", [](const std::string& path) { return load_snapshot(path); });

  m.def("track_pair", [](GraphState& g, NodeId i, NodeId j, std::uint64_t n) {
        auto t = init_pair(g, i, j, {Spacing::linear, 1});
        StepOutcome out;
        while (g.n() < n) {
          g.step_into(out);
          t.on_step(out);
        }
        py::list rows;
        for (const auto& p : t.trajectory()) rows.append(py::make_tuple(p.n, p.n_ij, p.degree_i, p.degree_j));
        return rows;
      },
      py::arg("graph"), py::arg("i"), py::arg("j"), py::arg("n"),
      "Evolves `graph` to n while tracking (i, j); returns (n, n_ij, degree_i, degree_j) rows.");

  auto th = m.def_submodule("theory", "Closed-form expectations and constants");
  th.def("regime_constants", [](std::uint32_t c, double delta) {
    const auto rc = theory::regime_constants(c, delta);
    py::dict d;
    d["gamma"] = rc.gamma;
    d["gamma1"] = rc.gamma1;
    d["gamma2"] = rc.gamma2;
    d["regime"] = std::string(theory::to_string(rc.regime));
    d["power_exponent"] = rc.power_exponent();
    return d;
  }, py::arg("c"), py::arg("delta"));
  th.def("gamma_ratio", &theory::gamma_ratio, py::arg("x"), py::arg("a"));
  th.def("expected_degree_limit", [](NodeId i, std::uint32_t c, double delta) {
    return theory::expected_degree_limit(i, theory::regime_constants(c, delta)).value;
  }, py::arg("i"), py::arg("c"), py::arg("delta"));
  th.def("exact_expected_x", [](NodeId i, std::uint64_t n, std::uint32_t c, double delta) {
    return theory::exact_expected_x(i, n, theory::regime_constants(c, delta));
  }, py::arg("i"), py::arg("n"), py::arg("c"), py::arg("delta"));
  th.def("exact_expected_y", [](NodeId i, NodeId j, std::uint64_t n, std::uint32_t c, double delta) {
    return theory::exact_expected_y(i, j, n, theory::regime_constants(c, delta));
  }, py::arg("i"), py::arg("j"), py::arg("n"), py::arg("c"), py::arg("delta"));
  th.def("product_limit_mean", [](NodeId i, NodeId j, std::uint32_t c, double delta) {
    return theory::product_limit_mean(i, j, theory::regime_constants(c, delta)).value;
  }, py::arg("i"), py::arg("j"), py::arg("c"), py::arg("delta"));
  th.def("limit_coefficient_mean", [](NodeId i, NodeId j, std::uint32_t c, double delta) {
    return theory::limit_coefficient_mean(i, j, theory::regime_constants(c, delta)).value;
  }, py::arg("i"), py::arg("j"), py::arg("c"), py::arg("delta"));
  th.def("increment_probability", &theory::increment_probability, py::arg("p_i"), py::arg("p_j"), py::arg("c"));
  th.def("increment_bounds", [](double p_i, double p_j, std::uint32_t c) {
    const auto b = theory::increment_bounds(p_i, p_j, c);
    return py::make_tuple(b.lower, b.upper);
  }, py::arg("p_i"), py::arg("p_j"), py::arg("c"));
  th.def("estimate", [](std::uint64_t n_ij, double k, std::uint32_t c, double delta) {
    return estimate(n_ij, k, theory::regime_constants(c, delta));
  }, py::arg("n_ij_at_subsample"), py::arg("k"), py::arg("c"), py::arg("delta"));

  m.def("montecarlo", [](std::uint32_t c, double delta, std::vector<std::pair<NodeId, NodeId>> pairs, std::uint64_t n,
                         std::vector<std::uint64_t> checkpoints, std::uint64_t replicates, std::uint64_t seed,
                         std::vector<double> k, std::size_t trajectories, bool allow_node_one, unsigned threads) {
        const auto cfg = make_config(c, delta, pairs, n, std::move(checkpoints), replicates, seed, std::move(k),
                                     trajectories, allow_node_one);
        nlohmann::json j;
        {
          py::gil_scoped_release release;
          j = montecarlo::summary_to_json(montecarlo::run(cfg, {threads}));
        }
        return to_python(j);
      },
      py::arg("c") = 2, py::arg("delta") = 0.0, py::arg("pairs") = std::vector<std::pair<NodeId, NodeId>>{{10, 20}},
      py::arg("n") = 500, py::arg("checkpoints") = std::vector<std::uint64_t>{}, py::arg("replicates") = 100,
      py::arg("seed") = 0, py::arg("k") = std::vector<double>{}, py::arg("trajectories") = 0,
      py::arg("allow_node_one") = false, py::arg("threads") = 0,
      "Runs independent replicates and returns the summary as a dict.");

  m.def("verify", [](const std::string& suite, std::uint64_t seed, unsigned threads) {
        nlohmann::json j;
        {
          py::gil_scoped_release release;
          j = verify::run_suite(verify::parse_suite(suite), seed, verify::Tolerances{}, threads).to_json();
        }
        return to_python(j);
      },
      py::arg("suite") = "identities", py::arg("seed") = 20240611, py::arg("threads") = 0);
}
