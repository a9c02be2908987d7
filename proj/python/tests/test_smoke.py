import math

import pytest

import pagraph


def test_graph_basics():
    g = pagraph.Graph(c=2, delta=0.0, seed=1)
    assert g.n == 1
    assert g.degrees() == [4]
    g.evolve(1000)
    assert g.n == 1000
    assert sum(g.degrees()) == 4 * 1000
    assert all(t < 500 for t in g.arrival_targets(500))
    assert g.total_weight == pytest.approx(4000.0)


def test_bad_params():
    with pytest.raises(ValueError):
        pagraph.Graph(c=2, delta=-2.0)
    with pytest.raises(ValueError):
        pagraph.ModelParams(c=0, delta=1.0)


def test_determinism_and_snapshot():
    a = pagraph.Graph(c=3, delta=-1.0, seed=42)
    b = pagraph.Graph(c=3, delta=-1.0, seed=42)
    a.evolve(300)
    b.evolve(300)
    assert a.degrees() == b.degrees()
    blob = a.snapshot()
    c = pagraph.Graph.restore(blob)
    a.evolve(600)
    c.evolve(600)
    assert a.degrees() == c.degrees()
    with pytest.raises(ValueError):
        pagraph.Graph.restore(blob[:-5])


def test_tracking_matches_recount():
    g = pagraph.Graph(c=2, delta=0.5, seed=3)
    g.evolve(20)
    rows = pagraph.track_pair(g, 10, 20, 800)
    assert rows[-1][0] == 800
    assert rows[-1][1] == g.common_friends(10, 20)
    counts = [r[1] for r in rows]
    assert all(0 <= b - a <= 1 for a, b in zip(counts, counts[1:]))


def test_theory_values():
    th = pagraph.theory
    assert th.gamma_ratio(2.0, 0.5) == pytest.approx(1.3293403881791370, rel=1e-12)
    assert th.exact_expected_x(2, 1000, 2, 0.0) == pytest.approx(47.570696388944855, rel=1e-10)
    assert th.exact_expected_y(2, 3, 3, 2, 0.0) == pytest.approx(5.0)
    assert th.increment_probability(0.1, 0.1, 3) == pytest.approx(0.054)
    lo, hi = th.increment_bounds(0.1, 0.1, 3)
    assert lo == pytest.approx(0.054) and hi == pytest.approx(0.06)
    rc = th.regime_constants(2, -1.5)
    assert rc["regime"] == "power"
    assert th.estimate(5, 4.0, 2, -1.5) == pytest.approx(5 * 4 ** 0.6)
    assert th.limit_coefficient_mean(2, 3, 2, 0.0) == pytest.approx(0.21717686488053721, rel=1e-10)


def test_montecarlo_summary():
    s = pagraph.montecarlo(c=2, delta=0.0, pairs=[(2, 3)], n=200, checkpoints=[50, 200],
                           replicates=50, seed=7, k=[2.0], threads=1)
    cp = s["pairs"][0]["checkpoints"]
    assert [c["n"] for c in cp] == [50, 200]
    assert cp[-1]["n_ij"]["count"] == 50
    again = pagraph.montecarlo(c=2, delta=0.0, pairs=[(2, 3)], n=200, checkpoints=[50, 200],
                               replicates=50, seed=7, k=[2.0], threads=2)
    assert again == s


def test_identity_suite():
    report = pagraph.verify("identities")
    assert report["passed"]
    assert not report["hard_failure"]
    assert math.isfinite(report["checks"][0]["achieved"])
