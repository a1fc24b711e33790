import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from motifwalk.estimators import (
    ConcentrationVector,
    EmptyTraceError,
    estimate,
    ht_edge_estimate,
    ht_node_estimate,
    ht_reduce_estimate,
    nrmse,
    plain_average,
    write_csv,
)
from motifwalk.fixtures import fig1, nodes_of, random_connected
from motifwalk.motifs import build_registry, induced_cis
from motifwalk.oracle import QueryOracle
from motifwalk.enumeration import exact_concentrations
from motifwalk.trace import PairSample, ReduceSample, Sample, WalkTrace
from motifwalk.walkers import WalkConfig, run_srw

REG3 = build_registry(3, "undirected")
PATH = induced_cis(fig1(), nodes_of("abe"))
TRI = induced_cis(fig1(), nodes_of("bcd"))


def trace(view, samples, k=3):
    return WalkTrace("test", k, "undirected", view, list(samples), {k: build_registry(k, "undirected")})


def vec(values):
    return ConcentrationVector(3, "undirected", dict(values), 1)


def test_node_estimate_hand_arithmetic():
    est = ht_node_estimate(trace("node", [Sample(PATH, 1, 1), Sample(TRI, 2, 3)]))
    assert est[1] == pytest.approx(3 / 4) and est[2] == pytest.approx(1 / 4)


def test_edge_estimate_hand_arithmetic():
    est = ht_edge_estimate(trace("pair", [PairSample(PATH, 1, 2), PairSample(TRI, 2, 3)]))
    assert est[1] == pytest.approx((1 / 2) / (1 / 2 + 1 / 6))
    assert est[2] == pytest.approx((1 / 6) / (1 / 2 + 1 / 6))


def test_reduce_estimate_hand_arithmetic():
    s = induced_cis(fig1(), nodes_of("abce"))
    est = ht_reduce_estimate(trace("reduce", [ReduceSample(s, 2, ((1, 2), (2, 4)))]))
    assert est[1] == pytest.approx(2 / 3) and est[2] == pytest.approx(1 / 3)


def test_single_class_gets_everything():
    assert ht_node_estimate(trace("node", [Sample(TRI, 2, 3)] * 4))[2] == 1.0
    assert ht_edge_estimate(trace("pair", [PairSample(TRI, 2, 3)] * 2))[2] == 1.0
    s = induced_cis(fig1(), nodes_of("abce"))
    assert ht_reduce_estimate(trace("reduce", [ReduceSample(s, 1, ((1, 2), (1, 3)))]))[1] == 1.0


def test_unobserved_class_reports_zero_and_flag():
    est = ht_node_estimate(trace("node", [Sample(TRI, 2, 3)]))
    assert est[1] == 0.0 and 1 not in est.observed and 2 in est.observed


def test_plain_average():
    est = plain_average(trace("node", [Sample(PATH, 1, 1), Sample(TRI, 2, 7)]))
    assert est.as_array().tolist() == [0.5, 0.5]
    one = plain_average(trace("node", [Sample(TRI, 2, 9)]))
    assert one.as_array().tolist() == [0.0, 1.0]


def test_plain_average_mixed_slice():
    g = fig1()
    four = induced_cis(g, nodes_of("abcd"))
    t = WalkTrace("guise", 4, "undirected", "mixed",
                  [Sample(PATH, 1, 2), Sample(four, 6, 2), Sample(TRI, 2, 2)],
                  {3: REG3, 4: build_registry(4, "undirected"), 5: build_registry(5, "undirected")})
    assert plain_average(t, 3).total() == pytest.approx(1.0)
    assert plain_average(t, 4)[6] == 1.0
    with pytest.raises(EmptyTraceError):
        plain_average(t, 5)


def test_empty_trace_errors():
    for fn, view in ((ht_node_estimate, "node"), (ht_edge_estimate, "pair"), (ht_reduce_estimate, "reduce")):
        with pytest.raises(EmptyTraceError):
            fn(trace(view, []))


def test_wrong_view_rejected():
    with pytest.raises(ValueError):
        ht_edge_estimate(trace("node", [Sample(TRI, 2, 3)]))


def test_pair_with_i_below_two_is_invariant_violation():
    with pytest.raises(AssertionError):
        ht_edge_estimate(trace("pair", [PairSample(TRI, 2, 1)]))


def test_nrmse_zero_for_exact():
    truth = vec({1: 0.3, 2: 0.7})
    rep = nrmse([truth, truth, truth], truth)
    assert rep.per_class == {1: 0.0, 2: 0.0} and rep.rmse == 0.0


def test_nrmse_constant_bias():
    truth = vec({1: 0.25, 2: 0.75})
    b = 0.05
    rep = nrmse([vec({1: 0.25 + b, 2: 0.75 - b})] * 4, truth)
    assert rep.per_class[1] == pytest.approx(b / 0.25)
    assert rep.per_class[2] == pytest.approx(b / 0.75)
    assert rep.rmse == pytest.approx(math.sqrt(2) * b)


def test_nrmse_symmetric_runs():
    truth = vec({1: 0.4, 2: 0.6})
    e = 0.1
    rep = nrmse([vec({1: 0.5, 2: 0.5}), vec({1: 0.3, 2: 0.7})], truth)
    assert rep.per_class[1] == pytest.approx(e / 0.4)


def test_nrmse_excludes_zero_truth_and_needs_two_runs():
    truth = vec({1: 1.0, 2: 0.0})
    rep = nrmse([vec({1: 0.9, 2: 0.1}), vec({1: 1.0, 2: 0.0})], truth)
    assert rep.excluded == [2] and 2 not in rep.per_class
    with pytest.raises(ValueError):
        nrmse([truth], truth)


@given(st.lists(st.tuples(st.sampled_from([1, 2]), st.integers(1, 50)), min_size=1, max_size=200))
def test_node_estimate_self_normalizes(items):
    samples = [Sample(PATH if c == 1 else TRI, c, d) for c, d in items]
    est = ht_node_estimate(trace("node", samples))
    assert abs(est.total() - 1) < 1e-9
    assert all(v >= 0 for v in est.values.values())


@given(st.lists(st.tuples(st.sampled_from([1, 2]), st.integers(2, 6)), min_size=1, max_size=200))
def test_edge_estimate_self_normalizes(items):
    est = ht_edge_estimate(trace("pair", [PairSample(PATH, c, i) for c, i in items]))
    assert abs(est.total() - 1) < 1e-9


@given(st.lists(st.tuples(st.integers(1, 9),
                          st.lists(st.tuples(st.sampled_from([1, 2]), st.integers(1, 9)), min_size=1, max_size=4)),
                min_size=1, max_size=100))
def test_reduce_estimate_self_normalizes(items):
    s = induced_cis(fig1(), nodes_of("abce"))
    est = ht_reduce_estimate(trace("reduce", [ReduceSample(s, d, tuple(c)) for d, c in items]))
    assert abs(est.total() - 1) < 1e-9


def test_dropping_weights_biases_node_estimate():
    # negative control: raw SRW visit frequencies over-represent high-degree CISes
    g = random_connected(12, 0.3, 12)
    truth = exact_concentrations(g, 3)
    t = run_srw(QueryOracle(g), g, WalkConfig(k=3, steps=200_000, seed=5))
    weighted = ht_node_estimate(t)
    flat = ht_node_estimate(trace("node", [Sample(s.cis, s.class_id, 1) for s in t.samples]))
    assert abs(weighted[2] - truth[2]) < 0.01
    assert abs(flat[2] - truth[2]) > 0.05


def test_estimate_dispatch():
    t = trace("node", [Sample(TRI, 2, 3), Sample(PATH, 1, 1)])
    assert estimate(t).values == ht_node_estimate(t).values
    t.method = "mhsrw"
    assert estimate(t).values == plain_average(t).values


def test_csv_columns():
    truth = vec({1: 0.5, 2: 0.5})
    rep = nrmse([truth, truth], truth)
    buf = io.StringIO()
    write_csv(buf, truth, REG3, truth, rep)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "class_id,canonical_code,estimate,truth,nrmse"
    assert lines[1].startswith("1,000101,0.5,0.5,0.0")
