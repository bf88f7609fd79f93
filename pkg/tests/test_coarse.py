"""Merged filters and the two-column tradeoff curve."""

import math

import numpy as np
import pytest

from epops.channels import deterministic_fidelity, filter_success_probability
from epops.coarse import coarse_fidelity, coarse_filter, tradeoff_curve
from epops.errors import RoundOutOfRange
from epops.recursive import cumulative, run_protocol
from epops.spectra import build_profile


def two_sector():
    p = build_profile([(0, 0.0, 0.5), (1, 1.0, 0.5)])
    q = build_profile([(0, 0.0, 1 / 3), (1, 1.0, 2 / 3)])
    return p, q


def random_subset_pair(rng, n):
    pw = rng.dirichlet(np.ones(n))
    qw = rng.dirichlet(np.ones(n))
    p = build_profile([(i, float(i), float(w)) for i, w in enumerate(pw)])
    q = build_profile([(i, float(i), float(w)) for i, w in enumerate(qw)])
    return p, q


def test_coarse_filter_two_sector():
    p, q = two_sector()
    run = run_protocol(p, q, 10)
    f1 = coarse_filter(run, 1)
    assert f1.coefficient(1) == pytest.approx(1.0)
    assert f1.coefficient(0) == pytest.approx(0.5)
    f2 = coarse_filter(run, 2)
    assert f2.coefficient(0) == pytest.approx(1.0)
    assert f2.coefficient(1) == pytest.approx(1.0)


def test_coarse_filter_bounds():
    p, q = two_sector()
    run = run_protocol(p, q, 10)
    with pytest.raises(RoundOutOfRange):
        coarse_filter(run, 0)
    with pytest.raises(RoundOutOfRange):
        coarse_filter(run, 3)


def test_coarse_probability_equals_cumulative():
    rng = np.random.default_rng(47)
    for _ in range(20):
        p, q = random_subset_pair(rng, int(rng.integers(2, 7)))
        run = run_protocol(p, q, 100)
        for T in range(1, len(run.rounds) + 1):
            p_cum, _ = cumulative(run, T)
            p_merged = filter_success_probability(p, coarse_filter(run, T))
            assert p_merged == pytest.approx(p_cum, abs=1e-10)


def test_coarse_fidelity_dominates_recursive():
    rng = np.random.default_rng(59)
    for _ in range(20):
        p, q = random_subset_pair(rng, int(rng.integers(2, 7)))
        run = run_protocol(p, q, 100)
        for T in range(1, len(run.rounds) + 1):
            _, f_rec = cumulative(run, T)
            assert coarse_fidelity(run, T) >= f_rec - 1e-12


def test_coarse_endpoint_is_deterministic_fidelity():
    # At full termination the merged filter transmits everything, so the
    # coarse fidelity collapses to the deterministic one.
    rng = np.random.default_rng(67)
    for _ in range(10):
        p, q = random_subset_pair(rng, int(rng.integers(2, 6)))
        run = run_protocol(p, q, 100)
        L = len(run.rounds)
        assert coarse_fidelity(run, L) == pytest.approx(
            deterministic_fidelity(p, q), abs=1e-12
        )
        merged = coarse_filter(run, L)
        assert all(merged.coefficient(i) == pytest.approx(1.0) for i in p.support)


def test_tradeoff_curve_two_sector():
    p, q = two_sector()
    curve = tradeoff_curve(p, q, 10)
    assert [pt.T for pt in curve.points] == [1, 2]
    assert curve.points[0].p_succ == pytest.approx(0.75)
    assert curve.points[0].F_recursive == pytest.approx(1.0)
    assert curve.points[0].F_coarse == pytest.approx(1.0)
    assert curve.points[1].p_succ == pytest.approx(1.0, abs=1e-12)
    assert curve.points[1].F_recursive == pytest.approx(5 / 6)
    assert curve.points[1].F_coarse == pytest.approx(0.9714045207910316)


def test_tradeoff_curve_probability_strictly_increases():
    rng = np.random.default_rng(71)
    for _ in range(15):
        p, q = random_subset_pair(rng, int(rng.integers(2, 7)))
        curve = tradeoff_curve(p, q, 100)
        probs = [pt.p_succ for pt in curve.points]
        assert all(a < b for a, b in zip(probs, probs[1:]))
        assert probs[-1] == pytest.approx(1.0, abs=1e-10)


def test_csv_rendering():
    p, q = two_sector()
    curve = tradeoff_curve(p, q, 10)
    text = curve.to_csv()
    lines = text.splitlines()
    assert lines[0] == "T,p_succ,F_recursive,F_coarse"
    assert lines[1] == "1,0.75,1,1"
    assert lines[2].startswith("2,1,0.833333,")
    assert text == curve.to_csv()


def test_csv_six_significant_digits():
    p = build_profile([(0, 0.0, 1e-7), (1, 1.0, 1 - 1e-7)])
    q = build_profile([(0, 0.0, 0.5), (1, 1.0, 0.5)])
    curve = tradeoff_curve(p, q, 10)
    first = curve.to_csv().splitlines()[1].split(",")
    assert "e" in first[1] or float(first[1]) < 1e-6
