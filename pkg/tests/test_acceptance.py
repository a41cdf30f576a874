"""Acceptance gate: one test per release criterion.

Run with ``pytest tests/test_acceptance.py -v`` to get one pass/fail line
per criterion.  Every tolerance below is part of the package contract.

Criterion 5's final sub-check asserts a fixed reference expression for
the sawtooth drop of the cycle trap's sharp-restart mean.  That
expression does not match direct differences of the mean (the classifier
dichotomy, asserted first, does hold); the check is kept at its stated
tolerance and is expected to fail until the expression is corrected.
"""

import math

import numpy as np
import pytest

from restartfp import (
    BENEFICIAL,
    EQUAL,
    WORSE,
    BiasedWalk,
    CycleTrap,
    GeometricRestart,
    SharpRestart,
    SimConfig,
    TwoPoint,
    brw_geometric_mean,
    brw_geometric_threshold_p,
    cycle_trap_geometric_threshold,
    cycle_trap_sharp_classify,
    cycle_trap_sharp_mean,
    derivative_criterion_D,
    hitting_prob_T,
    mean_T_generic,
    mean_T_geometric,
    mean_T_sharp,
    simulate_fpur,
)
from restartfp.cli import default_rho_sweep, run_sweep
from conftest import random_explicit_pair

TP_FAST = TwoPoint(1, 0.75, 20)
TP_SLOW = TwoPoint(1, 0.25, 20)

# Fixed seeds for the stochastic criteria, chosen once and frozen.
MATRIX_BASE_SEED = 1
SWEEP_BASE_SEED = 5
RECURRENCE_SEED = 1


def test_criterion_1_exact_constants():
    d_fast = derivative_criterion_D(TP_FAST)
    d_slow = derivative_criterion_D(TP_SLOW)
    assert d_fast == pytest.approx(-231 / 16, abs=1e-12)
    assert d_slow == pytest.approx(1441 / 16, abs=1e-12)
    assert TP_FAST.mean() == 5.75
    assert TP_SLOW.mean() == 15.25
    print(f"criterion 1: D = {d_fast} / {d_slow}, means 5.75 / 15.25")


def test_criterion_2_threshold_formulas():
    trap_star = cycle_trap_geometric_threshold(2, 14)
    walk_star_1 = brw_geometric_threshold_p(1)
    walk_star_3 = brw_geometric_threshold_p(3)
    assert trap_star == pytest.approx(150 / 156, abs=1e-12)
    assert walk_star_1 == pytest.approx(0.75, abs=1e-12)
    assert walk_star_3 == pytest.approx((1 + math.sqrt(17)) / 8, abs=1e-12)
    print(f"criterion 2: p* = {trap_star}, {walk_star_1}, {walk_star_3}")


def _matrix_cells():
    traps = [CycleTrap(0.75, 2, 14), CycleTrap(0.5, 2, 4), CycleTrap(0.25, 2, 6)]
    walks = [BiasedWalk(0.6, 1), BiasedWalk(0.8, 3), BiasedWalk(0.3, 1)]
    cells = []
    for model in traps + walks + [TP_FAST, TP_SLOW]:
        if isinstance(model, CycleTrap):
            sharp = [model.L + 1, model.L + model.M + 2, model.L + 3 * (model.M + 1) + 1]
        elif isinstance(model, BiasedWalk):
            sharp = [model.m + 1, model.m + 7, model.m + 41]
        else:
            sharp = [2, 10, 30]
        for rho in (0.1, 0.5, 0.9):
            cells.append((model, GeometricRestart(rho), rho))
        for n_restart in sharp:
            cells.append((model, SharpRestart(n_restart), n_restart))
    return cells


def _closed_form(model, spec, param):
    if isinstance(spec, GeometricRestart):
        if isinstance(model, BiasedWalk):
            return brw_geometric_mean(model.p, model.m, param)
        return mean_T_geometric(model, param)
    if isinstance(model, CycleTrap):
        return cycle_trap_sharp_mean(model.p, model.L, model.M, param)
    return mean_T_sharp(model, param)


def test_criterion_3_oracle_triangle():
    cells = _matrix_cells()
    assert len(cells) == 48
    hits = 0
    for index, (model, spec, param) in enumerate(cells):
        closed = _closed_form(model, spec, param)
        generic = mean_T_generic(model, spec)
        assert generic == pytest.approx(closed, rel=1e-9), (model.describe(), spec.describe())
        estimate = simulate_fpur(
            model, spec, SimConfig(trials=2000, seed=MATRIX_BASE_SEED + index)
        )
        assert estimate.censored == 0
        if estimate.ci_low <= closed <= estimate.ci_high:
            hits += 1
    print(f"criterion 3: closed vs generic on 48 cells ok, CI hits {hits}/48")
    assert hits / len(cells) >= 0.96


def test_criterion_4_two_point_sweeps():
    grid = default_rho_sweep()
    fast = run_sweep(TP_FAST, "geometric", grid, trials=2000, seed=SWEEP_BASE_SEED)
    slow = run_sweep(TP_SLOW, "geometric", grid, trials=2000, seed=SWEEP_BASE_SEED)

    below = min(fast.rows, key=lambda row: abs(row.param - 0.1) if row.param <= 0.1 else 9.0)
    above = min(fast.rows, key=lambda row: abs(row.param - 0.1) if row.param >= 0.1 else 9.0)
    assert below.param <= 0.1 <= above.param
    assert below.beneficial and above.beneficial
    assert mean_T_geometric(TP_FAST, 0.1) < 5.75

    best = min(row.mean_t_analytic for row in slow.rows)
    assert best < 15.25
    assert slow.rows[0].param == 0.01
    assert slow.rows[0].mean_t_analytic > 15.25

    for result in (fast, slow):
        for row in result.rows:
            assert row.ci_low <= row.mean_t_analytic <= row.ci_high, row.param
    print(f"criterion 4: window around 0.1 beneficial, slow-model min {best:.4f}, 120/120 CIs")


def test_criterion_5_cycle_trap_sharp_dichotomy():
    long_trap_mean = CycleTrap(0.25, 7, 5).mean()
    assert long_trap_mean == 25.0
    for n_restart in range(8, 201):
        assert cycle_trap_sharp_mean(0.25, 7, 5, n_restart) > 25.0, n_restart

    pattern = [BENEFICIAL] * 5 + [EQUAL] + [WORSE] * 5
    for n_restart in range(6, 117):
        expected = pattern[(n_restart - 6) % 11]
        assert cycle_trap_sharp_classify(5, 10, n_restart) == expected, n_restart

    q, L, M = 0.75, 5, 10
    drops = []
    for a in (1, 2, 3):
        direct = cycle_trap_sharp_mean(0.25, L, M, L + a * (M + 1)) - cycle_trap_sharp_mean(
            0.25, L, M, L + 1 + a * (M + 1)
        )
        stated = (1 + q ** (a + 1)) * q**a * L / ((1 - q**a) * (1 - q ** (a + 1))) + q ** (
            a + 1
        ) * M / (1 - q ** (a + 1))
        drops.append((a, direct, stated))
    print("criterion 5: dichotomy and classify pattern ok; sawtooth drops (direct vs stated):")
    for a, direct, stated in drops:
        print(f"  a={a}: direct={direct!r} stated={stated!r}")
    for a, direct, stated in drops:
        assert direct == pytest.approx(stated, abs=1e-10), f"sawtooth drop mismatch at a={a}"


def test_criterion_6_hitting_probability_biconditional():
    rng = np.random.default_rng(360)
    combos = [
        (True, True, False),
        (True, False, False),
        (False, True, False),
        (False, False, False),
        (True, True, True),
        (False, True, True),
    ]
    for trial in range(500):
        u_proper, r_proper, preemptive = combos[trial % len(combos)]
        model, spec = random_explicit_pair(
            rng, u_proper=u_proper, r_proper=r_proper, preemptive=preemptive
        )
        value = hitting_prob_T(model, spec)
        if preemptive:
            assert value == 0.0
        elif u_proper or r_proper:
            assert value == 1.0
        else:
            assert value < 1.0 - 1e-3
    print("criterion 6: 500 randomized pairs satisfy the biconditional")


def test_criterion_7_positive_recurrence_consequence():
    walk = BiasedWalk(0.3, 1)
    spec = GeometricRestart(0.2)
    assert walk.mean() == math.inf
    assert walk.hit_prob() == pytest.approx(3 / 7, abs=1e-12)
    assert hitting_prob_T(walk, spec) == pytest.approx(1.0, abs=1e-12)
    analytic = mean_T_generic(walk, spec)
    assert analytic == pytest.approx(12.5, rel=1e-9)
    estimate = simulate_fpur(walk, spec, SimConfig(trials=10**5, seed=RECURRENCE_SEED))
    assert estimate.censored == 0
    assert estimate.ci_low <= 12.5 <= estimate.ci_high
    print(
        f"criterion 7: E_T = 1, analytic {analytic:.12f}, "
        f"MC CI [{estimate.ci_low:.4f}, {estimate.ci_high:.4f}]"
    )


def test_criterion_8_limit_behavior():
    for model in (TP_FAST, CycleTrap(0.5, 2, 4), BiasedWalk(0.8, 3)):
        baseline = model.mean()
        low_rate = mean_T_geometric(model, 1e-6)
        assert low_rate == pytest.approx(baseline, rel=1e-3), model.describe()
    late = mean_T_sharp(BiasedWalk(0.8, 3), 400)
    assert late == pytest.approx(5.0, rel=5e-3)
    print(f"criterion 8: rho->0 limits ok, sharp N=400 mean {late!r}")


def test_criterion_9_gap_linearity():
    trap = CycleTrap(0.25, 5, 10)
    trap_pmf = trap.pmf(40)
    for start, stop in [(6, 16), (17, 27), (28, 38)]:
        values = [cycle_trap_sharp_mean(0.25, 5, 10, n) for n in range(start, stop + 1)]
        assert np.all(np.abs(np.diff(values, n=2)) < 1e-10)
        mass = trap_pmf.cumulative(start - 1)
        assert values[1] - values[0] == pytest.approx((1 - mass) / mass, rel=1e-10)

    walk = BiasedWalk(0.65, 3)
    walk_pmf = walk.pmf(40)
    for start in range(4, 30, 2):
        mass = walk_pmf.cumulative(start - 1)
        slope = mean_T_sharp(walk, start + 1) - mean_T_sharp(walk, start)
        assert slope == pytest.approx((1 - mass) / mass, rel=1e-10)
    print("criterion 9: affine gaps with slope (1-U)/U for both models")
