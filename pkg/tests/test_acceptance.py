"""Acceptance suite: one test per criterion, each printing a pass line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.
"""

import math
import time

import numpy as np
import pytest

from conftest import TWO_PI, scipy_steady_fourier
from ellipend.averaging import (
    AveragedState,
    ScaledParams,
    averaged_rhs,
    averaging_solution,
    standard_form_rhs,
)
from ellipend.cli import main as cli_main
from ellipend.compare import compare_solution, sweep_beta
from ellipend.dynamics import (
    State,
    find_periodic_rotation,
    floquet_multipliers,
    integrate,
    rhs,
    wrap_angle,
)
from ellipend.exact import exact_branches
from ellipend.harmonic import harmonic_response
from ellipend.multiscale import multiscale_solution, theta1_closed_series, theta1_series
from ellipend.params import DimensionlessParams, Regime, classify_regime


def _report(num: int, name: str, t0: float, limit: float) -> None:
    elapsed = time.perf_counter() - t0
    print(f"ACCEPTANCE {num:2d} ({name}): PASS in {elapsed:.2f}s (limit {limit:.0f}s)")
    assert elapsed < limit, f"criterion {num} exceeded its {limit:.0f}s budget"


def test_criterion_01_exact_solution_residual():
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    taus = np.linspace(0.0, TWO_PI, 17)
    for _ in range(100):
        mu = rng.uniform(0.2, 3.0)
        beta = rng.uniform(1e-3, 0.999) * mu
        d = DimensionlessParams(0.0, mu, 0.0, beta)
        theta0 = exact_branches(beta, mu)[0].theta0
        for tau in taus:
            _, acc = rhs(float(tau), State(theta0 - float(tau), -1.0), d)
            assert abs(acc) < 1e-12
    _report(1, "exact-solution residual", t0, 1.0)


def test_criterion_02_stability_dichotomy():
    t0 = time.perf_counter()
    beta, mu = 0.3, 1.0
    d = DimensionlessParams(0.0, mu, 0.0, beta)
    stable, unstable = exact_branches(beta, mu)

    traj = integrate(d, State(stable.theta0 + 0.3, -1.0), 0.0, 100 * TWO_PI, 1e-11, 101)
    dist = abs(wrap_angle(traj.theta[-1] + traj.tau[-1] - stable.theta0))
    assert dist < 1e-6 and abs(traj.theta_dot[-1] + 1.0) < 1e-6

    traj = integrate(d, State(unstable.theta0 + 0.01, -1.0), 0.0, 10 * TWO_PI, 1e-11, 401)
    assert np.max(np.abs(traj.theta + traj.tau - unstable.theta0)) > 0.5
    _report(2, "stability dichotomy", t0, 5.0)


def test_criterion_03_floquet_consistency():
    t0 = time.perf_counter()
    rng = np.random.default_rng(23)
    for _ in range(20):
        mu = rng.uniform(0.3, 2.5)
        beta = rng.uniform(0.05, 0.95) * mu
        d = DimensionlessParams(0.0, mu, 0.0, beta)
        orbit = find_periodic_rotation(d)
        mults = np.array(sorted(floquet_multipliers(orbit, d), key=lambda z: (z.real, z.imag)))
        lam = np.roots([1.0, beta, math.sqrt(mu * mu - beta * beta)])
        want = np.array(sorted(np.exp(TWO_PI * lam), key=lambda z: (z.real, z.imag)))
        assert np.max(np.abs(mults - want)) < 1e-8
        assert abs(mults[0] * mults[1] - math.exp(-TWO_PI * beta)) < 1e-8
    _report(3, "Floquet consistency", t0, 10.0)


def test_criterion_04_harmonic_response_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(37)
    checked = 0
    while checked < 50:
        mu = rng.uniform(0.5, 2.0)
        beta = rng.uniform(0.25, 0.95) * mu
        n = int(rng.integers(0, 5))
        A, B = float(rng.normal()), float(rng.normal())
        s = math.sqrt(mu * mu - beta * beta)
        denom = (n * n - 1) * beta**2 + mu * mu + n * n * (n * n - 2 * s)
        if n > 0 and abs(denom) < 0.05 * (1 + mu * mu):
            continue  # stay away from resonance
        got = harmonic_response(n, A, B, beta, mu)
        want = scipy_steady_fourier(n, A, B, beta, mu)
        assert got == pytest.approx(want, abs=1e-6), (n, A, B, beta, mu)
        checked += 1
    _report(4, "steady-response oracle equivalence", t0, 30.0)


def test_criterion_05_expansion_convergence_orders():
    t0 = time.perf_counter()
    errs = {1: [], 2: []}
    for eps in (0.04, 0.02, 0.01):
        d = DimensionlessParams(eps, 1.0, math.sqrt(0.3 * eps), 0.5)
        for order in (1, 2):
            report = compare_solution(multiscale_solution(d, order), d)
            errs[order].append(report.max_abs_err)
    for order, lo, hi in ((1, 3.0, 5.0), (2, 6.0, 10.0)):
        e = errs[order]
        for ratio in (e[0] / e[1], e[1] / e[2]):
            assert lo <= ratio <= hi, f"order {order} ratio {ratio}"
    _report(5, "expansion convergence orders", t0, 30.0)


def test_criterion_06_closed_form_equals_series_form():
    t0 = time.perf_counter()
    taus = np.linspace(0.0, TWO_PI, 64, endpoint=False)
    cases = [
        DimensionlessParams(0.04, 1.0, math.sqrt(0.3 * 0.04), 0.5),
        DimensionlessParams(0.04, 1.0, 0.0, 0.5),
        DimensionlessParams(0.02, 1.4, 0.1, 0.9),
    ]
    for d in cases:
        closed = d.eps * theta1_closed_series(d).evaluate(taus)
        series = d.eps * theta1_series(d).evaluate(taus)
        assert np.max(np.abs(closed - series)) < 1e-13
    _report(6, "closed form equals series form", t0, 1.0)


def test_criterion_07_averaging_validation():
    t0 = time.perf_counter()
    rels = []
    for eps in (0.04, 0.02):
        d = DimensionlessParams(eps, 1.0, 0.0, 0.01)
        report = compare_solution(averaging_solution(d), d)
        rels.append(report.rel_err)
    assert rels[0] < 0.10
    assert rels[1] < rels[0]
    _report(7, "averaging validation", t0, 30.0)


def test_criterion_08_averaged_field_oracle():
    t0 = time.perf_counter()
    sp = ScaledParams(beta_hat=0.5, w=0.5, sqrt_mu=math.sqrt(1.02),
                      detuning=math.sqrt(1.02) - 1.0)
    q, z = 0.8, 0.7
    taus = np.arange(2048) / 2048 * TWO_PI
    constants = []
    for eps in (0.04, 0.02):
        exact = np.array([standard_form_rhs(float(t), q, z, sp, eps) for t in taus])
        mean_dq, mean_dz = exact.mean(axis=0)
        adq, adz = averaged_rhs(AveragedState(q, z, 1), sp, eps)
        dev = max(abs(mean_dq - adq), abs(mean_dz - adz))
        constants.append(dev / eps)
    assert 0.5 < constants[0] / constants[1] < 2.0
    _report(8, "averaged-field oracle", t0, 10.0)


def test_criterion_09_crossover_sweep():
    t0 = time.perf_counter()
    d = DimensionlessParams(0.04, 1.0, 0.0, 0.0)
    grid = np.linspace(0.005, 0.9, 40)
    result = sweep_beta(d, grid, ["multiscale2", "averaging2"], tol=1e-10)
    rel = {(round(r.beta, 12), r.method): r.rel_err for r in result if r.status == "ok"}
    diffs = []
    for beta in grid:
        key = round(float(beta), 12)
        if (key, "multiscale2") in rel and (key, "averaging2") in rel:
            diffs.append(rel[(key, "averaging2")] - rel[(key, "multiscale2")])
    assert diffs[0] < 0, "averaging must win at the smallest damping"
    assert diffs[-1] > 0, "the expansion must win at the strongest damping"

    # inside its own regime each method stays below 20 % relative error
    for beta in grid:
        key = round(float(beta), 12)
        regime = classify_regime(d.with_beta(float(beta)))
        if regime is Regime.SMALL_DAMPING_ORDER_ONE_MU and (key, "averaging2") in rel:
            assert rel[(key, "averaging2")] < 0.20, f"averaging2 at beta={beta}"
        if regime is Regime.ORDER_ONE_DAMPING_ORDER_ONE_MU and (key, "multiscale2") in rel:
            assert rel[(key, "multiscale2")] < 0.20, f"multiscale2 at beta={beta}"
    _report(9, "crossover sweep", t0, 300.0)


def test_criterion_10_cli_determinism(tmp_path):
    t0 = time.perf_counter()
    pairs = []
    for tag in ("a", "b"):
        cmp_out = tmp_path / f"cmp_{tag}.json"
        assert cli_main(["compare", "--mu", "1", "--beta", "0.5", "--eps", "0.04",
                         "--omega", "0", "--methods", "multiscale1,multiscale2",
                         "--out", str(cmp_out)]) == 0
        sweep_out = tmp_path / f"sweep_{tag}.csv"
        assert cli_main(["sweep", "--mu", "1", "--eps", "0.04", "--omega", "0",
                         "--beta-grid", "0.3:0.7:3", "--methods", "multiscale2",
                         "--out", str(sweep_out)]) == 0
        traj_out = tmp_path / f"traj_{tag}.csv"
        assert cli_main(["simulate", "--mu", "1", "--beta", "0.5", "--eps", "0.04",
                         "--omega", "0", "--tau-max", "50", "--samples", "100",
                         "--out", str(traj_out)]) == 0
        pairs.append((cmp_out.read_bytes(), sweep_out.read_bytes(), traj_out.read_bytes()))
    assert pairs[0] == pairs[1]
    _report(10, "CLI determinism", t0, 60.0)
