"""Acceptance criteria, one test each, at their stated tolerances.

Every test records a PASS/FAIL line; the lines are printed together at the
end of the pytest run (see ``conftest.py``).
"""

import itertools
import math

import numpy as np
import pytest

from retroresp.event_log import resp_from_log
from retroresp.info_core import JointTable, ProbDist, js_distance
from retroresp.responsibility import (
    ACCEPT,
    REJECT,
    ActionSet,
    analyze_event,
    expected_values,
    reasonability,
    resp_average,
)
from retroresp.sdt_model import (
    NOISE,
    SIGNAL,
    PayoffMatrix,
    beta_to_threshold,
    confusion_rates,
    optimal_beta,
)
from retroresp.simulator import SimConfig, analytic_resp_z, simulate
from retroresp.sweep import SweepSpec, sweep

RESULTS = []


def check(criterion, ok, detail):
    RESULTS.append(f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}")
    assert ok, detail


def test_1_worked_example(scenario):
    r = analyze_event(scenario, SIGNAL, -1.5, REJECT)
    checks = {
        "x_aS": abs(r.x_as[SIGNAL] - 0.72) <= 0.01 and abs(r.x_as[NOISE] - 0.28) <= 0.01,
        "x_aH": abs(r.x_ah[SIGNAL] - 0.01) <= 0.005 and abs(r.x_ah[NOISE] - 0.99) <= 0.005,
        "x_a": abs(r.x_a[SIGNAL] - 0.08) <= 0.01 and abs(r.x_a[NOISE] - 0.92) <= 0.01,
        "D_S": abs(r.d_to_system - 0.58) <= 0.015,
        "D_H": abs(r.d_to_human - 0.16) <= 0.015,
        "Resp": abs(r.resp_xa - 0.79) <= 0.02,
        "Rsnble(reject)": r.rsnble_per_action[REJECT] == 1.0,
        "Rsnble(accept)": r.rsnble_per_action[ACCEPT] < 1e-6,
    }
    failed = [k for k, v in checks.items() if not v]
    check(1, not failed,
          f"x_a={r.x_a[SIGNAL]:.4f} D=({r.d_to_system:.4f}, {r.d_to_human:.4f}) "
          f"Resp={r.resp_xa:.4f} Rsnble(accept)={r.rsnble_per_action[ACCEPT]:.3g}"
          + (f" failed: {failed}" if failed else ""))


def test_2_system_rates():
    pay = PayoffMatrix(10, 10, -10, -20)
    rates = confusion_rates(2.0, beta_to_threshold(optimal_beta(0.2, pay), 2.0))
    got = rates.as_tuple()
    ok = all(abs(g - w) <= 0.005 for g, w in zip(got, (0.69, 0.31, 0.07, 0.93)))
    check(2, ok, "rates (" + ", ".join(f"{g:.4f}" for g in got) + ")")


def test_3_expected_values():
    ev = expected_values(ProbDist((SIGNAL, NOISE), (0.08, 0.92)), PayoffMatrix(10, 10, -10, -20))
    ok = ev.utilities[ACCEPT] == -8.4 and ev.utilities[REJECT] == 7.6
    check(3, ok, f"EV accept={ev.utilities[ACCEPT]!r} reject={ev.utilities[REJECT]!r}")


def test_4_metric_properties():
    rng = np.random.default_rng(20240601)
    worst_triangle, symmetric, bounded = -math.inf, True, True
    for _ in range(10_000):
        n = int(rng.integers(2, 9))
        p, q, r = (ProbDist(tuple(f"c{i}" for i in range(n)), w, renormalize=True)
                   for w in rng.dirichlet(np.full(n, 0.5), size=3))
        pq, qp, qr, pr = js_distance(p, q), js_distance(q, p), js_distance(q, r), js_distance(p, r)
        symmetric &= pq == qp
        bounded &= 0.0 <= pq <= 1.0 and 0.0 <= qr <= 1.0 and 0.0 <= pr <= 1.0
        worst_triangle = max(worst_triangle, pr - (pq + qr))
    ok = symmetric and bounded and worst_triangle <= 1e-12
    check(4, ok, f"10000 triples: symmetric={symmetric} bounded={bounded} "
                 f"max triangle excess={worst_triangle:.3g}")


def test_5_boundary_behavior():
    copy = JointTable(("y",), "z", {((y,), y): c for y, c in (("a", 4), ("b", 9), ("c", 1))})
    product = JointTable(("y",), "z", {((y,), z): a * b for (y, a), (z, b) in
                                       itertools.product((("a", 3), ("b", 5)),
                                                         (("u", 2), ("v", 7), ("w", 1)))})
    lo, hi = resp_average(copy), resp_average(product)
    check(5, lo == 0.0 and hi == 1.0, f"copy table Resp(Z)={lo!r}, product table Resp(Z)={hi!r}")


def test_6_estimator_convergence(scenario):
    n = 200_000
    events = simulate(SimConfig(scenario, n, seed=42))
    analytic = analytic_resp_z(scenario)
    estimate = resp_from_log(events).resp_z
    rates = scenario.system_rates
    within = []
    for state, p_alert in ((SIGNAL, rates.p_tp), (NOISE, rates.p_fp)):
        sub = [e for e in events if e.state == state]
        freq = sum(e.y_values["y_alert"] == "1" for e in sub) / len(sub)
        within.append(abs(freq - p_alert) <= 3 * math.sqrt(p_alert * (1 - p_alert) / len(sub)))
    ok = abs(estimate - analytic) < 0.01 and all(within)
    check(6, ok, f"Resp(Z) simulated={estimate:.5f} analytic={analytic:.6f}; "
                 f"rates within 3 SE: {all(within)}")


@pytest.fixture(scope="module")
def grid():
    return sweep(SweepSpec(e_values=(-1.5, 0.0, 1.5)))


def test_7_sweep_trends(grid):
    problems = []
    for e in (-1.5, 0.0):
        m = grid.matrix(e)
        if not np.all(np.diff(m, axis=0) <= 0.0):
            problems.append(f"e={e}: increases in d_system")
        if not np.all(np.diff(m, axis=1) >= 0.0):
            problems.append(f"e={e}: decreases in d_human")
    axis = np.array(grid.d_human_axis)
    step = axis[1] - axis[0]
    peaks = axis[np.argmax(grid.matrix(1.5), axis=1)]
    interior = bool(np.all((peaks > axis[0]) & (peaks < axis[-1])))
    if not interior or np.max(np.abs(peaks - 1.5)) > step + 1e-12:
        problems.append(f"e=1.5 peaks at d_human in [{peaks.min():.2f}, {peaks.max():.2f}]")
    check(7, not problems,
          "61x61 monotone for e in {-1.5, 0}; e=1.5 peak at d_human "
          f"{peaks.min():.2f}..{peaks.max():.2f}" + (f" problems: {problems}" if problems else ""))


def test_8_reasonability_algebra():
    rng = np.random.default_rng(7)
    argmax_ok, shift_err = True, 0.0
    for _ in range(2000):
        k = int(rng.integers(2, 7))
        u = rng.normal(0, 20, size=k)
        c = float(rng.normal(0, 100))
        a = ActionSet.from_mapping({f"a{i}": float(x) for i, x in enumerate(u)})
        b = ActionSet.from_mapping({f"a{i}": float(x) + c for i, x in enumerate(u)})
        argmax_ok &= reasonability(a, f"a{int(np.argmax(u))}") == 1.0
        shift_err = max(shift_err, max(abs(reasonability(a, n) - reasonability(b, n))
                                       for n in a.actions))
    tie = ActionSet.from_mapping({"x": 3.0, "y": 3.0, "z": 1.0})
    tie_ok = reasonability(tie, "x") == 1.0 and reasonability(tie, "y") == 1.0
    ok = argmax_ok and tie_ok and shift_err <= 1e-12
    check(8, ok, f"argmax=1: {argmax_ok}; tie both 1: {tie_ok}; max shift error={shift_err:.3g}")


def test_9_note():
    RESULTS.append("NOTE  criterion 9: fixed-point anchor of the reasonability figure is "
                   "documented as not reproducible and is not tested")
