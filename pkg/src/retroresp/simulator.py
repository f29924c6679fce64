"""Seeded Monte-Carlo interaction logs and the matching quadrature oracle for Resp(Z).

Random numbers come from numpy's PCG64 bit generator wrapped in
``numpy.random.Generator``, one stream per run. Normal variates use
``Generator.standard_normal`` (numpy's ziggurat), whose output stream numpy
keeps stable across platforms for a given seed. Draw order for ``n`` trials:

1. ``n`` uniforms for the true state (signal when ``u < P_s``),
2. ``n`` normals for the system's evidence,
3. ``n`` normals for the human's observed value ``e``,
4. ``n`` uniforms for the SoftMax choice (``softmax_sample`` policy only).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate

from .errors import QuadratureError, ScenarioError
from .event_log import EventRecord
from .info_core import JointTable
from .responsibility import ACCEPT, REJECT, expected_values, resp_average_parts
from .sdt_model import NOISE, SIGNAL, Scenario, normal_logpdf, posterior_combined

MAXIMIZE_EV = "maximize_ev"
SOFTMAX_SAMPLE = "softmax_sample"
POLICIES = (MAXIMIZE_EV, SOFTMAX_SAMPLE)
ALERT, NO_ALERT = "1", "0"
RNG_NAME = "numpy.random.PCG64"

QUAD_TOL = 1e-9
_E_HALF_WIDTH = 12.0


@dataclass(frozen=True)
class SimConfig:
    scenario: Scenario
    n_trials: int
    seed: int
    human_policy: str = MAXIMIZE_EV

    def __post_init__(self):
        if isinstance(self.n_trials, bool) or not isinstance(self.n_trials, (int, np.integer)):
            raise ScenarioError(f"n_trials must be an integer, got {self.n_trials!r}")
        if self.n_trials < 1:
            raise ScenarioError(f"n_trials must be >= 1, got {self.n_trials}")
        if not 0 <= int(self.seed) < 2**64:
            raise ScenarioError("seed must be an unsigned 64-bit integer")
        if self.human_policy not in POLICIES:
            raise ScenarioError(f"human_policy must be one of {POLICIES}, got {self.human_policy!r}")

    def resolved(self) -> dict:
        """Config with the system criterion resolved to numbers, for provenance sidecars."""
        s = self.scenario
        rates = s.system_rates
        return {
            "scenario": s.to_dict(),
            "resolved_system_beta": s.resolved_beta,
            "system_threshold": s.system_threshold,
            "system_rates": {"p_tp": rates.p_tp, "p_fn": rates.p_fn,
                             "p_fp": rates.p_fp, "p_tn": rates.p_tn},
            "n_trials": int(self.n_trials),
            "seed": int(self.seed),
            "human_policy": self.human_policy,
            "rng": RNG_NAME,
        }


def write_sidecar(config: SimConfig, path) -> None:
    Path(path).write_text(json.dumps(config.resolved(), indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def _logit(p: float) -> float:
    return math.log(p) - math.log1p(-p)


def _system_llr(scenario: Scenario) -> tuple[float, float]:
    """Log likelihood ratio signal:noise carried by an alert and by no alert."""
    r = scenario.system_rates
    with np.errstate(divide="ignore"):
        alert = float(np.log(r.p_tp) - np.log(r.p_fp))
        quiet = float(np.log(r.p_fn) - np.log(r.p_tn))
    return alert, quiet


def _accept_probability(scenario: Scenario, policy: str, log_odds: np.ndarray) -> np.ndarray:
    p_hat = 1.0 / (1.0 + np.exp(-log_odds))
    pay = scenario.payoffs
    ev_accept = pay.v_fp + p_hat * (pay.v_tp - pay.v_fp)
    ev_reject = pay.v_tn + p_hat * (pay.v_fn - pay.v_tn)
    if policy == MAXIMIZE_EV:
        return (ev_accept > ev_reject).astype(float)
    return 1.0 / (1.0 + np.exp((ev_reject - ev_accept) / scenario.softmax_temperature))


def simulate(config: SimConfig) -> list[EventRecord]:
    """Generate ``config.n_trials`` interactions; identical configs give identical logs.

    Each trial draws the state, thresholds the system's evidence into
    ``y_alert`` (``"1"`` alert / ``"0"`` none), draws the human's ``e``,
    forms the combined posterior and picks ``z`` by the configured policy.
    The human dictates the outcome, so ``x_s == z``.
    """
    s = config.scenario
    n = int(config.n_trials)
    rng = np.random.Generator(np.random.PCG64(int(config.seed)))
    is_signal = rng.random(n) < s.prior_signal
    system_evidence = rng.standard_normal(n) + s.d_prime_system * is_signal
    e = rng.standard_normal(n) + s.d_prime_human * is_signal
    alert = system_evidence > s.system_threshold

    llr_alert, llr_quiet = _system_llr(s)
    d_h = s.d_prime_human
    log_odds = (_logit(s.prior_signal) + np.where(alert, llr_alert, llr_quiet)
                + d_h * (e - 0.5 * d_h))
    p_accept = _accept_probability(s, config.human_policy, log_odds)
    if config.human_policy == MAXIMIZE_EV:
        accept = p_accept > 0.5
    else:
        accept = rng.random(n) < p_accept

    events = []
    for i in range(n):
        z = ACCEPT if accept[i] else REJECT
        events.append(EventRecord(
            trial=i + 1,
            y_values={"y_alert": ALERT if alert[i] else NO_ALERT},
            z=z,
            e=float(e[i]),
            state=SIGNAL if is_signal[i] else NOISE,
            x_s=z,
        ))
    return events


def decision_boundary(scenario: Scenario, system_output: str) -> float:
    """Observed value above which accepting has the higher expected value."""
    llr_alert, llr_quiet = _system_llr(scenario)
    llr = llr_alert if system_output == SIGNAL else llr_quiet
    d_h = scenario.d_prime_human
    target = _logit(scenario.payoffs.accept_threshold)
    return (target - _logit(scenario.prior_signal) - llr) / d_h + 0.5 * d_h


def _accept_given_e(scenario: Scenario, policy: str, system_output: str, e: float) -> float:
    # Scalar path through the library's own posterior and EV code.
    actions = expected_values(posterior_combined(scenario, system_output, e), scenario.payoffs)
    ev_a, ev_r = actions.utilities[ACCEPT], actions.utilities[REJECT]
    if policy == MAXIMIZE_EV:
        return 1.0 if ev_a > ev_r else 0.0
    return 1.0 / (1.0 + math.exp((ev_r - ev_a) / scenario.softmax_temperature))


def accept_probabilities(scenario: Scenario, policy: str = MAXIMIZE_EV) -> dict[tuple[str, str], float]:
    """P(z = accept | state, system output) by adaptive quadrature over ``e``.

    Keys are ``(state, system_output)`` with values in ``{'signal', 'noise'}``.

    Raises
    ------
    QuadratureError
        If any integral's error estimate exceeds ``QUAD_TOL``.
    """
    if policy not in POLICIES:
        raise ScenarioError(f"policy must be one of {POLICIES}")
    out = {}
    for state in (SIGNAL, NOISE):
        mean = scenario.d_prime_human if state == SIGNAL else 0.0
        lo, hi = mean - _E_HALF_WIDTH, mean + _E_HALF_WIDTH
        for output in (SIGNAL, NOISE):
            def integrand(e, _mean=mean, _out=output):
                return math.exp(normal_logpdf(e - _mean)) * _accept_given_e(scenario, policy, _out, e)

            points = None
            if policy == MAXIMIZE_EV:
                b = decision_boundary(scenario, output)
                if lo < b < hi:
                    points = [b]
            value, abserr, info = integrate.quad(
                integrand, lo, hi, points=points, epsabs=QUAD_TOL / 10, epsrel=1e-11,
                limit=500, full_output=1)[:3]
            if not abserr <= QUAD_TOL:
                raise QuadratureError(
                    f"quadrature for state={state}, output={output} did not converge: "
                    f"value={value!r}, error estimate={abserr!r}, evaluations={info['neval']}")
            out[(state, output)] = min(1.0, max(0.0, value))
    return out


def analytic_joint(scenario: Scenario, policy: str = MAXIMIZE_EV) -> JointTable:
    """Exact joint distribution of (y_alert, z) under the generative model."""
    accept = accept_probabilities(scenario, policy)
    rates = scenario.system_rates
    prior = {SIGNAL: scenario.prior_signal, NOISE: 1.0 - scenario.prior_signal}
    p_output = {(SIGNAL, SIGNAL): rates.p_tp, (SIGNAL, NOISE): rates.p_fn,
                (NOISE, SIGNAL): rates.p_fp, (NOISE, NOISE): rates.p_tn}
    y_code = {SIGNAL: ALERT, NOISE: NO_ALERT}
    cells: dict = {}
    for (state, output), pa in accept.items():
        w = prior[state] * p_output[(state, output)]
        for z, pz in ((ACCEPT, pa), (REJECT, 1.0 - pa)):
            key = ((y_code[output],), z)
            cells[key] = cells.get(key, 0.0) + w * pz
    return JointTable(("y_alert",), "z", cells)


def analytic_resp_z(scenario: Scenario, policy: str = MAXIMIZE_EV) -> float:
    """Resp(Z) implied by the model itself, the limit of simulated estimates."""
    return resp_average_parts(analytic_joint(scenario, policy))[0]
