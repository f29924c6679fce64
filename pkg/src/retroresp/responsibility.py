"""Retrospective responsibility measures.

* :func:`resp_average` - share of outcome uncertainty left unexplained by the
  system variables over many interactions.
* :func:`resp_information` - the human's share in forming the posterior used
  for one decision, from Jensen-Shannon distances.
* :func:`reasonability` - how defensible one chosen action was, as a SoftMax
  probability ratio against the best action.

SoftMax uses raw expected utilities divided by ``temperature``. Only
``temperature=1`` matches the standard (unscaled) formulation; the measure is
sensitive to the payoff scale, which is why the knob exists.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field

from .errors import DegenerateOutcomeError, ResponsibilityError
from .info_core import JointTable, ProbDist, conditional_entropy, js_distance, outcome_entropy
from .sdt_model import (
    SIGNAL,
    STATES,
    PayoffMatrix,
    Scenario,
    posterior_combined,
    posterior_human_only,
    posterior_system_only,
)

ACCEPT, REJECT = "accept", "reject"
COINCIDENT = "coincident distributions"


def resp_average(t: JointTable, alpha: float = 0.0) -> float:
    """H(Z | Y) / H(Z) for a joint table of system variables and outcome.

    Parameters
    ----------
    t : JointTable
        Plug-in counts. Only the condition variables present in the table are
        conditioned on, so with partially observed system variables the value
        is an upper bound on the fully conditioned one.
    alpha : float
        Add-alpha smoothing applied to every observed (y, z) combination.
        Default 0 is the plain maximum-likelihood estimate.

    Raises
    ------
    DegenerateOutcomeError
        When H(Z) = 0 (the same outcome every time).
    """
    return resp_average_parts(t, alpha)[0]


def resp_average_parts(t: JointTable, alpha: float = 0.0) -> tuple[float, float, float]:
    """``(resp, H(Z), H(Z|Y))`` for :func:`resp_average`."""
    t = t.smoothed(alpha)
    h_z = outcome_entropy(t)
    if h_z <= 0.0:
        raise DegenerateOutcomeError("degenerate outcome distribution: Resp(Z) undefined")
    h_zy = conditional_entropy(t)
    return min(1.0, max(0.0, h_zy / h_z)), h_z, h_zy


@dataclass(frozen=True)
class InformationResponsibility:
    value: float
    d_system: float
    d_human: float
    coincident: bool = False


def resp_information(x_a: ProbDist, x_as: ProbDist, x_ah: ProbDist) -> InformationResponsibility:
    """Human share in forming ``x_a``: D(x_a, x_aS) / (D(x_a, x_aS) + D(x_a, x_aH)).

    Both distances are returned alongside the ratio, since a ratio of two
    tiny distances can look decisive. If all three posteriors coincide the
    ratio is 0/0; it is reported as 0.5 with ``coincident=True``.
    """
    d_s = js_distance(x_a, x_as)
    d_h = js_distance(x_a, x_ah)
    denom = d_s + d_h
    if denom == 0.0:
        return InformationResponsibility(0.5, d_s, d_h, coincident=True)
    return InformationResponsibility(d_s / denom, d_s, d_h)


@dataclass(frozen=True)
class ActionSet:
    """Action names with their expected utilities, in a fixed order."""

    actions: tuple[str, ...]
    utilities: Mapping[str, float]

    def __post_init__(self):
        actions = tuple(self.actions)
        if len(actions) < 2:
            raise ResponsibilityError("an action set needs at least 2 actions")
        if len(set(actions)) != len(actions):
            raise ResponsibilityError(f"duplicate actions in {actions}")
        if set(self.utilities) != set(actions):
            raise ResponsibilityError("every action needs exactly one utility")
        utilities = {a: float(self.utilities[a]) for a in actions}
        for a, u in utilities.items():
            if not math.isfinite(u):
                raise ResponsibilityError(f"utility of {a!r} is not finite")
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "utilities", utilities)

    @classmethod
    def from_mapping(cls, utilities: Mapping[str, float]) -> ActionSet:
        return cls(tuple(utilities), dict(utilities))

    @property
    def best_utility(self) -> float:
        return max(self.utilities.values())


def _check_temperature(temperature: float) -> None:
    if not (temperature > 0 and math.isfinite(temperature)):
        raise ResponsibilityError(f"temperature must be finite and > 0, got {temperature!r}")


def softmax_probs(a: ActionSet, temperature: float = 1.0) -> dict[str, float]:
    _check_temperature(temperature)
    top = a.best_utility
    weights = {k: math.exp((u - top) / temperature) for k, u in a.utilities.items()}
    total = math.fsum(weights.values())
    return {k: w / total for k, w in weights.items()}


def reasonability(a: ActionSet, chosen: str, temperature: float = 1.0) -> float:
    """SoftMax probability of ``chosen`` relative to the most probable action.

    Equals ``exp((U(chosen) - U*) / temperature)``: exactly 1 for any utility
    maximizer, including ties.
    """
    _check_temperature(temperature)
    if chosen not in a.utilities:
        raise ResponsibilityError(f"unknown action {chosen!r}; expected one of {a.actions}")
    return math.exp((a.utilities[chosen] - a.best_utility) / temperature)


def expected_values(x_a: ProbDist, payoffs: PayoffMatrix) -> ActionSet:
    """Expected payoff of accepting and rejecting under posterior ``x_a``.

    Written as ``V_FP + P*(V_TP - V_FP)`` and ``V_TN + P*(V_FN - V_TN)`` so only
    the signal probability enters; this is algebraically the usual
    ``P*V_TP + (1-P)*V_FP`` form without a second rounded component.
    """
    p_signal = x_a.aligned_to(STATES)[0]
    ev_accept = payoffs.v_fp + p_signal * (payoffs.v_tp - payoffs.v_fp)
    ev_reject = payoffs.v_tn + p_signal * (payoffs.v_fn - payoffs.v_tn)
    return ActionSet((ACCEPT, REJECT), {ACCEPT: ev_accept, REJECT: ev_reject})


def _dist_to_json(d: ProbDist) -> dict[str, float]:
    return d.as_dict()


@dataclass(frozen=True)
class AnalysisReport:
    """Everything computed for one analysed event."""

    x_a: ProbDist
    x_as: ProbDist
    x_ah: ProbDist
    d_to_system: float
    d_to_human: float
    resp_xa: float
    ev_per_action: dict[str, float]
    softmax_per_action: dict[str, float]
    rsnble_per_action: dict[str, float]
    flags: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "x_a": _dist_to_json(self.x_a),
            "x_a_system_only": _dist_to_json(self.x_as),
            "x_a_human_only": _dist_to_json(self.x_ah),
            "d_system": self.d_to_system,
            "d_human": self.d_to_human,
            "resp_information": self.resp_xa,
            "expected_values": dict(self.ev_per_action),
            "softmax": dict(self.softmax_per_action),
            "reasonability": dict(self.rsnble_per_action),
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> AnalysisReport:
        return cls(
            x_a=ProbDist.from_mapping(data["x_a"]),
            x_as=ProbDist.from_mapping(data["x_a_system_only"]),
            x_ah=ProbDist.from_mapping(data["x_a_human_only"]),
            d_to_system=float(data["d_system"]),
            d_to_human=float(data["d_human"]),
            resp_xa=float(data["resp_information"]),
            ev_per_action=dict(data["expected_values"]),
            softmax_per_action=dict(data["softmax"]),
            rsnble_per_action=dict(data["reasonability"]),
            flags=tuple(data["flags"]),
        )


def analyze_event(scenario: Scenario, system_output: str, e: float, chosen: str) -> AnalysisReport:
    """Analyse one interaction where the human's choice set the outcome.

    ``system_output`` is what the system reported (``'signal'`` or
    ``'noise'``), ``e`` the value the human observed, ``chosen`` the action
    taken (``'accept'`` or ``'reject'``).
    """
    if chosen not in (ACCEPT, REJECT):
        raise ResponsibilityError(f"chosen action must be 'accept' or 'reject', got {chosen!r}")
    e = float(e)
    if not math.isfinite(e):
        raise ResponsibilityError(f"observed value must be finite, got {e!r}")
    x_as = posterior_system_only(scenario, system_output)
    x_ah = posterior_human_only(scenario, e)
    x_a = posterior_combined(scenario, system_output, e)
    info = resp_information(x_a, x_as, x_ah)
    actions = expected_values(x_a, scenario.payoffs)
    temperature = scenario.softmax_temperature
    flags = [COINCIDENT] if info.coincident else []
    rsnble = {k: reasonability(actions, k, temperature) for k in actions.actions}
    if rsnble[chosen] < 1.0:
        flags.append(f"chosen action {chosen!r} is not the expected-value maximizer")
    return AnalysisReport(
        x_a=x_a,
        x_as=x_as,
        x_ah=x_ah,
        d_to_system=info.d_system,
        d_to_human=info.d_human,
        resp_xa=info.value,
        ev_per_action=dict(actions.utilities),
        softmax_per_action=softmax_probs(actions, temperature),
        rsnble_per_action=rsnble,
        flags=tuple(flags),
    )


__all__ = [
    "ACCEPT", "REJECT", "SIGNAL", "ActionSet", "AnalysisReport", "InformationResponsibility",
    "analyze_event", "expected_values", "reasonability", "resp_average", "resp_average_parts",
    "resp_information", "softmax_probs",
]
