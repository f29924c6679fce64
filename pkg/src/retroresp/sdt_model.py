"""Equal-variance Gaussian signal detection model of a human and a binary alert system.

Noise evidence is N(0, 1) and signal evidence is N(d', 1) for both the human
and the system; each observes its own, conditionally independent, property
of the world. The normal CDF is evaluated through ``math.erfc``, which is
accurate to a few ulps over the whole real line (no series truncation), so
tail probabilities such as 1 - Phi(8) keep full relative precision.
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Union

from .errors import ScenarioError
from .info_core import ProbDist

SIGNAL, NOISE = "signal", "noise"
STATES = (SIGNAL, NOISE)

_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_sf(x: float) -> float:
    """Upper tail 1 - Phi(x), without cancellation for large x."""
    return 0.5 * math.erfc(x / _SQRT2)


def normal_logpdf(x: float) -> float:
    return -0.5 * x * x - _LOG_SQRT_2PI


@dataclass(frozen=True)
class PayoffMatrix:
    """Payoffs for true/false positives and negatives.

    A correct response must beat the incorrect one in each true state:
    ``v_tp > v_fn`` and ``v_tn > v_fp``.
    """

    v_tp: float
    v_tn: float
    v_fp: float
    v_fn: float

    def __post_init__(self):
        for name in ("v_tp", "v_tn", "v_fp", "v_fn"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ScenarioError(f"payoff {name} must be finite")
            object.__setattr__(self, name, value)
        if not self.v_tp > self.v_fn:
            raise ScenarioError("payoffs require v_tp > v_fn")
        if not self.v_tn > self.v_fp:
            raise ScenarioError("payoffs require v_tn > v_fp")

    @classmethod
    def from_sequence(cls, values) -> PayoffMatrix:
        """Build from ``(v_tp, v_tn, v_fp, v_fn)``, the conventional listing order."""
        values = list(values)
        if len(values) != 4:
            raise ScenarioError("expected 4 payoffs: v_tp, v_tn, v_fp, v_fn")
        return cls(*values)

    @property
    def accept_threshold(self) -> float:
        """Posterior signal probability above which accepting has the higher EV."""
        gain_tn = self.v_tn - self.v_fp
        return gain_tn / (gain_tn + (self.v_tp - self.v_fn))


@dataclass(frozen=True)
class ConfusionRates:
    p_tp: float
    p_fn: float
    p_fp: float
    p_tn: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_tp, self.p_fn, self.p_fp, self.p_tn)

    def likelihood(self, system_output: str) -> tuple[float, float]:
        """P(output | signal), P(output | noise)."""
        if system_output == SIGNAL:
            return self.p_tp, self.p_fp
        if system_output == NOISE:
            return self.p_fn, self.p_tn
        raise ScenarioError(f"system output must be 'signal' or 'noise', got {system_output!r}")


Beta = Union[float, str]

_SCENARIO_KEYS = {"prior_signal", "d_prime_human", "d_prime_system", "system_beta",
                  "payoffs", "softmax_temperature"}
_PAYOFF_KEYS = ("v_tp", "v_tn", "v_fp", "v_fn")


def _positive(name: str, value) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ScenarioError(f"{name} must be a number, got {value!r}") from None
    if not (math.isfinite(value) and value > 0.0):
        raise ScenarioError(f"{name} must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class Scenario:
    """Environment, human and system parameters for one binary detection setting."""

    prior_signal: float
    d_prime_human: float
    d_prime_system: float
    system_beta: Beta
    payoffs: PayoffMatrix
    softmax_temperature: float = 1.0

    def __post_init__(self):
        p = float(self.prior_signal)
        if not 0.0 < p < 1.0:
            raise ScenarioError(f"prior_signal must lie in (0, 1), got {p!r}")
        object.__setattr__(self, "prior_signal", p)
        object.__setattr__(self, "d_prime_human", _positive("d_prime_human", self.d_prime_human))
        object.__setattr__(self, "d_prime_system", _positive("d_prime_system", self.d_prime_system))
        if isinstance(self.system_beta, str):
            if self.system_beta != "optimal":
                raise ScenarioError(
                    f"system_beta must be a positive number or 'optimal', got {self.system_beta!r}")
        else:
            object.__setattr__(self, "system_beta", _positive("system_beta", self.system_beta))
        if not isinstance(self.payoffs, PayoffMatrix):
            raise ScenarioError("payoffs must be a PayoffMatrix")
        object.__setattr__(self, "softmax_temperature",
                           _positive("softmax_temperature", self.softmax_temperature))

    @property
    def resolved_beta(self) -> float:
        if self.system_beta == "optimal":
            return optimal_beta(self.prior_signal, self.payoffs)
        return self.system_beta

    @property
    def system_threshold(self) -> float:
        return beta_to_threshold(self.resolved_beta, self.d_prime_system)

    @property
    def system_rates(self) -> ConfusionRates:
        return confusion_rates(self.d_prime_system, self.system_threshold)

    @property
    def prior(self) -> ProbDist:
        return ProbDist(STATES, (self.prior_signal, 1.0 - self.prior_signal))

    def replace(self, **changes) -> Scenario:
        fields = {**self.to_dict(), **changes}
        if isinstance(fields["payoffs"], Mapping):
            fields["payoffs"] = PayoffMatrix(**fields["payoffs"])
        return Scenario(**fields)

    def to_dict(self) -> dict:
        return {
            "prior_signal": self.prior_signal,
            "d_prime_human": self.d_prime_human,
            "d_prime_system": self.d_prime_system,
            "system_beta": self.system_beta,
            "payoffs": asdict(self.payoffs),
            "softmax_temperature": self.softmax_temperature,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> Scenario:
        if not isinstance(data, Mapping):
            raise ScenarioError("scenario must be a JSON object")
        for key in data:
            if key not in _SCENARIO_KEYS:
                raise ScenarioError(f"unknown scenario key {key!r}")
        required = _SCENARIO_KEYS - {"softmax_temperature"}
        missing = sorted(required - set(data))
        if missing:
            raise ScenarioError(f"missing scenario key(s): {', '.join(missing)}")
        payoffs = data["payoffs"]
        if not isinstance(payoffs, Mapping):
            raise ScenarioError("payoffs must be an object")
        for key in payoffs:
            if key not in _PAYOFF_KEYS:
                raise ScenarioError(f"unknown payoffs key {key!r}")
        missing = [k for k in _PAYOFF_KEYS if k not in payoffs]
        if missing:
            raise ScenarioError(f"missing payoffs key(s): {', '.join(missing)}")
        beta = data["system_beta"]
        if isinstance(beta, bool) or not isinstance(beta, (int, float, str)):
            raise ScenarioError(f"system_beta must be a number or 'optimal', got {beta!r}")
        for key in ("prior_signal", "d_prime_human", "d_prime_system", "softmax_temperature"):
            if key in data and (isinstance(data[key], bool) or not isinstance(data[key], (int, float))):
                raise ScenarioError(f"{key} must be a number, got {data[key]!r}")
        return cls(
            prior_signal=data["prior_signal"],
            d_prime_human=data["d_prime_human"],
            d_prime_system=data["d_prime_system"],
            system_beta=beta,
            payoffs=PayoffMatrix(**{k: float(payoffs[k]) for k in _PAYOFF_KEYS}),
            softmax_temperature=data.get("softmax_temperature", 1.0),
        )


def load_scenario(path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON ({exc})") from None
    return Scenario.from_dict(data)


def reference_scenario(**overrides) -> Scenario:
    """The standard worked example: P_s=0.2, d'_H=1.5, d'_S=2, payoffs 10/10/-10/-20."""
    base = Scenario(
        prior_signal=0.2,
        d_prime_human=1.5,
        d_prime_system=2.0,
        system_beta="optimal",
        payoffs=PayoffMatrix(v_tp=10.0, v_tn=10.0, v_fp=-10.0, v_fn=-20.0),
    )
    return base.replace(**overrides) if overrides else base


def gaussian_density(e: float, is_signal: bool, d_prime: float) -> float:
    mean = d_prime if is_signal else 0.0
    return math.exp(normal_logpdf(e - mean))


def optimal_beta(prior_signal: float, payoffs: PayoffMatrix) -> float:
    """Likelihood-ratio criterion that maximizes expected payoff for a lone observer."""
    if not 0.0 < prior_signal < 1.0:
        raise ScenarioError(f"prior_signal must lie in (0, 1), got {prior_signal!r}")
    gain_tn = payoffs.v_tn - payoffs.v_fp
    gain_tp = payoffs.v_tp - payoffs.v_fn
    if gain_tn <= 0 or gain_tp <= 0:
        raise ScenarioError("degenerate payoffs: correct responses must beat errors")
    return ((1.0 - prior_signal) / prior_signal) * (gain_tn / gain_tp)


def beta_to_threshold(beta: float, d_prime: float) -> float:
    """Evidence value where f_S(x) / f_N(x) equals ``beta``."""
    if beta <= 0 or d_prime <= 0:
        raise ScenarioError("beta and d_prime must be > 0")
    return math.log(beta) / d_prime + d_prime / 2.0


def confusion_rates(d_prime: float, threshold: float) -> ConfusionRates:
    if not d_prime > 0:
        raise ScenarioError(f"d_prime must be > 0, got {d_prime!r}")
    p_tp = normal_sf(threshold - d_prime)
    p_fp = normal_sf(threshold)
    return ConfusionRates(p_tp, normal_cdf(threshold - d_prime), p_fp, normal_cdf(threshold))


def log_density_ratio(e: float, d_prime: float) -> float:
    """ln f_S(e) - ln f_N(e) under the equal-variance model."""
    return d_prime * (e - 0.5 * d_prime)


def _posterior(prior_s: float, like_s: float, logf_s: float,
               prior_n: float, like_n: float, logf_n: float) -> ProbDist:
    """Normalize prior x likelihood x density for the two states.

    Densities enter as logs and are rescaled so the larger equals 1, which
    keeps the product in linear space (exact Bayes when densities are absent)
    without underflow for extreme observed values.
    """
    top = max(logf_s, logf_n)
    ws = prior_s * like_s * math.exp(logf_s - top)
    wn = prior_n * like_n * math.exp(logf_n - top)
    total = ws + wn
    if total > 0.0 and math.isfinite(total):
        return ProbDist(STATES, (ws / total, wn / total))
    log_s = _log(prior_s) + _log(like_s) + logf_s
    log_n = _log(prior_n) + _log(like_n) + logf_n
    if log_s == -math.inf and log_n == -math.inf:
        raise ScenarioError("posterior undefined: zero denominator")
    top = max(log_s, log_n)
    ws, wn = math.exp(log_s - top), math.exp(log_n - top)
    return ProbDist(STATES, (ws / (ws + wn), wn / (ws + wn)))


def _log(x: float) -> float:
    return math.log(x) if x > 0.0 else -math.inf


def bayes_update(prior: ProbDist, like_signal: float, like_noise: float) -> ProbDist:
    """Posterior over (signal, noise) after one observation with the given likelihoods."""
    p_s, p_n = prior.aligned_to(STATES)
    return _posterior(p_s, like_signal, 0.0, p_n, like_noise, 0.0)


def posterior_system_only(scenario: Scenario, system_output: str) -> ProbDist:
    """Posterior from the prior and the system's classification alone.

    With ``system_output='signal'`` this is also P(signal | alert); with
    ``'noise'``, P(signal | no alert).
    """
    like_s, like_n = scenario.system_rates.likelihood(system_output)
    return bayes_update(scenario.prior, like_s, like_n)


def posterior_human_only(scenario: Scenario, e: float) -> ProbDist:
    d = scenario.d_prime_human
    p = scenario.prior_signal
    return _posterior(p, 1.0, normal_logpdf(e - d), 1.0 - p, 1.0, normal_logpdf(e))


def posterior_combined(scenario: Scenario, system_output: str, e: float) -> ProbDist:
    """Posterior from prior, system output and the human's observed value ``e``.

    The two likelihoods multiply because the system and the human observe
    conditionally independent evidence.
    """
    like_s, like_n = scenario.system_rates.likelihood(system_output)
    d = scenario.d_prime_human
    p = scenario.prior_signal
    return _posterior(p, like_s, normal_logpdf(e - d), 1.0 - p, like_n, normal_logpdf(e))
