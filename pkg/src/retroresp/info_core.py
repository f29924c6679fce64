"""Information-theoretic primitives over small discrete distributions.

All quantities are in bits. Zero-probability terms follow the usual limit
conventions (0 * log 0 = 0); nothing is smoothed with an epsilon.
"""

from __future__ import annotations

import math
from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .errors import InvalidDistributionError, ResponsibilityError

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class ProbDist:
    """A discrete distribution over named categories.

    Parameters
    ----------
    labels : sequence of str
        Category names, at least two, unique.
    probs : sequence of float
        Probability mass per label. Must be nonnegative and sum to 1 within
        ``NORMALIZATION_TOL``.
    renormalize : bool
        Divide ``probs`` by their sum instead of rejecting unnormalized input.
    """

    labels: tuple[str, ...]
    probs: tuple[float, ...]
    renormalize: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        probs = tuple(float(p) for p in self.probs)
        if len(labels) != len(probs):
            raise InvalidDistributionError(
                f"{len(labels)} labels but {len(probs)} probabilities")
        if len(labels) < 2:
            raise InvalidDistributionError("a distribution needs at least 2 categories")
        if len(set(labels)) != len(labels):
            raise InvalidDistributionError(f"duplicate labels in {labels}")
        for p in probs:
            if not math.isfinite(p) or p < 0.0:
                raise InvalidDistributionError(f"invalid probability {p!r}")
        total = math.fsum(probs)
        if self.renormalize:
            if total <= 0.0:
                raise InvalidDistributionError("cannot renormalize zero mass")
            probs = tuple(p / total for p in probs)
        elif abs(total - 1.0) > NORMALIZATION_TOL:
            raise InvalidDistributionError(
                f"probabilities sum to {total!r}, not 1")
        for p in probs:
            if p > 1.0 + NORMALIZATION_TOL:
                raise InvalidDistributionError(f"probability {p!r} exceeds 1")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float], renormalize: bool = False) -> ProbDist:
        return cls(tuple(mapping), tuple(mapping.values()), renormalize=renormalize)

    def __getitem__(self, label: str) -> float:
        try:
            return self.probs[self.labels.index(label)]
        except ValueError:
            raise KeyError(label) from None

    def __len__(self) -> int:
        return len(self.probs)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.probs))

    def aligned_to(self, labels: Sequence[str]) -> tuple[float, ...]:
        """Probabilities reordered to follow ``labels`` (same label set required)."""
        if tuple(labels) == self.labels:
            return self.probs
        if sorted(labels) != sorted(self.labels):
            raise InvalidDistributionError(
                f"label mismatch: {tuple(labels)} vs {self.labels}")
        return tuple(self[label] for label in labels)


def _paired(p: ProbDist, q: ProbDist) -> tuple[tuple[float, ...], tuple[float, ...]]:
    return p.probs, q.aligned_to(p.labels)


def _entropy_of_masses(masses: Iterable[float]) -> float:
    masses = [m for m in masses if m > 0.0]
    total = math.fsum(masses)
    if total <= 0.0:
        raise ResponsibilityError("entropy of zero total mass")
    h = -math.fsum((m / total) * math.log2(m / total) for m in masses)
    return max(0.0, h)


def entropy(d: ProbDist) -> float:
    """Shannon entropy of ``d`` in bits, clipped to ``[0, log2 N]``."""
    h = -math.fsum(p * math.log2(p) for p in d.probs if p > 0.0)
    return min(max(0.0, h), math.log2(len(d)))


def kld(r: ProbDist, s: ProbDist) -> float:
    """Kullback-Leibler divergence KLD(r || s) in bits.

    Raises
    ------
    InvalidDistributionError
        If ``r`` puts mass where ``s`` has none.
    """
    rp, sp = _paired(r, s)
    terms = []
    for a, b in zip(rp, sp):
        if a == 0.0:
            continue
        if b == 0.0:
            raise InvalidDistributionError(
                "KLD undefined: absolute continuity violated")
        terms.append(a * math.log2(a / b))
    return max(0.0, math.fsum(terms))


def _js_term(u: float) -> float:
    """(1+u) ln(1+u) + (1-u) ln(1-u) for u in [-1, 1], accurate near u = 0."""
    u = abs(u)
    if u < 0.1:
        # Series sum_k u^(2k) / (k (2k - 1)); the terms shrink by >= 100x each step.
        u2, power, total = u * u, u * u, 0.0
        for k in range(1, 12):
            total += power / (k * (2 * k - 1))
            power *= u2
        return total
    tail = 0.0 if u == 1.0 else (1.0 - u) * math.log1p(-u)
    return (1.0 + u) * math.log1p(u) + tail


def jsd(p: ProbDist, q: ProbDist) -> float:
    """Jensen-Shannon divergence in bits, always within ``[0, 1]``.

    Each category contributes ``(a + b) / 4 * g(u) / ln 2`` with
    ``u = (a - b) / (a + b)``, which is the usual midpoint-KLD sum regrouped so
    that no term is negative. Nearly equal distributions therefore keep full
    relative precision instead of cancelling down to rounding noise.
    Categories where both sides are zero drop out.
    """
    pp, qp = _paired(p, q)
    terms = []
    for a, b in zip(pp, qp):
        s = a + b
        if s > 0.0:
            terms.append(s * _js_term((a - b) / s))
    value = math.fsum(terms) / (4.0 * math.log(2.0))
    return min(1.0, max(0.0, value))


def js_distance(p: ProbDist, q: ProbDist) -> float:
    """Jensen-Shannon distance, the square root of :func:`jsd`. A metric on distributions."""
    return math.sqrt(jsd(p, q))


@dataclass(frozen=True)
class JointTable:
    """Joint counts (or masses) of condition-variable tuples and an outcome.

    ``cells`` maps ``(condition_tuple, outcome_value)`` to a nonnegative mass.
    Missing cells are zero.
    """

    condition_vars: tuple[str, ...]
    outcome_var: str
    cells: Mapping[tuple[tuple[Hashable, ...], Hashable], float]

    def __post_init__(self):
        object.__setattr__(self, "condition_vars", tuple(self.condition_vars))
        arity = len(self.condition_vars)
        cells = {}
        for key, mass in self.cells.items():
            try:
                cond, z = key
            except (TypeError, ValueError):
                raise ResponsibilityError(f"malformed cell key {key!r}") from None
            cond = tuple(cond)
            if len(cond) != arity:
                raise ResponsibilityError(
                    f"cell key {cond!r} has arity {len(cond)}, expected {arity}")
            mass = float(mass)
            if not math.isfinite(mass) or mass < 0.0:
                raise ResponsibilityError(f"invalid cell mass {mass!r}")
            cells[(cond, z)] = cells.get((cond, z), 0.0) + mass
        object.__setattr__(self, "cells", cells)

    @property
    def total(self) -> float:
        return math.fsum(self.cells.values())

    def outcome_values(self) -> list:
        return sorted({z for _, z in self.cells}, key=repr)

    def condition_values(self) -> list:
        return sorted({c for c, _ in self.cells}, key=repr)

    def outcome_marginal(self) -> dict:
        out: dict = {}
        for (_, z), m in self.cells.items():
            out.setdefault(z, []).append(m)
        return {z: math.fsum(ms) for z, ms in out.items()}

    def condition_marginal(self) -> dict:
        out: dict = {}
        for (c, _), m in self.cells.items():
            out.setdefault(c, []).append(m)
        return {c: math.fsum(ms) for c, ms in out.items()}

    def smoothed(self, alpha: float) -> JointTable:
        """Add ``alpha`` to every (observed condition, observed outcome) cell."""
        if alpha < 0:
            raise ResponsibilityError("smoothing alpha must be >= 0")
        if alpha == 0:
            return self
        cells = {(c, z): self.cells.get((c, z), 0.0) + alpha
                 for c in self.condition_values() for z in self.outcome_values()}
        return JointTable(self.condition_vars, self.outcome_var, cells)


def outcome_entropy(t: JointTable) -> float:
    """H(Z) of the outcome marginal, in bits."""
    if not t.cells or t.total <= 0.0:
        raise ResponsibilityError("empty joint table")
    return _entropy_of_masses(t.outcome_marginal().values())


def conditional_entropy(t: JointTable) -> float:
    """H(Z | condition variables) in bits, as sum over y of p(y) * H(Z | Y=y)."""
    if not t.cells or t.total <= 0.0:
        raise ResponsibilityError("empty joint table")
    by_cond: dict = {}
    for (c, _), m in t.cells.items():
        by_cond.setdefault(c, []).append(m)
    total = t.total
    weights, parts = [], []
    for masses in by_cond.values():
        w = math.fsum(masses)
        if w <= 0.0:
            continue
        weights.append(w / total)
        parts.append(_entropy_of_masses(masses))
    # Shifted weighted mean: exact when every conditional entropy is equal.
    base = min(parts)
    h = base + math.fsum(w * (h_y - base) for w, h_y in zip(weights, parts))
    return max(0.0, h)
