"""Event-log ingestion and Resp(Z) estimation over repeated interactions.

CSV layout: header row, comma separated, UTF-8. Required column ``z`` (the
implemented action); one or more ``y_*`` columns holding discrete system
variables; optional ``trial``, ``e``, ``state`` and ``x_s``. Other columns are
ignored. Only the ``y_*`` columns condition Resp(Z); ``e`` is never binned
implicitly.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import DegenerateOutcomeError, EventLogError
from .info_core import JointTable
from .responsibility import resp_average_parts

Y_PREFIX = "y_"


@dataclass(frozen=True)
class EventRecord:
    trial: int
    y_values: dict[str, str]
    z: str
    e: Optional[float] = None
    state: Optional[str] = None
    x_s: Optional[str] = None

    def y_tuple(self, names: Sequence[str]) -> tuple[str, ...]:
        return tuple(self.y_values[n] for n in names)


def _y_names(events: Sequence[EventRecord]) -> tuple[str, ...]:
    names = tuple(events[0].y_values)
    for ev in events:
        if set(ev.y_values) != set(names):
            raise EventLogError(
                f"trial {ev.trial}: y-variables {sorted(ev.y_values)} differ from {sorted(names)}")
    return names


def validate_events(events: Sequence[EventRecord]) -> None:
    if not events:
        raise EventLogError("event log is empty")
    _y_names(events)
    for prev, cur in zip(events, events[1:]):
        if cur.trial <= prev.trial:
            raise EventLogError(
                f"trial indices must be strictly increasing ({prev.trial} then {cur.trial})")


def load_events(path) -> list[EventRecord]:
    """Read and validate an event CSV.

    Raises
    ------
    EventLogError
        On a missing ``z`` column, no ``y_*`` columns, empty ``z`` or ``y_*``
        cells, non-numeric ``e`` or ``trial``, or non-increasing trials.
        Messages name the offending file row (header is row 1).
    """
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise EventLogError(f"cannot open {path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EventLogError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if "z" not in header:
            raise EventLogError(f"{path}: missing required column 'z'")
        y_cols = [h for h in header if h.startswith(Y_PREFIX)]
        if not y_cols:
            raise EventLogError(f"{path}: no '{Y_PREFIX}*' columns")
        if len(set(header)) != len(header):
            raise EventLogError(f"{path}: duplicate column names")
        idx = {h: i for i, h in enumerate(header)}

        events = []
        bad = []
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                bad.append(f"row {row_no}: expected {len(header)} fields, got {len(row)}")
                continue
            cell = {h: row[i].strip() for h, i in idx.items()}
            problems = [f"empty '{c}'" for c in ["z", *y_cols] if not cell[c]]
            e = None
            if cell.get("e"):
                try:
                    e = float(cell["e"])
                except ValueError:
                    problems.append(f"non-numeric e {cell['e']!r}")
                else:
                    if not math.isfinite(e):
                        problems.append(f"non-finite e {cell['e']!r}")
            trial = len(events) + len(bad)
            if "trial" in idx:
                try:
                    trial = int(cell["trial"])
                except ValueError:
                    problems.append(f"non-integer trial {cell['trial']!r}")
            if problems:
                bad.append(f"row {row_no}: {'; '.join(problems)}")
                continue
            events.append(EventRecord(
                trial=trial,
                y_values={c: cell[c] for c in y_cols},
                z=cell["z"],
                e=e,
                state=cell.get("state") or None,
                x_s=cell.get("x_s") or None,
            ))
    if bad:
        shown = "\n  ".join(bad[:20])
        more = f"\n  ... and {len(bad) - 20} more" if len(bad) > 20 else ""
        raise EventLogError(f"{path}: {len(bad)} malformed row(s):\n  {shown}{more}")
    validate_events(events)
    return events


def _format_e(e: Optional[float]) -> str:
    return "" if e is None else repr(e)


def write_events(events: Sequence[EventRecord], path) -> None:
    """Write events in the CSV layout :func:`load_events` reads, losslessly."""
    validate_events(events)
    y_cols = list(events[0].y_values)
    has = {c: any(getattr(ev, c) is not None for ev in events) for c in ("e", "state", "x_s")}
    header = ["trial", *y_cols, "z", *[c for c in ("e", "state", "x_s") if has[c]]]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for ev in events:
            row = [ev.trial, *(ev.y_values[c] for c in y_cols), ev.z]
            if has["e"]:
                row.append(_format_e(ev.e))
            if has["state"]:
                row.append(ev.state or "")
            if has["x_s"]:
                row.append(ev.x_s or "")
            w.writerow(row)


def select_events(events: Sequence[EventRecord], burn_in: int = 0,
                  window: Optional[tuple[int, int]] = None) -> list[EventRecord]:
    """Drop the first ``burn_in`` events, then keep trials in ``[start, end)`` if given."""
    if burn_in < 0:
        raise EventLogError("burn_in must be >= 0")
    if burn_in >= len(events):
        raise EventLogError(f"burn_in {burn_in} leaves no events (log has {len(events)})")
    selected = list(events[burn_in:])
    if window is not None:
        start, end = window
        selected = [ev for ev in selected if start <= ev.trial < end]
    if not selected:
        raise EventLogError("empty selection: no events in the requested window")
    return selected


def build_joint(events: Sequence[EventRecord], burn_in: int = 0,
                window: Optional[tuple[int, int]] = None) -> JointTable:
    selected = select_events(events, burn_in, window)
    names = _y_names(selected)
    counts = Counter((ev.y_tuple(names), ev.z) for ev in selected)
    return JointTable(names, "z", counts)


@dataclass(frozen=True)
class LogResponsibility:
    resp_z: float
    h_z_bits: float
    h_z_given_y_bits: float
    n_events: int
    burn_in: int
    series: Optional[list[tuple[int, Optional[float]]]] = field(default=None)

    def to_dict(self) -> dict:
        out = {
            "resp_z": self.resp_z,
            "h_z_bits": self.h_z_bits,
            "h_z_given_y_bits": self.h_z_given_y_bits,
            "n_events": self.n_events,
            "burn_in": self.burn_in,
        }
        if self.series is not None:
            out["series"] = [{"start": s, "resp_z": v} for s, v in self.series]
        return out


def resp_from_log(events: Sequence[EventRecord], burn_in: int = 0,
                  window: Optional[tuple[int, int]] = None, alpha: float = 0.0) -> LogResponsibility:
    table = build_joint(events, burn_in, window)
    resp, h_z, h_zy = resp_average_parts(table, alpha)
    return LogResponsibility(resp, h_z, h_zy, int(round(table.total)), burn_in)


def resp_series(events: Sequence[EventRecord], window_size: int, stride: int,
                alpha: float = 0.0) -> list[tuple[int, Optional[float]]]:
    """Resp(Z) over consecutive windows of ``window_size`` events every ``stride`` events.

    Each entry is ``(trial of first event in window, value)``; windows whose
    outcome never varies yield ``None`` rather than failing the series.
    """
    if window_size < 2:
        raise EventLogError("window_size must be >= 2")
    if stride < 1:
        raise EventLogError("stride must be >= 1")
    if window_size > len(events):
        raise EventLogError(f"window_size {window_size} exceeds log length {len(events)}")
    out = []
    for start in range(0, len(events) - window_size + 1, stride):
        chunk = events[start:start + window_size]
        try:
            value = resp_from_log(chunk, alpha=alpha).resp_z
        except DegenerateOutcomeError:
            value = None
        out.append((chunk[0].trial, value))
    return out
