"""Continuous-session detection over rolling raw windows.

The network slides across the session at a fixed stride; each output is
anchored at its window's start sample index. Scoring against handpicked
ground-truth ranges labels a window smoking iff its start index falls inside
a range, and additionally flags each range as detected when at least one
window starting inside it fired.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import metrics, mlp
from .errors import (
    EmptyTrace,
    InvalidSize,
    InvalidThreshold,
    ModeMismatch,
    SessionTooShort,
)
from .fileio import atomic_write_text
from .signal import ChannelMode, SensorRecording, window_count


@dataclass(frozen=True)
class TraceEntry:
    start: int
    raw: float
    smoking: bool


@dataclass(frozen=True, eq=False)
class DetectionTrace:
    entries: tuple[TraceEntry, ...]
    width: int
    stride: int
    threshold: float

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def starts(self) -> np.ndarray:
        return np.array([e.start for e in self.entries], dtype=np.intp)

    @property
    def outputs(self) -> np.ndarray:
        return np.array([e.raw for e in self.entries])

    @property
    def decisions(self) -> np.ndarray:
        return np.array([e.smoking for e in self.entries], dtype=bool)


@dataclass(frozen=True)
class GestureRanges:
    """Sorted, non-overlapping half-open [start, end) sample-index ranges."""

    ranges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        norm = tuple((int(s), int(e)) for s, e in self.ranges)
        object.__setattr__(self, "ranges", norm)
        prev_end = None
        for s, e in norm:
            if s >= e:
                raise ValueError(f"range start {s} must precede end {e}")
            if prev_end is not None and s < prev_end:
                raise ValueError("ranges must be sorted and non-overlapping")
            prev_end = e

    def __len__(self) -> int:
        return len(self.ranges)

    def contains(self, index: int) -> bool:
        return any(s <= index < e for s, e in self.ranges)

    def label_indices(self, indices: np.ndarray) -> np.ndarray:
        labels = np.zeros(len(indices), dtype=bool)
        for s, e in self.ranges:
            labels |= (indices >= s) & (indices < e)
        return labels


def _window_features(session: SensorRecording, width: int, stride: int,
                     mode: ChannelMode) -> np.ndarray:
    wx = sliding_window_view(session.x, width)[::stride]
    wy = sliding_window_view(session.y, width)[::stride]
    wz = sliding_window_view(session.z, width)[::stride]
    if mode is ChannelMode.X:
        return wx
    if mode is ChannelMode.Y:
        return wy
    if mode is ChannelMode.Z:
        return wz
    if mode is ChannelMode.XYZ:
        return np.concatenate([wx, wy, wz], axis=1)
    return (wx + wy + wz) / 3.0


def detect_session(network: mlp.Network, session: SensorRecording,
                   width: int = 200, stride: int = 1,
                   threshold: float = 0.5) -> DetectionTrace:
    """Run the network over every full rolling window of the session."""
    if width < 2:
        raise InvalidSize("width must be >= 2")
    if stride < 1:
        raise InvalidSize("stride must be >= 1")
    if not 0.0 < threshold < 1.0:
        raise InvalidThreshold("threshold must lie strictly between 0 and 1")
    expected = 3 * width if network.mode is ChannelMode.XYZ else width
    if network.input_size != expected:
        raise ModeMismatch(
            f"{network.mode.value} network with {network.input_size} inputs "
            f"cannot consume width-{width} windows")
    if len(session) < width:
        raise SessionTooShort(
            f"session has {len(session)} samples, window needs {width}")

    feats = _window_features(session, width, stride, network.mode)
    outputs = mlp.forward_batch(network, feats)
    starts = np.arange(feats.shape[0]) * stride
    entries = tuple(
        TraceEntry(start=int(s), raw=float(o), smoking=bool(o >= threshold))
        for s, o in zip(starts, outputs)
    )
    assert len(entries) == window_count(len(session), width, stride)
    return DetectionTrace(entries=entries, width=width, stride=stride,
                          threshold=threshold)


def score_trace(trace: DetectionTrace,
                truth: GestureRanges) -> tuple[metrics.MetricsReport, list[bool]]:
    """Per-window metrics plus a detected flag per ground-truth range.

    A window counts as truth-smoking iff its start index lies inside a range;
    a range counts as detected iff some window starting inside it decided
    smoking.
    """
    if len(trace) == 0:
        raise EmptyTrace("cannot score an empty trace")
    starts = trace.starts
    decisions = trace.decisions
    labels = truth.label_indices(starts)
    c = metrics.confusion(decisions, labels)
    report = metrics.MetricsReport(
        counts=c, threshold=trace.threshold,
        specificity=metrics.specificity(c),
        sensitivity=metrics.sensitivity(c),
        accuracy=metrics.accuracy(c),
    )
    detected = [bool(np.any(decisions & (starts >= s) & (starts < e)))
                for s, e in truth.ranges]
    return report, detected


def trace_to_plot_series(trace: DetectionTrace, session: SensorRecording
                         ) -> list[tuple[int, float, float, float, float | None]]:
    """One row per session sample: (index, x, y, z, output-or-None).

    Outputs appear only on rows where a window starts, matching a plot of
    the raw signal with the network trace superimposed.
    """
    by_start = {e.start: e.raw for e in trace.entries}
    return [
        (i, float(session.x[i]), float(session.y[i]), float(session.z[i]),
         by_start.get(i))
        for i in range(len(session))
    ]


PLOT_HEADER = "i,x,y,z,output"


def write_plot_csv(trace: DetectionTrace, session: SensorRecording,
                   path: Union[str, Path]) -> None:
    rows = trace_to_plot_series(trace, session)
    lines = [PLOT_HEADER]
    for i, x, y, z, out in rows:
        tail = "" if out is None else repr(out)
        lines.append(f"{i},{x!r},{y!r},{z!r},{tail}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_plot_csv(path: Union[str, Path]
                  ) -> list[tuple[int, float, float, float, float | None]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != PLOT_HEADER:
        raise ValueError(f"expected header {PLOT_HEADER!r}")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        i, x, y, z, out = line.split(",")
        rows.append((int(i), float(x), float(y), float(z),
                     float(out) if out else None))
    return rows


TRACE_HEADER = "start,output,smoking"


def write_trace_csv(trace: DetectionTrace, path: Union[str, Path]) -> None:
    lines = [TRACE_HEADER]
    for e in trace.entries:
        lines.append(f"{e.start},{e.raw!r},{int(e.smoking)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_ranges(path: Union[str, Path]) -> GestureRanges:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return GestureRanges(ranges=tuple((int(r["start"]), int(r["end"])) for r in doc))


def save_ranges(ranges: GestureRanges, path: Union[str, Path]) -> None:
    doc = [{"start": s, "end": e} for s, e in ranges.ranges]
    atomic_write_text(path, json.dumps(doc, indent=1) + "\n")
