"""Event containers and time-surface representations.

A time-surface map stores, per pixel, the timestamp of the most recent event;
pixel values are the exponentially decayed age exp(-(t_eval - t_last)/tau),
evaluated lazily so one incremental builder can serve snapshots at any rate.
The negated map (1 - value) acts as the registration potential: fresh edges
sit in its minima.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import EventAfterEvalTime, OutOfBounds, TauNonPositive


@dataclass(frozen=True)
class Event:
    """Single sensor measurement: pixel, timestamp (s), polarity (+1/-1)."""

    x: int
    y: int
    t: float
    polarity: int

    def __post_init__(self):
        if self.polarity not in (-1, 1):
            raise ValueError(f"polarity must be +1 or -1, got {self.polarity}")
        if not np.isfinite(self.t):
            raise ValueError("timestamp must be finite")


class EventBatch:
    """Columnar event storage for bulk processing.

    Timestamps are expected non-decreasing; `window` relies on it.
    """

    __slots__ = ("t", "x", "y", "p")

    def __init__(self, t, x, y, p):
        self.t = np.asarray(t, dtype=np.float64).reshape(-1)
        self.x = np.asarray(x, dtype=np.int32).reshape(-1)
        self.y = np.asarray(y, dtype=np.int32).reshape(-1)
        self.p = np.asarray(p, dtype=np.int8).reshape(-1)
        n = len(self.t)
        if not (len(self.x) == len(self.y) == len(self.p) == n):
            raise ValueError("event columns have mismatched lengths")
        if n and not np.all(np.abs(self.p) == 1):
            raise ValueError("polarities must be +1 or -1")

    def __len__(self) -> int:
        return len(self.t)

    def __iter__(self):
        for i in range(len(self.t)):
            yield Event(int(self.x[i]), int(self.y[i]), float(self.t[i]), int(self.p[i]))

    @staticmethod
    def coerce(events: Union["EventBatch", Iterable[Event]]) -> "EventBatch":
        if isinstance(events, EventBatch):
            return events
        ev = list(events)
        return EventBatch(
            [e.t for e in ev], [e.x for e in ev], [e.y for e in ev], [e.polarity for e in ev]
        )

    def window(self, t0: float, t1: float) -> "EventBatch":
        """Events with t0 < t <= t1 (timestamps assumed sorted)."""
        lo = np.searchsorted(self.t, t0, side="right")
        hi = np.searchsorted(self.t, t1, side="right")
        return EventBatch(self.t[lo:hi], self.x[lo:hi], self.y[lo:hi], self.p[lo:hi])

    def select(self, mask: np.ndarray) -> "EventBatch":
        return EventBatch(self.t[mask], self.x[mask], self.y[mask], self.p[mask])


class TimeSurfaceMap:
    """Snapshot of per-pixel event recency at a fixed evaluation time."""

    def __init__(self, last_event_time: np.ndarray, eval_time: float, decay_tau: float):
        if decay_tau <= 0:
            raise TauNonPositive(f"tau={decay_tau}")
        self.last_event_time = np.asarray(last_event_time, dtype=np.float64)
        self.eval_time = float(eval_time)
        self.decay_tau = float(decay_tau)
        self._values: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.last_event_time.shape

    @property
    def width(self) -> int:
        return self.last_event_time.shape[1]

    @property
    def height(self) -> int:
        return self.last_event_time.shape[0]

    @property
    def values(self) -> np.ndarray:
        """(height, width) grid of exp(-(eval_time - t_last)/tau), 0 where no event."""
        if self._values is None:
            age = self.eval_time - self.last_event_time
            self._values = np.exp(-age / self.decay_tau)
            self._values[~np.isfinite(self.last_event_time)] = 0.0
        return self._values

    def value_at(self, x: int, y: int) -> float:
        return float(self.values[y, x])


class TimeSurfaceBuilder:
    """Incremental last-event-time accumulator; snapshot at any eval time."""

    def __init__(self, width: int, height: int, tau: float):
        if tau <= 0:
            raise TauNonPositive(f"tau={tau}")
        self.width = int(width)
        self.height = int(height)
        self.tau = float(tau)
        self._t_last = np.full((self.height, self.width), -np.inf)
        self._t_max = -np.inf

    def insert(self, events: Union[EventBatch, Iterable[Event]]) -> None:
        ev = EventBatch.coerce(events)
        if not len(ev):
            return
        if (
            ev.x.min() < 0
            or ev.x.max() >= self.width
            or ev.y.min() < 0
            or ev.y.max() >= self.height
        ):
            raise ValueError("event pixel outside the sensor grid")
        np.maximum.at(self._t_last, (ev.y, ev.x), ev.t)
        self._t_max = max(self._t_max, float(ev.t.max()))

    def snapshot(self, eval_time: float) -> TimeSurfaceMap:
        if self._t_max > eval_time:
            raise EventAfterEvalTime(f"last event at t={self._t_max} > eval_time={eval_time}")
        return TimeSurfaceMap(self._t_last.copy(), eval_time, self.tau)


@dataclass(frozen=True)
class SignedTimeSurfaceMaps:
    """Polarity-split pair of time-surface maps."""

    positive: TimeSurfaceMap
    negative: TimeSurfaceMap


class SignedTimeSurfaceBuilder:
    """Maintains positive-only and negative-only maps plus the combined one."""

    def __init__(self, width: int, height: int, tau: float):
        self.combined = TimeSurfaceBuilder(width, height, tau)
        self.positive = TimeSurfaceBuilder(width, height, tau)
        self.negative = TimeSurfaceBuilder(width, height, tau)

    def insert(self, events: Union[EventBatch, Iterable[Event]]) -> None:
        ev = EventBatch.coerce(events)
        self.combined.insert(ev)
        pos = ev.p > 0
        self.positive.insert(ev.select(pos))
        self.negative.insert(ev.select(~pos))

    def snapshot(self, eval_time: float) -> SignedTimeSurfaceMaps:
        return SignedTimeSurfaceMaps(
            self.positive.snapshot(eval_time), self.negative.snapshot(eval_time)
        )

    def snapshot_combined(self, eval_time: float) -> TimeSurfaceMap:
        return self.combined.snapshot(eval_time)


def build_tsm(
    events: Union[EventBatch, Iterable[Event]],
    width: int,
    height: int,
    eval_time: float,
    tau: float,
) -> TimeSurfaceMap:
    """One-shot time-surface map over a full event stream."""
    builder = TimeSurfaceBuilder(width, height, tau)
    builder.insert(events)
    return builder.snapshot(eval_time)


def build_stsm(
    events: Union[EventBatch, Iterable[Event]],
    width: int,
    height: int,
    eval_time: float,
    tau: float,
) -> SignedTimeSurfaceMaps:
    """Polarity-split maps: each event feeds exactly one of the two sub-maps."""
    builder = SignedTimeSurfaceBuilder(width, height, tau)
    builder.insert(events)
    return builder.snapshot(eval_time)


def semi_dense_mask(tsm: TimeSurfaceMap, delta: float) -> np.ndarray:
    """(height, width) boolean grid of pixels with value strictly above delta."""
    if not 0 <= delta < 1:
        raise ValueError(f"delta must be in [0,1), got {delta}")
    return tsm.values > delta


def semi_dense_pixels(tsm: TimeSurfaceMap, delta: float) -> np.ndarray:
    """(N,2) array of (x, y) pixels with value strictly above delta, row-major order."""
    ys, xs = np.nonzero(semi_dense_mask(tsm, delta))
    return np.column_stack([xs, ys]).astype(np.int32)


class PotentialField:
    """Registration potential over the image; minima lie on fresh edges."""

    def __init__(self, values: np.ndarray):
        self.values = np.asarray(values, dtype=np.float64)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


def negate(tsm: TimeSurfaceMap) -> PotentialField:
    """Potential field 1 - value: offsets edges into local minima."""
    return PotentialField(1.0 - tsm.values)


def sample_bilinear_many(
    values: np.ndarray, uv: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Bilinear values and analytic surface gradients at (N,2) sub-pixel points.

    Returns (value (N,), gradient (N,2), inside (N,) bool). Out-of-domain points
    are flagged instead of raising; their outputs are zero. On the lattice the
    gradient is the symmetric average of the two adjacent cell slopes.
    """
    values = np.asarray(values, dtype=np.float64)
    h, w = values.shape
    uv = np.asarray(uv, dtype=np.float64).reshape(-1, 2)
    u, v = uv[:, 0], uv[:, 1]
    inside = (u >= 0) & (u <= w - 1) & (v >= 0) & (v <= h - 1)
    u = np.where(inside, u, 0.0)
    v = np.where(inside, v, 0.0)

    x0 = np.minimum(np.floor(u).astype(np.intp), w - 2)
    y0 = np.minimum(np.floor(v).astype(np.intp), h - 2)
    fx = u - x0
    fy = v - y0

    v00 = values[y0, x0]
    v01 = values[y0, x0 + 1]
    v10 = values[y0 + 1, x0]
    v11 = values[y0 + 1, x0 + 1]

    val = (1 - fy) * ((1 - fx) * v00 + fx * v01) + fy * ((1 - fx) * v10 + fx * v11)
    gx = (1 - fy) * (v01 - v00) + fy * (v11 - v10)
    gy = (1 - fx) * (v10 - v00) + fx * (v11 - v01)

    # symmetric derivative at interior lattice coordinates
    on_x = (fx == 0) & (x0 > 0)
    if np.any(on_x):
        xm = x0[on_x] - 1
        ym = y0[on_x]
        left = (1 - fy[on_x]) * (v00[on_x] - values[ym, xm]) + fy[on_x] * (
            v10[on_x] - values[ym + 1, xm]
        )
        gx = gx.copy()
        gx[on_x] = 0.5 * (gx[on_x] + left)
    on_y = (fy == 0) & (y0 > 0)
    if np.any(on_y):
        xm = x0[on_y]
        ym = y0[on_y] - 1
        up = (1 - fx[on_y]) * (v00[on_y] - values[ym, xm]) + fx[on_y] * (
            v01[on_y] - values[ym, xm + 1]
        )
        gy = gy.copy()
        gy[on_y] = 0.5 * (gy[on_y] + up)

    val = np.where(inside, val, 0.0)
    grad = np.where(inside[:, None], np.column_stack([gx, gy]), 0.0)
    return val, grad, inside


def sample_bilinear(field: PotentialField, uv: np.ndarray) -> tuple[float, np.ndarray]:
    """Bilinear sample of a potential field at one sub-pixel location.

    Returns (value, gradient per pixel). Raises OutOfBounds outside
    [0, width-1] x [0, height-1]; the caller drops such points.
    """
    val, grad, inside = sample_bilinear_many(field.values, np.asarray(uv, dtype=float).reshape(1, 2))
    if not inside[0]:
        raise OutOfBounds(f"uv={tuple(np.asarray(uv, dtype=float))}")
    return float(val[0]), grad[0]


def save_grayscale(values: np.ndarray, path) -> None:
    """Dump a [0,1] grid as a binary PGM, scaled to [0,255], for debugging."""
    values = np.asarray(values, dtype=np.float64)
    img = np.clip(np.round(values * 255.0), 0, 255).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(img.tobytes())
