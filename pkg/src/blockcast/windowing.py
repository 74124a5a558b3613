"""Sliding observation windows and their ground-truth labels.

A window is ``t_ob`` consecutive instances of sensing ending at an
unblocked instance t, paired with labels describing the next ``t_p``
instances: whether a blockage occurs (occurrence), at which instance
(instance), how severe it will be (severity, from the blocking object's
class), and which way the blocker travels (direction).

Severity levels come from a fixed partition of mean blockage duration:
level i is the i-th half-open interval [lo, hi) in
``severity_partitions``.  A boundary value belongs to the upper interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .lidar_prep import QuantizedScan
from .simulator import MovingObject, Trajectory, blocking_object_at

# Levels 1-4; the default object catalog only emits 2-4 (vehicles).
DEFAULT_SEVERITY_PARTITIONS = (
    (0.0, 300.0),
    (300.0, 600.0),
    (600.0, 1200.0),
    (1200.0, 2400.0),
)


@dataclass(frozen=True)
class WindowConfig:
    t_ob: int = 16
    t_p: int = 1
    stride: int = 1
    severity_partitions: tuple = DEFAULT_SEVERITY_PARTITIONS

    def __post_init__(self):
        if self.t_ob < 1:
            raise ConfigError("WindowConfig: t_ob must be >= 1")
        if not (1 <= self.t_p <= 10):
            raise ConfigError("WindowConfig: t_p must be in [1, 10]")
        if self.stride < 1:
            raise ConfigError("WindowConfig: stride must be >= 1")
        check_partitions(self.severity_partitions)

    def to_dict(self):
        return {
            "t_ob": self.t_ob,
            "t_p": self.t_p,
            "stride": self.stride,
            "severity_partitions": [list(p) for p in self.severity_partitions],
        }

    @classmethod
    def from_dict(cls, d):
        allowed = {"t_ob", "t_p", "stride", "severity_partitions"}
        unknown = set(d) - allowed
        if unknown:
            raise ConfigError(f"window config: unknown field(s) {sorted(unknown)}")
        kwargs = {}
        for key in ("t_ob", "t_p", "stride"):
            if key in d:
                kwargs[key] = int(d[key])
        if "severity_partitions" in d:
            kwargs["severity_partitions"] = tuple(
                (float(p[0]), float(p[1])) for p in d["severity_partitions"])
        return cls(**kwargs)


def check_partitions(partitions):
    """Validate contiguous, ascending, half-open duration partitions."""
    if not partitions:
        raise ConfigError("severity partitions must not be empty")
    prev_hi = None
    for lo, hi in partitions:
        if not (lo < hi):
            raise ConfigError("severity partition bounds must satisfy lo < hi")
        if prev_hi is not None and lo != prev_hi:
            raise ConfigError("severity partitions must be contiguous")
        prev_hi = hi


@dataclass(frozen=True)
class Labels:
    """Ground truth for one window; fields beyond occurrence exist only when
    a blockage actually happens inside the horizon."""

    occurrence: int
    instance: int | None = None
    severity: int | None = None
    direction: int | None = None

    def __post_init__(self):
        if self.occurrence not in (0, 1):
            raise ConfigError("Labels: occurrence must be 0 or 1")
        if self.occurrence == 0:
            if not (self.instance is None and self.severity is None
                    and self.direction is None):
                raise ConfigError("Labels: negative window cannot carry blockage fields")
        else:
            if self.instance is None or self.instance < 1:
                raise ConfigError("Labels: positive window needs instance >= 1")
            if self.direction not in (0, 1):
                raise ConfigError("Labels: positive window needs direction in {0,1}")
            if self.severity is None or not (1 <= self.severity <= 4):
                raise ConfigError("Labels: positive window needs severity in 1..4")

    def to_dict(self):
        return {
            "occurrence": self.occurrence,
            "instance": self.instance,
            "severity": self.severity,
            "direction": self.direction,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            occurrence=int(d["occurrence"]),
            instance=None if d.get("instance") is None else int(d["instance"]),
            severity=None if d.get("severity") is None else int(d["severity"]),
            direction=None if d.get("direction") is None else int(d["direction"]),
        )


@dataclass
class ObservationWindow:
    """Dense sensing for t_ob instances plus the labels for the horizon.

    ``lidar`` is (t_ob, W, 2) rows of (bearing, range); a range of 0 marks
    an absent slot.  ``power`` is (t_ob, M).  ``source`` identifies
    (trajectory id, start instance).
    """

    lidar: np.ndarray
    power: np.ndarray
    labels: Labels
    source: tuple

    @property
    def start(self) -> int:
        return int(self.source[1])


def make_occurrence_label(x, t: int, t_p: int) -> int:
    """1 iff the link is blocked at any of the next t_p instances after t."""
    x = np.asarray(x)
    if t < 0 or t + t_p > len(x) - 1:
        raise ConfigError("make_occurrence_label: horizon extends past the trace")
    if t_p < 1:
        raise ConfigError("make_occurrence_label: t_p must be >= 1")
    return int(np.any(x[t + 1: t + t_p + 1] == 1))


def make_instance_label(x, t: int, t_p: int):
    """First n in [1, t_p] with a blockage at t+n, or None."""
    x = np.asarray(x)
    if t < 0 or t + t_p > len(x) - 1:
        raise ConfigError("make_instance_label: horizon extends past the trace")
    hits = np.flatnonzero(x[t + 1: t + t_p + 1] == 1)
    return int(hits[0]) + 1 if hits.size else None


def make_severity_label(obj: MovingObject, partitions=DEFAULT_SEVERITY_PARTITIONS) -> int:
    """Severity level = index (1-based) of the duration interval [lo, hi)
    containing the object's class mean blockage duration."""
    check_partitions(partitions)
    d = obj.obj_class.mean_block_duration_ms
    for i, (lo, hi) in enumerate(partitions):
        if lo <= d < hi:
            return i + 1
    raise ConfigError(
        f"make_severity_label: duration {d} ms outside all partitions")


def make_direction_label(obj: MovingObject) -> int:
    """0 for positive x velocity (left to right), 1 for negative."""
    v = obj.velocity_x
    if v > 0:
        return 0
    if v < 0:
        return 1
    raise ConfigError("make_direction_label: object has zero x velocity")


def densify(scan: QuantizedScan, w: int | None = None) -> np.ndarray:
    """Spread a quantized scan over its angle-level grid.

    Row i holds (level-center bearing, range) for occupied level i and
    (level-center bearing, 0) otherwise.  ``w`` may widen the grid beyond
    ``scan.q``; extra rows are zero-filled.
    """
    q = scan.q
    if w is None:
        w = q
    if w < q:
        raise ConfigError(f"densify: target width {w} narrower than {q} levels")
    out = np.zeros((w, 2))
    delta = (scan.phi2 - scan.phi1) / q
    out[:q, 0] = scan.phi1 + (np.arange(q) + 0.5) * delta
    out[scan.levels, 1] = scan.distances
    return out


def sparsify(dense_row: np.ndarray):
    """Inverse view of densify for one instance: occupied (bearing, range) rows."""
    mask = dense_row[:, 1] != 0.0
    return dense_row[mask]


def _dense_trajectory(traj: Trajectory, scans) -> np.ndarray:
    """(T, W, 2) dense rows: quantized grid when scans given, raw points otherwise."""
    if scans is not None:
        if len(scans) != traj.config.duration_instances:
            raise ConfigError("slide_windows: preprocessed scans do not cover the trajectory")
        return np.stack([densify(s) for s in scans])
    return np.stack([s.points for s in traj.scans])


def slide_windows(traj: Trajectory, scans, cfg: WindowConfig, traj_id="0"):
    """All valid windows of a trajectory, stride apart, ending unblocked.

    ``scans`` is the denoised per-instance list (quantized grid input) or
    None to window the raw scans instead.
    """
    x = traj.link_status
    T = len(x)
    dense = _dense_trajectory(traj, scans)
    power = np.stack([p.powers for p in traj.powers])
    windows = []
    for start in range(0, T - cfg.t_ob - cfg.t_p + 1, cfg.stride):
        t = start + cfg.t_ob - 1
        if x[t] == 1:
            continue
        occurrence = make_occurrence_label(x, t, cfg.t_p)
        if occurrence:
            n_p = make_instance_label(x, t, cfg.t_p)
            blocker_idx = blocking_object_at(traj, t + n_p)
            if blocker_idx is None:
                raise ConfigError("slide_windows: blocked instance without a blocker")
            blocker = traj.objects[blocker_idx]
            labels = Labels(
                occurrence=1,
                instance=n_p,
                severity=make_severity_label(blocker, cfg.severity_partitions),
                direction=make_direction_label(blocker),
            )
        else:
            labels = Labels(occurrence=0)
        windows.append(ObservationWindow(
            lidar=dense[start: start + cfg.t_ob],
            power=power[start: start + cfg.t_ob],
            labels=labels,
            source=(str(traj_id), start),
        ))
    return windows


def split_windows(windows, val_fraction: float, seed: int):
    """Seeded random train/validation split (order within splits preserved)."""
    if not (0.0 < val_fraction < 1.0):
        raise ConfigError("split_windows: val_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    n = len(windows)
    n_val = int(round(n * val_fraction))
    val_idx = set(rng.choice(n, size=n_val, replace=False).tolist())
    train = [w for i, w in enumerate(windows) if i not in val_idx]
    val = [w for i, w in enumerate(windows) if i in val_idx]
    return train, val


def balance_windows(windows, seed: int):
    """Subsample the majority occurrence class to the minority count."""
    pos = [w for w in windows if w.labels.occurrence == 1]
    neg = [w for w in windows if w.labels.occurrence == 0]
    if not pos or not neg:
        raise ConfigError("balance_windows: both classes must be present")
    rng = np.random.default_rng(seed)
    if len(pos) > len(neg):
        keep = rng.choice(len(pos), size=len(neg), replace=False)
        pos = [pos[i] for i in sorted(keep.tolist())]
    elif len(neg) > len(pos):
        keep = rng.choice(len(neg), size=len(pos), replace=False)
        neg = [neg[i] for i in sorted(keep.tolist())]
    merged = pos + neg
    merged.sort(key=lambda w: (w.source[0], w.source[1]))
    return merged
