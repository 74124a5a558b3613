"""Rule-based predictors over observation windows.

Four predictors, one per problem:

* occurrence   — total point count in the window against a threshold;
* crossing time — cluster the window's points, pick the approaching
  cluster, fit a line to its per-instance mean lateral position, and
  extrapolate to the link line x = 0;
* severity     — the same point count against a ladder of thresholds;
* direction    — compare the mean lateral position at the first and the
  last populated instance.

All predictors consume the dense window layout produced by
``windowing.slide_windows`` (rows of (bearing, range), range 0 = empty
slot) and are pure functions.  Data-dependent failure (nothing visible,
receding target, degenerate fit) raises :class:`PredictionError`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, PredictionError

_MIN_SPEED = 1e-9  # meters/instance below which a fit counts as "not moving"


@dataclass(frozen=True)
class DbscanParams:
    """Density clustering knobs: neighborhood radius and core-point mass."""

    eps: float = 2.1
    min_pts: int = 10

    def __post_init__(self):
        if not (self.eps > 0):
            raise ConfigError("DbscanParams: eps must be > 0")
        if self.min_pts < 1:
            raise ConfigError("DbscanParams: min_pts must be >= 1")

    def to_dict(self):
        return {"eps": self.eps, "min_pts": self.min_pts}

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - {"eps", "min_pts"}
        if unknown:
            raise ConfigError(f"dbscan params: unknown field(s) {sorted(unknown)}")
        kwargs = {}
        if "eps" in d:
            kwargs["eps"] = float(d["eps"])
        if "min_pts" in d:
            kwargs["min_pts"] = int(d["min_pts"])
        return cls(**kwargs)


@dataclass(frozen=True)
class ThresholdVector:
    """Per-horizon occurrence thresholds; entry i serves horizon i+1."""

    values: tuple

    def __post_init__(self):
        if not self.values:
            raise ConfigError("ThresholdVector: values must not be empty")
        for v in self.values:
            if int(v) != v or v < 1:
                raise ConfigError("ThresholdVector: entries must be integers >= 1")
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))

    def threshold_for(self, t_p: int) -> int:
        if not (1 <= t_p <= len(self.values)):
            raise ConfigError(f"ThresholdVector: no entry for horizon {t_p}")
        return self.values[t_p - 1]

    def to_dict(self):
        return {"values": list(self.values)}

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - {"values"}
        if unknown:
            raise ConfigError(f"threshold vector: unknown field(s) {sorted(unknown)}")
        return cls(values=tuple(d["values"]))


@dataclass(frozen=True)
class MotionEstimate:
    """Constant-velocity fit of the target's lateral position.

    ``v_hat`` is meters per instance along x; ``b_hat`` is the fitted x at
    instance 0; ``predicted_instance`` is the extrapolated crossing time in
    instances past the window end (None until extrapolated).
    """

    v_hat: float
    b_hat: float
    predicted_instance: float | None = None


@dataclass
class ClusterTrack:
    """One cluster's per-instance mean lateral position within a window."""

    label: int
    instances: np.ndarray  # 1-based window instances that contain points
    mean_x: np.ndarray

    @property
    def first_x(self) -> float:
        return float(self.mean_x[0])

    @property
    def last_x(self) -> float:
        return float(self.mean_x[-1])

    @property
    def displacement(self) -> float:
        return self.last_x - self.first_x


# ---------- occurrence ----------

def count_points(window) -> int:
    """Number of nonzero-range points summed over the window's instances."""
    lidar = getattr(window, "lidar", window)
    return int(np.count_nonzero(np.asarray(lidar)[..., 1]))


def predict_occurrence(window, theta: int) -> int:
    """1 iff the window's point count strictly exceeds theta."""
    if theta < 1:
        raise ConfigError("predict_occurrence: theta must be >= 1")
    return int(count_points(window) > theta)


def fit_threshold(windows) -> int:
    """Exhaustive threshold sweep maximizing training top-1 accuracy.

    Candidates run from 1 to the maximum observed count; ties go to the
    smallest candidate.
    """
    counts = np.array([count_points(w) for w in windows])
    labels = np.array([w.labels.occurrence for w in windows])
    if len(counts) == 0 or labels.min() == labels.max():
        raise ConfigError("fit_threshold: need both occurrence classes in training data")
    best_theta, best_acc = None, -1.0
    for theta in range(1, int(counts.max()) + 1):
        acc = float(np.mean((counts > theta) == labels))
        if acc > best_acc:
            best_theta, best_acc = theta, acc
    return best_theta


# ---------- clustering ----------

def polar_to_xy(points: np.ndarray) -> np.ndarray:
    """(bearing, range) rows to Cartesian rows; the link line is x = 0."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ConfigError("polar_to_xy: expected an (n, 2) array")
    phi, d = points[:, 0], points[:, 1]
    return np.column_stack([d * np.sin(phi), d * np.cos(phi)])


def dbscan(points, params: DbscanParams) -> np.ndarray:
    """Density clustering; returns one label per input point, noise = -1.

    A point is a core point iff at least ``min_pts`` points (itself
    included) lie within ``eps``.  Clusters are connected components of
    core points; ids follow the input order of each component's first
    core point.  A non-core point within ``eps`` of a core joins the
    cluster of its *nearest* core (distance ties broken by core
    coordinates), which keeps the partition independent of input order.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(pts)
    if n == 0:
        return np.empty(0, dtype=np.int64)
    if not np.all(np.isfinite(pts)):
        raise ConfigError("dbscan: points must be finite")
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    adj = dist <= params.eps
    core = adj.sum(axis=1) >= params.min_pts

    labels = np.full(n, -1, dtype=np.int64)
    next_id = 0
    for i in range(n):
        if not core[i] or labels[i] != -1:
            continue
        # Flood the core component reachable from i.
        frontier = [i]
        labels[i] = next_id
        while frontier:
            j = frontier.pop()
            neighbors = np.flatnonzero(adj[j] & core & (labels == -1))
            labels[neighbors] = next_id
            frontier.extend(neighbors.tolist())
        next_id += 1

    border = ~core & (adj & core[None, :]).any(axis=1)
    for i in np.flatnonzero(border):
        candidates = np.flatnonzero(adj[i] & core)
        order = np.lexsort((pts[candidates, 1], pts[candidates, 0],
                            dist[i, candidates]))
        labels[i] = labels[candidates[order[0]]]
    return labels


def window_points_xy(window):
    """All nonzero points of a window in Cartesian form with instance stamps.

    Returns (xy (N, 2), t (N,)) where t is the 1-based window instance of
    each point.
    """
    lidar = np.asarray(getattr(window, "lidar", window))
    xs, ts = [], []
    for k in range(lidar.shape[0]):
        rows = lidar[k]
        mask = rows[:, 1] != 0.0
        if mask.any():
            xs.append(polar_to_xy(rows[mask]))
            ts.append(np.full(int(mask.sum()), k + 1, dtype=np.int64))
    if not xs:
        return np.empty((0, 2)), np.empty(0, dtype=np.int64)
    return np.concatenate(xs), np.concatenate(ts)


def cluster_tracks(xy: np.ndarray, t: np.ndarray, labels: np.ndarray):
    """Per-cluster, per-instance mean lateral position, in label order."""
    tracks = []
    for label in sorted(set(labels.tolist()) - {-1}):
        mask = labels == label
        inst = np.unique(t[mask])
        mean_x = np.array([float(xy[mask & (t == k), 0].mean()) for k in inst])
        tracks.append(ClusterTrack(label=int(label), instances=inst, mean_x=mean_x))
    return tracks


def select_target(tracks):
    """The approaching cluster nearest the link line, or None.

    A cluster qualifies when its latest mean position is strictly on one
    side of x = 0 and its displacement over the window points toward the
    line.  Ties on |latest x| go to the lowest cluster label.
    """
    best = None
    for track in tracks:
        approaching = ((track.last_x < 0 and track.displacement > 0)
                       or (track.last_x > 0 and track.displacement < 0))
        if not approaching:
            continue
        if best is None or abs(track.last_x) < abs(best.last_x):
            best = track
    return best


# ---------- crossing time ----------

def ls_fit(t, y):
    """Least-squares line y = v*t + b via the normal equations."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ConfigError("ls_fit: t and y must be equal-length 1-D arrays")
    if len(t) < 2:
        raise PredictionError("ls_fit: need at least 2 populated instances")
    n = len(t)
    sx, sy = t.sum(), y.sum()
    sxx, sxy = (t * t).sum(), (t * y).sum()
    det = n * sxx - sx * sx
    if abs(det) < 1e-12:
        raise PredictionError("ls_fit: degenerate time axis")
    v = (n * sxy - sx * sy) / det
    b = (sy - v * sx) / n
    return v, b


def predict_blockage_time(estimate: MotionEstimate, y_last: float) -> float:
    """Instances until the target reaches x = 0, given its latest position."""
    v = estimate.v_hat
    if abs(v) < _MIN_SPEED:
        raise PredictionError("no crossing: target is not moving")
    if y_last != 0.0 and np.sign(v) == np.sign(y_last):
        raise PredictionError("no crossing: target is receding")
    return abs(y_last) / abs(v)


def predict_crossing_time(window, params: DbscanParams = DbscanParams()) -> MotionEstimate:
    """Full crossing-time pipeline for one window.

    Cluster the window's points, pick the approaching cluster, fit its
    mean-position track, extrapolate to x = 0.
    """
    xy, t = window_points_xy(window)
    if len(xy) == 0:
        raise PredictionError("no crossing: window contains no points")
    labels = dbscan(xy, params)
    target = select_target(cluster_tracks(xy, t, labels))
    if target is None:
        raise PredictionError("no crossing: no approaching cluster")
    v, b = ls_fit(target.instances, target.mean_x)
    n_hat = predict_blockage_time(MotionEstimate(v_hat=v, b_hat=b), target.last_x)
    return MotionEstimate(v_hat=v, b_hat=b, predicted_instance=n_hat)


# ---------- severity ----------

def predict_severity_threshold(window, thetas, levels=None) -> int:
    """Bin the window's point count on a strictly increasing ladder.

    With N-1 thresholds there are N bins; bin i (1-based) is selected when
    thetas[i-2] < count <= thetas[i-1] (open below, closed above, with
    virtual -inf/+inf rails).  ``levels`` optionally renames bins.
    """
    thetas = tuple(thetas)
    if not thetas:
        raise ConfigError("predict_severity_threshold: need at least one threshold")
    if any(b <= a for a, b in zip(thetas, thetas[1:])):
        raise ConfigError("predict_severity_threshold: thresholds must be strictly increasing")
    if levels is not None and len(levels) != len(thetas) + 1:
        raise ConfigError("predict_severity_threshold: levels must have one entry per bin")
    count = count_points(window)
    bin_idx = int(np.searchsorted(np.asarray(thetas), count, side="left")) + 1
    if levels is not None:
        return int(levels[bin_idx - 1])
    return bin_idx


def fit_severity_thresholds(windows, partitions=None):
    """Boundary sweep between adjacent severity classes on training windows.

    Returns (thetas, levels): one threshold per adjacent pair of observed
    levels, each maximizing the pairwise accuracy of "count <= theta means
    the lower class", ties to the smallest theta.  Thresholds are nudged
    upward if needed to stay strictly increasing.
    """
    by_level = {}
    for w in windows:
        if w.labels.occurrence == 1 and w.labels.severity is not None:
            by_level.setdefault(w.labels.severity, []).append(count_points(w))
    levels = sorted(by_level)
    if len(levels) < 2:
        raise ConfigError("fit_severity_thresholds: need at least two severity classes")
    thetas = []
    for lo, hi in zip(levels, levels[1:]):
        lo_counts = np.array(by_level[lo])
        hi_counts = np.array(by_level[hi])
        best_theta, best_acc = None, -1.0
        top = max(int(max(lo_counts.max(), hi_counts.max())), 1)
        for theta in range(1, top + 1):
            acc = (np.sum(lo_counts <= theta) + np.sum(hi_counts > theta)) \
                / (len(lo_counts) + len(hi_counts))
            if acc > best_acc:
                best_theta, best_acc = theta, float(acc)
        if thetas and best_theta <= thetas[-1]:
            best_theta = thetas[-1] + 1
        thetas.append(best_theta)
    return tuple(thetas), tuple(levels)


# ---------- direction ----------

def predict_direction(window, instances=None) -> int:
    """0 iff the mean lateral position grew from first to last sighting.

    ``instances`` optionally pins the (first, last) 1-based window
    instances to compare; by default the first and last populated ones
    are used.
    """
    xy, t = window_points_xy(window)
    if len(xy) == 0:
        raise PredictionError("direction: window contains no points")
    if instances is not None:
        first, last = instances
    else:
        first, last = int(t.min()), int(t.max())
    x_first = xy[t == first, 0]
    x_last = xy[t == last, 0]
    if len(x_first) == 0 or len(x_last) == 0:
        raise PredictionError(f"direction: no points at instance {first} or {last}")
    return 0 if x_last.mean() > x_first.mean() else 1
