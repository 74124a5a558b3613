"""LiDAR denoising: static-clutter removal via a quantized dictionary.

The pipeline runs per scan, in five steps:

1. field-of-view filter — keep bearings in ``[phi1, phi2]`` (inclusive);
2. sort — non-returns (distance 0) move to the tail, the rest are sorted
   by bearing ascending (stable);
3. angle quantization — ``q`` uniform levels over the FoV; each occupied
   level is represented by its median point (lower median by index within
   the level), non-returns are dropped;
4. dictionary build — the set of (angle level, distance level) pairs seen
   across many object-free frames is the static signature of the site;
5. removal — delete every point whose quantized pair appears in the
   dictionary.

Distances are quantized on a fixed grid of ``q_d`` levels of
``distance_step_m`` each (floor, clamped to the top level).  The dictionary
look-up is exact set membership, so a point survives unless the *same*
quantized cell was ever occupied in the object-free frames.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .simulator import LidarScan

DEFAULT_PHI1 = -math.pi / 6
DEFAULT_PHI2 = math.pi


@dataclass(frozen=True)
class ScrConfig:
    phi1: float = DEFAULT_PHI1
    phi2: float = DEFAULT_PHI2
    q: int = 216                     # angle quantization levels
    q_d: int = 500                   # distance quantization levels
    distance_step_m: float = 0.034
    dictionary_frames: int = 5000

    def __post_init__(self):
        if not (self.phi1 < self.phi2):
            raise ConfigError("ScrConfig: phi1 must be < phi2")
        if self.phi2 - self.phi1 > 2 * math.pi + 1e-12:
            raise ConfigError("ScrConfig: FoV wider than a revolution")
        if self.q < 1:
            raise ConfigError("ScrConfig: q must be >= 1")
        if self.q_d < 1:
            raise ConfigError("ScrConfig: q_d must be >= 1")
        if self.distance_step_m <= 0:
            raise ConfigError("ScrConfig: distance_step_m must be > 0")
        if self.dictionary_frames < 1:
            raise ConfigError("ScrConfig: dictionary_frames must be >= 1")

    @property
    def delta_phi(self) -> float:
        return (self.phi2 - self.phi1) / self.q

    def angle_center(self, level):
        """Center bearing of an angle level (vectorized over arrays)."""
        return self.phi1 + (np.asarray(level) + 0.5) * self.delta_phi

    def to_dict(self):
        return {
            "phi1": self.phi1,
            "phi2": self.phi2,
            "q": self.q,
            "q_d": self.q_d,
            "distance_step_m": self.distance_step_m,
            "dictionary_frames": self.dictionary_frames,
        }

    @classmethod
    def from_dict(cls, d):
        allowed = {"phi1", "phi2", "q", "q_d", "distance_step_m", "dictionary_frames"}
        unknown = set(d) - allowed
        if unknown:
            raise ConfigError(f"scr config: unknown field(s) {sorted(unknown)}")
        kwargs = {}
        for key in allowed & set(d):
            kwargs[key] = int(d[key]) if key in ("q", "q_d", "dictionary_frames") else float(d[key])
        return cls(**kwargs)


@dataclass
class QuantizedScan:
    """A denoiser-stage scan: one point per occupied angle level.

    ``levels`` is strictly ascending; ``angles``/``distances`` keep each
    representative point's original coordinates.  ``provenance`` (optional)
    carries the simulator's source tags for verification.
    """

    instance: int
    levels: np.ndarray           # (n,) int64 angle levels
    distance_levels: np.ndarray  # (n,) int64
    angles: np.ndarray           # (n,) float64, original bearing
    distances: np.ndarray        # (n,) float64, original range
    q: int
    q_d: int
    phi1: float
    phi2: float
    provenance: np.ndarray | None = None

    def __len__(self):
        return int(self.levels.shape[0])

    def packed(self) -> np.ndarray:
        """(angle level, distance level) pairs packed into sortable int64."""
        return self.levels * np.int64(self.q_d) + self.distance_levels


@dataclass
class StaticDictionary:
    """Sorted set of packed (angle level, distance level) pairs."""

    entries: np.ndarray          # (k,) int64, strictly ascending
    q: int
    q_d: int
    source_frame_count: int

    def __len__(self):
        return int(self.entries.shape[0])

    def contains(self, packed: np.ndarray) -> np.ndarray:
        if self.entries.shape[0] == 0:
            return np.zeros(packed.shape, dtype=bool)
        idx = np.searchsorted(self.entries, packed)
        idx = np.clip(idx, 0, self.entries.shape[0] - 1)
        return self.entries[idx] == packed

    def pairs(self):
        """(q, q_d) tuples in ascending lexicographic order."""
        return [(int(p // self.q_d), int(p % self.q_d)) for p in self.entries]


def fov_filter(scan: LidarScan, cfg: ScrConfig) -> LidarScan:
    """Keep exactly the points with phi1 <= bearing <= phi2 (order preserved)."""
    angles = scan.points[:, 0]
    mask = (angles >= cfg.phi1) & (angles <= cfg.phi2)
    prov = scan.provenance[mask] if scan.provenance is not None else None
    return LidarScan(instance=scan.instance, points=scan.points[mask],
                     provenance=prov)


def sort_scan(scan: LidarScan) -> LidarScan:
    """Non-returns to the tail (original relative order), rest sorted by bearing."""
    dist = scan.points[:, 1]
    nonzero = np.flatnonzero(dist != 0.0)
    zero = np.flatnonzero(dist == 0.0)
    order = np.concatenate([
        nonzero[np.argsort(scan.points[nonzero, 0], kind="stable")],
        zero,
    ])
    prov = scan.provenance[order] if scan.provenance is not None else None
    return LidarScan(instance=scan.instance, points=scan.points[order],
                     provenance=prov)


def quantize_distance(distance_m, cfg: ScrConfig):
    """Distance level: floor(d / step), clamped to the top level."""
    d = np.asarray(distance_m, dtype=float)
    if np.any(d < 0):
        raise ConfigError("quantize_distance: negative distance")
    lvl = np.floor(d / cfg.distance_step_m).astype(np.int64)
    lvl = np.minimum(lvl, cfg.q_d - 1)
    return lvl if lvl.shape else int(lvl)


def quantize_angles(scan: LidarScan, cfg: ScrConfig) -> QuantizedScan:
    """Reduce a sorted scan to one representative point per angle level.

    Expects the output of :func:`sort_scan` (bearing-ascending returns, then
    non-returns).  Each occupied level keeps its median point — the lower
    median by index for even occupancy — and non-returns are dropped.
    """
    angles = scan.points[:, 0]
    dist = scan.points[:, 1]
    returns = dist != 0.0
    if np.any(np.diff(angles[returns]) < 0):
        raise ConfigError("quantize_angles: scan is not sorted by bearing")

    angles = angles[returns]
    dist = dist[returns]
    prov = scan.provenance[returns] if scan.provenance is not None else None

    lvl = np.floor((angles - cfg.phi1) / cfg.delta_phi).astype(np.int64)
    lvl = np.clip(lvl, 0, cfg.q - 1)

    n = lvl.shape[0]
    if n:
        bounds = np.flatnonzero(np.diff(lvl) != 0) + 1
        starts = np.concatenate([[0], bounds])
        ends = np.concatenate([bounds, [n]])
        keep = starts + (ends - starts - 1) // 2      # lower median per level
    else:
        keep = np.empty(0, dtype=np.int64)

    sel_angles = angles[keep]
    sel_dist = dist[keep]
    return QuantizedScan(
        instance=scan.instance,
        levels=lvl[keep],
        distance_levels=np.atleast_1d(quantize_distance(sel_dist, cfg)),
        angles=sel_angles,
        distances=sel_dist,
        q=cfg.q,
        q_d=cfg.q_d,
        phi1=cfg.phi1,
        phi2=cfg.phi2,
        provenance=prov[keep] if prov is not None else None,
    )


def quantize_scan(scan: LidarScan, cfg: ScrConfig) -> QuantizedScan:
    """Steps 1-3 in one call: FoV filter, sort, angle/distance quantization."""
    return quantize_angles(sort_scan(fov_filter(scan, cfg)), cfg)


def build_dictionary(frames, cfg: ScrConfig) -> StaticDictionary:
    """Union of quantized pairs over object-free frames.

    The caller is responsible for the frames actually being object-free;
    anything that recurs here will be deleted from every later scan.
    """
    frames = list(frames)
    if not frames:
        raise ConfigError("build_dictionary: no frames given")
    packs = []
    for frame in frames:
        packs.append(quantize_scan(frame, cfg).packed())
    entries = np.unique(np.concatenate(packs)) if packs else np.empty(0, np.int64)
    return StaticDictionary(entries=entries.astype(np.int64), q=cfg.q, q_d=cfg.q_d,
                            source_frame_count=len(frames))


def remove_static(scan: QuantizedScan, dictionary: StaticDictionary) -> QuantizedScan:
    """Delete every point whose quantized pair is in the dictionary."""
    if (scan.q, scan.q_d) != (dictionary.q, dictionary.q_d):
        raise ConfigError(
            f"remove_static: quantization mismatch (scan {scan.q}x{scan.q_d}, "
            f"dictionary {dictionary.q}x{dictionary.q_d})")
    keep = ~dictionary.contains(scan.packed())
    return QuantizedScan(
        instance=scan.instance,
        levels=scan.levels[keep],
        distance_levels=scan.distance_levels[keep],
        angles=scan.angles[keep],
        distances=scan.distances[keep],
        q=scan.q,
        q_d=scan.q_d,
        phi1=scan.phi1,
        phi2=scan.phi2,
        provenance=scan.provenance[keep] if scan.provenance is not None else None,
    )


def scr_rate(points_before: int, points_after: int) -> float:
    """Fraction of points removed by the static-clutter stage."""
    if points_before <= 0:
        raise ConfigError("scr_rate: points_before must be > 0")
    if points_after < 0 or points_after > points_before:
        raise ConfigError("scr_rate: points_after must be in [0, points_before]")
    return (points_before - points_after) / points_before


def preprocess_trajectory(traj, dictionary: StaticDictionary, cfg: ScrConfig):
    """Denoise every scan of a trajectory; returns a list of QuantizedScan."""
    if (cfg.q, cfg.q_d) != (dictionary.q, dictionary.q_d):
        raise ConfigError("preprocess_trajectory: config does not match dictionary")
    return [remove_static(quantize_scan(s, cfg), dictionary) for s in traj.scans]
