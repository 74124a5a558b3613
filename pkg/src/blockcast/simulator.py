"""Seeded 2-D street-scene simulator.

Produces everything downstream stages consume: per-instance LiDAR scans,
per-beam receive powers, and the ground-truth link-status trace.

Geometry
--------
The sensor (co-located with the receiving unit) sits at the origin.  The
transmitting unit is straight ahead at ``(0, link_length_m)``, so the
line-of-sight (LoS) segment runs along the +y axis.  Bearings are measured
from +y toward +x::

    x = d * sin(phi),   y = d * cos(phi),   phi in (-pi, pi]

Moving objects are axis-aligned rectangles travelling parallel to the
x axis at constant speed on a fixed lane offset.  Direction 0 means
left-to-right (positive x velocity), direction 1 the opposite.  The link
is blocked exactly while an object's footprint intersects the LoS segment;
tangent contact counts as blocked.

LiDAR model
-----------
``lidar_points_per_rev`` rays are spaced uniformly over a full revolution.
Each ray reports the nearest surface hit within ``lidar_max_range_m``;
rays with no hit report distance 0.  Hits get additive Gaussian range
jitter, a Poisson-distributed number of rays per scan are overwritten by
phantom returns at uniformly random ranges (spurious reflections for the
denoising stage to deal with), and the emitted point order is shuffled so
consumers cannot rely on angular ordering.

Power model
-----------
A simplified two-path picture: the beam whose steering angle is closest to
the transmitter bearing carries power 1.0 while the link is clear and is
attenuated by ``blockage_attenuation_db`` while blocked.  An object that
is approaching (but not yet on) the LoS adds a small reflected bump to the
beams around its bearing, growing as it gets closer — the wireless
pre-blockage signature.  Per-beam Gaussian noise is added and powers are
clipped at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * math.pi

# Provenance codes for LiDAR points (object hits carry the object index >= 0).
SRC_NONE = -1      # no return
SRC_STATIC = -2    # static scene segment
SRC_PHANTOM = -3   # spurious reflection

# Distance a spawned object starts beyond sensor range, so every crossing
# enters the scene invisible and leaves it invisible.
_SPAWN_MARGIN_M = 1.0
# Hits jittered below this are clamped so they stay distinguishable from the
# "no return" encoding (distance exactly 0).
_MIN_RETURN_M = 1e-3
# Reference range for the reflected-power bump; closer objects saturate.
_SIGNATURE_REF_M = 5.0


@dataclass(frozen=True)
class Segment2D:
    x1: float
    y1: float
    x2: float
    y2: float

    def to_list(self):
        return [self.x1, self.y1, self.x2, self.y2]


@dataclass(frozen=True)
class ObjectClass:
    """A kind of street object: footprint, speed range, and blockage stats.

    ``mean_block_duration_ms`` is the declared average time the class keeps
    the link blocked; severity labels are derived from it.  Footprint length
    and the speed range are chosen so E[length / speed] lands on the declared
    value (that expectation is what the 10 Hz link-status grid measures).
    """

    name: str
    width_m: float
    length_m: float
    speed_range_mps: tuple[float, float]
    severity_level: int
    mean_block_duration_ms: float

    def __post_init__(self):
        if self.width_m <= 0 or self.length_m <= 0:
            raise ConfigError(f"object class {self.name!r}: width_m/length_m must be > 0")
        lo, hi = self.speed_range_mps
        if not (0 < lo <= hi):
            raise ConfigError(f"object class {self.name!r}: speed_range_mps must satisfy 0 < lo <= hi")
        if self.severity_level not in (1, 2, 3, 4):
            raise ConfigError(f"object class {self.name!r}: severity_level must be in {{1,2,3,4}}")
        if self.mean_block_duration_ms <= 0:
            raise ConfigError(f"object class {self.name!r}: mean_block_duration_ms must be > 0")

    def to_dict(self):
        return {
            "name": self.name,
            "width_m": self.width_m,
            "length_m": self.length_m,
            "speed_range_mps": list(self.speed_range_mps),
            "severity_level": self.severity_level,
            "mean_block_duration_ms": self.mean_block_duration_ms,
        }

    @classmethod
    def from_dict(cls, d):
        _check_keys(d, {"name", "width_m", "length_m", "speed_range_mps",
                        "severity_level", "mean_block_duration_ms"}, "object class")
        return cls(
            name=str(d["name"]),
            width_m=float(d["width_m"]),
            length_m=float(d["length_m"]),
            speed_range_mps=(float(d["speed_range_mps"][0]), float(d["speed_range_mps"][1])),
            severity_level=int(d["severity_level"]),
            mean_block_duration_ms=float(d["mean_block_duration_ms"]),
        )


HUMAN = ObjectClass("human", width_m=0.5, length_m=0.5,
                    speed_range_mps=(1.8, 2.5), severity_level=1,
                    mean_block_duration_ms=237.0)
SEDAN = ObjectClass("sedan", width_m=1.8, length_m=4.5,
                    speed_range_mps=(11.0, 15.0), severity_level=2,
                    mean_block_duration_ms=347.0)
SUV = ObjectClass("suv", width_m=1.9, length_m=5.1,
                  speed_range_mps=(11.0, 15.0), severity_level=2,
                  mean_block_duration_ms=396.0)
TRUCK = ObjectClass("truck", width_m=2.4, length_m=8.0,
                    speed_range_mps=(10.0, 14.0), severity_level=3,
                    mean_block_duration_ms=673.0)
BUS = ObjectClass("bus", width_m=2.5, length_m=12.0,
                  speed_range_mps=(7.0, 10.0), severity_level=4,
                  mean_block_duration_ms=1427.0)

# Vehicles only: emitted severity labels stay in {2, 3, 4}.
DEFAULT_CATALOG = (SEDAN, SUV, TRUCK, BUS)


@dataclass(frozen=True)
class MovingObject:
    """Ground truth for one street crossing."""

    obj_class: ObjectClass
    direction: int           # 0: left-to-right (+x), 1: right-to-left (-x)
    speed_mps: float
    lane_offset_m: float     # y of the lane the object travels on
    spawn_instance: int
    spawn_x_m: float

    def __post_init__(self):
        if self.direction not in (0, 1):
            raise ConfigError("moving object: direction must be 0 or 1")
        if self.speed_mps <= 0:
            raise ConfigError("moving object: speed_mps must be > 0")

    @property
    def velocity_x(self) -> float:
        return self.speed_mps if self.direction == 0 else -self.speed_mps

    def center_x(self, instance: int, dt: float) -> float:
        return self.spawn_x_m + self.velocity_x * (instance - self.spawn_instance) * dt

    def footprint(self, instance: int, dt: float):
        """Axis-aligned rectangle (xmin, xmax, ymin, ymax) at an instance."""
        cx = self.center_x(instance, dt)
        hl = self.obj_class.length_m / 2.0
        hw = self.obj_class.width_m / 2.0
        return (cx - hl, cx + hl, self.lane_offset_m - hw, self.lane_offset_m + hw)

    def to_dict(self):
        return {
            "class": self.obj_class.to_dict(),
            "direction": self.direction,
            "speed_mps": self.speed_mps,
            "lane_offset_m": self.lane_offset_m,
            "spawn_instance": self.spawn_instance,
            "spawn_x_m": self.spawn_x_m,
        }

    @classmethod
    def from_dict(cls, d):
        _check_keys(d, {"class", "direction", "speed_mps", "lane_offset_m",
                        "spawn_instance", "spawn_x_m"}, "moving object")
        return cls(
            obj_class=ObjectClass.from_dict(d["class"]),
            direction=int(d["direction"]),
            speed_mps=float(d["speed_mps"]),
            lane_offset_m=float(d["lane_offset_m"]),
            spawn_instance=int(d["spawn_instance"]),
            spawn_x_m=float(d["spawn_x_m"]),
        )


def _check_keys(d, allowed, what):
    if not isinstance(d, dict):
        raise ConfigError(f"{what}: expected a JSON object, got {type(d).__name__}")
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"{what}: unknown field(s) {sorted(unknown)}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything :func:`simulate` needs; a pure function of this + nothing else."""

    seed: int = 0
    duration_instances: int = 600
    instance_dt_s: float = 0.1
    lidar_points_per_rev: int = 460
    lidar_max_range_m: float = 16.0
    lidar_jitter_std_m: float = 0.0
    num_beams: int = 64
    beam_fov: tuple[float, float] = (-math.pi / 4, math.pi / 4)
    noise_std: float = 0.0
    blockage_attenuation_db: float = 20.0
    signature_gain: float = 0.3
    link_length_m: float = 10.0
    lane_offsets_m: tuple[float, float] = (4.0, 6.0)
    static_objects: tuple[Segment2D, ...] = ()
    phantom_rate: float = 0.0
    arrival_rate: float = 0.0          # objects per second
    object_catalog: tuple[ObjectClass, ...] = DEFAULT_CATALOG

    def __post_init__(self):
        if self.duration_instances < 1:
            raise ConfigError("duration_instances must be >= 1")
        if self.instance_dt_s <= 0:
            raise ConfigError("instance_dt_s must be > 0")
        if self.lidar_points_per_rev < 1:
            raise ConfigError("lidar_points_per_rev must be >= 1")
        if self.lidar_max_range_m <= 0:
            raise ConfigError("lidar_max_range_m must be > 0")
        if self.lidar_jitter_std_m < 0:
            raise ConfigError("lidar_jitter_std_m must be >= 0")
        if self.num_beams < 1:
            raise ConfigError("num_beams must be >= 1")
        lo, hi = self.beam_fov
        if not (-math.pi <= lo < hi <= math.pi):
            raise ConfigError("beam_fov must satisfy -pi <= lo < hi <= pi")
        if self.noise_std < 0:
            raise ConfigError("noise_std must be >= 0")
        if self.phantom_rate < 0:
            raise ConfigError("phantom_rate must be >= 0")
        if self.arrival_rate < 0:
            raise ConfigError("arrival_rate must be >= 0")
        if self.link_length_m <= 0:
            raise ConfigError("link_length_m must be > 0")
        if self.arrival_rate > 0 and not self.object_catalog:
            raise ConfigError("object_catalog must not be empty when arrival_rate > 0")
        for off in self.lane_offsets_m:
            if not (0 < off < self.link_length_m):
                raise ConfigError("lane_offsets_m entries must lie strictly between 0 and link_length_m")

    @property
    def attenuation_linear(self) -> float:
        return 10.0 ** (-self.blockage_attenuation_db / 10.0)

    def to_dict(self):
        return {
            "seed": self.seed,
            "duration_instances": self.duration_instances,
            "instance_dt_s": self.instance_dt_s,
            "lidar_points_per_rev": self.lidar_points_per_rev,
            "lidar_max_range_m": self.lidar_max_range_m,
            "lidar_jitter_std_m": self.lidar_jitter_std_m,
            "num_beams": self.num_beams,
            "beam_fov": list(self.beam_fov),
            "noise_std": self.noise_std,
            "blockage_attenuation_db": self.blockage_attenuation_db,
            "signature_gain": self.signature_gain,
            "link_length_m": self.link_length_m,
            "lane_offsets_m": list(self.lane_offsets_m),
            "static_objects": [s.to_list() for s in self.static_objects],
            "phantom_rate": self.phantom_rate,
            "arrival_rate": self.arrival_rate,
            "object_catalog": [c.to_dict() for c in self.object_catalog],
        }

    @classmethod
    def from_dict(cls, d):
        allowed = {
            "seed", "duration_instances", "instance_dt_s", "lidar_points_per_rev",
            "lidar_max_range_m", "lidar_jitter_std_m", "num_beams", "beam_fov",
            "noise_std", "blockage_attenuation_db", "signature_gain", "link_length_m",
            "lane_offsets_m", "static_objects", "phantom_rate", "arrival_rate",
            "object_catalog",
        }
        _check_keys(d, allowed, "scenario config")
        kwargs = {}
        for key in allowed & set(d):
            val = d[key]
            if key == "beam_fov":
                val = (float(val[0]), float(val[1]))
            elif key == "lane_offsets_m":
                val = tuple(float(v) for v in val)
            elif key == "static_objects":
                val = tuple(Segment2D(*(float(c) for c in seg)) for seg in val)
            elif key == "object_catalog":
                val = tuple(ObjectClass.from_dict(c) for c in val)
            elif key in ("seed", "duration_instances", "lidar_points_per_rev", "num_beams"):
                val = int(val)
            else:
                val = float(val)
            kwargs[key] = val
        return cls(**kwargs)


@dataclass
class LidarScan:
    """One revolution: ``points[i] = (angle_rad, distance_m)``, distance 0 = no return.

    ``provenance`` tags each point's source (in-memory only, not serialized):
    SRC_STATIC, SRC_PHANTOM, SRC_NONE, or the index of the object hit.
    """

    instance: int
    points: np.ndarray                  # (P, 2) float64
    provenance: np.ndarray | None = None  # (P,) int64


@dataclass
class PowerVector:
    instance: int
    powers: np.ndarray                  # (M,) float64, all >= 0


@dataclass
class Trajectory:
    """A simulated run plus its ground truth."""

    config: ScenarioConfig
    scans: list
    powers: list
    link_status: np.ndarray             # (T,) int8, 1 = blocked
    objects: list                       # list[MovingObject]


@dataclass
class SceneState:
    """The world at one instance: static segments plus live object footprints."""

    instance: int
    segments: np.ndarray                # (S, 4) rows x1,y1,x2,y2 (static scene)
    object_rects: list                  # list[(object_index, (xmin, xmax, ymin, ymax))]


def ray_angles(p: int) -> np.ndarray:
    """Bearings of the P rays: uniform over a revolution, offset half a step."""
    return -math.pi + (np.arange(p) + 0.5) * (TWO_PI / p)


def beam_angles(config: ScenarioConfig) -> np.ndarray:
    lo, hi = config.beam_fov
    return lo + (np.arange(config.num_beams) + 0.5) * ((hi - lo) / config.num_beams)


def los_beam_index(config: ScenarioConfig) -> int:
    """Beam whose steering angle is nearest the transmitter bearing (0 rad)."""
    return int(np.argmin(np.abs(beam_angles(config))))


def _rect_segments(rect):
    xmin, xmax, ymin, ymax = rect
    return [
        (xmin, ymin, xmax, ymin),
        (xmax, ymin, xmax, ymax),
        (xmax, ymax, xmin, ymax),
        (xmin, ymax, xmin, ymin),
    ]


def _spawn_offset(config: ScenarioConfig, obj_class: ObjectClass) -> float:
    return config.lidar_max_range_m + obj_class.length_m / 2.0 + _SPAWN_MARGIN_M


def object_alive(obj: MovingObject, instance: int, config: ScenarioConfig) -> bool:
    """Alive = spawned and not yet past the despawn line on the far side."""
    if instance < obj.spawn_instance:
        return False
    limit = _spawn_offset(config, obj.obj_class)
    return abs(obj.center_x(instance, config.instance_dt_s)) <= limit


def scene_state_at(config: ScenarioConfig, objects, instance: int) -> SceneState:
    segs = np.array([s.to_list() for s in config.static_objects], dtype=float)
    segs = segs.reshape(-1, 4)
    rects = [
        (idx, obj.footprint(instance, config.instance_dt_s))
        for idx, obj in enumerate(objects)
        if object_alive(obj, instance, config)
    ]
    return SceneState(instance=instance, segments=segs, object_rects=rects)


def link_status(state: SceneState, config: ScenarioConfig) -> int:
    """1 iff some object footprint intersects the TX-RX segment (x = 0 line).

    Closed intersection: tangent contact blocks.
    """
    for _, (xmin, xmax, ymin, ymax) in state.object_rects:
        if xmin <= 0.0 <= xmax and ymax >= 0.0 and ymin <= config.link_length_m:
            return 1
    return 0


def render_lidar_scan(state: SceneState, config: ScenarioConfig,
                      rng: np.random.Generator | None = None) -> LidarScan:
    """Ray-cast one scan: static scene + live objects, jitter, phantoms, shuffle.

    With ``rng=None`` the scan is rendered clean and in ray order (no jitter,
    no phantoms, no shuffle) regardless of the configured rates; `simulate`
    always passes a generator.
    """
    p = config.lidar_points_per_rev
    angles = ray_angles(p)
    dirs = np.stack([np.sin(angles), np.cos(angles)], axis=1)

    all_segments = [state.segments.reshape(-1, 4)]
    seg_sources = [np.full(state.segments.reshape(-1, 4).shape[0], SRC_STATIC, dtype=np.int64)]
    for obj_idx, rect in state.object_rects:
        edges = np.array(_rect_segments(rect), dtype=float)
        all_segments.append(edges)
        seg_sources.append(np.full(4, obj_idx, dtype=np.int64))
    segments = np.concatenate(all_segments, axis=0)
    sources = np.concatenate(seg_sources, axis=0)

    if segments.shape[0]:
        n_rays = dirs.shape[0]
        p_xy = segments[:, 0:2]
        qp = segments[:, 2:4] - p_xy
        denom = dirs[:, 0:1] * qp[:, 1] - dirs[:, 1:2] * qp[:, 0]
        p_cross_qp = p_xy[:, 0] * qp[:, 1] - p_xy[:, 1] * qp[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = p_cross_qp[None, :] / denom
            cross_p_d = (p_xy[None, :, 0] * dirs[:, None, 1]
                         - p_xy[None, :, 1] * dirs[:, None, 0])
            u = cross_p_d / denom
        valid = (denom != 0) & (t > 1e-9) & (u >= 0.0) & (u <= 1.0)
        t = np.where(valid, t, np.inf)
        hit_seg = np.argmin(t, axis=1)
        dist = t[np.arange(n_rays), hit_seg]
        prov = np.where(np.isinf(dist), SRC_NONE, sources[hit_seg])
    else:
        dist = np.full(p, np.inf)
        prov = np.full(p, SRC_NONE, dtype=np.int64)

    in_range = np.isfinite(dist) & (dist <= config.lidar_max_range_m)
    distance = np.where(in_range, dist, 0.0)
    prov = np.where(in_range, prov, SRC_NONE)

    if rng is not None:
        if config.lidar_jitter_std_m > 0:
            jitter = rng.normal(0.0, config.lidar_jitter_std_m, size=p)
            distance = np.where(
                in_range,
                np.clip(distance + jitter, _MIN_RETURN_M, config.lidar_max_range_m),
                0.0,
            )
        if config.phantom_rate > 0:
            k = min(int(rng.poisson(config.phantom_rate)), p)
            if k:
                idx = rng.choice(p, size=k, replace=False)
                distance = distance.copy()
                distance[idx] = rng.uniform(0.5, 0.95 * config.lidar_max_range_m, size=k)
                prov[idx] = SRC_PHANTOM
        order = rng.permutation(p)
    else:
        order = np.arange(p)

    points = np.stack([angles, distance], axis=1)[order]
    return LidarScan(instance=state.instance, points=points, provenance=prov[order])


def object_bearing_distance(rect):
    """Bearing/distance of the nearest point of a footprint to the sensor."""
    xmin, xmax, ymin, ymax = rect
    nx = min(max(0.0, xmin), xmax)
    ny = min(max(0.0, ymin), ymax)
    d = math.hypot(nx, ny)
    cx = (xmin + xmax) / 2.0
    cy = (ymin + ymax) / 2.0
    bearing = math.atan2(cx, cy)
    return bearing, max(d, 1e-6)


def render_power_vector(state: SceneState, config: ScenarioConfig,
                        rng: np.random.Generator | None = None) -> PowerVector:
    """Per-beam receive power for one instance (see module docstring)."""
    thetas = beam_angles(config)
    powers = np.zeros(config.num_beams)
    blocked = link_status(state, config)
    m_star = los_beam_index(config)
    powers[m_star] = config.attenuation_linear if blocked else 1.0

    lo, hi = config.beam_fov
    beam_width = (hi - lo) / config.num_beams
    for _, rect in state.object_rects:
        xmin, xmax, ymin, ymax = rect
        if xmin <= 0.0 <= xmax and ymax >= 0.0 and ymin <= config.link_length_m:
            continue  # the blocker itself reflects nothing extra
        bearing, d = object_bearing_distance(rect)
        if not (lo <= bearing <= hi):
            continue
        if d > config.lidar_max_range_m:
            continue
        refl = config.signature_gain * min(1.0, (_SIGNATURE_REF_M / d) ** 2)
        powers += refl * np.exp(-0.5 * ((thetas - bearing) / beam_width) ** 2)

    if rng is not None and config.noise_std > 0:
        powers = powers + rng.normal(0.0, config.noise_std, size=config.num_beams)
    return PowerVector(instance=state.instance, powers=np.clip(powers, 0.0, None))


def _sample_objects(config: ScenarioConfig, rng: np.random.Generator):
    """Poisson arrivals; each object gets a class, direction, speed, lane."""
    objects = []
    lam = config.arrival_rate * config.instance_dt_s
    for t in range(config.duration_instances):
        for _ in range(rng.poisson(lam)):
            obj_class = config.object_catalog[rng.integers(len(config.object_catalog))]
            direction = int(rng.integers(2))
            lo, hi = obj_class.speed_range_mps
            speed = float(rng.uniform(lo, hi))
            offset = _spawn_offset(config, obj_class)
            spawn_x = -offset if direction == 0 else offset
            objects.append(MovingObject(
                obj_class=obj_class,
                direction=direction,
                speed_mps=speed,
                lane_offset_m=config.lane_offsets_m[direction % len(config.lane_offsets_m)],
                spawn_instance=t,
                spawn_x_m=spawn_x,
            ))
    return objects


def simulate(config: ScenarioConfig, objects=None) -> Trajectory:
    """Run the scene end to end; same config (and objects) => identical output.

    ``objects`` overrides arrival sampling with a caller-supplied list of
    :class:`MovingObject` — handy for controlled single-crossing setups.
    """
    ss = np.random.SeedSequence(config.seed)
    arrivals_seed, lidar_seed, power_seed = ss.spawn(3)
    if objects is None:
        objects = _sample_objects(config, np.random.default_rng(arrivals_seed))
    else:
        objects = list(objects)

    lidar_rng = np.random.default_rng(lidar_seed)
    power_rng = np.random.default_rng(power_seed)

    scans = []
    powers = []
    x = np.zeros(config.duration_instances, dtype=np.int8)
    for t in range(config.duration_instances):
        state = scene_state_at(config, objects, t)
        scans.append(render_lidar_scan(state, config, lidar_rng))
        powers.append(render_power_vector(state, config, power_rng))
        x[t] = link_status(state, config)
    return Trajectory(config=config, scans=scans, powers=powers,
                      link_status=x, objects=objects)


def object_block_window_s(obj: MovingObject, config: ScenarioConfig):
    """Continuous-time interval (seconds since t=0) the object blocks the link.

    None if the footprint never straddles x = 0 (the lane always faces the
    link here, so only the x extent matters).
    """
    hl = obj.obj_class.length_m / 2.0
    vx = obj.velocity_x
    t0 = obj.spawn_instance * config.instance_dt_s
    # center_x(t) = spawn_x + vx * (t - t0); blocked while |center_x| <= hl
    t_in = t0 + (-hl - obj.spawn_x_m) / vx
    t_out = t0 + (hl - obj.spawn_x_m) / vx
    t_in, t_out = min(t_in, t_out), max(t_in, t_out)
    end = (config.duration_instances - 1) * config.instance_dt_s
    if t_out < 0 or t_in > end:
        return None
    return (max(t_in, 0.0), min(t_out, end))


def objects_crossing(traj: Trajectory):
    """Indices of objects whose path blocks the link within the trajectory."""
    return [i for i, obj in enumerate(traj.objects)
            if object_block_window_s(obj, traj.config) is not None]


def object_free_instances(traj: Trajectory):
    """Instances with no object inside sensor range (dictionary-safe frames)."""
    cfg = traj.config
    free = []
    for t in range(cfg.duration_instances):
        clear = True
        for obj in traj.objects:
            if not object_alive(obj, t, cfg):
                continue
            xmin, xmax, ymin, ymax = obj.footprint(t, cfg.instance_dt_s)
            nx = min(max(0.0, xmin), xmax)
            ny = min(max(0.0, ymin), ymax)
            if math.hypot(nx, ny) <= cfg.lidar_max_range_m:
                clear = False
                break
        if clear:
            free.append(t)
    return free


def blocking_object_at(traj: Trajectory, instance: int):
    """Index of the object blocking the link at an instance (first wins), or None."""
    state = scene_state_at(traj.config, traj.objects, instance)
    for obj_idx, (xmin, xmax, ymin, ymax) in state.object_rects:
        if xmin <= 0.0 <= xmax and ymax >= 0.0 and ymin <= traj.config.link_length_m:
            return obj_idx
    return None
