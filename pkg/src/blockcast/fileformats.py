"""On-disk formats exchanged between pipeline stages.

Every stage communicates through files so stages can be rerun, diffed, and
consumed by external tools:

* trajectory directory — ``config.json``, ``scans.csv``, ``powers.csv``,
  ``link.csv``, ``objects.json``;
* static dictionary — ``dict.csv`` (angle/distance level pairs) plus
  ``dict_meta.json`` (grid shape, frame count);
* denoised scans — ``preprocessed.csv``;
* dataset — ``windows.jsonl`` (one window per line, sparse points) plus
  ``manifest.json``;
* fitted parameters — ``baseline_params.json``; predictions — ``preds.csv``.

All floats are written with 9 significant digits; rereading and rewriting
any file reproduces it byte for byte.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .io_utils import (dump_json, ensure_dir, fmt_float, load_json, read_csv,
                       round9, write_csv)
from .lidar_prep import QuantizedScan, ScrConfig, StaticDictionary
from .simulator import (LidarScan, MovingObject, PowerVector, ScenarioConfig,
                        Trajectory)
from .windowing import Labels, ObservationWindow

SCANS_HEADER = ["t", "angle_rad", "distance_m"]
LINK_HEADER = ["t", "x"]
DICT_HEADER = ["angle_level", "distance_level"]
PREPROCESSED_HEADER = ["t", "angle_level", "distance_level", "angle_rad",
                       "distance_m"]
PREDS_HEADER = ["window", "problem", "prediction"]


def file_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------- trajectory directory ----------

def save_trajectory(traj: Trajectory, out_dir) -> Path:
    out = ensure_dir(out_dir)
    dump_json(out / "config.json", traj.config.to_dict())
    dump_json(out / "objects.json",
              {"objects": [o.to_dict() for o in traj.objects]})
    write_csv(out / "link.csv", LINK_HEADER,
              [[t, int(x)] for t, x in enumerate(traj.link_status)])
    scan_rows = []
    for scan in traj.scans:
        for angle, dist in scan.points:
            scan_rows.append([scan.instance, float(angle), float(dist)])
    write_csv(out / "scans.csv", SCANS_HEADER, scan_rows)
    m = traj.config.num_beams
    power_header = ["t"] + [f"p_{i}" for i in range(m)]
    power_rows = [[p.instance] + [float(v) for v in p.powers]
                  for p in traj.powers]
    write_csv(out / "powers.csv", power_header, power_rows)
    return out


def load_trajectory(traj_dir) -> Trajectory:
    d = Path(traj_dir)
    config = ScenarioConfig.from_dict(load_json(d / "config.json"))
    objects = [MovingObject.from_dict(o)
               for o in load_json(d / "objects.json")["objects"]]

    _, link_rows = read_csv(d / "link.csv", LINK_HEADER)
    if len(link_rows) != config.duration_instances:
        raise SchemaError(f"link.csv: expected {config.duration_instances} rows, "
                          f"got {len(link_rows)}")
    link = np.array([int(r[1]) for r in link_rows], dtype=np.int8)

    _, scan_rows = read_csv(d / "scans.csv", SCANS_HEADER)
    p = config.lidar_points_per_rev
    t_total = config.duration_instances
    if len(scan_rows) != p * t_total:
        raise SchemaError(f"scans.csv: expected {p * t_total} rows, "
                          f"got {len(scan_rows)}")
    scans = []
    for t in range(t_total):
        block = scan_rows[t * p: (t + 1) * p]
        if any(int(r[0]) != t for r in block):
            raise SchemaError(f"scans.csv: rows for instance {t} out of place")
        points = np.array([[float(r[1]), float(r[2])] for r in block])
        scans.append(LidarScan(instance=t, points=points))

    m = config.num_beams
    header, power_rows = read_csv(d / "powers.csv",
                                  ["t"] + [f"p_{i}" for i in range(m)])
    if len(power_rows) != t_total:
        raise SchemaError(f"powers.csv: expected {t_total} rows, got {len(power_rows)}")
    powers = [PowerVector(instance=int(r[0]),
                          powers=np.array([float(v) for v in r[1:]]))
              for r in power_rows]

    return Trajectory(config=config, scans=scans, powers=powers,
                      link_status=link, objects=objects)


# ---------- static dictionary ----------

def save_dictionary(dictionary: StaticDictionary, out_dir) -> Path:
    out = ensure_dir(out_dir)
    write_csv(out / "dict.csv", DICT_HEADER, dictionary.pairs())
    dump_json(out / "dict_meta.json", {
        "q": dictionary.q,
        "q_d": dictionary.q_d,
        "source_frame_count": dictionary.source_frame_count,
    })
    return out


def load_dictionary(dict_dir) -> StaticDictionary:
    d = Path(dict_dir)
    meta = load_json(d / "dict_meta.json")
    _, rows = read_csv(d / "dict.csv", DICT_HEADER)
    q, q_d = int(meta["q"]), int(meta["q_d"])
    packed = np.array([int(r[0]) * q_d + int(r[1]) for r in rows], dtype=np.int64)
    if np.any(np.diff(packed) <= 0):
        raise SchemaError("dict.csv: entries must be strictly ascending")
    return StaticDictionary(entries=packed, q=q, q_d=q_d,
                            source_frame_count=int(meta["source_frame_count"]))


# ---------- denoised scans ----------

def save_preprocessed(scans, out_dir) -> Path:
    out = ensure_dir(out_dir)
    rows = []
    for scan in scans:
        for lvl, dlvl, angle, dist in zip(scan.levels, scan.distance_levels,
                                          scan.angles, scan.distances):
            rows.append([scan.instance, int(lvl), int(dlvl),
                         float(angle), float(dist)])
    write_csv(out / "preprocessed.csv", PREPROCESSED_HEADER, rows)
    return out


def load_preprocessed(prep_dir, cfg: ScrConfig, duration: int):
    _, rows = read_csv(Path(prep_dir) / "preprocessed.csv", PREPROCESSED_HEADER)
    by_t = {}
    for r in rows:
        by_t.setdefault(int(r[0]), []).append(r)
    scans = []
    for t in range(duration):
        block = by_t.pop(t, [])
        levels = np.array([int(r[1]) for r in block], dtype=np.int64)
        if np.any(np.diff(levels) <= 0):
            raise SchemaError(f"preprocessed.csv: levels not ascending at t={t}")
        scans.append(QuantizedScan(
            instance=t,
            levels=levels,
            distance_levels=np.array([int(r[2]) for r in block], dtype=np.int64),
            angles=np.array([float(r[3]) for r in block]),
            distances=np.array([float(r[4]) for r in block]),
            q=cfg.q, q_d=cfg.q_d, phi1=cfg.phi1, phi2=cfg.phi2,
        ))
    if by_t:
        raise SchemaError(f"preprocessed.csv: instances {sorted(by_t)} outside "
                          f"the trajectory duration {duration}")
    return scans


# ---------- window datasets ----------

def _window_to_record(w: ObservationWindow) -> dict:
    lidar = []
    for row in w.lidar:
        slots = np.flatnonzero(row[:, 1] != 0.0)
        lidar.append([[int(s), float(row[s, 0]), float(row[s, 1])]
                      for s in slots])
    return {
        "source": [w.source[0], int(w.source[1])],
        "labels": w.labels.to_dict(),
        "power": [[float(v) for v in p] for p in w.power],
        "lidar": lidar,
    }


def _window_from_record(rec: dict, width: int) -> ObservationWindow:
    power = np.array(rec["power"], dtype=float)
    t_ob = power.shape[0]
    lidar = np.zeros((t_ob, width, 2))
    for k, row in enumerate(rec["lidar"]):
        for slot, angle, dist in row:
            lidar[k, int(slot), 0] = angle
            lidar[k, int(slot), 1] = dist
    return ObservationWindow(
        lidar=lidar, power=power,
        labels=Labels.from_dict(rec["labels"]),
        source=(str(rec["source"][0]), int(rec["source"][1])),
    )


def save_windows(windows, manifest: dict, out_dir) -> Path:
    out = ensure_dir(out_dir)
    manifest = dict(manifest)
    manifest["count"] = len(windows)
    widths = {w.lidar.shape[1] for w in windows}
    if len(widths) > 1:
        raise SchemaError(f"save_windows: mixed window widths {sorted(widths)}")
    if windows:
        manifest.setdefault("width", int(widths.pop()))
        manifest.setdefault("t_ob", int(windows[0].lidar.shape[0]))
    dump_json(out / "manifest.json", manifest)
    with open(out / "windows.jsonl", "w", newline="\n") as fh:
        for w in windows:
            fh.write(json.dumps(round9(_window_to_record(w)),
                                separators=(",", ":")))
            fh.write("\n")
    return out


def load_windows(win_dir):
    d = Path(win_dir)
    manifest = load_json(d / "manifest.json")
    width = int(manifest["width"])
    windows = []
    with open(d / "windows.jsonl") as fh:
        for line_no, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"windows.jsonl line {line_no + 1}: {exc}") from exc
            windows.append(_window_from_record(rec, width))
    if len(windows) != int(manifest["count"]):
        raise SchemaError(f"windows.jsonl: manifest count {manifest['count']} "
                          f"!= {len(windows)} lines")
    return windows, manifest


# ---------- parameters and predictions ----------

def save_params(params: dict, path) -> None:
    dump_json(path, params)


def load_params(path) -> dict:
    doc = load_json(path)
    if not isinstance(doc, dict) or "problem" not in doc:
        raise SchemaError(f"{path}: parameter file must carry a 'problem' field")
    return doc


def write_preds(rows, path) -> None:
    """rows: iterable of (window id, problem, prediction)."""
    write_csv(path, PREDS_HEADER,
              [[int(w), int(p), float(v)] for w, p, v in rows])


def read_preds(path):
    _, rows = read_csv(path, PREDS_HEADER)
    out = []
    for r in rows:
        try:
            out.append((int(r[0]), int(r[1]), float(r[2])))
        except ValueError as exc:
            raise SchemaError(f"{path}: bad prediction row {r}") from exc
    return out
