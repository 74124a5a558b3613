"""Window construction and label tests.

Label operators are checked against brute-force oracles on random traces;
the sliding logic is checked on controlled single-crossing scenes where
every label is predictable by hand.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockcast.errors import ConfigError
from blockcast.lidar_prep import (ScrConfig, build_dictionary,
                                  preprocess_trajectory, quantize_scan)
from blockcast.simulator import Segment2D, simulate
from blockcast.windowing import (
    DEFAULT_SEVERITY_PARTITIONS,
    Labels,
    WindowConfig,
    balance_windows,
    densify,
    make_direction_label,
    make_instance_label,
    make_occurrence_label,
    make_severity_label,
    slide_windows,
    sparsify,
    split_windows,
)

from tests.test_lidar_prep import scan_of
from tests.test_simulator import ball_class, inject, small_config


# ---------- label operators ----------

def test_occurrence_label_worked_examples():
    assert make_occurrence_label([0, 0, 1], 0, 2) == 1
    assert make_occurrence_label([0, 0, 0], 0, 2) == 0
    # Blockage at the current instance does not count; only the horizon does.
    assert make_occurrence_label([1, 0, 0], 0, 2) == 0


def test_occurrence_label_bounds():
    with pytest.raises(ConfigError):
        make_occurrence_label([0, 0, 0], 1, 2)
    with pytest.raises(ConfigError):
        make_occurrence_label([0, 0, 0], -1, 1)
    with pytest.raises(ConfigError):
        make_occurrence_label([0, 0, 0], 0, 0)


def test_instance_label_worked_examples():
    assert make_instance_label([0, 0, 0, 1, 1], 0, 4) == 3
    assert make_instance_label([0, 1, 1, 1, 1], 0, 4) == 1
    assert make_instance_label([0, 0, 0, 0, 0], 0, 4) is None


def test_label_oracles_random_traces():
    rng = np.random.default_rng(11)
    for _ in range(2000):
        n = int(rng.integers(5, 40))
        x = rng.integers(0, 2, size=n)
        t_p = int(rng.integers(1, min(10, n - 1)))
        t = int(rng.integers(0, n - t_p))
        expect_b = 0
        expect_n = None
        for k in range(1, t_p + 1):
            if x[t + k] == 1:
                expect_b = 1
                expect_n = k
                break
        assert make_occurrence_label(x, t, t_p) == expect_b
        assert make_instance_label(x, t, t_p) == expect_n


def test_severity_label_from_duration():
    assert make_severity_label(inject(small_config(), ball_class(duration_ms=237.0))) == 1
    assert make_severity_label(inject(small_config(), ball_class(duration_ms=347.0))) == 2
    assert make_severity_label(inject(small_config(), ball_class(duration_ms=673.0))) == 3
    assert make_severity_label(inject(small_config(), ball_class(duration_ms=1427.0))) == 4


def test_severity_label_boundary_goes_up():
    # Half-open intervals: a duration exactly on a boundary belongs above it.
    assert make_severity_label(inject(small_config(), ball_class(duration_ms=300.0))) == 2
    assert make_severity_label(inject(small_config(), ball_class(duration_ms=299.999))) == 1


def test_severity_label_outside_partitions():
    with pytest.raises(ConfigError):
        make_severity_label(inject(small_config(), ball_class(duration_ms=2400.0)))


def test_direction_label():
    cfg = small_config()
    assert make_direction_label(inject(cfg, ball_class(), direction=0)) == 0
    assert make_direction_label(inject(cfg, ball_class(), direction=1)) == 1


def test_labels_consistency():
    with pytest.raises(ConfigError):
        Labels(occurrence=0, instance=3)
    with pytest.raises(ConfigError):
        Labels(occurrence=1)  # missing blockage fields
    with pytest.raises(ConfigError):
        Labels(occurrence=1, instance=0, severity=2, direction=0)
    lab = Labels(occurrence=1, instance=2, severity=2, direction=0)
    assert Labels.from_dict(lab.to_dict()) == lab
    neg = Labels(occurrence=0)
    assert Labels.from_dict(neg.to_dict()) == neg


def test_partition_validation():
    with pytest.raises(ConfigError):
        WindowConfig(severity_partitions=((0.0, 300.0), (400.0, 600.0)))
    with pytest.raises(ConfigError):
        WindowConfig(severity_partitions=((300.0, 300.0),))
    with pytest.raises(ConfigError):
        WindowConfig(severity_partitions=())


def test_window_config_dict_round_trip():
    cfg = WindowConfig(t_ob=12, t_p=5, stride=2)
    again = WindowConfig.from_dict(cfg.to_dict())
    assert again == cfg
    with pytest.raises(ConfigError):
        WindowConfig.from_dict({"t_ob": 16, "bogus": 1})
    with pytest.raises(ConfigError):
        WindowConfig(t_p=11)


# ---------- densify ----------

def test_densify_layout():
    pts = np.array([[0.0, 5.0], [1.0, 7.0]])
    q = quantize_scan(scan_of(pts), ScrConfig())
    dense = densify(q)
    assert dense.shape == (q.q, 2)
    # Occupied rows carry the representative distances at level centers.
    occupied = np.flatnonzero(dense[:, 1] != 0.0)
    assert set(occupied.tolist()) == set(q.levels.tolist())
    assert np.allclose(np.sort(dense[occupied, 1]), np.sort(q.distances))
    centers = q.phi1 + (np.arange(q.q) + 0.5) * (q.phi2 - q.phi1) / q.q
    assert np.allclose(dense[:, 0][: q.q], centers)


def test_densify_widening_and_errors():
    pts = np.array([[0.5, 3.0]])
    q = quantize_scan(scan_of(pts), ScrConfig())
    dense = densify(q, w=q.q + 10)
    assert dense.shape == (q.q + 10, 2)
    assert np.all(dense[q.q:, :] == 0.0)
    with pytest.raises(ConfigError):
        densify(q, w=q.q - 1)


def test_sparsify_recovers_occupancy():
    pts = np.array([[0.0, 5.0], [0.7, 7.0], [2.0, 4.0]])
    q = quantize_scan(scan_of(pts), ScrConfig())
    back = sparsify(densify(q))
    assert back.shape == (len(q), 2)
    assert np.allclose(np.sort(back[:, 1]), np.sort(q.distances))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 30))
def test_densify_round_trip_random(seed, n):
    rng = np.random.default_rng(seed)
    angles = rng.uniform(-np.pi / 6 + 1e-6, np.pi - 1e-6, size=n)
    dists = rng.uniform(0.1, 16.0, size=n)
    q = quantize_scan(scan_of(np.column_stack([angles, dists])), ScrConfig())
    back = sparsify(densify(q))
    assert len(back) == len(q)
    assert np.allclose(np.sort(back[:, 1]), np.sort(q.distances))


# ---------- sliding ----------

def test_window_count_arithmetic():
    # 26 instances, 16 observed, horizon 10: exactly one admissible start.
    cfg = small_config(duration_instances=26)
    traj = simulate(cfg)
    wins = slide_windows(traj, None, WindowConfig(t_ob=16, t_p=10), traj_id="a")
    assert len(wins) == 1
    assert wins[0].source == ("a", 0)
    assert wins[0].labels == Labels(occurrence=0)


def test_stride_thins_starts():
    cfg = small_config(duration_instances=50)
    traj = simulate(cfg)
    all_wins = slide_windows(traj, None, WindowConfig(t_ob=16, t_p=1))
    thinned = slide_windows(traj, None, WindowConfig(t_ob=16, t_p=1, stride=3))
    assert [w.start for w in thinned] == [w.start for w in all_wins][::3]


def test_raw_window_shapes():
    cfg = small_config(duration_instances=30)
    traj = simulate(cfg)
    wins = slide_windows(traj, None, WindowConfig(t_ob=16, t_p=2))
    for w in wins:
        assert w.lidar.shape == (16, cfg.lidar_points_per_rev, 2)
        assert w.power.shape == (16, cfg.num_beams)
        assert np.array_equal(
            w.lidar[0], traj.scans[w.start].points)
        assert np.array_equal(
            w.power[-1], traj.powers[w.start + 15].powers)


def test_quantized_window_shapes():
    cfg = small_config(duration_instances=30)
    traj = simulate(cfg)
    scr = ScrConfig()
    scans = [quantize_scan(s, scr) for s in traj.scans]
    wins = slide_windows(traj, scans, WindowConfig(t_ob=16, t_p=2))
    for w in wins:
        assert w.lidar.shape == (16, scr.q, 2)


def test_windows_end_unblocked_and_labels_match_oracle():
    cfg = small_config(duration_instances=120, seed=2)
    obj = inject(cfg, ball_class(speed=4.0), direction=1, speed=4.0, spawn_instance=0)
    traj = simulate(cfg, objects=[obj])
    assert traj.link_status.sum() > 0
    wcfg = WindowConfig(t_ob=16, t_p=10)
    wins = slide_windows(traj, None, wcfg, traj_id="x")
    assert wins, "expected at least one window"
    x = traj.link_status
    starts = set()
    for w in wins:
        t = w.start + wcfg.t_ob - 1
        starts.add(w.start)
        assert x[t] == 0
        expect_b = int(np.any(x[t + 1: t + 11] == 1))
        assert w.labels.occurrence == expect_b
        if expect_b:
            n = int(np.flatnonzero(x[t + 1: t + 11] == 1)[0]) + 1
            assert w.labels.instance == n
            assert w.labels.severity == 2
            assert w.labels.direction == 1
        else:
            assert w.labels.instance is None
    # Ends that are blocked must have been skipped entirely.
    for start in range(0, len(x) - wcfg.t_ob - wcfg.t_p + 1):
        t = start + wcfg.t_ob - 1
        if x[t] == 1:
            assert start not in starts


def test_slide_windows_rejects_short_scan_list():
    cfg = small_config(duration_instances=30)
    traj = simulate(cfg)
    scans = [quantize_scan(s, ScrConfig()) for s in traj.scans[:-1]]
    with pytest.raises(ConfigError):
        slide_windows(traj, scans, WindowConfig())


def test_preprocessed_windows_drop_static_returns():
    cfg = small_config(
        duration_instances=40, lidar_points_per_rev=120,
        static_objects=(Segment2D(-8.0, 12.0, 8.0, 12.0),))
    traj = simulate(cfg)
    scr = ScrConfig(phi1=-np.pi / 2, phi2=np.pi / 2)
    dictionary = build_dictionary(traj.scans[:20], scr)
    cleaned = preprocess_trajectory(traj, dictionary, scr)
    wins = slide_windows(traj, cleaned, WindowConfig(t_ob=16, t_p=1))
    for w in wins:
        assert np.all(w.lidar[:, :, 1] == 0.0)


# ---------- split / balance ----------

def _toy_windows(n_pos, n_neg):
    from blockcast.windowing import ObservationWindow

    lidar = np.zeros((2, 4, 2))
    power = np.zeros((2, 3))
    wins = []
    for i in range(n_pos + n_neg):
        if i < n_pos:
            lab = Labels(occurrence=1, instance=1, severity=2, direction=0)
        else:
            lab = Labels(occurrence=0)
        wins.append(ObservationWindow(lidar=lidar, power=power, labels=lab,
                                      source=("t", i)))
    return wins


def test_split_windows_partition():
    wins = _toy_windows(10, 30)
    train, val = split_windows(wins, 0.25, seed=5)
    assert len(val) == 10 and len(train) == 30
    ids = sorted(w.source for w in train + val)
    assert ids == [w.source for w in wins]
    train2, val2 = split_windows(wins, 0.25, seed=5)
    assert [w.source for w in val2] == [w.source for w in val]
    with pytest.raises(ConfigError):
        split_windows(wins, 1.0, seed=1)


def test_balance_windows_equalizes():
    wins = _toy_windows(4, 20)
    balanced = balance_windows(wins, seed=9)
    pos = sum(w.labels.occurrence for w in balanced)
    assert pos == 4 and len(balanced) == 8
    again = balance_windows(wins, seed=9)
    assert [w.source for w in again] == [w.source for w in balanced]
    with pytest.raises(ConfigError):
        balance_windows([w for w in wins if w.labels.occurrence == 0], seed=1)


def test_default_partitions_cover_catalog():
    lo = DEFAULT_SEVERITY_PARTITIONS[0][0]
    hi = DEFAULT_SEVERITY_PARTITIONS[-1][1]
    assert lo == 0.0 and hi > 1427.0
