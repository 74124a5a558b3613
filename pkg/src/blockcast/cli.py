"""Command-line pipeline: simulate -> build-dict -> preprocess -> windows ->
fit -> predict -> eval.

Each subcommand wraps one module operation, reads and writes the formats in
:mod:`fileformats`, and is deterministic given its inputs.  Exit codes: 0 on
success, 2 for usage or input problems (single-line message on stderr), 1
for internal invariant violations.  ``BLOCKCAST_LOG`` sets log verbosity
(debug/info/warning/error).
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .baselines import (DbscanParams, fit_severity_thresholds, fit_threshold,
                        predict_crossing_time, predict_direction,
                        predict_occurrence, predict_severity_threshold)
from .errors import ConfigError, PredictionError, SchemaError
from .evaluation import ProblemResult, emit_report, evaluate
from .fileformats import (load_dictionary, load_params, load_preprocessed,
                          load_trajectory, load_windows, read_preds,
                          save_dictionary, save_params, save_preprocessed,
                          save_trajectory, save_windows, write_preds)
from .io_utils import load_json
from .lidar_prep import (ScrConfig, build_dictionary, preprocess_trajectory,
                         quantize_scan)
from .simulator import ScenarioConfig, object_free_instances, simulate
from .windowing import WindowConfig, balance_windows, slide_windows

log = logging.getLogger("blockcast")


@dataclass(frozen=True)
class RunConfig:
    """One JSON document configuring every pipeline stage."""

    scenario: ScenarioConfig = ScenarioConfig()
    scr: ScrConfig = ScrConfig()
    window: WindowConfig = WindowConfig()
    dbscan: DbscanParams = DbscanParams()

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        allowed = {"scenario", "scr", "window", "dbscan"}
        unknown = set(d) - allowed
        if unknown:
            raise ConfigError(f"run config: unknown field(s) {sorted(unknown)}")
        return cls(
            scenario=ScenarioConfig.from_dict(d.get("scenario", {})),
            scr=ScrConfig.from_dict(d.get("scr", {})),
            window=WindowConfig.from_dict(d.get("window", {})),
            dbscan=DbscanParams.from_dict(d.get("dbscan", {})),
        )

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_dict(load_json(path))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # One machine-parseable line instead of usage + message.
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="blockcast", description=__doc__, add_help=True)
    p.add_argument("--version", action="version", version=f"blockcast {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="render a scenario to a trajectory directory")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", required=True)
    sim.add_argument("--seed", type=int, default=None,
                     help="override the scenario seed")

    bd = sub.add_parser("build-dict", help="build the static dictionary from "
                                           "object-free frames")
    bd.add_argument("--config", required=True)
    bd.add_argument("--traj", required=True)
    bd.add_argument("--out", required=True)

    pre = sub.add_parser("preprocess", help="denoise a trajectory's scans")
    pre.add_argument("--config", required=True)
    pre.add_argument("--traj", required=True)
    pre.add_argument("--dict", dest="dict_dir", required=True)
    pre.add_argument("--out", required=True)

    win = sub.add_parser("windows", help="slice a trajectory into labeled windows")
    win.add_argument("--config", required=True)
    win.add_argument("--traj", required=True, nargs="+")
    win.add_argument("--prep", nargs="+", default=None,
                     help="matching denoised-scan directories (required with --scr on)")
    win.add_argument("--scr", choices=("on", "off"), default="on")
    win.add_argument("--horizon", type=int, default=None, choices=range(1, 11),
                     help="override the window config's prediction horizon")
    win.add_argument("--balance", action="store_true",
                     help="subsample the majority occurrence class")
    win.add_argument("--out", required=True)

    fit = sub.add_parser("fit", help="fit baseline parameters on a window dataset")
    fit.add_argument("--config", required=True)
    fit.add_argument("--windows", required=True)
    fit.add_argument("--problem", type=int, required=True, choices=(1, 2, 3, 4))
    fit.add_argument("--out", required=True)

    pred = sub.add_parser("predict", help="run a baseline over a window dataset")
    pred.add_argument("--config", required=True)
    pred.add_argument("--windows", required=True)
    pred.add_argument("--params", required=True)
    pred.add_argument("--out", required=True)

    ev = sub.add_parser("eval", help="score predictions against window labels")
    ev.add_argument("--windows", required=True)
    ev.add_argument("--preds", required=True, nargs="+")
    ev.add_argument("--out", required=True)
    return p


# ---------- commands ----------

def cmd_simulate(args) -> None:
    cfg = RunConfig.load(args.config)
    scenario = cfg.scenario
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)
    traj = simulate(scenario)
    save_trajectory(traj, args.out)
    log.info("simulate: %d instances, %d objects, %d blocked",
             scenario.duration_instances, len(traj.objects),
             int(traj.link_status.sum()))


def cmd_build_dict(args) -> None:
    cfg = RunConfig.load(args.config)
    traj = load_trajectory(args.traj)
    free = object_free_instances(traj)
    if not free:
        raise ConfigError("build-dict: trajectory has no object-free instances")
    frames = [traj.scans[t] for t in free[: cfg.scr.dictionary_frames]]
    dictionary = build_dictionary(frames, cfg.scr)
    save_dictionary(dictionary, args.out)
    log.info("build-dict: %d entries from %d frames", len(dictionary), len(frames))


def cmd_preprocess(args) -> None:
    cfg = RunConfig.load(args.config)
    traj = load_trajectory(args.traj)
    dictionary = load_dictionary(args.dict_dir)
    cleaned = preprocess_trajectory(traj, dictionary, cfg.scr)
    before = sum(len(quantize_scan(s, cfg.scr)) for s in traj.scans)
    after = sum(len(c) for c in cleaned)
    save_preprocessed(cleaned, args.out)
    if before:
        log.info("preprocess: kept %d of %d points (removal rate %.3f)",
                 after, before, (before - after) / before)


def cmd_windows(args) -> None:
    cfg = RunConfig.load(args.config)
    wcfg = cfg.window
    if args.horizon is not None:
        wcfg = dataclasses.replace(wcfg, t_p=args.horizon)
    use_scr = args.scr == "on"
    if use_scr and not args.prep:
        raise ConfigError("windows: --scr on requires --prep")
    if use_scr and len(args.prep) != len(args.traj):
        raise ConfigError("windows: --prep must match --traj one to one")

    windows = []
    sources = []
    width = None
    t_ob = wcfg.t_ob
    for i, traj_dir in enumerate(args.traj):
        traj = load_trajectory(traj_dir)
        traj_id = Path(traj_dir).name
        sources.append(traj_id)
        if use_scr:
            scans = load_preprocessed(args.prep[i], cfg.scr,
                                      traj.config.duration_instances)
            width = cfg.scr.q
        else:
            scans = None
            width = traj.config.lidar_points_per_rev
        windows.extend(slide_windows(traj, scans, wcfg, traj_id=traj_id))
    if not windows:
        raise ConfigError("windows: no admissible windows in the trajectory")
    if args.balance:
        windows = balance_windows(windows, seed=cfg.scenario.seed)
    manifest = {
        "tool_version": __version__,
        "mode": "scr" if use_scr else "raw",
        "width": width,
        "t_ob": t_ob,
        "t_p": wcfg.t_p,
        "severity_partitions": [list(p) for p in wcfg.severity_partitions],
        "balanced": bool(args.balance),
        "sources": sources,
    }
    save_windows(windows, manifest, args.out)
    positives = sum(w.labels.occurrence for w in windows)
    log.info("windows: %d windows (%d positive) at horizon %d",
             len(windows), positives, wcfg.t_p)


def cmd_fit(args) -> None:
    cfg = RunConfig.load(args.config)
    windows, manifest = load_windows(args.windows)
    params = {"tool_version": __version__, "problem": args.problem,
              "horizon": int(manifest["t_p"])}
    if args.problem == 1:
        params["occurrence_theta"] = fit_threshold(windows)
    elif args.problem == 2:
        params["dbscan"] = cfg.dbscan.to_dict()
    elif args.problem == 3:
        thetas, levels = fit_severity_thresholds(windows)
        params["severity_thetas"] = list(thetas)
        params["severity_levels"] = list(levels)
    # problem 4 needs no parameters
    save_params(params, args.out)
    log.info("fit: problem %d -> %s", args.problem, args.out)


def cmd_predict(args) -> None:
    RunConfig.load(args.config)  # validate, even though params carry the knobs
    windows, _ = load_windows(args.windows)
    params = load_params(args.params)
    problem = int(params["problem"])
    rows = []
    skipped = 0
    for wid, w in enumerate(windows):
        try:
            if problem == 1:
                value = predict_occurrence(w, int(params["occurrence_theta"]))
            elif problem == 2:
                est = predict_crossing_time(
                    w, DbscanParams.from_dict(params["dbscan"]))
                value = est.predicted_instance
            elif problem == 3:
                value = predict_severity_threshold(
                    w, tuple(params["severity_thetas"]),
                    levels=tuple(params["severity_levels"]))
            elif problem == 4:
                value = predict_direction(w)
            else:
                raise ConfigError(f"predict: unsupported problem {problem}")
        except PredictionError:
            skipped += 1
            continue
        rows.append((wid, problem, float(value)))
    write_preds(rows, args.out)
    log.info("predict: problem %d, %d predictions (%d abstained)",
             problem, len(rows), skipped)


def cmd_eval(args) -> None:
    windows, manifest = load_windows(args.windows)
    horizon = int(manifest["t_p"])
    rows = []
    for path in args.preds:
        rows.extend(read_preds(path))
    if not rows:
        raise ConfigError("eval: no predictions to score")
    by_problem = {}
    for wid, problem, value in rows:
        if not (0 <= wid < len(windows)):
            raise SchemaError(f"eval: prediction references window {wid} "
                              f"outside the dataset")
        by_problem.setdefault(problem, []).append((wid, value))

    def target_for(problem, labels):
        if problem == 1:
            return labels.occurrence
        if problem == 2:
            return labels.instance
        if problem == 3:
            return labels.severity
        if problem == 4:
            return labels.direction
        raise ConfigError(f"eval: unsupported problem {problem}")

    results = []
    for problem in sorted(by_problem):
        preds, targets = [], []
        for wid, value in by_problem[problem]:
            target = target_for(problem, windows[wid].labels)
            if target is None:
                continue  # no ground truth inside the horizon for this window
            preds.append(value)
            targets.append(float(target))
        if not preds:
            raise ConfigError(f"eval: no scorable predictions for problem {problem}")
        classes = None
        if problem in (1, 4):
            classes = (0, 1)
        elif problem == 3:
            classes = tuple(sorted({int(v) for v in preds}
                                   | {int(v) for v in targets}))
        results.append(ProblemResult(problem=problem, horizon=horizon,
                                     preds=preds, targets=targets,
                                     classes=classes))
    report = evaluate(results, manifest=manifest)
    emit_report(report, args.out)
    log.info("eval: %d problem(s) -> %s", len(results), args.out)


_COMMANDS = {
    "simulate": cmd_simulate,
    "build-dict": cmd_build_dict,
    "preprocess": cmd_preprocess,
    "windows": cmd_windows,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "eval": cmd_eval,
}

_LOG_LEVELS = {"debug": logging.DEBUG, "info": logging.INFO,
               "warning": logging.WARNING, "error": logging.ERROR}


def _configure_logging() -> None:
    level = _LOG_LEVELS.get(os.environ.get("BLOCKCAST_LOG", "").lower(),
                            logging.WARNING)
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"blockcast: error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, SchemaError, FileNotFoundError, NotADirectoryError,
            IsADirectoryError) as exc:
        print(f"blockcast: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse --help/--version paths
        return int(exc.code or 0)
    except Exception as exc:  # pragma: no cover - defensive
        print(f"blockcast: internal error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
