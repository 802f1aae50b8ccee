"""Command line surface: synthesize, train, evaluate, detect.

Owns the on-disk layout. Dataset directories hold one recording CSV per
gesture named `<class>__<device>__<id>.csv`; sessions pair a CSV with a
`.ranges.json` ground-truth file; every run writes `manifest_<command>.json`
next to its outputs. All files are written atomically and all commands are
deterministic given their manifest, so reruns are byte-identical.

Exit codes: 0 success, 2 usage error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import detect as detect_mod
from . import metrics as metrics_mod
from . import mlp, synth
from . import train as train_mod
from .fileio import atomic_write_text
from .signal import (
    ChannelMode,
    GestureClass,
    SensorRecording,
    load_recording_csv,
    write_recording_csv,
)

TOOL_VERSION = "0.1.0"


class UsageError(Exception):
    """Bad options or bad dataset layout; maps to exit code 2."""


@dataclass(frozen=True)
class RunManifest:
    command: str
    seed: Optional[int]
    options: dict
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    version: str = TOOL_VERSION

    def to_json_dict(self) -> dict:
        return {
            "version": self.version,
            "command": self.command,
            "seed": self.seed,
            "options": dict(self.options),
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
        }


def save_manifest(manifest: RunManifest, out_dir: Path) -> Path:
    path = out_dir / f"manifest_{manifest.command}.json"
    atomic_write_text(path, json.dumps(manifest.to_json_dict(), indent=1) + "\n")
    return path


def recording_filename(label: GestureClass, device: str, index: int) -> str:
    return f"{label.value}__{device}__{index:03d}.csv"


def parse_recording_filename(name: str) -> tuple[GestureClass, str]:
    parts = Path(name).stem.split("__")
    if len(parts) != 3:
        raise UsageError(
            f"bad dataset filename {name!r}: expected <class>__<device>__<id>.csv")
    try:
        label = GestureClass.parse(parts[0])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return label, parts[1]


def load_dataset_dir(directory: Path) -> list[SensorRecording]:
    """All labeled recordings in a dataset directory, sorted by filename."""
    if not directory.is_dir():
        raise UsageError(f"not a dataset directory: {directory}")
    files = sorted(directory.glob("*.csv"))
    if not files:
        raise UsageError(f"no recording CSVs in {directory}")
    recordings = []
    for path in files:
        label, device = parse_recording_filename(path.name)
        recordings.append(load_recording_csv(path, label=label, device=device))
    return recordings


def _parse_int(text: str, what: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise UsageError(f"bad {what} count {text!r}") from None
    if value < 0:
        raise UsageError(f"{what} count must be >= 0, got {value}")
    return value


def _parse_gesture_counts(text: str) -> dict[GestureClass, int]:
    counts: dict[GestureClass, int] = {}
    for item in text.split(","):
        name, _, num = item.partition("=")
        try:
            cls = GestureClass.parse(name)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        counts[cls] = counts.get(cls, 0) + (_parse_int(num, name) if num else 1)
    return counts


def _parse_session_counts(text: str) -> dict[synth.SessionKind, int]:
    counts: dict[synth.SessionKind, int] = {}
    for item in text.split(","):
        name, _, num = item.partition("=")
        try:
            kind = synth.SessionKind.parse(name)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        counts[kind] = counts.get(kind, 0) + (_parse_int(num, name) if num else 1)
    return counts


def _parse_modes(text: str) -> list[ChannelMode]:
    modes = []
    for name in text.split(","):
        try:
            modes.append(ChannelMode.parse(name))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return modes


def _resolve_synth_setup(args):
    templates = synth.DEFAULT_TEMPLATES
    profiles = synth.DEFAULT_PROFILES
    if args.config is not None:
        templates, profiles = synth.load_synth_config(args.config)
    if args.profile not in profiles:
        known = ", ".join(sorted(profiles))
        raise UsageError(f"unknown device profile {args.profile!r} (known: {known})")
    return templates, profiles[args.profile]


def _write_corpus(corpus: synth.Corpus, directory: Path) -> list[str]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    counters: dict[tuple, int] = {}
    for rec in corpus.recordings:
        key = (rec.label, rec.device)
        i = counters.get(key, 0)
        counters[key] = i + 1
        path = directory / recording_filename(rec.label, rec.device, i)
        write_recording_csv(rec, path)
        written.append(str(path))
    return written


def _write_sessions(sessions, directory: Path) -> list[str]:
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    counters: dict[synth.SessionKind, int] = {}
    for kind, recording, ranges in sessions:
        i = counters.get(kind, 0)
        counters[kind] = i + 1
        stem = f"{kind.value}_session__{recording.device}__{i:03d}"
        csv_path = directory / f"{stem}.csv"
        write_recording_csv(recording, csv_path)
        detect_mod.save_ranges(ranges, directory / f"{stem}.ranges.json")
        written.extend([str(csv_path), str(directory / f"{stem}.ranges.json")])
    return written


def cmd_synth(args) -> None:
    templates, profile = _resolve_synth_setup(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written: list[str] = []
    if args.corpus is not None:
        train_c, test_c, sessions = synth.generate_table1(
            profile, args.seed, templates)
        written += _write_corpus(train_c, out / "train")
        written += _write_corpus(test_c, out / "test")
        written += _write_sessions(sessions, out / "sessions")
    elif args.gestures is not None:
        counts = _parse_gesture_counts(args.gestures)
        corpus = synth.generate_corpus(counts, profile, args.seed, templates)
        written += _write_corpus(corpus, out)
    else:
        counts = _parse_session_counts(args.sessions)
        sessions = synth.generate_sessions(counts, profile, args.seed, templates)
        written += _write_sessions(sessions, out)
    manifest = RunManifest(
        command="synth", seed=args.seed,
        options={"corpus": args.corpus, "gestures": args.gestures,
                 "sessions": args.sessions, "profile": args.profile,
                 "config": args.config},
        outputs=tuple(written))
    save_manifest(manifest, out)
    print(f"wrote {len(written)} files under {out}")


def cmd_train(args) -> None:
    modes = _parse_modes(args.modes)
    if args.restarts < 1:
        raise UsageError("--restarts must be >= 1")
    if not 0.0 < args.threshold < 1.0:
        raise UsageError("--threshold must lie strictly between 0 and 1")
    recordings = load_dataset_dir(Path(args.data))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = train_mod.TrainConfig(max_epochs=args.max_epochs)
    written = []
    for mode in modes:
        dataset = train_mod.build_dataset(recordings, mode)
        net, report, summaries = train_mod.train_best_of(
            dataset, config=config, restarts=args.restarts,
            master_seed=args.seed, hidden_size=args.hidden)
        selected = train_mod.select_best_restart(
            [s.train_accuracy for s in summaries])
        model_path = out / f"model_{mode.value}.json"
        report_path = out / f"train_report_{mode.value}.json"
        mlp.save_model(net, model_path, threshold=args.threshold)
        train_mod.save_report(report, summaries, report_path,
                              selected_index=selected)
        written += [str(model_path), str(report_path)]
        acc = summaries[selected].train_accuracy
        print(f"{mode.value}: restart {selected} selected, "
              f"train accuracy {acc:.3f} -> {model_path}")
    manifest = RunManifest(
        command="train", seed=args.seed,
        options={"modes": args.modes, "restarts": args.restarts,
                 "hidden": args.hidden, "max_epochs": args.max_epochs,
                 "threshold": args.threshold},
        inputs=(str(args.data),), outputs=tuple(written))
    save_manifest(manifest, out)


def _resample_points(network: mlp.Network) -> int:
    if network.mode is ChannelMode.XYZ:
        return network.input_size // 3
    return network.input_size


def cmd_eval(args) -> None:
    network, stored_threshold = mlp.load_model(args.model)
    threshold = stored_threshold if args.threshold is None else args.threshold
    recordings = load_dataset_dir(Path(args.data))
    dataset = train_mod.build_dataset(recordings, network.mode,
                                      n=_resample_points(network))
    outputs = mlp.forward_batch(network, dataset.features)
    truths = [t == 1.0 for t in dataset.targets]
    report = metrics_mod.evaluate(outputs, truths, threshold)
    pairs = [(float(o), c) for o, c in zip(outputs, dataset.classes)
             if not c.is_smoking]
    attribution = metrics_mod.fp_attribution(pairs, threshold)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / f"eval_report_{network.mode.value}.json"
    metrics_mod.save_eval_report(report, attribution, report_path)
    manifest = RunManifest(
        command="eval", seed=None,
        options={"model": str(args.model), "threshold": threshold},
        inputs=(str(args.model), str(args.data)),
        outputs=(str(report_path),))
    save_manifest(manifest, out)
    print(f"accuracy {report.accuracy:.3f} -> {report_path}")


def cmd_detect(args) -> None:
    network, stored_threshold = mlp.load_model(args.model)
    threshold = stored_threshold if args.threshold is None else args.threshold
    session_path = Path(args.session)
    session = load_recording_csv(session_path)
    trace = detect_mod.detect_session(network, session, width=args.width,
                                      stride=args.stride, threshold=threshold)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trace_path = out / "trace.csv"
    detect_mod.write_trace_csv(trace, trace_path)
    written = [str(trace_path)]
    inputs = [str(args.model), str(args.session)]
    if args.ranges is not None:
        truth = detect_mod.load_ranges(args.ranges)
        report, detected = detect_mod.score_trace(trace, truth)
        hits = sum(detected)
        doc = {
            "per_window": report.to_json_dict(),
            "per_range": {
                "detected": hits,
                "total": len(truth),
                "rate": hits / len(truth) if len(truth) else None,
                "ranges": [
                    {"start": s, "end": e, "detected": bool(d)}
                    for (s, e), d in zip(truth.ranges, detected)
                ],
            },
        }
        report_path = out / "detect_report.json"
        atomic_write_text(report_path, json.dumps(doc, indent=1) + "\n")
        written.append(str(report_path))
        inputs.append(str(args.ranges))
        print(f"detected {hits}/{len(truth)} ranges, "
              f"per-window specificity {report.specificity}")
    if args.plot:
        plot_path = out / "plot.csv"
        detect_mod.write_plot_csv(trace, session, plot_path)
        written.append(str(plot_path))
    manifest = RunManifest(
        command="detect", seed=None,
        options={"model": str(args.model), "width": args.width,
                 "stride": args.stride, "threshold": threshold,
                 "plot": bool(args.plot)},
        inputs=tuple(inputs), outputs=tuple(written))
    save_manifest(manifest, out)
    print(f"{len(trace)} windows -> {trace_path}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smokewatch",
        description="Smoking-gesture recognition pipeline: synthesize data, "
                    "train networks, evaluate, and detect over sessions.")
    parser.add_argument("--version", action="version", version=TOOL_VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic gestures or sessions")
    what = p.add_mutually_exclusive_group(required=True)
    what.add_argument("--corpus", choices=["table1"],
                      help="emit the standard 140/40/10 corpus layout")
    what.add_argument("--gestures", metavar="CLASS=N,...",
                      help="isolated gesture recordings per class")
    what.add_argument("--sessions", metavar="KIND=N,...",
                      help="continuous sessions per kind "
                           "(smoking/eating/drinking/chapstick)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--profile", default="watch-a")
    p.add_argument("--config", help="JSON template/profile overrides")
    p.add_argument("--out", default=".")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("train", help="train one network per channel mode")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--modes", default="X,Y,Z,XYZ,AVG")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hidden", type=int, default=mlp.DEFAULT_HIDDEN)
    p.add_argument("--max-epochs", type=int, default=200)
    p.add_argument("--threshold", type=float, default=mlp.DEFAULT_THRESHOLD,
                   help="decision threshold stored in the model file")
    p.add_argument("--out", default=".")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("eval", help="score a model on a labeled dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--threshold", type=float, default=None,
                   help="override the model's stored threshold")
    p.add_argument("--out", default=".")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("detect", help="rolling-window detection over a session")
    p.add_argument("--model", required=True)
    p.add_argument("--session", required=True, help="session recording CSV")
    p.add_argument("--ranges", help="ground-truth ranges JSON for scoring")
    p.add_argument("--width", type=int, default=200)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--plot", action="store_true",
                   help="also write the signal+output plot CSV")
    p.add_argument("--out", default=".")
    p.set_defaults(handler=cmd_detect)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary maps failures to exit 1
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
