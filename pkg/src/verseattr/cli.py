"""Command line entry point.

Subcommands: validate, features, crossval, attribute, rolling, synth.
Exit codes: 0 success, 1 usage error, 2 data error. Flags override values
from an optional JSON config file (--config); the fully resolved settings
are echoed into the output directory as config.json for provenance.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Mapping

from .corpus import CorpusFormatError, annotate_corpus, load_corpus, save_corpus, validate_corpus
from .crossval import EvalConfig, attribute_scenes, leave_one_play_out
from .features import build_feature_spec, segment_scenes
from .prosody import StressLexicon
from .reports import (
    accuracy_csv,
    curve_csv,
    feature_matrix_csv,
    read_boundaries,
    votes_csv,
    write_text,
)
from .rolling import RollingConfig, rolling_attribute
from .svgchart import curve_chart
from .synth import load_synthesis_plan, synthesize

LEXICON_ENV = "VERSEATTR_LEXICON"
MODES = ("words", "rhythm", "combined")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_corpus_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--corpus", required=True, help="corpus TSV file")
    sub.add_argument("--lexicon", help=f"stress lexicon TSV (default: ${LEXICON_ENV})")
    sub.add_argument("--min-lines", type=int, default=None, help="scene line threshold (default 10)")
    sub.add_argument("--config", help="JSON file with default settings")
    sub.add_argument("--jobs", type=int, default=None, help="parallel workers (default 1)")


def _add_model_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--iterations", type=int, default=None, help="ensemble size (default 30)")
    sub.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    sub.add_argument("--top-words", type=int, default=None, help="word vocabulary size (default 500)")
    sub.add_argument("--top-rhythms", type=int, default=None, help="rhythm vocabulary size (default 500)")
    sub.add_argument("--svm-c", type=float, default=None, help="SVM cost C (default 1.0)")
    sub.add_argument("--svm-tol", type=float, default=None, help="SVM stopping tolerance (default 1e-4)")
    sub.add_argument("--max-passes", type=int, default=None, help="SVM pass cap (default 10000)")
    sub.add_argument(
        "--calibration-folds", type=int, default=None, help="internal folds for Platt fitting (default 3)"
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="verseattr", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = commands.add_parser("validate", help="check a corpus file and report exclusions")
    _add_corpus_options(p)
    p.set_defaults(func=_cmd_validate)

    p = commands.add_parser("features", help="export the feature matrix as CSV")
    _add_corpus_options(p)
    p.add_argument("--mode", default=None, help="words, rhythm, or combined (default combined)")
    p.add_argument("--top-words", type=int, default=None)
    p.add_argument("--top-rhythms", type=int, default=None)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_features)

    p = commands.add_parser("crossval", help="leave-one-play-out cross-validation")
    _add_corpus_options(p)
    _add_model_options(p)
    p.add_argument("--mode", default=None, help="mode or comma-separated modes (default combined)")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_crossval)

    p = commands.add_parser("attribute", help="classify one play's scenes against the rest")
    _add_corpus_options(p)
    _add_model_options(p)
    p.add_argument("--target", required=True, help="play_id of the play to attribute")
    p.add_argument("--mode", default=None, help="mode or comma-separated modes (default combined)")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_attribute)

    p = commands.add_parser("rolling", help="rolling attribution over line windows")
    _add_corpus_options(p)
    _add_model_options(p)
    p.add_argument("--target", required=True, help="play_id of the play to attribute")
    p.add_argument("--k", type=int, default=None, help="window length in lines (default 100)")
    p.add_argument("--d", type=int, default=None, help="window step in lines (default 5)")
    p.add_argument("--modes", default=None, help="comma-separated feature modes (default combined)")
    p.add_argument("--boundaries", help="TSV of line_index<TAB>label markers for the chart")
    p.add_argument("--positive", default=None, help="author drawn positive in the signed curve")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_rolling)

    p = commands.add_parser("synth", help="generate a synthetic corpus from a profile file")
    p.add_argument("--profiles", required=True, help="JSON profile/plan file")
    p.add_argument("--out", required=True, help="corpus TSV to write")
    p.add_argument("--truth-dir", help="directory for per-line truth of mixed plays")
    p.add_argument("--seed", type=int, default=None, help="override the plan's seed")
    p.set_defaults(func=_cmd_synth)

    return parser


def _load_config_file(args: argparse.Namespace) -> dict[str, Any]:
    path = getattr(args, "config", None)
    if not path:
        return {}
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return raw


def _setting(args: argparse.Namespace, config: Mapping[str, Any], name: str, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def _resolve_eval_settings(args, config) -> dict[str, Any]:
    return {
        "iterations": int(_setting(args, config, "iterations", 30)),
        "top_words": int(_setting(args, config, "top_words", 500)),
        "top_rhythms": int(_setting(args, config, "top_rhythms", 500)),
        "C": float(_setting(args, config, "svm_c", 1.0)),
        "tol": float(_setting(args, config, "svm_tol", 1e-4)),
        "max_passes": int(_setting(args, config, "max_passes", 10_000)),
        "calibration_folds": int(_setting(args, config, "calibration_folds", 3)),
        "min_lines": int(_setting(args, config, "min_lines", 10)),
        "master_seed": int(_setting(args, config, "seed", 0)),
    }


def _load_prepared_corpus(args, config):
    corpus = load_corpus(args.corpus)
    lexicon_path = _setting(args, config, "lexicon", os.environ.get(LEXICON_ENV) or None)
    if lexicon_path:
        corpus = annotate_corpus(corpus, StressLexicon.load(lexicon_path))
    return corpus, lexicon_path


def _echo_config(out_dir: Path, settings: Mapping[str, Any]) -> None:
    write_text(out_dir / "config.json", json.dumps(settings, indent=2, sort_keys=True) + "\n")


def _parse_modes(raw: str) -> list[str]:
    modes = [m.strip() for m in raw.split(",") if m.strip()]
    bad = [m for m in modes if m not in MODES]
    if bad or not modes:
        raise ValueError(f"unknown mode(s) {bad}; choose from {', '.join(MODES)}")
    return modes


def _cmd_validate(args) -> int:
    config = _load_config_file(args)
    corpus, _ = _load_prepared_corpus(args, config)
    report = validate_corpus(corpus, int(_setting(args, config, "min_lines", 10)))
    print(report.format())
    return 0


def _cmd_features(args) -> int:
    config = _load_config_file(args)
    corpus, _ = _load_prepared_corpus(args, config)
    mode = str(_setting(args, config, "mode", "combined"))
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    segments = segment_scenes(corpus, int(_setting(args, config, "min_lines", 10)))
    if not segments:
        raise ValueError("no scenes above the line threshold")
    spec = build_feature_spec(
        segments,
        int(_setting(args, config, "top_words", 500)),
        int(_setting(args, config, "top_rhythms", 500)),
        mode,
    )
    write_text(args.out, feature_matrix_csv(segments, spec))
    print(f"wrote {args.out} ({len(segments)} segments x {spec.dim} features)")
    return 0


def _run_vote_command(args, attribute_target: str | None) -> int:
    config = _load_config_file(args)
    corpus, lexicon_path = _load_prepared_corpus(args, config)
    settings = _resolve_eval_settings(args, config)
    modes = _parse_modes(str(_setting(args, config, "mode", "combined")))
    jobs = int(_setting(args, config, "jobs", 1))
    out_dir = Path(args.out_dir)

    tables = []
    for mode in modes:
        cfg = EvalConfig(mode=mode, **settings)
        if attribute_target is None:
            table = leave_one_play_out(corpus, cfg, jobs=jobs)
        else:
            table = attribute_scenes(corpus, attribute_target, cfg, jobs=jobs)
        tables.append(table)
        write_text(out_dir / f"votes_{mode}.csv", votes_csv(table))
    if any(t.play_accuracy for t in tables):
        write_text(out_dir / "accuracy.csv", accuracy_csv(tables))
    echo = dict(settings, modes=modes, corpus=str(args.corpus), lexicon=lexicon_path, jobs=jobs)
    if attribute_target is not None:
        echo["target"] = attribute_target
    _echo_config(out_dir, echo)
    print(f"wrote vote tables for {', '.join(modes)} to {out_dir}")
    return 0


def _cmd_crossval(args) -> int:
    return _run_vote_command(args, attribute_target=None)


def _cmd_attribute(args) -> int:
    return _run_vote_command(args, attribute_target=args.target)


def _cmd_rolling(args) -> int:
    config = _load_config_file(args)
    corpus, lexicon_path = _load_prepared_corpus(args, config)
    settings = _resolve_eval_settings(args, config)
    modes = _parse_modes(str(_setting(args, config, "modes", "combined")))
    jobs = int(_setting(args, config, "jobs", 1))
    k = int(_setting(args, config, "k", 100))
    d = int(_setting(args, config, "d", 5))
    positive = _setting(args, config, "positive", None)
    out_dir = Path(args.out_dir)
    boundaries = read_boundaries(args.boundaries) if args.boundaries else []

    results = {}
    for mode in modes:
        cfg = RollingConfig(mode=mode, k=k, d=d, positive_author=positive, **settings)
        result = rolling_attribute(corpus, args.target, cfg, jobs=jobs)
        results[mode] = result
        write_text(out_dir / f"curve_{mode}.csv", curve_csv(result))
    write_text(out_dir / "curve.svg", curve_chart(results, boundaries))
    echo = dict(
        settings,
        modes=modes,
        corpus=str(args.corpus),
        lexicon=lexicon_path,
        jobs=jobs,
        k=k,
        d=d,
        target=args.target,
        positive=positive,
        boundaries=str(args.boundaries) if args.boundaries else None,
    )
    _echo_config(out_dir, echo)
    uncovered = results[modes[0]].uncovered_group_indices
    note = f" ({len(uncovered)} trailing group(s) uncovered)" if uncovered else ""
    print(f"wrote rolling curves for {', '.join(modes)} to {out_dir}{note}")
    return 0


def _cmd_synth(args) -> int:
    raw = json.loads(Path(args.profiles).read_text(encoding="utf-8"))
    if args.seed is not None:
        raw = dict(raw, seed=args.seed)
    plan = load_synthesis_plan(raw)
    corpus, truths = synthesize(plan)
    save_corpus(corpus, args.out)
    if args.truth_dir:
        for play_id, truth in sorted(truths.items()):
            lines = "".join(f"{i + 1}\t{label}\n" for i, label in enumerate(truth))
            write_text(Path(args.truth_dir) / f"{play_id}.truth.tsv", lines)
    print(f"wrote {args.out} ({sum(p.n_lines for p in corpus.plays)} lines, {len(corpus.plays)} plays)")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except CorpusFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
