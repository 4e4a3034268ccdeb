"""Command-line entry point: ``lus-dtcwt {synth,extract,run,sweep}``.

Exit codes: 0 success, 1 evaluation error, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .evaluation import FoldError, loo_cv, loso_cv, report, sweep_feature_count
from .pipeline import (FAMILIES, FeatureConfig, ManifestError, build_dataset, read_feature_csv,
                       write_feature_csv)
from .synth import SynthSpec, generate_dataset

EXIT_OK, EXIT_EVAL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _bool(text):
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _families(text):
    fams = tuple(f.strip() for f in str(text).split(",") if f.strip())
    bad = set(fams) - set(FAMILIES)
    if bad or not fams:
        raise argparse.ArgumentTypeError(f"families must be a comma list from {FAMILIES}")
    return fams


def read_config(path) -> dict:
    """``key=value`` lines; ``#`` starts a comment; dashes and underscores are equivalent."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"config file not found: {path}")
    out = {}
    for n, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _add_feature_flags(p):
    p.add_argument("--levels", type=int, default=1, help="DTCWT levels (default 1)")
    p.add_argument("--include-lowpass", type=_bool, default=True)
    p.add_argument("--families", type=_families, default=FAMILIES,
                   help="comma list of stat,glcm,glrlm,lbp")
    p.add_argument("--entropy", choices=("histogram", "pixelwise"), default="histogram")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for extraction")


def _add_eval_flags(p):
    p.add_argument("input", help="manifest CSV or feature CSV from 'extract'")
    p.add_argument("--cv", choices=("loo", "loso"), default="loo")
    p.add_argument("--priors", choices=("equal", "proportional"), default="equal")
    _add_feature_flags(p)


def build_parser():
    parser = argparse.ArgumentParser(prog="lus-dtcwt", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key=value defaults; explicit flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic image dataset and manifest")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--subjects-per-class", type=int, default=4)
    p.add_argument("--images-per-subject", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-level", type=float, default=0.08)

    p = sub.add_parser("extract", help="manifest -> feature CSV")
    p.add_argument("manifest")
    p.add_argument("--out", required=True, help="feature CSV path")
    p.add_argument("--dump-subimages", metavar="DIR", help="write magnitude subimages as PGM")
    _add_feature_flags(p)

    p = sub.add_parser("run", help="one cross-validated experiment")
    _add_eval_flags(p)
    p.add_argument("--k", type=int, default=15, help="number of selected image features")
    p.add_argument("--report", help="report path prefix (default: report_<cv>_k<k>)")

    p = sub.add_parser("sweep", help="accuracy versus number of selected features")
    _add_eval_flags(p)
    p.add_argument("--k-max", type=int, default=43)
    p.add_argument("--out", help="curve CSV path (default: sweep_<cv>.csv)")
    return parser


def parse_args(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        defaults = read_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        unknown = set(defaults) - set(known)
        if unknown:
            raise InputError(f"unknown config keys for '{args.command}': {sorted(unknown)}")
        converted = {}
        for key, raw in defaults.items():
            action = known[key]
            try:
                converted[key] = action.type(raw) if action.type else raw
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise InputError(f"config {key}: {exc}") from exc
            if action.choices and converted[key] not in action.choices:
                raise InputError(f"config {key}: {raw!r} not in {list(action.choices)}")
        sub.set_defaults(**converted)
        args = parser.parse_args(argv)
    return args


def _config(args):
    try:
        return FeatureConfig(args.levels, args.include_lowpass, tuple(args.families), args.entropy)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def load_table(path, args):
    """A feature CSV is used as is; anything else is treated as a manifest."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input not found: {path}")
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    try:
        if first.startswith("image_path"):
            return build_dataset(path, _config(args), n_jobs=args.jobs)
        return read_feature_csv(path)
    except (ManifestError, OSError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def cmd_synth(args):
    try:
        spec = SynthSpec(args.subjects_per_class, args.images_per_subject, args.seed,
                         args.noise_level)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    try:
        manifest = generate_dataset(spec, args.out)
    except OSError as exc:
        raise InputError(f"cannot write to {args.out}: {exc}") from exc
    n = len(spec.classes) * spec.subjects_per_class * spec.images_per_subject
    print(f"wrote {n} images and {manifest}")
    return EXIT_OK


def cmd_extract(args):
    if not Path(args.manifest).is_file():
        raise InputError(f"manifest not found: {args.manifest}")
    try:
        table = build_dataset(args.manifest, _config(args), n_jobs=args.jobs,
                              dump_dir=args.dump_subimages)
        write_feature_csv(table, args.out)
    except (ManifestError, OSError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    print(f"wrote {len(table)} rows x {len(table.feature_names)} features to {args.out}")
    return EXIT_OK


def cmd_run(args):
    table = load_table(args.input, args)
    cv = loo_cv if args.cv == "loo" else loso_cv
    result = cv(table, args.k, args.priors)
    prefix = args.report or f"report_{args.cv}_k{args.k}"
    try:
        report(result.confusion, prefix)
    except OSError as exc:
        raise InputError(f"cannot write report {prefix}: {exc}") from exc
    print(f"cv={args.cv} k={args.k} priors={args.priors} n={len(table)} "
          f"accuracy={100.0 * result.accuracy:.2f}%")
    return EXIT_OK


def cmd_sweep(args):
    table = load_table(args.input, args)
    curve = sweep_feature_count(table, args.k_max, args.cv, args.priors)
    out = args.out or f"sweep_{args.cv}.csv"
    try:
        curve.to_csv(out)
    except OSError as exc:
        raise InputError(f"cannot write curve {out}: {exc}") from exc
    print(f"cv={args.cv} priors={args.priors} best_k={curve.best_k} "
          f"accuracy={curve.best_accuracy:.2f}%")
    return EXIT_OK


COMMANDS = {"synth": cmd_synth, "extract": cmd_extract, "run": cmd_run, "sweep": cmd_sweep}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:
        # argparse usage errors exit with 2, --help with 0
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FoldError, ValueError, FloatingPointError, ArithmeticError) as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())
