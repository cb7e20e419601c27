"""Command-line entry point: ``digitsim train|classify|evaluate|report``.

Exit codes: 0 success, 1 error, 2 (classify only) prediction flagged uncertain.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from ._accel import backend_name
from .classifier import ALL_MODES, AblationMode, Classifier
from .config import RunConfig
from .errors import DigitSimError
from .evaluation import compare_modes, format_table, load_reports, write_reports
from .imagery import load_pgm
from .model import load_model, save_model
from .pipeline import load_split, train_model

EXIT_OK, EXIT_ERROR, EXIT_UNCERTAIN = 0, 1, 2


def _load_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config)
    return cfg.with_overrides(seed=args.seed)


def _parse_modes(text: str | None) -> list[AblationMode]:
    if text is None or text.strip().lower() == "all":
        return list(ALL_MODES)
    return [AblationMode.parse(t) for t in text.split(",") if t.strip()]


def cmd_train(args) -> int:
    cfg = _load_config(args)
    model = train_model(cfg, threads=args.threads)
    out = Path(args.model) if args.model else cfg.resolve(cfg.output_dir) / "model.json"
    save_model(model, out)
    rounds = cfg.selection.rounds
    print(f"digit " + " ".join(f"r{r}" for r in range(1, rounds + 1)) + "  total")
    for pool in model.pools:
        counts = pool.round_counts(rounds)
        print(f"{pool.digit:>5} " + " ".join(f"{c:>2}" for c in counts) + f"  {sum(counts):>5}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_classify(args) -> int:
    model = load_model(args.model)
    cfg = model.config
    image = load_pgm(args.image)
    clf = Classifier(
        model.pools,
        model.tables,
        AblationMode.parse(args.mode),
        cfg.gamma if args.gamma is None else args.gamma,
        cfg.ssim,
        cfg.margin_threshold if args.margin_threshold is None else args.margin_threshold,
        cfg.aggregate if args.aggregate is None else args.aggregate,
    )
    result = clf.classify(image)
    print(json.dumps(result.to_dict()))
    return EXIT_UNCERTAIN if result.uncertain else EXIT_OK


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    cfg = _load_config(args) if args.config else model.config
    split = load_split(cfg)
    reports = compare_modes(split, model, cfg, _parse_modes(args.modes), threads=args.threads)
    out = Path(args.output) if args.output else cfg.resolve(cfg.output_dir)
    write_reports(reports, out)
    print(format_table(reports))
    print(f"wrote reports to {out}")
    return EXIT_OK


def cmd_report(args) -> int:
    if args.report:
        path = Path(args.report)
    elif args.config:
        cfg = _load_config(args)
        path = cfg.resolve(cfg.output_dir) / "report.json"
    elif args.model:
        path = None
    else:
        raise DigitSimError("report needs --report, --config or --model")
    if args.model:
        model = load_model(args.model)
        print("digit fonts exemplars  sim_min  sim_max  reward")
        for pool, table, trace in zip(model.pools, model.tables, model.rewards()):
            lo = f"{table.sim_min:.4f}" if table else "   -  "
            hi = f"{table.sim_max:.4f}" if table else "   -  "
            print(f"{pool.digit:>5} {len(pool.fonts):>5} {len(pool.selected):>9}  {lo:>7}  {hi:>7}  {trace.total:.4f}")
    if path is not None and path.is_file():
        reports = load_reports(path)
        print(format_table(reports, timing=False))
        print("per-digit accuracy")
        for r in reports:
            cells = " ".join("  -  " if a is None else f"{a:.3f}" for a in r.per_digit_accuracy)
            print(f"{r.mode.value:<6} {cells}")
    elif not args.model:
        raise DigitSimError(f"no report at {path}; run `digitsim evaluate` first")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="digitsim", description="SSIM exemplar-pool digit recognition")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({backend_name()} kernels)")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config_required):
        p.add_argument("--config", required=config_required, help="run configuration (JSON)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--threads", type=int, default=1, help="worker threads (output does not depend on it)")

    p = sub.add_parser("train", help="select exemplars and write model.json")
    common(p, True)
    p.add_argument("--model", help="output path (default <output_dir>/model.json)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="classify one PGM image")
    p.add_argument("image", help="28x28 binary PGM")
    p.add_argument("--model", required=True)
    p.add_argument("--mode", default="full", choices=[m.value for m in ALL_MODES])
    p.add_argument("--margin-threshold", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--aggregate", choices=["mean", "max"])
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="run the ablation modes on the held-out split")
    common(p, False)
    p.add_argument("--model", required=True)
    p.add_argument("--modes", help="comma-separated subset of ssim,fuzzy,rl,full (default all)")
    p.add_argument("--output", help="report directory (default <output_dir>)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="print a saved report and/or model summary")
    common(p, False)
    p.add_argument("--report", help="path to report.json")
    p.add_argument("--model", help="also summarise this model")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DigitSimError, OSError, ValueError) as exc:
        print(f"digitsim: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
