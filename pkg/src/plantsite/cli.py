"""Command-line pipeline: synth / train / score / sweep / tune / report / serve.

Every output file is written atomically (temp file + rename) so a crashed run
never leaves a half-written artifact. Config values come from an optional
`key = value` file; explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Callable, Optional, Sequence

from .config import RunConfig, load_config
from .fusion import (
    ClassDistribution,
    save_scores,
    save_sweep,
    score_all,
    sweep_weights,
    tune_weight,
    load_scores,
    load_sweep,
)
from .landscape import (
    Region,
    ValidationError,
    load_landscape_dir,
    save_landscape,
    synthesize_landscape,
)
from .loss_model import (
    evaluate,
    labeled_pairs,
    load_model,
    save_model,
    split_train_test,
    train,
)
from .reporting import (
    class_descriptives,
    evaluate_proposed_sites,
    export_summary,
    load_sites,
)

log = logging.getLogger("plantsite")


def _atomic_write(path: str | Path, write: Callable[[Path], None]) -> None:
    """Run `write` against a sibling temp path, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    os.close(fd)
    tmp = Path(tmp_name)
    try:
        write(tmp)
        os.replace(tmp, path)
    finally:
        tmp.unlink(missing_ok=True)


def _parse_region(raw: str) -> Region:
    parts = raw.split(",")
    if len(parts) != 4:
        raise ValidationError(f"--region must be x0,y0,x1,y1, got {raw!r}")
    try:
        x0, y0, x1, y1 = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"--region must be numeric, got {raw!r}") from None
    return Region(x_min=x0, y_min=y0, x_max=x1, y_max=y1)


def _load_run_config(args: argparse.Namespace, **overrides) -> RunConfig:
    from .config import default_config

    flags = {k: v for k, v in overrides.items() if v is not None}
    config_path = getattr(args, "config", None)
    if config_path:
        return load_config(config_path, flags)
    return default_config(flags)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_synth(args: argparse.Namespace) -> int:
    region = _parse_region(args.region)
    landscape = synthesize_landscape(
        seed=args.seed,
        region=region,
        n_compartments=args.compartments,
        n_villages=args.villages,
        profile=args.profile,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    from .landscape.io import save_compartments, save_grids, save_villages

    _atomic_write(out / "grids.csv", lambda p: save_grids(landscape.cells, p))
    _atomic_write(out / "compartments.json", lambda p: save_compartments(landscape.compartments, p))
    _atomic_write(out / "villages.csv", lambda p: save_villages(landscape.villages, p))
    log.info("wrote %d cells, %d compartments, %d villages to %s",
             len(landscape.cells), len(landscape.compartments), len(landscape.villages), out)
    print(f"synthesized {len(landscape.cells)} cells, "
          f"{len(landscape.compartments)} compartments, {len(landscape.villages)} villages")
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    config = _load_run_config(args, seed=args.seed)
    landscape = load_landscape_dir(args.landscape)
    pairs = labeled_pairs(landscape.compartments)
    train_rows, test_rows = split_train_test(pairs, seed=config.seed)
    model = train(train_rows, config.gbdt_config(), seed=config.seed)
    _atomic_write(args.out_model, lambda p: save_model(model, p))
    report = evaluate(model, test_rows)
    print(
        f"trained on {len(train_rows)} compartments, evaluated on {len(test_rows)}\n"
        f"precision={report.precision:.4f} recall={report.recall:.4f} "
        f"tp={report.tp} fp={report.fp} tn={report.tn} fn={report.fn} "
        f"threshold={report.threshold}"
    )
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    config = _load_run_config(args, alpha=args.alpha)
    landscape = load_landscape_dir(args.landscape)
    model = load_model(args.model)
    records = score_all(
        landscape.cells,
        model,
        landscape.compartments,
        config.fusion_config(),
        threads=args.threads,
    )
    _atomic_write(args.out, lambda p: save_scores(records, p))
    print(f"scored {len(records)} cells at alpha={config.alpha} -> {args.out}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _load_run_config(args)
    landscape = load_landscape_dir(args.landscape)
    model = load_model(args.model)
    rows = sweep_weights(
        landscape.cells,
        model,
        landscape.compartments,
        policy=config.exclusion_policy(),
        threads=args.threads,
    )
    _atomic_write(args.out, lambda p: save_sweep(rows, p))
    print(f"swept {len(rows)} alphas -> {args.out}")
    return 0


def _cmd_tune(args: argparse.Namespace) -> int:
    rows = load_sweep(args.sweep)
    parts = args.reference.split(",")
    if len(parts) != 4:
        raise ValidationError(
            f"--reference must be lu,low,medium,high percentages, got {args.reference!r}"
        )
    try:
        lu, low, med, high = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"--reference must be numeric, got {args.reference!r}") from None
    reference = ClassDistribution(
        largely_unsuitable_pct=lu, low_pct=low, medium_pct=med, high_pct=high
    )
    alpha = tune_weight(rows, reference)
    print(f"alpha={alpha}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    records = load_scores(args.scores)
    landscape = load_landscape_dir(args.landscape)
    desc = class_descriptives(records, landscape.cells)

    def fmt(v: Optional[float]) -> str:
        return "-" if v is None else f"{v:.2f}"

    print("class                 cells  mean_of  mean_mdf  mean_vdf  mean_nf  mean_elev  near_village")
    for row in desc.rows:
        print(
            f"{row.suitability.value:<20} {row.n_cells:>6}  {fmt(row.mean_of_pct):>7}  "
            f"{fmt(row.mean_mdf_pct):>8}  {fmt(row.mean_vdf_pct):>8}  {fmt(row.mean_nf_pct):>7}  "
            f"{fmt(row.mean_elevation_m):>9}  {row.cells_with_village_within_1km:>12}"
        )

    if args.sites:
        sites = load_sites(args.sites)
        evaluation = evaluate_proposed_sites(sites, records, landscape.cells)
        print(f"\nproposed sites: {evaluation.mapped} mapped, {evaluation.unmapped} unmapped")
        print("class                 sites  share_pct")
        for bucket in evaluation.buckets:
            print(
                f"{bucket.suitability.value:<20} {bucket.site_count:>6}  {bucket.share_pct:>9.2f}"
            )

    if args.out:
        _atomic_write(args.out, lambda p: export_summary(records, p, args.format))
        print(f"\nwrote {args.format} summary -> {args.out}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve, snapshot_from_files

    config = _load_run_config(args, alpha=args.alpha)
    landscape_dir = Path(args.landscape)
    snapshot = snapshot_from_files(
        args.scores,
        landscape_dir / "grids.csv",
        landscape_dir / "compartments.json",
        landscape_dir / "villages.csv",
        config=config,
    )
    print(f"serving {len(snapshot.cells)} cells on {args.host}:{args.port}")
    serve(snapshot, host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# Parser wiring
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plantsite",
        description="Plantation-site suitability pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a landscape into a directory")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--region", required=True, help="x0,y0,x1,y1 in meters")
    p.add_argument("--compartments", type=int, default=40)
    p.add_argument("--villages", type=int, default=12)
    p.add_argument("--profile", default="uniform",
                   choices=["uniform", "himalayan-gradient", "separable-loss"])
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="train the loss model on a landscape's compartments")
    p.add_argument("--landscape", required=True, help="directory with landscape files")
    p.add_argument("--out-model", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("score", help="score every cell and write scores.csv")
    p.add_argument("--landscape", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--alpha", type=float, default=None, help="override config alpha")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("sweep", help="class shares for every fusion weight")
    p.add_argument("--landscape", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("tune", help="pick the alpha whose shares best match a reference")
    p.add_argument("--sweep", required=True, help="sweep.csv from the sweep command")
    p.add_argument("--reference", required=True, help="lu,low,medium,high percentages")
    p.set_defaults(func=_cmd_tune)

    p = sub.add_parser("report", help="class descriptives and proposed-site evaluation")
    p.add_argument("--scores", required=True)
    p.add_argument("--landscape", required=True)
    p.add_argument("--sites", default=None, help="sites.csv of proposed plantations")
    p.add_argument("--out", default=None, help="write a full summary export")
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("serve", help="serve a scored landscape over HTTP")
    p.add_argument("--scores", required=True)
    p.add_argument("--landscape", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=os.environ.get("PLANTSITE_LOG_LEVEL", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
