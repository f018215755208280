"""Command line interface: ``quartermask <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 invalid input,
4 optimization stopped at ``--max-steps`` before becoming structure-free.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .evaluation import experiment_stepwise, experiment_table, load_corpus, psnr
from .mask import make_random, make_regular, read_mask, serialize, tile_to, write_mask
from .optimize import (
    OptimizerConfig,
    OptimizerTrace,
    optimize_fractional,
    optimize_until_structure_free,
)
from .pnm import read_image, to_uint8, write_pgm
from .reconstruct import ALGORITHMS, FsrParams, reconstruct
from .sampling import subsample
from .structures import ALL_KINDS, count_by_kind, detect, parse_kinds

log = logging.getLogger("quartermask")

EXIT_USAGE, EXIT_IO, EXIT_INVALID, EXIT_CAP = 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_bytes(text.encode("ascii"))


def _fraction(text):
    parts = [float(p) for p in text.split(",")]
    if len(parts) == 1:
        return parts[0], parts[0]
    if len(parts) == 2:
        return parts[0], parts[1]
    raise argparse.ArgumentTypeError("expected F or LO,HI")


def _csv_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _fsr_params(args):
    return FsrParams.from_overrides(
        block_size=args.fsr_block_size,
        border=args.fsr_border,
        transform_size=args.fsr_transform_size,
        iterations=args.fsr_iterations,
        rho=args.fsr_rho,
        gamma=args.fsr_gamma,
        delta=args.fsr_delta,
        frequency_prior=False if args.fsr_no_frequency_prior else None,
    )


def _add_fsr_options(p):
    g = p.add_argument_group("FSR parameters")
    g.add_argument("--fsr-block-size", type=int)
    g.add_argument("--fsr-border", type=int)
    g.add_argument("--fsr-transform-size", type=int)
    g.add_argument("--fsr-iterations", type=int)
    g.add_argument("--fsr-rho", type=float)
    g.add_argument("--fsr-gamma", type=float)
    g.add_argument("--fsr-delta", type=float)
    g.add_argument(
        "--fsr-no-frequency-prior",
        action="store_true",
        help="select atoms by weighted energy alone",
    )


def cmd_generate(args):
    height = args.height or args.size
    width = args.width or args.size
    if not height or not width:
        raise UsageError("give --size or both --height and --width")
    if args.type == "regular":
        mask = make_regular(height, width, args.corner)
    else:
        mask = make_random(height, width, args.seed)
    _write_text(args.out, serialize(mask))
    return 0


def cmd_optimize(args):
    mask = read_mask(args.in_path)
    lo, hi = args.fraction
    config = OptimizerConfig(
        seed=args.seed,
        enabled_kinds=parse_kinds(args.kinds),
        mode=args.mode,
        fraction_low=lo,
        fraction_high=hi,
        max_steps=args.max_steps,
    )
    status = 0
    if config.mode == "fractional":
        seq = optimize_fractional(mask, config, args.steps)
        rows = [row for _, row in seq]
        result = seq[-1][0]
        if args.snapshots:
            outdir = Path(args.snapshots)
            outdir.mkdir(parents=True, exist_ok=True)
            for m, row in seq:
                write_mask(m, outdir / f"step_{row.step:03d}.qsm")
    else:
        res = optimize_until_structure_free(mask, config)
        rows, result = res.trace.rows, res.mask
        log.info("%d removal steps, structure-free: %s", res.steps, res.structure_free)
        if res.cap_reached:
            print(
                f"warning: no structure-free mask within {config.max_steps} steps; "
                "wrote the best mask seen",
                file=sys.stderr,
            )
            status = EXIT_CAP
    if args.trace:
        _write_text(args.trace, OptimizerTrace(rows).to_csv())
    _write_text(args.out, serialize(result))
    return status


def cmd_detect(args):
    mask = read_mask(args.mask)
    kinds = parse_kinds(args.kinds)
    counts = count_by_kind(mask, kinds)
    for kind, n in counts.items():
        print(f"{kind.value} {n}")
    print(f"total {sum(counts.values())}")
    if args.instances:
        lines = [
            json.dumps({"kind": inst.kind.value, "pixels": [list(p) for p in inst.pixels]})
            for inst in detect(mask, kinds)
        ]
        _write_text(args.instances, "".join(line + "\n" for line in lines))
    return 0


def cmd_subsample(args):
    image = read_image(args.input)
    sampled = subsample(image, read_mask(args.mask))
    write_pgm(args.output, sampled.as_image())
    if args.mask_out:
        write_mask(sampled.mask, args.mask_out)
    return 0


def cmd_reconstruct(args):
    image = read_image(args.input)
    mask = read_mask(args.mask)
    if mask.shape != image.shape:
        mask = tile_to(mask, *image.shape)
    sampled = subsample(image, mask)
    out = reconstruct(sampled, args.algorithm, _fsr_params(args))
    write_pgm(args.output, out)
    if args.reference:
        print(f"psnr_db {psnr(read_image(args.reference), to_uint8(out)):.6f}")
    return 0


def _mask_list(paths):
    return [(Path(p).stem, read_mask(p)) for p in paths]


def _write_report(report, args):
    _write_text(args.out, report.rows_csv())
    if args.aggregate_out:
        _write_text(args.aggregate_out, report.aggregates_csv())


def cmd_evaluate(args):
    corpus = load_corpus(args.corpus, args.limit)
    masks = _mask_list(args.masks)
    report = experiment_table(
        masks, corpus, args.algorithms, _fsr_params(args), args.baseline, args.threads
    )
    _write_report(report, args)
    return 0


def table_masks(size, seed, random_seeds=1, max_steps=1_000_000):
    """The regular / random / structure-free masks of the table experiment.

    Same seeds as ``generate --type random --seed S`` followed by
    ``optimize --seed S``.
    """
    masks = [("regular", make_regular(size, size, "TL"))]
    for s in range(seed, seed + random_seeds):
        masks.append(("random", make_random(size, size, s)))
    res = optimize_until_structure_free(
        make_random(size, size, seed), OptimizerConfig(seed=seed, max_steps=max_steps)
    )
    masks.append(("structure-free", res.mask))
    return masks, res


def cmd_experiment(args):
    corpus = load_corpus(args.corpus, args.limit)
    params = _fsr_params(args)
    if args.kind == "table":
        masks, res = table_masks(args.size, args.seed, args.random_seeds, args.max_steps)
        masks += _mask_list(args.masks or [])
        if args.masks_out:
            outdir = Path(args.masks_out)
            outdir.mkdir(parents=True, exist_ok=True)
            for label, m in masks[: len(masks) - len(args.masks or [])]:
                if label != "random" or args.random_seeds == 1:
                    write_mask(m, outdir / f"{label}.qsm")
        report = experiment_table(
            masks, corpus, args.algorithms, params, "random", args.threads
        )
        _write_report(report, args)
        return EXIT_CAP if res.cap_reached else 0
    variants = {}
    lo, hi = args.fraction
    for spec in args.variants.split(";"):
        kinds = parse_kinds(spec)
        name = "all" if kinds == frozenset(ALL_KINDS) else "+".join(
            k.value for k in ALL_KINDS if k in kinds
        )
        variants[name] = OptimizerConfig(
            seed=args.seed,
            enabled_kinds=kinds,
            mode="fractional",
            fraction_low=lo,
            fraction_high=hi,
        )
    start = make_random(args.mask_size, args.mask_size, args.seed)
    result = experiment_stepwise(
        start, variants, corpus, args.algorithm, args.steps, params, args.threads
    )
    _write_text(args.out, result.curves_csv())
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS)

    parser = _Parser(prog="quartermask", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parser.add_argument("--threads", type=int, default=1, help="worker threads")
    parser.add_argument("--verbose", "-v", action="store_true")
    parser.add_argument("--version", action="store_true", help="print version and exit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("generate", parents=[common], help="write a regular or random mask")
    p.add_argument("--type", choices=("regular", "random"), required=True)
    p.add_argument("--size", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--corner", default="TL", choices=("TL", "TR", "BL", "BR"))
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("optimize", parents=[common], help="remove structures from a mask")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--kinds", default="all", help="'all' or comma list, e.g. 2spx,8void")
    p.add_argument(
        "--mode", choices=("until-structure-free", "fractional"), default="until-structure-free"
    )
    p.add_argument("--fraction", type=_fraction, default=(0.05, 0.10), help="F or LO,HI")
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.add_argument("--steps", type=int, default=25, help="fractional mode step count")
    p.add_argument("--trace", help="write per-step structure counts as CSV")
    p.add_argument("--snapshots", help="fractional mode: directory for per-step masks")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("detect", parents=[common], help="count structures in a mask")
    p.add_argument("mask")
    p.add_argument("--kinds", default="all")
    p.add_argument("--instances", help="write instances as JSON lines ('-' for stdout)")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("subsample", parents=[common], help="simulate a quarter-sampled image")
    p.add_argument("--mask", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="PGM with unsampled pixels set to 0")
    p.add_argument("--mask-out", help="write the mask tiled to the image size")
    p.set_defaults(func=cmd_subsample)

    p = sub.add_parser("reconstruct", parents=[common], help="reconstruct a sampled image")
    p.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--input", required=True, help="image; only sampled pixels are read")
    p.add_argument("--output", required=True)
    p.add_argument("--reference", help="print PSNR against this image")
    _add_fsr_options(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("evaluate", parents=[common], help="PSNR of masks on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--masks", nargs="+", required=True)
    p.add_argument("--algorithms", type=_csv_list, default=list(ALGORITHMS))
    p.add_argument("--baseline", default="random", help="mask label gains refer to")
    p.add_argument("--limit", type=int, help="use only the first N images")
    p.add_argument("--out", default="-", help="per-image CSV")
    p.add_argument("--aggregate-out", help="per-mask mean CSV")
    _add_fsr_options(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("experiment", parents=[common], help="mask table or stepwise experiment")
    p.add_argument("--kind", choices=("table", "stepwise"), default="table")
    p.add_argument("--corpus", required=True)
    p.add_argument("--limit", type=int)
    p.add_argument("--algorithms", type=_csv_list, default=list(ALGORITHMS))
    p.add_argument("--size", type=int, default=32, help="table: mask size")
    p.add_argument("--masks", nargs="*", help="table: extra mask files")
    p.add_argument("--random-seeds", type=int, default=1, help="table: random masks pooled")
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.add_argument("--masks-out", help="table: directory for the generated masks")
    p.add_argument("--aggregate-out")
    p.add_argument("--mask-size", type=int, default=256, help="stepwise: mask size")
    p.add_argument("--steps", type=int, default=25)
    p.add_argument("--variants", default="all;8void;2spx;4spx", help="';'-separated kind lists")
    p.add_argument("--fraction", type=_fraction, default=(0.05, 0.10))
    p.add_argument("--algorithm", choices=ALGORITHMS, default="fsr", help="stepwise algorithm")
    p.add_argument("--out", default="-")
    _add_fsr_options(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )
    if args.version:
        print(f"quartermask {__version__}")
        print("default FSR parameters: " + json.dumps(FsrParams().as_dict()))
        return 0
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"quartermask: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"quartermask: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"quartermask: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(run())
