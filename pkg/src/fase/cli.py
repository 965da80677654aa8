"""Command-line front end.

Subcommands:
    conceal   fill the lost region of a PGM image (mask PGM: pixel 0 = lost)
    verify    compare the reference and fast paths on seeded random signals
    bench     time both paths and emit a CSV with predicted/measured op counts
    tables    precompute Gram tables for a dictionary/weight pair

Exit codes: 0 success, 1 a verify trial exceeded tolerance, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .bench import run_benchmark, write_csv
from .conceal import DEFAULT_SUPPORT, conceal_image
from .dictionary import parse_dict_spec
from .errors import ParameterError
from .fast import build_gram_tables, load_gram_table, save_gram_table
from .grid import ExtrapConfig, build_weight_field
from .pgm import read_pgm, write_pgm
from .transform import fft_gram_table
from .verify import central_loss_mask, run_equivalence_trials, summarize_trials

VERIFY_MAX_AREA = 4096
VERIFY_MAX_ATOMS = 8192
VERIFY_MAX_TRIALS = 10000


def _pair(text: str, what: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ParameterError(f"{what} must look like ROWSxCOLS, got {text!r}")
    try:
        a, b = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ParameterError(f"{what} must be integer ROWSxCOLS, got {text!r}") from exc
    if a < 1 or b < 1:
        raise ParameterError(f"{what} must be positive, got {text!r}")
    return a, b


def _int_list(text: str, what: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ParameterError(f"{what} must be comma-separated integers, got {text!r}") from exc
    if not values:
        raise ParameterError(f"{what} is empty")
    return values


def _add_model_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--dict", default="dft", help="dictionary spec: dft|dct|wht|bdft|union:a+b|file:path")
    sub.add_argument("--iters", type=int, default=250, help="iteration count I (default 250)")
    sub.add_argument("--gamma", type=float, default=0.5, help="compensation factor in (0,1] (default 0.5)")
    sub.add_argument("--rho", type=float, default=0.8, help="weight decay base in (0,1] (default 0.8)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fase",
        description="Sparse selective extrapolation of 2-D signals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_conceal = sub.add_parser("conceal", help="fill the lost region of a PGM image")
    p_conceal.add_argument("image", help="input PGM (P5, 8-bit)")
    p_conceal.add_argument("mask", help="loss-mask PGM; pixel value 0 marks a lost sample")
    p_conceal.add_argument("-o", "--output", default=None, help="restored PGM path")
    p_conceal.add_argument("--report", default=None, help="write a JSON run report here")
    p_conceal.add_argument("--reference", default=None, help="ground-truth PGM for PSNR reporting")
    _add_model_flags(p_conceal)
    p_conceal.add_argument("--block", default=None, help="tile size ROWSxCOLS; omit to extrapolate the whole image at once")
    p_conceal.add_argument("--support", type=int, default=DEFAULT_SUPPORT, help=f"known-pixel margin around each tile (default {DEFAULT_SUPPORT})")
    p_conceal.add_argument("--tables", default=None, help="reuse precomputed Gram tables (FGRM file) where provenance matches")
    p_conceal.add_argument("--fft", action="store_true", help="use transform shortcuts where the dictionary allows")
    p_conceal.add_argument("--single-thread", action="store_true", help="process blocks sequentially")

    p_verify = sub.add_parser("verify", help="check reference/fast equivalence on random signals")
    p_verify.add_argument("--size", default="16x16", help="area ROWSxCOLS (default 16x16)")
    p_verify.add_argument("--loss", default=None, help="central loss block ROWSxCOLS (default: quarter area)")
    _add_model_flags(p_verify)
    p_verify.add_argument("--trials", type=int, default=10, help="number of random signals (default 10)")
    p_verify.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
    p_verify.add_argument("--tol", type=float, default=1e-9, help="relative tolerance (default 1e-9)")

    p_bench = sub.add_parser("bench", help="time both paths, emit CSV")
    p_bench.add_argument("--sizes", default="64x64", help="comma list of ROWSxCOLS areas (default 64x64)")
    p_bench.add_argument("--dicts", default="dft", help="comma list of dictionary specs (default dft)")
    p_bench.add_argument("--iters", default="25,250", help="comma list of iteration counts (default 25,250)")
    p_bench.add_argument("--gamma", type=float, default=0.5)
    p_bench.add_argument("--rho", type=float, default=0.8)
    p_bench.add_argument("--repeats", type=int, default=3, help="timed repetitions per row (median kept)")
    p_bench.add_argument("--seed", type=int, default=0, help="signal RNG seed (default 0)")
    p_bench.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p_bench.add_argument("--single-thread", action="store_true", help="pin numeric libraries to one thread while timing")

    p_tables = sub.add_parser("tables", help="precompute Gram tables to an FGRM file")
    p_tables.add_argument("--size", default=None, help="area ROWSxCOLS (required unless --mask)")
    p_tables.add_argument("--mask", default=None, help="loss-mask PGM; pixel 0 = lost (overrides --size/--loss)")
    p_tables.add_argument("--loss", default=None, help="central loss block ROWSxCOLS (default: none)")
    p_tables.add_argument("--dict", default="dft", help="dictionary spec")
    p_tables.add_argument("--rho", type=float, default=0.8)
    p_tables.add_argument("--fft", action="store_true", help="build via the transform shortcut (tagged dictionaries only)")
    p_tables.add_argument("--out", required=True, help="output FGRM path")

    return parser


def _cmd_conceal(args) -> int:
    image = read_pgm(args.image).astype(np.float64)
    lost = read_pgm(args.mask) == 0
    reference = None
    if args.reference is not None:
        reference = read_pgm(args.reference).astype(np.float64)
    tables = load_gram_table(args.tables) if args.tables else None
    block = _pair(args.block, "--block") if args.block else None
    config = ExtrapConfig(iterations=args.iters, gamma=args.gamma, rho_hat=args.rho)
    restored, report = conceal_image(
        image,
        lost,
        dict_spec=args.dict,
        config=config,
        block=block,
        support=args.support,
        tables=tables,
        use_fft=args.fft,
        single_thread=args.single_thread,
        reference=reference,
    )
    out_path = args.output or str(Path(args.image).with_suffix(".restored.pgm"))
    write_pgm(out_path, restored)
    if args.report:
        with open(args.report, "w", encoding="ascii") as fh:
            json.dump(report, fh, indent=2)
        print(f"report: {args.report}")
    blocks = len(report["blocks"])
    line = (
        f"concealed {report['lost_pixels']} lost pixels in {blocks} block(s) "
        f"in {report['seconds']:.3f} s -> {out_path}"
    )
    if report["psnr_db"] is not None:
        line += f" (PSNR over lost region: {report['psnr_db']:.2f} dB)"
    print(line)
    return 0


def _cmd_verify(args) -> int:
    m_rows, n_cols = _pair(args.size, "--size")
    if m_rows * n_cols > VERIFY_MAX_AREA:
        raise ParameterError(f"--size limited to {VERIFY_MAX_AREA} samples for interactive use")
    if args.trials > VERIFY_MAX_TRIALS:
        raise ParameterError(f"--trials limited to {VERIFY_MAX_TRIALS}")
    loss = _pair(args.loss, "--loss") if args.loss else (max(1, m_rows // 4), max(1, n_cols // 4))
    mask = central_loss_mask(m_rows, n_cols, *loss)
    dictionary = parse_dict_spec(args.dict, m_rows, n_cols)
    if len(dictionary) > VERIFY_MAX_ATOMS:
        raise ParameterError(f"--dict limited to {VERIFY_MAX_ATOMS} atoms for interactive use")
    config = ExtrapConfig(iterations=args.iters, gamma=args.gamma, rho_hat=args.rho)
    trials = run_equivalence_trials(
        dictionary, mask, config, trials=args.trials, seed=args.seed
    )
    for t in trials:
        status = "ok" if t.passed(args.tol) else "FAIL"
        print(
            f"trial {t.seed:4d}  selections={'match' if t.selections_equal else 'DIFFER'}"
            f"  coeff_dev={t.max_coefficient_dev:.3e}"
            f"  recursion_dev={t.max_recursion_dev:.3e}  [{status}]"
        )
    summary = summarize_trials(trials, args.tol)
    print(
        f"{summary['trials']} trials, {summary['failures']} failure(s); "
        f"worst coefficient deviation {summary['max_coefficient_dev']:.3e}, "
        f"worst recursion deviation {summary['max_recursion_dev']:.3e} "
        f"(tolerance {args.tol:g})"
    )
    return 0 if summary["failures"] == 0 else 1


def _cmd_bench(args) -> int:
    sizes = [_pair(tok, "--sizes") for tok in args.sizes.split(",") if tok.strip()]
    if not sizes:
        raise ParameterError("--sizes is empty")
    dict_specs = [tok.strip() for tok in args.dicts.split(",") if tok.strip()]
    if not dict_specs:
        raise ParameterError("--dicts is empty")
    iters_list = _int_list(args.iters, "--iters")
    rows = run_benchmark(
        sizes=sizes,
        dict_specs=dict_specs,
        iters_list=iters_list,
        gamma=args.gamma,
        rho_hat=args.rho,
        repeats=args.repeats,
        seed=args.seed,
        single_thread=args.single_thread,
    )
    if args.out:
        with open(args.out, "w", newline="", encoding="ascii") as fh:
            write_csv(rows, fh)
        print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    else:
        write_csv(rows, sys.stdout)
    return 0


def _cmd_tables(args) -> int:
    if args.mask:
        mask = read_pgm(args.mask) == 0
        m_rows, n_cols = mask.shape
    else:
        if not args.size:
            raise ParameterError("tables needs --size ROWSxCOLS or --mask PGM")
        m_rows, n_cols = _pair(args.size, "--size")
        if args.loss:
            mask = central_loss_mask(m_rows, n_cols, *_pair(args.loss, "--loss"))
        else:
            mask = np.zeros((m_rows, n_cols), dtype=bool)
    dictionary = parse_dict_spec(args.dict, m_rows, n_cols)
    weight = build_weight_field(mask, args.rho)
    started = time.perf_counter()
    if args.fft:
        tables = fft_gram_table(weight, dictionary)
    else:
        tables = build_gram_tables(dictionary, weight)
    elapsed = time.perf_counter() - started
    save_gram_table(tables, args.out)
    size = Path(args.out).stat().st_size
    print(
        f"built tables for {len(dictionary)} atoms over {m_rows}x{n_cols} "
        f"in {elapsed:.3f} s -> {args.out} ({size} bytes)"
    )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "conceal": _cmd_conceal,
        "verify": _cmd_verify,
        "bench": _cmd_bench,
        "tables": _cmd_tables,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"fase {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
