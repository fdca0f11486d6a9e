"""
Command-line front end.

    crcgrand info      describe a code, optionally bound its minimum distance
    crcgrand order     dump a noise-pattern order
    crcgrand decode    decode one received word
    crcgrand simulate  run a BLER sweep from a config file, CSV to stdout/file

Exit status: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bits import BitWord
from .codes import BchCode, CaPolarCode, Code, CodeSpec, CyclicCode, PolarCode, bm_decode, min_distance
from .config import ConfigError, RunConfig, code_spec
from .grand import Abandonment, grand_sos, orbgrand
from .patterns import OrbGenerator, RankPermutation, SosGenerator, logistic_weight, rank_from_reliabilities
from .sim import WORKERS_ENV, csv_header, csv_line, default_workers, run_sweep

EXIT_CONFIG = 2
EXIT_RUNTIME = 3

log = logging.getLogger("crcgrand")


def _int0(text: str) -> int:
    return int(text, 0)


def _positive(text: str) -> int:
    v = int(float(text))
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _add_code_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("code")
    g.add_argument("--config", help="TOML run file; its [code] section is the base")
    g.add_argument("--family", choices=("crc", "bch", "rlc", "polar", "capolar"))
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--poly", type=_int0, help="CRC generator, Koopman hex (e.g. 0x65)")
    g.add_argument("--mode", choices=("systematic", "multiplicative"))
    g.add_argument("--t", type=int, help="BCH correction capability")
    g.add_argument("--seed", type=int, help="RLC seed")
    g.add_argument("--design-ebno", type=float, dest="design_ebno_db")
    g.add_argument("--crc", help="CA-Polar CRC preset (crc11, crc24a, crc24b, crc24c)")
    g.add_argument("--crc-poly", type=_int0)
    g.add_argument("--crc-bits", type=int)


def _code_from_args(args) -> CodeSpec:
    base = RunConfig.load(args.config).code if args.config else {}
    for key in ("family", "n", "k", "poly", "mode", "t", "seed", "design_ebno_db", "crc", "crc_poly", "crc_bits"):
        v = getattr(args, key, None)
        if v is not None:
            base[key] = v
    if "family" not in base or "n" not in base:
        raise ConfigError("code needs --family and --n (or a --config with [code])")
    return code_spec(base)


def _describe(code: Code) -> list[str]:
    lines = [
        f"code      {code.spec.label()}",
        f"n         {code.n}",
        f"k         {code.k}",
        f"rate      {code.rate:.6f}",
    ]
    if isinstance(code, CyclicCode):
        g = code.g
        lines.append(f"generator 0x{g.coeffs >> 1:x} (Koopman), 0x{g.coeffs:x} (full)")
        lines.append(f"g(x)      {g}")
        lines.append(f"encoding  {code.mode}")
        if isinstance(code, BchCode):
            lines.append(f"bch t     {code.t}  (GF(2^{code.field.m}))")
    if isinstance(code, CaPolarCode):
        lines.append(f"crc       0x{code.crc_g.coeffs >> 1:x} (Koopman), {code.crc_g}")
        code = code.inner
    if isinstance(code, PolarCode):
        lines.append(f"info set  {' '.join(map(str, code.info.tolist()))}")
    return lines


def cmd_info(args) -> int:
    code = _code_from_args(args).build()
    print("\n".join(_describe(code)))
    if args.mindist_max_weight is not None:
        res = min_distance(code, args.mindist_max_weight)
        print(f"mindist   {res.report()}  (searched weights <= {args.mindist_max_weight}, "
              f"{res.words_checked} words)")
        if res.witness is not None:
            print(f"witness   {' '.join(map(str, res.witness))}")
    return 0


def _read_reliabilities(path: str) -> np.ndarray:
    text = Path(path).read_text().replace(",", " ").split()
    return np.array([float(v) for v in text])


def cmd_order(args) -> int:
    if args.generator == "sos":
        gen = SosGenerator(args.n)
        ranks = None
    else:
        if args.reliabilities:
            rel = _read_reliabilities(args.reliabilities)
            if len(rel) != args.n:
                raise ConfigError(f"reliability file has {len(rel)} values, expected {args.n}")
            ranks = rank_from_reliabilities(rel)
        else:
            ranks = RankPermutation.identity(args.n)
        gen = OrbGenerator(ranks)
    out = sys.stdout
    for _ in range(args.limit):
        try:
            z = next(gen)
        except StopIteration:
            break
        if ranks is None:
            out.write(f"{z} {z.weight}\n")
        else:
            out.write(f"{z} {z.weight} {logistic_weight(z, ranks)}\n")
    return 0


def _parse_soft(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.replace(",", " ").split()])


def cmd_decode(args) -> int:
    code = _code_from_args(args).build()
    if (args.hard is None) == (args.soft is None):
        raise ConfigError("give exactly one of --hard or --soft")
    if args.hard is not None:
        hard = BitWord.from_str(args.hard)
        rel = None
    else:
        y = _parse_soft(args.soft)
        hard = BitWord.from_array((y < 0).astype(np.uint8))
        rel = np.abs(y)
    if len(hard) != code.n:
        raise ConfigError(f"input has {len(hard)} bits, code length is {code.n}")
    ab = Abandonment(args.max_weight, args.max_queries)
    if args.decoder == "grand_sos":
        res = grand_sos(code, hard, ab)
    elif args.decoder == "orbgrand":
        if rel is None:
            raise ConfigError("orbgrand needs --soft received values")
        if ab.max_weight is not None:
            raise ConfigError("orbgrand takes --max-queries, not --max-weight")
        res = orbgrand(code, rel, hard, ab)
    else:
        if not isinstance(code, BchCode):
            raise ConfigError("bm decoder requires a BCH code")
        res = bm_decode(code, hard)
    print(f"outcome   {res.kind}")
    if res.ok:
        print(f"codeword  {res.codeword}")
        print(f"message   {code.message(res.codeword)}")
    print(f"queries   {res.queries}")
    return 0


def cmd_simulate(args) -> int:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.ebno is not None:
        cfg.sweep.pop("p", None)
        cfg.override("sweep", ebno_db=[float(v) for v in args.ebno.split(",")])
    if args.p is not None:
        cfg.sweep.pop("ebno_db", None)
        cfg.override("sweep", p=[float(v) for v in args.p.split(",")])
    cfg.override(
        "sweep",
        seed=args.seed,
        min_block_errors=args.min_errors,
        max_trials=args.max_trials,
        workers=args.workers,
    )
    cfg.override("output", csv=args.out)
    points = cfg.points()
    for spec in {pt.code for pt in points}:
        try:
            spec.build()
        except ValueError as exc:
            raise ConfigError(f"invalid code {spec.label()}: {exc}") from exc
    workers = int(cfg.sweep.get("workers", default_workers()))
    cfg.sweep["workers"] = workers

    out_path = cfg.output.get("csv")
    meta_path = cfg.output.get("meta") or (f"{out_path}.meta.json" if out_path and out_path != "-" else None)
    if meta_path:
        Path(meta_path).parent.mkdir(parents=True, exist_ok=True)
        Path(meta_path).write_text(json.dumps({"config": cfg.to_dict(), "points": len(points)}, indent=2) + "\n")

    if out_path and out_path != "-":
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        fh = open(out_path, "w", newline="")
    else:
        fh = sys.stdout
    failed = 0
    try:
        fh.write(csv_header())
        fh.flush()

        def emit(res):
            nonlocal failed
            if res.error is not None:
                failed += 1
                print(f"error: point {res.family}({res.n},{res.k}) {res.decoder} "
                      f"ebno={res.ebno_db} p={res.p}: {res.error}", file=sys.stderr)
                return
            fh.write(csv_line(res))
            fh.flush()

        run_sweep(points, workers=workers, on_result=emit)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_RUNTIME if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crcgrand", description="GRAND decoding of CRC and other short codes")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    info = sub.add_parser("info", help="describe a code")
    _add_code_args(info)
    info.add_argument("--mindist-max-weight", type=_nonneg, metavar="W",
                      help="exhaustively search code-words of weight <= W")
    info.set_defaults(func=cmd_info)

    order = sub.add_parser("order", help="dump a noise-pattern order")
    order.add_argument("generator", choices=("sos", "orb"))
    order.add_argument("--n", type=_positive, required=True)
    order.add_argument("--limit", type=_positive, default=16)
    order.add_argument("--reliabilities", metavar="FILE", help="per-bit reliabilities for orb")
    order.set_defaults(func=cmd_order)

    dec = sub.add_parser("decode", help="decode one received word")
    _add_code_args(dec)
    dec.add_argument("--hard", help="received hard bits, e.g. 0001110")
    dec.add_argument("--soft", help="received BPSK samples (0 -> +1), comma or space separated")
    dec.add_argument("--decoder", choices=("grand_sos", "orbgrand", "bm"), default="grand_sos")
    dec.add_argument("--max-weight", type=_nonneg)
    dec.add_argument("--max-queries", type=_positive)
    dec.set_defaults(func=cmd_decode)

    simp = sub.add_parser("simulate", help="BLER sweep from a config file")
    simp.add_argument("config", nargs="?")
    simp.add_argument("--ebno", help="comma-separated Eb/N0 grid (dB), overrides [sweep]")
    simp.add_argument("--p", help="comma-separated flip probabilities, overrides [sweep]")
    simp.add_argument("--seed", type=int)
    simp.add_argument("--min-errors", type=_positive)
    simp.add_argument("--max-trials", type=_positive)
    simp.add_argument("--workers", type=_positive, help=f"worker threads (default ${WORKERS_ENV} or 1)")
    simp.add_argument("--out", help="CSV path ('-' for stdout)")
    simp.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
