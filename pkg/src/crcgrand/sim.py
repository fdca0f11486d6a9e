"""
Monte-Carlo block-error-rate engine.

Trials are grouped in fixed-size blocks.  Block ``b`` draws all of its
randomness from ``SeedSequence(master_seed, spawn_key=(b,))``, blocks are
decoded by a thread pool (the compiled kernels release the GIL) and merged
in block order, and the stopping rule is applied per trial.  The counters
therefore depend only on the configuration and seed, never on the number of
workers.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import os
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Iterator

import numpy as np

from . import _kernels
from .channel import awgn_batch, bsc_noise, ebno_to_p, noise_sigma
from .codes import BchCode, Code, CodeSpec, bm_decode, build_code
from .bits import BitWord
from .grand import Abandonment, orb_decode_batch, sos_decode_batch

log = logging.getLogger(__name__)

BLOCK_SIZE = 256
DECODERS = ("grand_sos", "orbgrand", "bm")
CHANNELS = ("bsc", "awgn")
WORKERS_ENV = "CRCGRAND_WORKERS"

CSV_COLUMNS = (
    "family", "n", "k", "decoder", "abandon", "ebno_db", "p", "trials",
    "block_errors", "abandonments", "bler", "ber", "avg_queries", "seed",
)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SimPointConfig:
    """One point of a BLER curve.

    ``channel="bsc"`` flips bits with probability ``p`` if given, otherwise
    with ``ebno_to_p(k/n, ebno_db)``.  ``channel="awgn"`` sends BPSK at
    ``ebno_db``; hard-detection decoders then see the sign decisions.
    """

    code: CodeSpec
    decoder: str = "grand_sos"
    abandonment: Abandonment = Abandonment()
    channel: str = "bsc"
    ebno_db: float | None = None
    p: float | None = None
    master_seed: int = 0
    min_block_errors: int = 100
    max_trials: int = 10**8
    zero_message: bool = False

    def validate(self) -> None:
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}; expected one of {DECODERS}")
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}; expected one of {CHANNELS}")
        if self.min_block_errors < 1:
            raise ValueError("min_block_errors must be >= 1")
        if self.max_trials < self.min_block_errors:
            raise ValueError("max_trials must be >= min_block_errors")
        if self.decoder == "bm" and self.code.family != "bch":
            raise ValueError("bm decoder requires a BCH code")
        if self.decoder == "orbgrand":
            if self.channel != "awgn":
                raise ValueError("orbgrand needs soft information: use the awgn channel")
            if self.abandonment.max_weight is not None:
                raise ValueError("orbgrand abandonment must be a query budget")
        if self.channel == "awgn":
            if self.ebno_db is None:
                raise ValueError("awgn channel needs ebno_db")
            if self.p is not None:
                raise ValueError("awgn channel takes ebno_db, not p")
        elif self.p is None and self.ebno_db is None:
            raise ValueError("bsc channel needs p or ebno_db")
        if self.p is not None and not 0 <= self.p <= 0.5:
            raise ValueError(f"p must lie in [0, 0.5], got {self.p}")

    def abandon_label(self) -> str:
        return "none" if self.decoder == "bm" else self.abandonment.label()


@dataclass
class SimPointResult:
    family: str
    n: int
    k: int
    decoder: str
    abandon: str
    ebno_db: float | None
    p: float
    trials: int = 0
    block_errors: int = 0
    abandonments: int = 0
    bit_errors: int = 0
    total_queries: int = 0
    seed: int = 0
    wall_time: float = 0.0
    error: str | None = None

    @property
    def bler(self) -> float:
        return self.block_errors / self.trials if self.trials else 0.0

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.trials * self.k) if self.trials else 0.0

    @property
    def avg_queries(self) -> float:
        return self.total_queries / self.trials if self.trials else 0.0

    def binomial_sigma(self) -> float:
        if not self.trials:
            return math.inf
        b = self.bler
        return math.sqrt(b * (1 - b) / self.trials)

    def wilson_interval(self, z: float = 1.959964) -> tuple[float, float]:
        n = self.trials
        if not n:
            return 0.0, 1.0
        ph = self.bler
        den = 1 + z * z / n
        mid = (ph + z * z / (2 * n)) / den
        half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den
        return max(0.0, mid - half), min(1.0, mid + half)

    def row(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "k": self.k,
            "decoder": self.decoder,
            "abandon": self.abandon,
            "ebno_db": "" if self.ebno_db is None else repr(float(self.ebno_db)),
            "p": repr(float(self.p)),
            "trials": self.trials,
            "block_errors": self.block_errors,
            "abandonments": self.abandonments,
            "bler": repr(self.bler),
            "ber": repr(self.ber),
            "avg_queries": repr(self.avg_queries),
            "seed": self.seed,
        }

    @classmethod
    def from_row(cls, row: dict) -> SimPointResult:
        """Rebuild a result from a CSV row; the derived rates are checked."""
        trials = int(row["trials"])
        k = int(row["k"])
        res = cls(
            family=row["family"],
            n=int(row["n"]),
            k=k,
            decoder=row["decoder"],
            abandon=row["abandon"],
            ebno_db=None if row["ebno_db"] == "" else float(row["ebno_db"]),
            p=float(row["p"]),
            trials=trials,
            block_errors=int(row["block_errors"]),
            abandonments=int(row["abandonments"]),
            bit_errors=round(float(row["ber"]) * trials * k),
            total_queries=round(float(row["avg_queries"]) * trials),
            seed=int(row["seed"]),
        )
        if res.bler != float(row["bler"]):
            raise ValueError(f"inconsistent bler in row: {row}")
        return res


def csv_header() -> str:
    return ",".join(CSV_COLUMNS) + "\n"


def csv_line(result: SimPointResult) -> str:
    buf = io.StringIO()
    csv.DictWriter(buf, CSV_COLUMNS, lineterminator="\n").writerow(result.row())
    return buf.getvalue()


def read_csv(text: str) -> list[SimPointResult]:
    return [SimPointResult.from_row(r) for r in csv.DictReader(io.StringIO(text))]


@dataclass
class _BlockResult:
    errors: np.ndarray
    abandoned: np.ndarray
    queries: np.ndarray
    bit_errors: np.ndarray


class _PointRunner:
    """Builds the code once and decodes whole blocks of trials."""

    def __init__(self, cfg: SimPointConfig, block_size: int):
        cfg.validate()
        self.cfg = cfg
        self.block_size = block_size
        self.code: Code = build_code(cfg.code)
        cfg.abandonment.check(self.code.n)
        if cfg.decoder == "bm" and not isinstance(self.code, BchCode):
            raise ValueError("bm decoder requires a BCH code")
        self.n, self.k = self.code.n, self.code.k
        self.rate = self.k / self.n
        self.refresh = cfg.code.family == "rlc" and cfg.code.refresh
        if cfg.channel == "awgn":
            self.sigma = noise_sigma(self.rate, cfg.ebno_db)
            self.p = ebno_to_p(self.rate, cfg.ebno_db)
        else:
            self.sigma = None
            self.p = cfg.p if cfg.p is not None else ebno_to_p(self.rate, cfg.ebno_db)
        if not self.refresh:
            self.G = self.code.generator_matrix.array.astype(np.int64)
            self.cols = self.code.column_words

    def block(self, b: int, limit: int | None = None) -> _BlockResult:
        """Decode block ``b``.  All ``block_size`` trials are drawn so the
        stream is fixed, but only the first ``limit`` are decoded."""
        cfg, B, n, k = self.cfg, self.block_size, self.n, self.k
        rng = np.random.default_rng(np.random.SeedSequence(cfg.master_seed, spawn_key=(b,)))
        msgs = rng.integers(0, 2, size=(B, k), dtype=np.uint8)
        if cfg.zero_message:
            msgs[:] = 0
        if self.refresh:
            parity = rng.integers(0, 2, size=(B, k, n - k), dtype=np.uint8)
            cw = np.concatenate(
                [msgs, (np.einsum("tk,tkr->tr", msgs.astype(np.int64), parity.astype(np.int64)) % 2).astype(np.uint8)],
                axis=1,
            )
            cols = rlc_columns(parity)
        else:
            cw = (msgs.astype(np.int64) @ self.G % 2).astype(np.uint8)
            cols = self.cols

        if cfg.channel == "awgn":
            hard, rel = awgn_batch(cw, self.sigma, rng)
        else:
            hard = cw ^ bsc_noise((B, n), self.p, rng)
            rel = None
        if limit is not None and limit < B:
            B = limit
            msgs, cw, hard = msgs[:B], cw[:B], hard[:B]
            rel = None if rel is None else rel[:B]
            if self.refresh:
                cols = cols[:B]

        if cfg.decoder == "grand_sos":
            out = sos_decode_batch(cols, hard, cfg.abandonment)
            found, queries, decoded = out.found, out.queries, out.decoded
        elif cfg.decoder == "orbgrand":
            out = orb_decode_batch(cols, rel, hard, cfg.abandonment)
            found, queries, decoded = out.found, out.queries, out.decoded
        else:
            found, decoded = self._bm(hard, cols)
            queries = np.ones(B, dtype=np.int64)

        decoded = np.where(found[:, None], decoded, hard)
        errors = ~found | np.any(decoded != cw, axis=1)
        if self.refresh:
            est = decoded[:, :k]
        else:
            est = self.code.messages(decoded)
        bit_errors = np.count_nonzero(est != msgs, axis=1)
        return _BlockResult(errors, ~found, queries, bit_errors)

    def _bm(self, hard: np.ndarray, cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        synd = _kernels.syndromes(cols, hard)
        found = np.ones(len(hard), dtype=bool)
        decoded = hard.copy()
        for t in np.flatnonzero(np.any(synd != 0, axis=1)):
            res = bm_decode(self.code, BitWord.from_array(hard[t]))
            if res.ok:
                decoded[t] = res.codeword.to_array()
            else:
                found[t] = False
        return found, decoded


def rlc_columns(parity: np.ndarray) -> np.ndarray:
    """Syndrome columns of ``[I | P_t]`` for a stack of parity blocks (T, k, r)."""
    T, k, r = parity.shape
    nw = max(1, -(-r // 64))
    cols = np.zeros((T, k + r, nw), dtype=np.uint64)
    for w in range(nw):
        lo, hi = 64 * w, min(r, 64 * w + 64)
        shifts = np.arange(hi - lo, dtype=np.uint64)
        bits = parity[:, :, lo:hi].astype(np.uint64) << shifts
        cols[:, :k, w] = np.bitwise_or.reduce(bits, axis=2)
        for i in range(lo, hi):
            cols[:, k + i, w] = np.uint64(1) << np.uint64(i - lo)
    return cols


def run_point(
    cfg: SimPointConfig, workers: int | None = None, block_size: int = BLOCK_SIZE
) -> SimPointResult:
    """Simulate until ``min_block_errors`` block errors or ``max_trials`` trials.

    A block error is a decoded word different from the sent code-word, or an
    abandonment.  Raises ``ValueError`` on an inconsistent configuration
    before any trial runs.
    """
    runner = _PointRunner(cfg, block_size)
    workers = workers or default_workers()
    res = SimPointResult(
        family=cfg.code.family, n=runner.n, k=runner.k, decoder=cfg.decoder,
        abandon=cfg.abandon_label(), ebno_db=cfg.ebno_db, p=runner.p, seed=cfg.master_seed,
    )
    t0 = time.perf_counter()
    n_blocks = -(-cfg.max_trials // block_size)
    done = False

    def absorb(br: _BlockResult) -> bool:
        take = min(len(br.errors), cfg.max_trials - res.trials)
        cum = np.cumsum(br.errors[:take])
        need = cfg.min_block_errors - res.block_errors
        hit = np.searchsorted(cum, need)
        if hit < take:
            take = int(hit) + 1
        res.trials += take
        res.block_errors += int(np.count_nonzero(br.errors[:take]))
        res.abandonments += int(np.count_nonzero(br.abandoned[:take]))
        res.total_queries += int(br.queries[:take].sum())
        res.bit_errors += int(br.bit_errors[:take].sum())
        return res.block_errors >= cfg.min_block_errors or res.trials >= cfg.max_trials

    def limit(b: int) -> int:
        return min(block_size, cfg.max_trials - b * block_size)

    if workers == 1:
        for b in range(n_blocks):
            if absorb(runner.block(b, limit(b))):
                break
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            pending: deque = deque()
            nxt = 0
            while not done:
                while len(pending) < 2 * workers and nxt < n_blocks:
                    pending.append(ex.submit(runner.block, nxt, limit(nxt)))
                    nxt += 1
                if not pending:
                    break
                done = absorb(pending.popleft().result())
            for f in pending:
                f.cancel()
    res.wall_time = time.perf_counter() - t0
    log.info(
        "%s %s %s ebno=%s p=%.4g: %d/%d bler=%.3g",
        cfg.code.label(), cfg.decoder, res.abandon, cfg.ebno_db, res.p,
        res.block_errors, res.trials, res.bler,
    )
    return res


def run_sweep(
    cfgs: Iterable[SimPointConfig],
    workers: int | None = None,
    on_result: Callable[[SimPointResult], None] | None = None,
    block_size: int = BLOCK_SIZE,
) -> list[SimPointResult]:
    """Run points in order.  A failing point yields a result with ``error``
    set and zero trials; the sweep carries on."""
    out = []
    for cfg in cfgs:
        try:
            res = run_point(cfg, workers, block_size)
        except Exception as exc:  # reported per point
            log.error("point failed: %s", exc)
            res = SimPointResult(
                family=cfg.code.family, n=cfg.code.n, k=cfg.code.k or 0, decoder=cfg.decoder,
                abandon=cfg.abandon_label(), ebno_db=cfg.ebno_db, p=cfg.p or 0.0,
                seed=cfg.master_seed, error=str(exc),
            )
        out.append(res)
        if on_result is not None:
            on_result(res)
    return out


def ebno_grid(cfg: SimPointConfig, values: Iterable[float]) -> Iterator[SimPointConfig]:
    for v in values:
        yield replace(cfg, ebno_db=float(v))
