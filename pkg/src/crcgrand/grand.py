"""
GRAND decoders: hard-detection GRAND-SOS and soft-detection ORBGRAND.

Both test ``y ^ z`` for code-book membership over a fixed pattern order and
return the first hit.  The default engine runs the order in compiled code
against the code's syndrome columns; ``engine="python"`` walks the reference
generators of :mod:`crcgrand.patterns` and calls ``code.is_codeword``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import _kernels
from .bits import BitWord
from .patterns import OrbGenerator, SosGenerator, rank_from_reliabilities

if TYPE_CHECKING:
    from .codes import Code

UNLIMITED = np.iinfo(np.int64).max


@dataclass(frozen=True)
class Abandonment:
    """Decoding budget: maximum pattern weight, maximum queries, or both.

    ``max_weight=t`` reproduces "AB>t": patterns heavier than ``t`` are never
    tried.  ``max_queries=q`` stops after ``q`` membership tests.
    """

    max_weight: int | None = None
    max_queries: int | None = None

    def __post_init__(self):
        if self.max_weight is not None and self.max_weight < 0:
            raise ValueError(f"max_weight must be >= 0, got {self.max_weight}")
        if self.max_queries is not None and self.max_queries < 1:
            raise ValueError(f"max_queries must be >= 1, got {self.max_queries}")

    @classmethod
    def weight(cls, t: int) -> Abandonment:
        return cls(max_weight=t)

    @classmethod
    def queries(cls, q: int) -> Abandonment:
        return cls(max_queries=q)

    @classmethod
    def none(cls) -> Abandonment:
        return cls()

    def label(self) -> str:
        parts = []
        if self.max_weight is not None:
            parts.append(f"weight>{self.max_weight}")
        if self.max_queries is not None:
            parts.append(f"queries>{self.max_queries}")
        return "|".join(parts) or "none"

    @classmethod
    def parse(cls, text: str) -> Abandonment:
        if text == "none":
            return cls()
        kw = {}
        for part in text.split("|"):
            m = re.fullmatch(r"(weight|queries)>(\d+(?:\.\d+)?(?:e\d+)?)", part.strip())
            if not m:
                raise ValueError(f"bad abandonment label {text!r}")
            kw["max_weight" if m[1] == "weight" else "max_queries"] = int(float(m[2]))
        return cls(**kw)

    def check(self, n: int) -> None:
        if self.max_weight is not None and self.max_weight > n:
            raise ValueError(f"max_weight {self.max_weight} exceeds n = {n}")

    @property
    def _tmax(self) -> int:
        return UNLIMITED if self.max_weight is None else self.max_weight

    @property
    def _qmax(self) -> int:
        return UNLIMITED if self.max_queries is None else self.max_queries


@dataclass(frozen=True)
class DecodeOutcome:
    kind: str
    codeword: BitWord | None
    queries: int

    @classmethod
    def decoded(cls, c: BitWord, queries: int) -> DecodeOutcome:
        return cls("decoded", c, queries)

    @classmethod
    def abandoned(cls, queries: int) -> DecodeOutcome:
        return cls("abandoned", None, queries)

    @property
    def ok(self) -> bool:
        return self.kind == "decoded"


def _target(code: Code, y: BitWord) -> np.ndarray:
    from .codes import pack_words

    return pack_words([code.syndrome(y)], code.n - code.k)[0]


def grand_sos(code: Code, y: BitWord, ab: Abandonment = Abandonment(), engine: str = "compiled") -> DecodeOutcome:
    if len(y) != code.n:
        raise ValueError(f"received word length {len(y)} != n = {code.n}")
    ab.check(code.n)
    if engine == "python":
        gen = SosGenerator(code.n)
        q = 0
        while True:
            if q >= ab._qmax:
                return DecodeOutcome.abandoned(q)
            p = gen.next_positions()
            if p is None or len(p) > ab._tmax:
                return DecodeOutcome.abandoned(q)
            q += 1
            c = y.flip(*p)
            if code.is_codeword(c):
                return DecodeOutcome.decoded(c, q)
    pattern = np.zeros(code.n, dtype=np.uint8)
    st, q = _kernels.sos_search(code.column_words, _target(code, y), ab._tmax, ab._qmax, pattern)
    if st == _kernels.FOUND:
        return DecodeOutcome.decoded(y ^ BitWord.from_array(pattern), int(q))
    return DecodeOutcome.abandoned(int(q))


def _check_soft_budget(ab: Abandonment) -> None:
    if ab.max_weight is not None:
        raise ValueError("ORBGRAND abandonment is a query budget; max_weight is not supported")


def orbgrand(
    code: Code,
    llr_abs: Sequence[float],
    hard: BitWord,
    ab: Abandonment = Abandonment(),
    engine: str = "compiled",
) -> DecodeOutcome:
    if len(hard) != code.n or len(llr_abs) != code.n:
        raise ValueError(f"input length must equal n = {code.n}")
    _check_soft_budget(ab)
    ranks = rank_from_reliabilities(llr_abs)
    if engine == "python":
        gen = OrbGenerator(ranks)
        q = 0
        while True:
            if q >= ab._qmax:
                return DecodeOutcome.abandoned(q)
            p = gen.next_positions()
            if p is None:
                return DecodeOutcome.abandoned(q)
            q += 1
            c = hard.flip(*p)
            if code.is_codeword(c):
                return DecodeOutcome.decoded(c, q)
    pattern = np.zeros(code.n, dtype=np.uint8)
    st, q = _kernels.orb_search(
        code.column_words, ranks.pos.astype(np.int64), _target(code, hard), ab._qmax, pattern
    )
    if st == _kernels.FOUND:
        return DecodeOutcome.decoded(hard ^ BitWord.from_array(pattern), int(q))
    return DecodeOutcome.abandoned(int(q))


@dataclass
class BatchOutcome:
    """Per-row results of a batch decode; ``decoded`` rows are only meaningful
    where ``found`` is set."""

    found: np.ndarray
    queries: np.ndarray
    decoded: np.ndarray


def _cols3(cols: np.ndarray) -> np.ndarray:
    return cols[None] if cols.ndim == 2 else cols


def sos_decode_batch(cols: np.ndarray, hard: np.ndarray, ab: Abandonment) -> BatchOutcome:
    """GRAND-SOS over rows of ``hard`` (T, n); ``cols`` is (n, nw) or (T, n, nw)."""
    cols3 = _cols3(cols)
    hard = np.ascontiguousarray(hard, dtype=np.uint8)
    targets = _syndromes(cols3, hard)
    st, q, pat = _kernels.sos_batch(cols3, targets, ab._tmax, ab._qmax)
    return BatchOutcome(st == _kernels.FOUND, q, hard ^ pat)


def orb_decode_batch(cols: np.ndarray, rel: np.ndarray, hard: np.ndarray, ab: Abandonment) -> BatchOutcome:
    _check_soft_budget(ab)
    cols3 = _cols3(cols)
    hard = np.ascontiguousarray(hard, dtype=np.uint8)
    pos = np.ascontiguousarray(np.argsort(rel, axis=1, kind="stable"), dtype=np.int64)
    targets = _syndromes(cols3, hard)
    st, q, pat = _kernels.orb_batch(cols3, pos, targets, ab._qmax)
    return BatchOutcome(st == _kernels.FOUND, q, hard ^ pat)


def _syndromes(cols3: np.ndarray, words: np.ndarray) -> np.ndarray:
    if cols3.shape[0] == 1:
        return _kernels.syndromes(cols3[0], words)
    out = np.empty((words.shape[0], cols3.shape[2]), dtype=np.uint64)
    for t in range(words.shape[0]):
        out[t] = _kernels.syndromes(cols3[t], words[t : t + 1])[0]
    return out
