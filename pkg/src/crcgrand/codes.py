"""
Code constructions: CRC, BCH, random linear, Polar and CRC-aided Polar.

Every code exposes ``encode``/``is_codeword`` on :class:`BitWord` values plus
its syndrome columns, which is what the compiled GRAND kernels consume.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from functools import cached_property
from typing import Callable

import numpy as np

from . import _kernels
from .bits import (
    BitWord,
    Gf2Matrix,
    Gf2Poly,
    derive_parity_check,
    gf2_matmul,
    pack_columns,
    poly_divmod,
    poly_lcm,
    poly_mul,
    rref,
)
from .fields import Gf2mField, get_field, minimal_polynomial
from .grand import DecodeOutcome

FAMILIES = ("crc", "bch", "rlc", "polar", "capolar")

# CRC settings compared against BCH codes: (n, k, BCH t or None, Koopman poly, d).
REFERENCE_CODES = (
    (127, 120, 1, 0x65, 3),
    (127, 113, 2, 0x212D, 5),
    (127, 106, 3, 0x12FAA5, 7),
    (128, 99, None, 0x13A46755, 8),
    (63, 57, 1, 0x33, 3),
    (63, 51, 2, 0xBAE, 5),
    (63, 45, 3, 0x25F6A, 7),
    (64, 51, None, 0x12E6, 4),
)

# 5G NR CRC polynomials for CA-Polar, Koopman form: (poly, bits).
CRC_PRESETS = {
    "crc11": (0x710, 11),      # x^11+x^10+x^9+x^5+1
    "crc24a": (0xC3267D, 24),
    "crc24b": (0xC00031, 24),
    "crc24c": (0xD9588B, 24),
}


def parse_koopman(value: int, r: int) -> Gf2Poly:
    """Expand a Koopman-notation CRC polynomial of degree ``r``.

    Koopman form drops the always-present ``+1`` term: bit ``i`` of ``value``
    is the coefficient of ``x^(i+1)``.
    """
    if r < 1:
        raise ValueError(f"CRC degree must be positive, got {r}")
    if value >> r or not (value >> (r - 1)) & 1:
        raise ValueError(
            f"polynomial degree mismatch with n-K: 0x{value:x} is not a degree-{r} Koopman polynomial"
        )
    return Gf2Poly((value << 1) | 1)


def to_koopman(g: Gf2Poly) -> int:
    if not g.coeffs & 1:
        raise ValueError("Koopman form requires a +1 term")
    return g.coeffs >> 1


def crc_encode(g: Gf2Poly, m: BitWord, n: int, mode: str = "systematic") -> BitWord:
    """Systematic ``[m | x^(n-k) m(x) mod g]`` or multiplicative ``m(x) g(x)``."""
    r = g.degree
    if r is None or r != n - len(m):
        raise ValueError(f"generator degree {r} != n - k = {n - len(m)}")
    if mode == "systematic":
        shifted = m.value << r
        return BitWord(n, shifted ^ (Gf2Poly(shifted) % g).coeffs)
    if mode == "multiplicative":
        return BitWord(n, poly_mul(m.to_poly(), g).coeffs)
    raise ValueError(f"unknown CRC encoding mode {mode!r}")


def crc_is_codeword(g: Gf2Poly, y: BitWord) -> bool:
    return (y.to_poly() % g).is_zero()


def extract_generator_matrix(
    encoder: Callable[[BitWord], BitWord], k: int, n: int, spot_checks: int = 8, seed: int = 0
) -> Gf2Matrix:
    """Generator matrix of a linear encoder, one row per identity message.

    Linearity is spot-checked on a few random messages.
    """
    rows = []
    for i in range(k):
        c = encoder(BitWord(k, 1 << (k - 1 - i)))
        if len(c) != n:
            raise ValueError(f"encoder produced {len(c)} bits, expected {n}")
        rows.append(c.to_array())
    G = Gf2Matrix(np.array(rows))
    rng = np.random.default_rng(seed)
    for _ in range(spot_checks):
        m = BitWord.from_array(rng.integers(0, 2, k))
        if G.encode(m) != encoder(m):
            raise ValueError("encoder not linear")
    return G


def bhattacharyya(n: int, z0: float) -> np.ndarray:
    """Bhattacharyya parameters of the ``n`` synthesized channels.

    Each level maps a parameter ``z`` to the pair ``(2z - z^2, z^2)`` placed at
    indices ``2j`` and ``2j + 1``.
    """
    if n < 1 or n & (n - 1):
        raise ValueError(f"polar length must be a power of two, got {n}")
    z = np.array([z0], dtype=np.float64)
    while z.size < n:
        nxt = np.empty(2 * z.size)
        nxt[0::2] = 2 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    return z


def polar_transform(u: np.ndarray) -> np.ndarray:
    """``u @ F^{kron log2(n)}`` with ``F = [[1,0],[1,1]]``, natural order.

    Works on the last axis so batches can be transformed at once.
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    n = x.shape[-1]
    h = n // 2
    while h >= 1:
        v = x.reshape(x.shape[:-1] + (n // (2 * h), 2, h))
        v[..., 0, :] ^= v[..., 1, :]
        h //= 2
    return x


@dataclass(frozen=True)
class CodeSpec:
    """Declarative description of a code.

    Only the fields relevant to ``family`` are consulted: ``poly``/``mode``
    for CRC, ``t`` for BCH, ``seed``/``refresh`` for random linear codes,
    ``design_ebno_db`` for Polar, and additionally ``crc`` or
    ``crc_poly``/``crc_bits`` for CA-Polar.
    """

    family: str
    n: int
    k: int | None = None
    poly: int | None = None
    mode: str = "systematic"
    t: int | None = None
    seed: int = 0
    refresh: bool = False
    design_ebno_db: float = 2.0
    crc: str | None = None
    crc_poly: int | None = None
    crc_bits: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown code family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "bch":
            if self.t is None:
                raise ValueError("bch code needs t")
            return
        if self.k is None:
            raise ValueError(f"{self.family} code needs k")
        if not 0 < self.k < self.n:
            raise ValueError(f"need 0 < k < n, got n={self.n}, k={self.k}")
        if self.family == "crc" and self.poly is None:
            raise ValueError("crc code needs poly")

    @classmethod
    def from_dict(cls, d: dict) -> CodeSpec:
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown code keys: {sorted(extra)}")
        d = dict(d)
        for key in ("poly", "crc_poly"):
            if isinstance(d.get(key), str):
                d[key] = int(d[key], 0)
        return cls(**d)

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if v is not None}
        for key in ("poly", "crc_poly"):
            if key in d:
                d[key] = hex(d[key])
        return d

    def label(self) -> str:
        if self.family == "crc":
            return f"CRC({self.n},{self.k})/0x{self.poly:x}"
        if self.family == "bch":
            return f"BCH({self.n},t={self.t})"
        if self.family == "rlc":
            return f"RLC({self.n},{self.k})"
        if self.family == "polar":
            return f"Polar({self.n},{self.k})"
        return f"CA-Polar({self.n},{self.k})+{self.crc or 'crc'}"

    def build(self) -> Code:
        return build_code(self)


class Code:
    """A binary linear ``(n, k)`` code.

    Subclasses provide ``encode``; everything else has a generic default
    driven by the generator matrix and the syndrome columns.
    """

    spec: CodeSpec
    n: int
    k: int

    def encode(self, m: BitWord) -> BitWord:
        raise NotImplementedError

    @property
    def rate(self) -> float:
        return self.k / self.n

    @cached_property
    def generator_matrix(self) -> Gf2Matrix:
        return extract_generator_matrix(self.encode, self.k, self.n)

    @cached_property
    def parity_columns(self) -> tuple[int, ...]:
        """Syndrome of each single-bit word, as an integer."""
        return tuple(pack_columns(self.parity_check_matrix.array))

    @cached_property
    def parity_check_matrix(self) -> Gf2Matrix:
        return derive_parity_check(self.generator_matrix)

    @cached_property
    def column_words(self) -> np.ndarray:
        """Syndrome columns packed as ``(n, nw)`` uint64 for the kernels."""
        return pack_words(self.parity_columns, self.n - self.k)

    def syndrome(self, y: BitWord) -> int:
        cols = self.parity_columns
        s = 0
        v = y.value
        for i in range(self.n):
            if (v >> (self.n - 1 - i)) & 1:
                s ^= cols[i]
        return s

    def is_codeword(self, y: BitWord) -> bool:
        if len(y) != self.n:
            raise ValueError(f"word length {len(y)} != n = {self.n}")
        return self.syndrome(y) == 0

    @cached_property
    def _unencoder(self) -> tuple[np.ndarray, np.ndarray]:
        # k independent columns of G and the inverse of that square block.
        G = self.generator_matrix.array
        _, pivots = rref(G)
        block = G[:, pivots]
        aug = np.concatenate([block, np.eye(self.k, dtype=np.uint8)], axis=1)
        red, _ = rref(aug)
        return np.array(pivots, dtype=np.int64), red[:, self.k:]

    def message(self, c: BitWord) -> BitWord:
        """Recover the message of a code-word (the inverse of ``encode``)."""
        return BitWord.from_array(self.messages(c.to_array()[None, :])[0])

    def messages(self, words: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`message` on ``(T, n)`` bit arrays.

        Non-code-words are mapped through the same linear left-inverse.
        """
        pivots, inv = self._unencoder
        return gf2_matmul(words[:, pivots], inv)

    def encode_batch(self, msgs: np.ndarray) -> np.ndarray:
        return gf2_matmul(msgs, self.generator_matrix.array)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec.label()} n={self.n} k={self.k}>"


def pack_words(columns, r: int) -> np.ndarray:
    nw = max(1, -(-r // 64))
    out = np.zeros((len(columns), nw), dtype=np.uint64)
    mask = (1 << 64) - 1
    for i, c in enumerate(columns):
        for j in range(nw):
            out[i, j] = (c >> (64 * j)) & mask
    return out


class CyclicCode(Code):
    """Code-book of all multiples of ``g(x)`` of degree below ``n``."""

    def __init__(self, spec: CodeSpec, g: Gf2Poly, mode: str = "systematic"):
        if mode not in ("systematic", "multiplicative"):
            raise ValueError(f"unknown CRC encoding mode {mode!r}")
        self.spec = spec
        self.g = g
        self.n = spec.n
        self.k = spec.n - g.degree
        self.mode = mode

    def encode(self, m: BitWord) -> BitWord:
        return crc_encode(self.g, m, self.n, self.mode)

    def is_codeword(self, y: BitWord) -> bool:
        if len(y) != self.n:
            raise ValueError(f"word length {len(y)} != n = {self.n}")
        return crc_is_codeword(self.g, y)

    def syndrome(self, y: BitWord) -> int:
        return (y.to_poly() % self.g).coeffs

    @cached_property
    def parity_columns(self) -> tuple[int, ...]:
        # bit i sits on x^(n-1-i)
        cols = []
        r = 1
        for _ in range(self.n):
            cols.append(r)
            r <<= 1
            if r >> self.g.degree:
                r ^= self.g.coeffs
        return tuple(reversed(cols))

    def message(self, c: BitWord) -> BitWord:
        r = self.n - self.k
        if self.mode == "systematic":
            return BitWord(self.k, c.value >> r)
        q, _ = poly_divmod(c.to_poly(), self.g)
        return BitWord.from_poly(q, self.k)


def crc_build(n: int, k: int, poly: int, mode: str = "systematic") -> CyclicCode:
    spec = CodeSpec("crc", n, k, poly=poly, mode=mode)
    return CyclicCode(spec, parse_koopman(poly, n - k), mode)


class BchCode(CyclicCode):
    def __init__(self, spec: CodeSpec, field_: Gf2mField, g: Gf2Poly, t: int):
        super().__init__(spec, g, mode="multiplicative")
        self.field = field_
        self.t = t


def bch_build(m: int, t: int) -> BchCode:
    """Narrow-sense primitive binary BCH code of length ``2^m - 1``."""
    f = get_field(m)
    n = f.order
    if not 1 <= t < (1 << (m - 1)):
        raise ValueError(f"need 1 <= t < 2^(m-1), got t={t}")
    g = Gf2Poly(1)
    for j in range(1, 2 * t + 1):
        g = poly_lcm(g, minimal_polynomial(f, f.alpha_pow(j)))
    k = n - g.degree
    if k <= 0:
        raise ValueError("rate zero")
    return BchCode(CodeSpec("bch", n, k, t=t), f, g, t)


def _poly_eval_field(f: Gf2mField, coeffs: list[int], x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = f.mul(acc, x) ^ c
    return acc


def bm_decode(code: BchCode, y: BitWord) -> DecodeOutcome:
    """Berlekamp-Massey bounded-distance decoding with Chien search."""
    f, n, t = code.field, code.n, code.t
    if len(y) != n:
        raise ValueError(f"word length {len(y)} != n = {n}")
    rem = y.to_poly() % code.g
    if rem.is_zero():
        return DecodeOutcome.decoded(y, 1)
    # g(alpha^j) = 0 for j <= 2t, so the remainder has the same syndromes.
    synd = [f.eval_gf2(rem, f.alpha_pow(j)) for j in range(1, 2 * t + 1)]

    C = [1]
    B = [1]
    L = 0
    gap = 1
    b = 1
    for r in range(2 * t):
        d = synd[r]
        for i in range(1, L + 1):
            if i < len(C):
                d ^= f.mul(C[i], synd[r - i])
        if d == 0:
            gap += 1
            continue
        coef = f.div(d, b)
        T = C[:]
        need = len(B) + gap
        if len(C) < need:
            C = C + [0] * (need - len(C))
        for i, bi in enumerate(B):
            C[i + gap] ^= f.mul(coef, bi)
        if 2 * L <= r:
            L = r + 1 - L
            B = T
            b = d
            gap = 1
        else:
            gap += 1
    while len(C) > 1 and C[-1] == 0:
        C.pop()
    deg = len(C) - 1
    if deg != L or L > t:
        return DecodeOutcome.abandoned(1)

    # error at power j  <=>  locator vanishes at alpha^-j
    flips = 0
    roots = 0
    for j in range(n):
        if _poly_eval_field(f, C, f.alpha_pow(-j)) == 0:
            flips |= 1 << j
            roots += 1
    if roots != L:
        return DecodeOutcome.abandoned(1)
    c = BitWord(n, y.value ^ flips)
    if not code.is_codeword(c):
        return DecodeOutcome.abandoned(1)
    return DecodeOutcome.decoded(c, 1)


class MatrixCode(Code):
    """Linear code given by an explicit generator matrix."""

    def __init__(self, spec: CodeSpec, G: Gf2Matrix, H: Gf2Matrix | None = None):
        self.spec = spec
        self.k, self.n = G.shape
        self.__dict__["generator_matrix"] = G
        if H is not None:
            self.__dict__["parity_check_matrix"] = H

    def encode(self, m: BitWord) -> BitWord:
        return self.generator_matrix.encode(m)


class RandomLinearCode(MatrixCode):
    def __init__(self, spec: CodeSpec, parity: np.ndarray):
        k, r = parity.shape
        G = Gf2Matrix(np.concatenate([np.eye(k, dtype=np.uint8), parity], axis=1))
        super().__init__(spec, G, derive_parity_check(G))
        self.parity = parity

    def message(self, c: BitWord) -> BitWord:
        return BitWord(self.k, c.value >> (self.n - self.k))


def rlc_parity(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=(k, n - k), dtype=np.uint8)


def rlc_build(n: int, k: int, seed: int = 0, parity: np.ndarray | None = None) -> RandomLinearCode:
    """Systematic random linear code ``[I | P]`` with uniform ``P``.

    ``parity`` overrides the random draw.
    """
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")
    if parity is None:
        parity = rlc_parity(n, k, np.random.default_rng(seed))
    parity = np.asarray(parity, dtype=np.uint8)
    if parity.shape != (k, n - k):
        raise ValueError(f"parity block must be {k}x{n - k}")
    return RandomLinearCode(CodeSpec("rlc", n, k, seed=seed), parity)


def design_z0(rate: float, design_ebno_db: float) -> float:
    return math.exp(-rate * 10 ** (design_ebno_db / 10))


def polar_info_set(n: int, k: int, z0: float) -> np.ndarray:
    """The ``k`` indices of smallest Bhattacharyya parameter, ascending.

    Among equal parameters the lower index is frozen first.
    """
    z = bhattacharyya(n, z0)
    order = np.lexsort((-np.arange(n), z))
    return np.sort(order[:k])


class PolarCode(MatrixCode):
    def __init__(self, spec: CodeSpec, info: np.ndarray, z: np.ndarray):
        self.n = spec.n
        self.k = len(info)
        self.info = np.asarray(info, dtype=np.int64)
        self.frozen = np.setdiff1d(np.arange(self.n), self.info)
        self.z = z
        self.spec = spec
        G = extract_generator_matrix(self._encode_u, self.k, self.n)
        super().__init__(spec, G)

    def _encode_u(self, m: BitWord) -> BitWord:
        u = np.zeros(self.n, dtype=np.uint8)
        u[self.info] = m.to_array()
        return BitWord.from_array(polar_transform(u))

    def encode(self, m: BitWord) -> BitWord:
        return self._encode_u(m)

    def message(self, c: BitWord) -> BitWord:
        # F^{kron} is an involution over GF(2)
        u = polar_transform(c.to_array())
        return BitWord.from_array(u[self.info])


def polar_build(n: int, k: int, design_ebno_db: float = 2.0, z0: float | None = None) -> PolarCode:
    if n < 2 or n & (n - 1) or n > 1024:
        raise ValueError(f"polar length must be a power of two in 2..1024, got {n}")
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")
    if z0 is None:
        z0 = design_z0(k / n, design_ebno_db)
    info = polar_info_set(n, k, z0)
    spec = CodeSpec("polar", n, k, design_ebno_db=design_ebno_db)
    return PolarCode(spec, info, bhattacharyya(n, z0))


class CaPolarCode(MatrixCode):
    def __init__(self, spec: CodeSpec, crc_g: Gf2Poly, inner: PolarCode):
        self.crc_g = crc_g
        self.inner = inner
        self.k = spec.k
        self.n = spec.n
        self.spec = spec
        G = extract_generator_matrix(self._encode, self.k, self.n)
        super().__init__(spec, G)

    def _encode(self, m: BitWord) -> BitWord:
        outer = crc_encode(self.crc_g, m, self.inner.k, "systematic")
        return self.inner.encode(outer)

    def encode(self, m: BitWord) -> BitWord:
        return self._encode(m)

    def message(self, c: BitWord) -> BitWord:
        outer = self.inner.message(c)
        return BitWord(self.k, outer.value >> (self.inner.k - self.k))


def resolve_crc(crc: str | None, crc_poly: int | None, crc_bits: int | None) -> tuple[int, int]:
    if crc is not None:
        key = crc.lower()
        if key not in CRC_PRESETS:
            raise ValueError(f"unknown CRC preset {crc!r}; choose from {sorted(CRC_PRESETS)}")
        return CRC_PRESETS[key]
    if crc_poly is None or crc_bits is None:
        raise ValueError("CA-Polar needs crc preset or crc_poly and crc_bits")
    return crc_poly, crc_bits


def capolar_build(
    n: int,
    k: int,
    crc_poly: int | None = None,
    crc_bits: int | None = None,
    design_ebno_db: float = 2.0,
    crc: str | None = None,
) -> CaPolarCode:
    """CRC-aided Polar: systematic CRC on the message, then a Polar code whose
    information positions carry message and check bits in order."""
    crc_poly, crc_bits = resolve_crc(crc, crc_poly, crc_bits)
    if not 0 < k or k + crc_bits >= n:
        raise ValueError(f"need 0 < k and k + crc_bits < n, got k={k}, crc_bits={crc_bits}, n={n}")
    g = parse_koopman(crc_poly, crc_bits)
    inner = polar_build(n, k + crc_bits, design_ebno_db)
    spec = CodeSpec(
        "capolar", n, k, design_ebno_db=design_ebno_db, crc=crc, crc_poly=crc_poly, crc_bits=crc_bits
    )
    return CaPolarCode(spec, g, inner)


def build_code(spec: CodeSpec) -> Code:
    if spec.family == "crc":
        if spec.poly is None:
            raise ValueError("crc code needs poly")
        code = CyclicCode(spec, parse_koopman(spec.poly, spec.n - spec.k), spec.mode)
        return code
    if spec.family == "bch":
        m = spec.n.bit_length()
        if spec.n != (1 << m) - 1 or not 3 <= m <= 8:
            raise ValueError(f"BCH length must be 2^m - 1 with m in 3..8, got {spec.n}")
        code = bch_build(m, spec.t)
        if spec.k is not None and spec.k != code.k:
            raise ValueError(f"BCH(n={spec.n}, t={spec.t}) has k={code.k}, not {spec.k}")
        return code
    if spec.family == "rlc":
        code = rlc_build(spec.n, spec.k, spec.seed)
        code.spec = spec
        return code
    if spec.family == "polar":
        return polar_build(spec.n, spec.k, spec.design_ebno_db)
    code = capolar_build(
        spec.n, spec.k, spec.crc_poly, spec.crc_bits, spec.design_ebno_db, crc=spec.crc
    )
    code.spec = spec
    return code


@dataclass
class MinDistanceResult:
    """Outcome of an exhaustive low-weight code-word search."""

    max_weight: int
    d: int | None
    witness: tuple[int, ...] | None = None
    words_checked: int = 0
    per_weight: dict = field(default_factory=dict)

    def report(self) -> str:
        if self.d is None:
            return f"d > {self.max_weight}"
        return f"d = {self.d}"


def min_distance(code: Code, max_weight: int) -> MinDistanceResult:
    """Smallest weight of a nonzero code-word, searched up to ``max_weight``.

    Every word of weight ``1..max_weight`` is checked for membership through
    its syndrome, lightest first; the first hit is the minimum distance.
    """
    cols = code.column_words
    out = np.empty(max(1, max_weight), dtype=np.int64)
    res = MinDistanceResult(max_weight, None)
    for w in range(1, min(max_weight, code.n) + 1):
        got = _kernels.find_codeword_of_weight(cols, w, out)
        res.words_checked += abs(got)
        res.per_weight[w] = abs(got)
        if got > 0:
            res.d = w
            res.witness = tuple(int(i) for i in out[:w])
            break
    return res
