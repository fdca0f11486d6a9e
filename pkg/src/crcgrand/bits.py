"""
GF(2) words, polynomials and matrices.

Words and polynomials are backed by Python integers so that XOR, shifts and
popcount run on packed machine words.  A :class:`BitWord` of length ``n`` keeps
its first-transmitted bit (index 0) in integer bit ``n - 1``; read as a
polynomial this puts bit 0 on the highest power, which is the usual CRC
register convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class BitWord:
    """Fixed-length binary vector.

    Parameters
    ----------
    length : int
        Number of bits.
    value : int
        Packed contents; bit ``length - 1 - i`` of the integer is bit ``i`` of
        the word.
    """

    length: int
    value: int = 0

    def __post_init__(self):
        # numpy integers would overflow on shifts past 63 bits
        object.__setattr__(self, "length", int(self.length))
        object.__setattr__(self, "value", int(self.value))
        if self.length <= 0:
            raise ValueError(f"BitWord length must be positive, got {self.length}")
        if self.value < 0 or self.value >> self.length:
            raise ValueError(f"value does not fit in {self.length} bits")

    @classmethod
    def zeros(cls, length: int) -> BitWord:
        return cls(length, 0)

    @classmethod
    def from_str(cls, text: str) -> BitWord:
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(len(text), int(text, 2))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitWord:
        bits = [int(b) for b in bits]
        value = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bit values must be 0 or 1, got {b}")
            value = (value << 1) | b
        return cls(len(bits), value)

    @classmethod
    def from_positions(cls, length: int, positions: Iterable[int]) -> BitWord:
        value = 0
        for i in map(int, positions):
            if not 0 <= i < length:
                raise IndexError(f"bit index {i} out of range for length {length}")
            value |= 1 << (length - 1 - i)
        return cls(length, value)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self.length
        if not 0 <= i < self.length:
            raise IndexError(f"bit index {i} out of range for length {self.length}")
        return (self.value >> (self.length - 1 - i)) & 1

    def __iter__(self):
        for i in range(self.length):
            yield (self.value >> (self.length - 1 - i)) & 1

    def __xor__(self, other: BitWord) -> BitWord:
        if not isinstance(other, BitWord):
            return NotImplemented
        if other.length != self.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")
        return BitWord(self.length, self.value ^ other.value)

    def __str__(self) -> str:
        return format(self.value, f"0{self.length}b")

    @property
    def weight(self) -> int:
        return self.value.bit_count()

    def flip(self, *positions: int) -> BitWord:
        return self ^ BitWord.from_positions(self.length, positions)

    def support(self) -> list[int]:
        """Indices of the set bits, ascending."""
        return [i for i in range(self.length) if self[i]]

    def to_array(self) -> np.ndarray:
        return np.fromiter(self, dtype=np.uint8, count=self.length)

    @classmethod
    def from_array(cls, arr: Sequence[int] | np.ndarray) -> BitWord:
        return cls.from_bits(np.asarray(arr, dtype=np.int64).tolist())

    def to_poly(self) -> Gf2Poly:
        return Gf2Poly(self.value)

    @classmethod
    def from_poly(cls, poly: Gf2Poly, length: int) -> BitWord:
        if poly.degree is not None and poly.degree >= length:
            raise ValueError(f"degree {poly.degree} does not fit in {length} bits")
        return cls(length, poly.coeffs)


@dataclass(frozen=True)
class Gf2Poly:
    """Polynomial over GF(2); bit ``i`` of ``coeffs`` is the coefficient of x^i."""

    coeffs: int = 0

    def __post_init__(self):
        if self.coeffs < 0:
            raise ValueError("coefficient integer must be non-negative")

    @classmethod
    def from_exponents(cls, exponents: Iterable[int]) -> Gf2Poly:
        c = 0
        for e in exponents:
            c ^= 1 << e
        return cls(c)

    @classmethod
    def from_str(cls, text: str) -> Gf2Poly:
        """Parse a power-descending bit string such as ``"1011"``."""
        return cls(int(text, 2))

    @property
    def degree(self) -> int | None:
        return self.coeffs.bit_length() - 1 if self.coeffs else None

    def is_zero(self) -> bool:
        return self.coeffs == 0

    def exponents(self) -> list[int]:
        """Exponents with nonzero coefficient, descending."""
        return [i for i in range(self.coeffs.bit_length() - 1, -1, -1) if (self.coeffs >> i) & 1]

    def __add__(self, other: Gf2Poly) -> Gf2Poly:
        return Gf2Poly(self.coeffs ^ other.coeffs)

    __sub__ = __add__

    def __mul__(self, other: Gf2Poly) -> Gf2Poly:
        return poly_mul(self, other)

    def __divmod__(self, other: Gf2Poly) -> tuple[Gf2Poly, Gf2Poly]:
        return poly_divmod(self, other)

    def __mod__(self, other: Gf2Poly) -> Gf2Poly:
        return Gf2Poly(_poly_mod_int(self.coeffs, other.coeffs))

    def __floordiv__(self, other: Gf2Poly) -> Gf2Poly:
        return poly_divmod(self, other)[0]

    def bitstring(self) -> str:
        return format(self.coeffs, "b")

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for e in self.exponents():
            terms.append("1" if e == 0 else "x" if e == 1 else f"x^{e}")
        return "+".join(terms)

    def __repr__(self) -> str:
        return f"Gf2Poly({self})"


def _poly_mod_int(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("division by zero polynomial")
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def poly_divmod(dividend: Gf2Poly, divisor: Gf2Poly) -> tuple[Gf2Poly, Gf2Poly]:
    """Long division over GF(2). Returns ``(quotient, remainder)``."""
    if divisor.coeffs == 0:
        raise ZeroDivisionError("division by zero polynomial")
    a, b = dividend.coeffs, divisor.coeffs
    db = b.bit_length()
    q = 0
    while a.bit_length() >= db:
        shift = a.bit_length() - db
        q |= 1 << shift
        a ^= b << shift
    return Gf2Poly(q), Gf2Poly(a)


def poly_mul(a: Gf2Poly, b: Gf2Poly) -> Gf2Poly:
    x, y = a.coeffs, b.coeffs
    if x.bit_count() > y.bit_count():
        x, y = y, x
    out = 0
    shift = 0
    while x:
        if x & 1:
            out ^= y << shift
        x >>= 1
        shift += 1
    return Gf2Poly(out)


def poly_gcd(a: Gf2Poly, b: Gf2Poly) -> Gf2Poly:
    x, y = a.coeffs, b.coeffs
    while y:
        x, y = y, _poly_mod_int(x, y)
    return Gf2Poly(x)


def poly_lcm(a: Gf2Poly, b: Gf2Poly) -> Gf2Poly:
    if a.is_zero() or b.is_zero():
        return Gf2Poly(0)
    return poly_divmod(poly_mul(a, b), poly_gcd(a, b))[0]


class Gf2Matrix:
    """Immutable binary matrix backed by a read-only ``uint8`` array."""

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=np.uint8, copy=True)
        if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
            raise ValueError(f"expected a non-empty 2-D bit array, got shape {a.shape}")
        if np.any(a > 1):
            raise ValueError("matrix entries must be 0 or 1")
        a.setflags(write=False)
        self._a = a

    @property
    def array(self) -> np.ndarray:
        return self._a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def T(self) -> Gf2Matrix:
        return Gf2Matrix(self._a.T)

    @classmethod
    def identity(cls, k: int) -> Gf2Matrix:
        return cls(np.eye(k, dtype=np.uint8))

    def __matmul__(self, other: Gf2Matrix) -> Gf2Matrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.shape} @ {other.shape}")
        return Gf2Matrix(gf2_matmul(self._a, other._a))

    def __eq__(self, other) -> bool:
        return isinstance(other, Gf2Matrix) and np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash((self._a.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"Gf2Matrix({self.rows}x{self.cols})"

    def is_zero(self) -> bool:
        return not self._a.any()

    def rank(self) -> int:
        return len(rref(self._a)[1])

    def row(self, i: int) -> BitWord:
        return BitWord.from_array(self._a[i])

    def encode(self, message: BitWord) -> BitWord:
        """Row-vector product ``message @ self``."""
        if len(message) != self.rows:
            raise ValueError(f"message length {len(message)} != {self.rows}")
        return BitWord.from_array(gf2_matmul(message.to_array()[None, :], self._a)[0])

    def systematize(self) -> tuple[Gf2Matrix, np.ndarray]:
        """Row-reduce to ``[I | P]`` up to a column permutation.

        Returns the reduced matrix in permuted column order and the
        permutation ``perm`` such that ``reduced = rref(self)[:, perm]``.
        """
        r, pivots = rref(self._a)
        if len(pivots) < self.rows:
            raise ValueError("generator not full rank")
        rest = [c for c in range(self.cols) if c not in set(pivots)]
        perm = np.array(list(pivots) + rest, dtype=np.int64)
        return Gf2Matrix(r[:, perm]), perm


def gf2_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64) % 2).astype(np.uint8)


def rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2).

    Returns the reduced matrix (zero rows dropped) and its pivot columns.
    """
    m = np.array(a, dtype=np.uint8) & 1
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        hits = np.flatnonzero(m[:, c])
        hits = hits[hits != r]
        m[hits] ^= m[r]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def derive_parity_check(G: Gf2Matrix) -> Gf2Matrix:
    """Parity-check matrix of the row space of a full-rank generator.

    ``G`` is reduced to ``[I | P]`` under a column permutation, ``[P^T | I]``
    is formed in that order and the permutation is undone so that ``H``
    refers to the original bit positions.
    """
    k, n = G.shape
    if k >= n:
        if G.rank() < k:
            raise ValueError("generator not full rank")
        raise ValueError("code has no redundancy; parity-check matrix is empty")
    sys_g, perm = G.systematize()
    p = sys_g.array[:, k:]
    h_perm = np.concatenate([p.T, np.eye(n - k, dtype=np.uint8)], axis=1)
    h = np.empty_like(h_perm)
    h[:, perm] = h_perm
    return Gf2Matrix(h)


def pack_columns(h: np.ndarray) -> list[int]:
    """Pack each column of ``h`` into an integer, row ``i`` at bit ``i``."""
    weights = [1 << i for i in range(h.shape[0])]
    return [sum(w for w, bit in zip(weights, h[:, j]) if bit) for j in range(h.shape[1])]
