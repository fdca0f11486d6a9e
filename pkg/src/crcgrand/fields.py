"""GF(2^m) arithmetic for BCH construction and decoding, m in 3..8."""

from __future__ import annotations

from functools import lru_cache

from .bits import Gf2Poly

# Primitive moduli; bit i is the coefficient of x^i.
DEFAULT_MODULI = {
    3: 0b1011,        # x^3 + x + 1
    4: 0b10011,       # x^4 + x + 1
    5: 0b100101,      # x^5 + x^2 + 1
    6: 0b1000011,     # x^6 + x + 1
    7: 0b10001001,    # x^7 + x^3 + 1
    8: 0b100011101,   # x^8 + x^4 + x^3 + x^2 + 1
}


class Gf2mField:
    """Finite field GF(2^m) with log/antilog tables.

    Elements are integers in ``[0, 2^m)`` whose bits are polynomial
    coefficients in the class of ``x`` (written alpha).
    """

    def __init__(self, m: int, modulus: int | None = None):
        if m not in DEFAULT_MODULI:
            raise ValueError(f"extension degree must be in 3..8, got {m}")
        modulus = DEFAULT_MODULI[m] if modulus is None else modulus
        if modulus.bit_length() - 1 != m:
            raise ValueError(f"modulus degree must be {m}")
        self.m = m
        self.size = 1 << m
        self.order = self.size - 1
        self.modulus = modulus

        exp = [0] * (2 * self.order)
        log = [-1] * self.size
        x = 1
        for i in range(self.order):
            if i and x == 1:
                raise ValueError(f"modulus {Gf2Poly(modulus)} is not primitive")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.size:
                x ^= modulus
        if x != 1:
            raise ValueError(f"modulus {Gf2Poly(modulus)} is not primitive")
        exp[self.order:] = exp[: self.order]
        self.exp = tuple(exp)
        self.log = tuple(log)

    def __repr__(self) -> str:
        return f"Gf2mField(m={self.m}, modulus={Gf2Poly(self.modulus)})"

    def alpha_pow(self, i: int) -> int:
        return self.exp[i % self.order]

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self.exp[(self.order - self.log[a]) % self.order]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e else 1
        return self.exp[(self.log[a] * e) % self.order]

    def eval_gf2(self, poly: Gf2Poly, x: int) -> int:
        """Evaluate a binary polynomial at a field element (Horner)."""
        acc = 0
        for i in range(poly.coeffs.bit_length() - 1, -1, -1):
            acc = self.mul(acc, x) ^ ((poly.coeffs >> i) & 1)
        return acc

    def conjugates(self, e: int) -> list[int]:
        cls = [e]
        x = self.mul(e, e)
        while x != e:
            cls.append(x)
            x = self.mul(x, x)
        return cls


@lru_cache(maxsize=None)
def get_field(m: int) -> Gf2mField:
    return Gf2mField(m)


def field_mul(f: Gf2mField, a: int, b: int) -> int:
    return f.mul(a, b)


def minimal_polynomial(f: Gf2mField, e: int) -> Gf2Poly:
    """Minimal polynomial of ``e`` over GF(2), the product of ``(x - c)``
    over its conjugacy class."""
    if e == 0:
        raise ValueError("minimal polynomial of zero is x; only nonzero elements supported")
    if not 0 < e < f.size:
        raise ValueError(f"element {e} outside GF(2^{f.m})")
    coeffs = [1]  # ascending powers, field-valued
    for c in f.conjugates(e):
        nxt = [0] * (len(coeffs) + 1)
        for i, a in enumerate(coeffs):
            nxt[i + 1] ^= a
            nxt[i] ^= f.mul(a, c)
        coeffs = nxt
    if any(a not in (0, 1) for a in coeffs):
        raise ArithmeticError("minimal polynomial has coefficients outside GF(2)")
    return Gf2Poly(sum(1 << i for i, a in enumerate(coeffs) if a))
