"""Exact and floating arithmetic with roots of unity.

A CycNumber is either an exact element of Q(zeta_m), stored as a rational
coefficient vector on the power basis 1, zeta, ..., zeta^(phi(m)-1) reduced
mod the m-th cyclotomic polynomial, or a complex double carrying a running
error bound.  Exact values of different orders are aligned through the
canonical embedding Q(zeta_m) -> Q(zeta_lcm) before combining.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

# Exact arithmetic is enabled by default only up to this basis size;
# coefficient-vector multiplication is quadratic in phi(m).
EXACT_PHI_CAP = 256

# Unit roundoff bookkeeping for the float path (documented budget:
# q * 2**-50 per q-term sum).
_EPS = 2.0 ** -50


def _poly_div_exact(num: list[int], den: tuple[int, ...]) -> list[int]:
    """Exact division of integer polynomials (coefficients low to high)."""
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c == 0:
            continue
        q, rem = divmod(c, den[-1])
        if rem:
            raise ArithmeticError("non-exact polynomial division")
        out[i - dd] = q
        for j, dj in enumerate(den):
            num[i - dd + j] -= q * dj
    if any(num[: dd]):
        raise ArithmeticError("nonzero remainder in cyclotomic division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the m-th cyclotomic polynomial."""
    if m < 1:
        raise ValueError("order must be positive")
    if m == 1:
        return (-1, 1)
    f = [0] * (m + 1)
    f[0], f[m] = -1, 1
    for d in range(1, m):
        if m % d == 0:
            f = _poly_div_exact(f, cyclotomic_polynomial(d))
    return tuple(f)


@lru_cache(maxsize=None)
def _context(m: int) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """Degree phi(m) and reduced power basis rows x^e mod Phi_m.

    Rows cover every exponent needed after reducing products mod x^m = 1:
    e in [0, max(m, 2*phi-1)).
    """
    phi_poly = cyclotomic_polynomial(m)
    deg = len(phi_poly) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(max(m, 2 * deg - 1)):
        rows.append(tuple(cur))
        nxt = [0] + cur[:-1]
        lead = cur[-1]
        if lead:
            for j in range(deg):
                nxt[j] -= lead * phi_poly[j]
        cur = nxt
    return deg, tuple(rows)


@lru_cache(maxsize=None)
def _rows_matrix(m: int):
    import numpy as np

    _, rows = _context(m)
    return np.array(rows, dtype=np.int64)


def phi(m: int) -> int:
    return _context(m)[0]


def _reduce_exponents(m: int, terms) -> tuple[int, ...]:
    """Sum of coef * x^e over (e, coef) pairs, reduced into the power basis."""
    deg, rows = _context(m)
    out = [0] * deg
    for e, coef in terms:
        if coef:
            row = rows[e % m]
            for j, v in enumerate(row):
                if v:
                    out[j] += coef * v
    return tuple(out)


class CycNumber:
    """Element of Q(zeta_m), exact (rational vector) or float (complex).

    Exact values are normalised: gcd of numerators and denominator is 1 and
    the denominator is positive.  Mixing an exact and a float operand
    produces a float result with a propagated error bound.
    """

    __slots__ = ("order", "num", "den", "cval", "err")

    def __init__(self, order, num=None, den=1, cval=None, err=0.0):
        self.order = order
        if num is not None:
            deg, _ = _context(order)
            if len(num) != deg:
                raise ValueError("coefficient vector has wrong length")
            g = 0
            for v in num:
                g = math.gcd(g, v)
            g = math.gcd(g, den)
            if g == 0:
                g, den = 1, 1
            if den < 0:
                g = -g
            self.num = tuple(v // g for v in num)
            self.den = den // g
            self.cval = None
            self.err = 0.0
        else:
            self.num = None
            self.den = 1
            self.cval = complex(cval)
            self.err = float(err)

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, order: int = 1) -> "CycNumber":
        deg, _ = _context(order)
        return cls(order, (0,) * deg)

    @classmethod
    def from_rational(cls, value) -> "CycNumber":
        fr = Fraction(value)
        return cls(1, (fr.numerator,), fr.denominator)

    @classmethod
    def root_of_unity(cls, order: int, exponent: int, coef=1) -> "CycNumber":
        """coef * zeta_order ** exponent, exact."""
        fr = Fraction(coef)
        num = _reduce_exponents(order, [(exponent % order, fr.numerator)])
        return cls(order, num, fr.denominator)

    @classmethod
    def from_exponent_counts(cls, order: int, counts, den: int = 1) -> "CycNumber":
        """Exact value sum counts[e] * zeta_order**e, divided by den.

        Counts must stay well below 2**63 / order; the trace pipelines and
        Gauss sums satisfy this by orders of magnitude.
        """
        import numpy as np

        counts = np.asarray(counts, dtype=np.int64)
        rows = _rows_matrix(order)[: len(counts)]
        num = tuple(int(v) for v in counts @ rows)
        return cls(order, num, den)

    @classmethod
    def from_complex(cls, value, err: float = 0.0) -> "CycNumber":
        return cls(1, cval=value, err=err)

    # ------------------------------------------------------------------
    # predicates and conversions

    @property
    def is_exact(self) -> bool:
        return self.num is not None

    @property
    def mode(self) -> str:
        return "exact" if self.is_exact else "float"

    @property
    def is_rational(self) -> bool:
        if not self.is_exact:
            raise ValueError("rationality test requires exact mode")
        return all(v == 0 for v in self.num[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("value is not rational")
        return Fraction(self.num[0], self.den)

    def to_complex(self) -> complex:
        if not self.is_exact:
            return self.cval
        total = 0j
        for i, c in enumerate(self.num):
            if c:
                total += c * cmath.exp(2j * math.pi * i / self.order)
        return total / self.den

    def lift(self, order: int) -> "CycNumber":
        """Embed into Q(zeta_order); requires self.order | order."""
        if not self.is_exact:
            return self
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError("target order must be a multiple")
        k = order // self.order
        num = _reduce_exponents(
            order, [((i * k) % order, c) for i, c in enumerate(self.num)]
        )
        return CycNumber(order, num, self.den)

    # ------------------------------------------------------------------
    # arithmetic

    @staticmethod
    def _coerce(value) -> "CycNumber":
        if isinstance(value, CycNumber):
            return value
        if isinstance(value, complex):
            return CycNumber.from_complex(value)
        return CycNumber.from_rational(value)

    def _align(self, other: "CycNumber"):
        m = self.order * other.order // math.gcd(self.order, other.order)
        return self.lift(m), other.lift(m)

    def _as_float(self) -> tuple[complex, float]:
        if self.is_exact:
            z = self.to_complex()
            return z, abs(z) * _EPS * (len(self.num) + 1)
        return self.cval, self.err

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_exact and other.is_exact:
            a, b = self._align(other)
            num = tuple(
                x * b.den + y * a.den for x, y in zip(a.num, b.num)
            )
            return CycNumber(a.order, num, a.den * b.den)
        za, ea = self._as_float()
        zb, eb = other._as_float()
        z = za + zb
        return CycNumber.from_complex(z, ea + eb + abs(z) * _EPS)

    __radd__ = __add__

    def __neg__(self):
        if self.is_exact:
            return CycNumber(self.order, tuple(-v for v in self.num), self.den)
        return CycNumber.from_complex(-self.cval, self.err)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + self._coerce(other)

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_exact and other.is_exact:
            a, b = self._align(other)
            deg, rows = _context(a.order)
            conv = [0] * (2 * deg - 1)
            for i, x in enumerate(a.num):
                if x:
                    for j, y in enumerate(b.num):
                        if y:
                            conv[i + j] += x * y
            out = [0] * deg
            for e, c in enumerate(conv):
                if c:
                    for j, v in enumerate(rows[e]):
                        if v:
                            out[j] += c * v
            return CycNumber(a.order, tuple(out), a.den * b.den)
        za, ea = self._as_float()
        zb, eb = other._as_float()
        z = za * zb
        err = abs(za) * eb + abs(zb) * ea + ea * eb + abs(z) * _EPS
        return CycNumber.from_complex(z, err)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("negative powers not supported")
        out = CycNumber.from_rational(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def galois(self, a: int) -> "CycNumber":
        """Apply zeta_m -> zeta_m**a; requires exact mode and gcd(a, m) = 1."""
        if not self.is_exact:
            raise ValueError("galois action requires exact mode")
        if math.gcd(a, self.order) != 1:
            raise ValueError("exponent not coprime to the order")
        num = _reduce_exponents(
            self.order, [((i * a) % self.order, c) for i, c in enumerate(self.num)]
        )
        return CycNumber(self.order, num, self.den)

    def conjugate(self) -> "CycNumber":
        if not self.is_exact:
            return CycNumber.from_complex(self.cval.conjugate(), self.err)
        if self.order <= 2:
            return self
        return self.galois(self.order - 1)

    def abs2(self) -> "CycNumber":
        """|z|^2 as a CycNumber (self times its complex conjugate)."""
        return self * self.conjugate()

    # ------------------------------------------------------------------
    # comparison and display

    def __eq__(self, other):
        other = self._coerce(other)
        if self.is_exact and other.is_exact:
            a, b = self._align(other)
            return a.num == b.num and a.den == b.den
        raise TypeError("exact equality undefined for float mode; use approx_eq")

    def __hash__(self):
        if not self.is_exact:
            raise TypeError("float-mode values are unhashable")
        canon = self.lift(self.order)
        return hash((canon.order, canon.num, canon.den))

    def approx_eq(self, other, tol: float = 1e-9) -> bool:
        za, ea = self._as_float()
        zb, eb = self._coerce(other)._as_float()
        return abs(za - zb) <= tol + ea + eb

    def __repr__(self):
        if self.is_exact:
            return f"CycNumber(order={self.order}, num={self.num}, den={self.den})"
        return f"CycNumber(float={self.cval!r}, err={self.err:.3g})"

    # ------------------------------------------------------------------
    # serialization

    def to_json(self) -> dict:
        if self.is_exact:
            return {
                "order": self.order,
                "num": list(self.num),
                "den": self.den,
            }
        return {"re": self.cval.real, "im": self.cval.imag}

    @classmethod
    def from_json(cls, obj: dict) -> "CycNumber":
        if "order" in obj:
            return cls(obj["order"], tuple(obj["num"]), obj["den"])
        return cls.from_complex(complex(obj["re"], obj["im"]))


def galois_act(value: CycNumber, a: int, p: int | None = None) -> CycNumber:
    """Galois action zeta_m -> zeta_m**a on an exact value.

    When the residue characteristic p is given, a must fix zeta_p, i.e.
    a = 1 mod p; rational inputs are returned unchanged.
    """
    if not value.is_exact:
        raise ValueError("galois action requires exact mode")
    if p is not None and value.order % p == 0 and a % p != 1 % p:
        raise ValueError("action does not fix the p-th roots of unity")
    return value.galois(a)
