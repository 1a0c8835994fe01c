"""Table-based arithmetic in F_{p^k} for p in {2, 3}.

Elements are integers in [0, q) encoding coefficient vectors base p against
a fixed primitive modulus, so the class of t generates the multiplicative
group and discrete logs come from one antilog fill.  Construction is
deterministic: the modulus per (p, k) is the embedded table entry below,
and a rebuild is bit-identical.
"""

from __future__ import annotations

import hashlib
import struct
from functools import lru_cache

import numpy as np

from .errors import (
    DegreeOutOfRangeError,
    NotASubfieldError,
    UnsupportedCharacteristicError,
)

DEGREE_CAPS = {2: 24, 3: 15}

# Fixed moduli, coefficients c0..ck low to high: for each (p, k) the monic
# primitive polynomial of degree k whose non-leading coefficient word
# (c_{k-1}, ..., c_0) is lexicographically smallest.  Frozen as data for
# cross-run reproducibility and re-verified at build time.
PRIMITIVE_POLYS: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (2, 9): (1, 0, 0, 0, 1, 0, 0, 0, 0, 1),
    (2, 10): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1),
    (2, 11): (1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 12): (1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 1),
    (2, 13): (1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 14): (1, 1, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 15): (1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 16): (1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 17): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 18): (1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 19): (1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 20): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 21): (1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 22): (1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 23): (1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 24): (1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 1, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 1, 0, 0, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (3, 6): (2, 1, 0, 0, 0, 0, 1),
    (3, 7): (1, 2, 1, 0, 0, 0, 0, 1),
    (3, 8): (2, 0, 0, 1, 0, 0, 0, 0, 1),
    (3, 9): (1, 0, 1, 2, 0, 0, 0, 0, 0, 1),
    (3, 10): (2, 1, 0, 1, 0, 0, 0, 0, 0, 0, 1),
    (3, 11): (1, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (3, 12): (2, 2, 2, 1, 2, 0, 0, 0, 0, 0, 0, 0, 1),
    (3, 13): (1, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (3, 14): (2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (3, 15): (1, 2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
}

_CACHE_MAGIC = b"HMFT0001"
_ADD_TABLE_MAX_K = 7  # full q x q addition table only up to 3^7


# ----------------------------------------------------------------------
# polynomial helpers over F_p (build-time verification, subfield roots)

def _pol_mul_mod(a, b, f, p):
    k = len(f) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    for i in range(len(out) - 1, k - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(k):
                out[i - k + j] = (out[i - k + j] - c * f[j]) % p
    out = out[:k]
    return out + [0] * (k - len(out))


def _pol_pow_mod(a, e, f, p):
    k = len(f) - 1
    out = [1] + [0] * (k - 1)
    base = list(a)
    while e:
        if e & 1:
            out = _pol_mul_mod(out, base, f, p)
        base = _pol_mul_mod(base, base, f, p)
        e >>= 1
    return out


def _pol_gcd(a, b, p):
    a, b = list(a), list(b)

    def deg(v):
        d = len(v) - 1
        while d >= 0 and v[d] == 0:
            d -= 1
        return d

    while deg(b) >= 0:
        da, db = deg(a), deg(b)
        if da < db:
            a, b = b, a
            continue
        c = a[da] * pow(b[db], p - 2, p) % p
        for j in range(db + 1):
            a[da - db + j] = (a[da - db + j] - c * b[j]) % p
    return a


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _is_irreducible(modulus, p) -> bool:
    """Rabin test: x^(p^k) = x mod f and gcd(x^(p^(k/l)) - x, f) trivial."""
    k = len(modulus) - 1
    if k == 1:
        return True
    x = [0, 1] + [0] * (k - 2)
    if _pol_pow_mod(x, p ** k, modulus, p) != x:
        return False
    for ell in _prime_factors(k):
        d = _pol_pow_mod(x, p ** (k // ell), modulus, p)
        diff = [(u - v) % p for u, v in zip(d, x)]
        g = _pol_gcd(list(modulus), diff, p)
        if max((i for i, v in enumerate(g) if v), default=-1) > 0:
            return False
    return True


def _add3_int(a: int, b: int, k: int) -> int:
    """Carry-free base-3 digit addition of two encodings."""
    out, sh = 0, 1
    for _ in range(k):
        out += ((a % 3) + (b % 3)) % 3 * sh
        a //= 3
        b //= 3
        sh *= 3
    return out


# ----------------------------------------------------------------------

class FieldTable:
    """Precomputed arithmetic model of F_{p^k}.

    All tables are immutable after construction and every operation is a
    pure read, so a FieldTable can be shared freely across workers.
    Operations accept plain ints or numpy arrays and return the matching
    kind.
    """

    def __init__(self, p: int, k: int, modulus, antilog=None, trace=None):
        if p not in (2, 3):
            raise UnsupportedCharacteristicError(f"characteristic {p} not supported")
        cap = DEGREE_CAPS[p]
        if not 1 <= k <= cap:
            raise DegreeOutOfRangeError(f"degree {k} outside 1..{cap} for p={p}")
        self.p = p
        self.k = k
        self.q = p ** k
        self.modulus = tuple(int(c) % p for c in modulus)
        if len(self.modulus) != k + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree k")

        if antilog is None:
            antilog = self._fill_antilog()
        self.antilog = np.ascontiguousarray(antilog, dtype=np.int64)
        log = np.full(self.q, -1, dtype=np.int64)
        log[self.antilog] = np.arange(self.q - 1)
        self.log = log

        self._add_table = None
        if p == 3 and k <= _ADD_TABLE_MAX_K:
            self._add_table = self._build_add_table()

        if trace is None:
            trace = self._fill_trace()
        self.trace_table = np.ascontiguousarray(trace, dtype=np.int64)

        self._embeddings: dict[tuple[int, tuple[int, ...]], tuple] = {}
        self._validate()

    # ------------------------------------------------------------------
    # construction

    def _reduction_encoding(self) -> int:
        """Encoding of t^k reduced mod the modulus."""
        p, k = self.p, self.k
        enc = 0
        for i in range(k):
            enc += ((-self.modulus[i]) % p) * p ** i
        return enc

    def _fill_antilog(self) -> np.ndarray:
        p, k, q = self.p, self.k, self.q
        antilog = np.empty(q - 1, dtype=np.int64)
        red = self._reduction_encoding()
        x = 1
        if p == 2:
            top = 1 << k
            for i in range(q - 1):
                antilog[i] = x
                x <<= 1
                if x & top:
                    x = (x ^ top) ^ red
        else:
            red2 = _add3_int(red, red, k)
            for i in range(q - 1):
                antilog[i] = x
                x *= 3
                d, x = divmod(x, q)
                if d == 1:
                    x = _add3_int(x, red, k)
                elif d == 2:
                    x = _add3_int(x, red2, k)
        if x != 1:
            raise AssertionError("generator does not have order q-1")
        return antilog

    def _build_add_table(self) -> np.ndarray:
        q, p, k = self.q, self.p, self.k
        digs = np.empty((q, k), dtype=np.int64)
        v = np.arange(q, dtype=np.int64)
        for i in range(k):
            v, digs[:, i] = np.divmod(v, p)
        s = (digs[:, None, :] + digs[None, :, :]) % p
        weights = p ** np.arange(k, dtype=np.int64)
        return (s * weights).sum(axis=2)

    def _fill_trace(self) -> np.ndarray:
        q, p, k, n = self.q, self.p, self.k, self.q - 1
        logs = np.arange(n, dtype=np.int64)
        acc = np.zeros(n, dtype=np.int64)
        for i in range(k):
            conj = self.antilog[(logs * pow(p, i, n)) % n]
            acc = self.add(acc, conj)
        trace = np.zeros(q, dtype=np.int64)
        trace[self.antilog] = acc
        if np.any(trace >= p):
            raise AssertionError("trace landed outside the prime field")
        return trace

    def _validate(self) -> None:
        q, p = self.q, self.p
        if sorted(self.antilog.tolist()) != list(range(1, q)):
            raise AssertionError(
                "antilog table is not a bijection onto the nonzero elements; "
                "the generator order is below q-1"
            )
        if self.antilog[0] != 1:
            raise AssertionError("antilog[0] must be 1")
        if self.k >= 2 and self.antilog[1] != p:
            raise AssertionError("antilog[1] must be the class of t")
        if not _is_irreducible(self.modulus, p):
            raise AssertionError("modulus is reducible")
        # multiply-by-t recurrence, vectorized over the whole table
        nxt = np.roll(self.antilog, -1)
        if p == 2:
            y = self.antilog << 1
            over = (y >> self.k) & 1
            y = np.where(over == 1, (y ^ (1 << self.k)) ^ self._reduction_encoding(), y)
        else:
            red = self._reduction_encoding()
            y = self.antilog * 3
            lead, rem = np.divmod(y, q)
            corr = np.choose(lead, [0, red, _add3_int(red, red, self.k)])
            y = self.add(rem, corr)
        if not np.array_equal(y, nxt):
            raise AssertionError("antilog recurrence broken")
        # equidistribution of the trace, equivalent to exact cancellation of
        # every nontrivial additive character sum
        counts = np.bincount(self.trace_table, minlength=p)
        if any(int(c) != q // p for c in counts):
            raise AssertionError("trace values are not equidistributed")
        rng = np.random.default_rng(0)
        a = rng.integers(0, q, size=32)
        b = rng.integers(0, q, size=32)
        lhs = self.trace_table[self.add(a, b)]
        rhs = (self.trace_table[a] + self.trace_table[b]) % p
        if not np.array_equal(lhs, rhs):
            raise AssertionError("trace is not additive")

    # ------------------------------------------------------------------
    # arithmetic

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        if self._add_table is not None:
            out = self._add_table[a, b]
            return int(out) if np.ndim(out) == 0 else out
        return self._add3(a, b)

    def _add3(self, a, b):
        scalar = np.ndim(a) == 0 and np.ndim(b) == 0
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.int64)
        sh = 1
        for _ in range(self.k):
            out += ((a % 3 + b % 3) % 3) * sh
            a, b = a // 3, b // 3
            sh *= 3
        return int(out) if scalar else out

    def neg(self, a):
        if self.p == 2:
            return a
        return self.add(a, a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def scalar_mul(self, c: int, a):
        """(c mod p)-fold sum of a."""
        c %= self.p
        if c == 0:
            return a * 0
        out = a
        for _ in range(c - 1):
            out = self.add(out, a)
        return out

    def mul(self, a, b):
        n = self.q - 1
        if np.ndim(a) == 0 and np.ndim(b) == 0:
            if a == 0 or b == 0:
                return 0
            return int(self.antilog[(self.log[a] + self.log[b]) % n])
        a = np.asarray(a)
        b = np.asarray(b)
        nz = (a != 0) & (b != 0)
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.int64)
        idx = (self.log[a] + self.log[b]) % n
        out[nz] = self.antilog[idx][nz]
        return out

    def inv(self, a):
        n = self.q - 1
        if np.ndim(a) == 0:
            if a == 0:
                raise ZeroDivisionError("inversion of zero")
            return int(self.antilog[(-self.log[a]) % n])
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("inversion of zero")
        return self.antilog[(-self.log[a]) % n]

    def pow(self, a, e: int):
        n = self.q - 1
        if np.ndim(a) == 0:
            if a == 0:
                if e == 0:
                    return 1
                if e < 0:
                    raise ZeroDivisionError("inversion of zero")
                return 0
            return int(self.antilog[(self.log[a] * e) % n])
        a = np.asarray(a)
        nz = a != 0
        if e < 0 and not np.all(nz):
            raise ZeroDivisionError("inversion of zero")
        out = np.zeros(a.shape, dtype=np.int64)
        out[nz] = self.antilog[(self.log[a[nz]] * e) % n]
        if e == 0:
            out[~nz] = 1
        return out

    def trace_to_prime(self, x):
        out = self.trace_table[x]
        return int(out) if np.ndim(out) == 0 else out

    def frobenius(self, x, i: int = 1):
        return self.pow(x, self.p ** i)

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def units(self) -> np.ndarray:
        return self.antilog.copy()

    @property
    def generator(self) -> int:
        return int(self.antilog[1]) if self.q > 2 else 1

    def __repr__(self):
        return f"FieldTable(p={self.p}, k={self.k}, q={self.q})"

    # ------------------------------------------------------------------
    # subfield structure

    def _embedding_tables(self, sub: "FieldTable"):
        if sub.p != self.p or self.k % sub.k:
            raise NotASubfieldError(
                f"F_{sub.p}^{sub.k} is not a subfield of F_{self.p}^{self.k}"
            )
        key = (sub.k, sub.modulus)
        cached = self._embeddings.get(key)
        if cached is not None:
            return cached
        if sub.k == self.k and sub.modulus == self.modulus:
            sigma = np.arange(self.q, dtype=np.int64)
            inverse = {x: x for x in range(self.q)}
            self._embeddings[key] = (sigma, inverse)
            return sigma, inverse
        q0 = sub.q
        step = (self.q - 1) // (q0 - 1)
        # roots of the subfield modulus among the elements of order dividing
        # q0 - 1; the smallest encoding is the canonical choice
        root = None
        for j in range(q0 - 1):
            cand = int(self.antilog[(j * step) % (self.q - 1)])
            acc = 0
            for c in reversed(sub.modulus):
                acc = self.add(self.mul(acc, cand), c % self.p)
            if acc == 0 and (root is None or cand < root):
                root = cand
        if root is None:
            raise AssertionError("no root of the subfield modulus found")
        powers = [1]
        for _ in range(sub.k - 1):
            powers.append(self.mul(powers[-1], root))
        sigma = np.zeros(q0, dtype=np.int64)
        for x in range(q0):
            acc, v = 0, x
            for i in range(sub.k):
                v, d = divmod(v, sub.p)
                acc = self.add(acc, self.scalar_mul(d, powers[i]))
            sigma[x] = acc
        inverse = {int(sigma[x]): x for x in range(q0)}
        self._embeddings[key] = (sigma, inverse)
        return sigma, inverse


def subfield_embedding(field: FieldTable, sub: FieldTable) -> np.ndarray:
    """Table of the canonical field embedding sub -> field."""
    sigma, _ = field._embedding_tables(sub)
    return sigma


def subfield_norm_map(field: FieldTable, sub: FieldTable, x: int) -> int:
    """Norm from field down to sub: x^((q-1)/(q0-1)), returned in sub."""
    _, inverse = field._embedding_tables(sub)
    if x == 0:
        return 0
    y = field.pow(x, (field.q - 1) // (sub.q - 1))
    return inverse[int(y)]


@lru_cache(maxsize=None)
def build_field(p: int, k: int) -> FieldTable:
    """Deterministic F_{p^k} with the fixed embedded modulus."""
    if p not in (2, 3):
        raise UnsupportedCharacteristicError(f"characteristic {p} not supported")
    cap = DEGREE_CAPS[p]
    if not 1 <= k <= cap:
        raise DegreeOutOfRangeError(f"degree {k} outside 1..{cap} for p={p}")
    return FieldTable(p, k, PRIMITIVE_POLYS[(p, k)])


# ----------------------------------------------------------------------
# optional binary cache (an optimization only, never a correctness input)

def save_cache(field: FieldTable, path) -> None:
    """Write header, antilog and trace tables, little-endian."""
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<III", field.p, field.k, len(field.modulus)))
        fh.write(np.asarray(field.modulus, dtype="<u4").tobytes())
        body = (
            field.antilog.astype("<u4").tobytes()
            + field.trace_table.astype("<u4").tobytes()
        )
        fh.write(hashlib.sha256(body).digest())
        fh.write(body)


def load_cache(path) -> FieldTable:
    """Load a cached field.

    The checksum guards file integrity; the FieldTable constructor then
    re-verifies every structural invariant (bijection, generator recurrence,
    irreducibility, trace equidistribution), and the trace table is
    recomputed from the antilog table and compared bit for bit.  A cache
    can therefore accelerate startup but never change results.
    """
    with open(path, "rb") as fh:
        if fh.read(8) != _CACHE_MAGIC:
            raise ValueError("bad cache magic")
        p, k, nmod = struct.unpack("<III", fh.read(12))
        modulus = tuple(int(v) for v in np.frombuffer(fh.read(4 * nmod), dtype="<u4"))
        digest = fh.read(32)
        body = fh.read()
    if hashlib.sha256(body).digest() != digest:
        raise ValueError("cache checksum mismatch")
    q = int(p) ** int(k)
    antilog = np.frombuffer(body[: 4 * (q - 1)], dtype="<u4").astype(np.int64)
    trace = np.frombuffer(body[4 * (q - 1):], dtype="<u4").astype(np.int64)
    if modulus != PRIMITIVE_POLYS.get((p, k)):
        raise ValueError("cache modulus does not match the embedded table")
    field = FieldTable(p, k, modulus, antilog=antilog, trace=trace)
    if not np.array_equal(field.trace_table, field._fill_trace()):
        raise ValueError("cached trace table differs from recomputation")
    return field
