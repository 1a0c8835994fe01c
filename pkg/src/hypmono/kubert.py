"""Kubert V-function, digit-sum brackets, and exhaustive inequality checks.

The V-function on (Q/Z) prime to p is computed combinatorially: for
x = a/(p^r - 1) in lowest terms with r the multiplicative order of p mod
the denominator, V(x) is the base-p digit sum of a divided by r(p-1).
The digit lemma verifiers enumerate every x below p^r and check the
bracket inequalities in all their leading-digit variants, recording slack
histograms and (expected empty) counterexample lists.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CapExceededError

_CHUNK = 1 << 22
_SLACK_CAP = 32  # histogram bins: -1 (violation) .. 32 (anything larger clipped)

R_CAP = {2: 30, 3: 18}


# ----------------------------------------------------------------------
# digit sums and brackets

def digit_sum(n: int, p: int) -> int:
    """Sum of base-p digits of a nonnegative integer."""
    if n < 0:
        raise ValueError("digit sums are defined for nonnegative integers")
    if p == 2:
        return int(n).bit_count()
    s = 0
    while n:
        s += n % p
        n //= p
    return s


def digit_sum_vec(values: np.ndarray, p: int) -> np.ndarray:
    values = np.asarray(values)
    if p == 2:
        return np.bitwise_count(values).astype(np.int64)
    v = values.astype(np.int64, copy=True)
    out = np.zeros_like(v)
    while v.max(initial=0) > 0:
        v, d = np.divmod(v, p)
        out += d
    return out


def bracket(x: int, p: int, r: int) -> int:
    """Digit sum of x reduced mod p^r - 1 into [0, p^r - 1)."""
    if r < 1:
        raise ValueError("r must be at least 1")
    return digit_sum(x % (p ** r - 1), p)


def bracket_vec(values: np.ndarray, p: int, r: int) -> np.ndarray:
    return digit_sum_vec(np.asarray(values) % (p ** r - 1), p)


def multiplicative_order(p: int, m: int) -> int:
    if m <= 0 or math.gcd(p, m) != 1:
        raise ValueError(f"{p} is not invertible mod {m}")
    if m == 1:
        return 1
    r, t = 1, p % m
    while t != 1:
        t = t * p % m
        r += 1
    return r


# ----------------------------------------------------------------------
# Q/Z prime to p, and the V-function

@dataclass(frozen=True)
class QmodZ:
    """Element a/m of Q/Z, stored reduced with 0 <= a < m."""

    a: int
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("denominator must be positive")
        a = self.a % self.m
        g = math.gcd(a, self.m)
        object.__setattr__(self, "a", a // g)
        object.__setattr__(self, "m", self.m // g)

    @classmethod
    def from_fraction(cls, fr) -> "QmodZ":
        fr = Fraction(fr)
        return cls(fr.numerator, fr.denominator)

    def __neg__(self) -> "QmodZ":
        return QmodZ(self.m - self.a, self.m)

    def __add__(self, other: "QmodZ") -> "QmodZ":
        return QmodZ.from_fraction(self.to_fraction() + other.to_fraction())

    def scale(self, n: int) -> "QmodZ":
        return QmodZ(self.a * n, self.m)

    @property
    def is_zero(self) -> bool:
        return self.a == 0

    def to_fraction(self) -> Fraction:
        return Fraction(self.a, self.m)

    def __str__(self):
        return f"{self.a}/{self.m}"


def kubert_v(x, p: int) -> Fraction:
    """V(x) for x in (Q/Z) prime to p; V(0) = 0."""
    if not isinstance(x, QmodZ):
        x = QmodZ.from_fraction(Fraction(x))
    if x.is_zero:
        return Fraction(0)
    if x.m % p == 0:
        raise ValueError(f"denominator {x.m} is not prime to {p}")
    r = multiplicative_order(p, x.m)
    a = x.a * (p ** r - 1) // x.m
    return Fraction(digit_sum(a, p), r * (p - 1))


def sequence_AB(r: int) -> tuple[int, int]:
    """The base-2 offsets (A_r, B_r): thirds of 2^r - 1, parity-adjusted."""
    if r < 1:
        raise ValueError("r must be at least 1")
    if r % 2 == 0:
        return (2 ** r - 1) // 3, 2 * (2 ** r - 1) // 3
    return (2 ** (r + 1) - 1) // 3, (2 ** r - 2) // 3


def repunit_scaling_check(x: int, r: int, k: int, p: int) -> bool:
    """Digit replication: [x*(p^(kr)-1)/(p^r-1)]_{kr} = k*[x]_r."""
    if not 0 <= x < p ** r - 1:
        raise ValueError("x must lie in [0, p^r - 1)")
    rep = x * (p ** (k * r) - 1) // (p ** r - 1)
    return bracket(rep, p, k * r) == k * bracket(x, p, r)


# ----------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class Counterexample:
    x: object
    lhs: object
    rhs: object

    def to_json(self) -> dict:
        def enc(v):
            return v if isinstance(v, int) else str(v)

        return {"x": enc(self.x), "lhs": enc(self.lhs), "rhs": enc(self.rhs)}


@dataclass
class VariantReport:
    variant: str
    checked: int
    counterexamples: list[Counterexample]
    slack_histogram: dict[int, int]

    @property
    def passed(self) -> bool:
        return not self.counterexamples


@dataclass
class VerificationReport:
    lemma: str
    p: int
    r: int
    variants: list[VariantReport]
    elapsed_ms: float

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.variants)

    @property
    def checked(self) -> int:
        return max((v.checked for v in self.variants), default=0)

    def to_json_records(self) -> list[dict]:
        return [
            {
                "lemma": self.lemma,
                "p": self.p,
                "r": self.r,
                "variant": v.variant,
                "checked": v.checked,
                "counterexamples": [c.to_json() for c in v.counterexamples],
                "slack_histogram": {str(k): n for k, n in sorted(v.slack_histogram.items())},
                "elapsed_ms": round(self.elapsed_ms, 3),
            }
            for v in self.variants
        ]


# ----------------------------------------------------------------------
# chunked exhaustive scans

def _merge_variant(parts, names):
    out = []
    for i, name in enumerate(names):
        checked = sum(p[i][0] for p in parts)
        hist = np.zeros(_SLACK_CAP + 2, dtype=np.int64)
        cx: list[Counterexample] = []
        for p in parts:
            hist += p[i][1]
            cx.extend(p[i][2])
        cx.sort(key=lambda c: c.x)
        histogram = {
            int(b) - 1: int(n) for b, n in enumerate(hist) if n
        }
        out.append(VariantReport(name, checked, cx, histogram))
    return out


def _variant_stats(xs, lhs, rhs_total, mask):
    if mask is None:
        sel_x, sel_l, sel_r = xs, lhs, rhs_total
    else:
        sel_x, sel_l, sel_r = xs[mask], lhs[mask], rhs_total[mask]
    slack = sel_r - sel_l
    bins = np.clip(slack, -1, _SLACK_CAP) + 1
    hist = np.bincount(bins, minlength=_SLACK_CAP + 2)
    bad = slack < 0
    cx = [
        Counterexample(int(x), int(l), int(rt))
        for x, l, rt in zip(sel_x[bad], sel_l[bad], sel_r[bad])
    ]
    return len(sel_x), hist, cx


def _run_scan(lemma, p, r, total, start, chunk_eval, workers):
    t0 = time.perf_counter()
    spans = [
        (lo, min(lo + _CHUNK, start + total))
        for lo in range(start, start + total, _CHUNK)
    ]
    if not spans:
        spans = [(start, start)]
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda s: chunk_eval(*s), spans))
    else:
        parts = [chunk_eval(*s) for s in spans]
    # every part carries (names, stats) with identical name order
    names = parts[0][0]
    variants = _merge_variant([p[1] for p in parts], names)
    elapsed = (time.perf_counter() - t0) * 1000.0
    return VerificationReport(lemma, p, r, variants, elapsed)


def _require_r(p: int, r: int) -> None:
    if not 1 <= r <= R_CAP[p]:
        raise CapExceededError(f"r={r} outside 1..{R_CAP[p]} for base {p}")


def verify_lemma_3x13(r: int, workers: int = 1) -> VerificationReport:
    """Exhaustive base-2 digit lemma for multiplication by 13.

    For every 0 <= x < 2^r checks
    [13x+A_r] + [13x+B_r] <= [x] + [x+A_r] + [x+B_r] + c
    with c = 4 always, c = 2 away from leading digits 0100/1000/1001,
    c = 1 for x < 2^(r-2), and c = 0 for leading digits 1010 (leading
    digits read after zero-padding to exactly r digits).
    """
    _require_r(2, r)
    A, B = sequence_AB(r)

    def chunk(lo, hi):
        xs = np.arange(lo, hi, dtype=np.int64)
        lhs = digit_sum_vec(13 * xs + A, 2) + digit_sum_vec(13 * xs + B, 2)
        rhs = (
            digit_sum_vec(xs, 2)
            + digit_sum_vec(xs + A, 2)
            + digit_sum_vec(xs + B, 2)
        )
        names = ["plus4"]
        stats = [_variant_stats(xs, lhs, rhs + 4, None)]
        if r >= 4:
            top4 = xs >> (r - 4)
            names.append("plus2")
            stats.append(
                _variant_stats(xs, lhs, rhs + 2, ~np.isin(top4, (0b0100, 0b1000, 0b1001)))
            )
            names.append("plus0")
            stats.append(_variant_stats(xs, lhs, rhs, top4 == 0b1010))
        names.append("plus1")
        stats.append(_variant_stats(xs, lhs, rhs + 1, 4 * xs < (1 << r)))
        return names, stats

    return _run_scan("lemma-3x13", 2, r, 2 ** r, 0, chunk, workers)


def verify_lemma_4x5(r: int, workers: int = 1) -> VerificationReport:
    """Exhaustive base-3 digit lemma for multiplication by 5 and 10.

    For every 0 <= x < 3^r, with A_r = (3^r-1)/2, checks
    [5x+A_r] + [10x+A_r] <= [x] + [x+A_r] + [2x+A_r] + c
    with c = 2 always and c = 0 when the two leading digits avoid
    10, 11, 21.
    """
    _require_r(3, r)
    A = (3 ** r - 1) // 2

    def chunk(lo, hi):
        xs = np.arange(lo, hi, dtype=np.int64)
        lhs = digit_sum_vec(5 * xs + A, 3) + digit_sum_vec(10 * xs + A, 3)
        rhs = (
            digit_sum_vec(xs, 3)
            + digit_sum_vec(xs + A, 3)
            + digit_sum_vec(2 * xs + A, 3)
        )
        names = ["plus2"]
        stats = [_variant_stats(xs, lhs, rhs + 2, None)]
        if r >= 2:
            lead2 = xs // 3 ** (r - 2)
            names.append("plus0")
            stats.append(_variant_stats(xs, lhs, rhs, ~np.isin(lead2, (3, 4, 7))))
        return names, stats

    return _run_scan("lemma-4x5", 3, r, 3 ** r, 0, chunk, workers)


def verify_lemma_28(r: int, workers: int = 1) -> VerificationReport:
    """Exhaustive base-3 digit lemma for multiplication by 14:
    [14x+A_r] <= [x] + [2x+A_r] + 1 for 0 <= x < 3^r."""
    _require_r(3, r)
    A = (3 ** r - 1) // 2

    def chunk(lo, hi):
        xs = np.arange(lo, hi, dtype=np.int64)
        lhs = digit_sum_vec(14 * xs + A, 3)
        rhs = digit_sum_vec(xs, 3) + digit_sum_vec(2 * xs + A, 3)
        return ["plus1"], [_variant_stats(xs, lhs, rhs + 1, None)]

    return _run_scan("lemma-28", 3, r, 3 ** r, 0, chunk, workers)


_FAMILY_P = {"3x13": 2, "4x5": 3, "28": 3}


def _bracket_pair_chunk(family, r):
    p = _FAMILY_P[family]
    n = p ** r - 1

    def chunk(lo, hi):
        xs = np.arange(lo, hi, dtype=np.int64)
        if family == "3x13":
            A, B = n // 3, 2 * n // 3
            lhs = bracket_vec(13 * xs + A, 2, r) + bracket_vec(13 * xs + B, 2, r)
            rhs = bracket_vec(xs, 2, r) + bracket_vec(xs + A, 2, r) + bracket_vec(xs + B, 2, r)
        elif family == "4x5":
            A = n // 2
            lhs = bracket_vec(5 * xs + A, 3, r) + bracket_vec(10 * xs + A, 3, r)
            rhs = bracket_vec(xs, 3, r) + bracket_vec(xs + A, 3, r) + bracket_vec(2 * xs + A, 3, r)
        else:
            A = n // 2
            lhs = bracket_vec(14 * xs + A, 3, r)
            rhs = bracket_vec(xs, 3, r) + bracket_vec(2 * xs + A, 3, r)
        return xs, lhs, rhs

    return chunk


def verify_bracket_corollaries(family: str, r: int, workers: int = 1) -> VerificationReport:
    """Bracket-level corollaries over 0 < x < p^r - 1.

    Slack allowances: 5 for the 3x13 family (even r only), 6 for 4x5,
    3 for the 28 family.
    """
    if family not in _FAMILY_P:
        raise ValueError(f"unknown family {family!r}")
    p = _FAMILY_P[family]
    _require_r(p, r)
    if family == "3x13" and r % 2:
        raise ValueError("the base-2 bracket corollary requires even r")
    allowance = {"3x13": 5, "4x5": 6, "28": 3}[family]
    pair = _bracket_pair_chunk(family, r)

    def chunk(lo, hi):
        xs, lhs, rhs = pair(lo, hi)
        return [f"bracket_plus{allowance}"], [
            _variant_stats(xs, lhs, rhs + allowance, None)
        ]

    return _run_scan(f"corollary-{family}", p, r, p ** r - 2, 1, chunk, workers)


def verify_sharp_inequality(family: str, r: int, workers: int = 1) -> VerificationReport:
    """The zero-slack bracket inequality over 0 < x < p^r - 1.

    This is the finite-level form of the finite-monodromy criterion;
    the 3x13 family is stated for even r only.
    """
    if family not in _FAMILY_P:
        raise ValueError(f"unknown family {family!r}")
    p = _FAMILY_P[family]
    _require_r(p, r)
    if family == "3x13" and r % 2:
        raise ValueError("the base-2 sharp inequality requires even r")
    pair = _bracket_pair_chunk(family, r)

    def chunk(lo, hi):
        xs, lhs, rhs = pair(lo, hi)
        return ["sharp"], [_variant_stats(xs, lhs, rhs, None)]

    return _run_scan(f"sharp-{family}", p, r, p ** r - 2, 1, chunk, workers)


# ----------------------------------------------------------------------
# finite-monodromy criteria

@dataclass
class CriterionReport:
    criterion: str
    p: int
    params: tuple
    r_max: int
    checked: int
    counterexamples: list[Counterexample] = field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "p": self.p,
            "params": list(self.params),
            "r_max": self.r_max,
            "checked": self.checked,
            "counterexamples": [c.to_json() for c in self.counterexamples],
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


def _criterion_scan(p, r_max, lhs_rhs, workers, criterion, params, hand_set):
    t0 = time.perf_counter()
    checked = 0
    cx: list[Counterexample] = []
    for r in range(1, r_max + 1):
        _require_r(p, r)
        n = p ** r - 1

        def chunk(lo, hi, n=n, r=r):
            a = np.arange(lo, hi, dtype=np.int64)
            lhs, rhs = lhs_rhs(a, n, r)
            bad = lhs < rhs
            return (
                int(len(a)),
                [
                    Counterexample(QmodZ(int(x), n), int(l), int(rr))
                    for x, l, rr in zip(a[bad], lhs[bad], rhs[bad])
                ],
            )

        spans = [(lo, min(lo + _CHUNK, n)) for lo in range(1, n, _CHUNK)]
        if workers > 1 and len(spans) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(lambda s: chunk(*s), spans))
        else:
            parts = [chunk(*s) for s in spans]
        for cnt, bad in parts:
            checked += cnt
            cx.extend(bad)
    for x, lhs, rhs in hand_set():
        checked += 1
        if lhs < rhs:
            cx.append(Counterexample(x, lhs, rhs))
    return CriterionReport(
        criterion, p, params, r_max, checked, cx,
        (time.perf_counter() - t0) * 1000.0,
    )


def check_criterion_AxB(
    p: int, A: int, B: int, r_max: int, workers: int = 1
) -> CriterionReport:
    """V(ABx) + 1 >= V(Ax) + V(Bx) over denominators p^r - 1, r <= r_max,
    plus the full-statement check on the hand set x in (1/AB)Z."""
    if math.gcd(A * B, p) != 1:
        raise ValueError("A and B must be prime to p")

    def lhs_rhs(a, n, r):
        lhs = digit_sum_vec(A * B * a % n, p) + r * (p - 1)
        rhs = digit_sum_vec(A * a % n, p) + digit_sum_vec(B * a % n, p)
        return lhs, rhs

    def hand_set():
        for a in range(A * B):
            x = QmodZ(a, A * B)
            lhs = kubert_v(x.scale(A * B), p) + kubert_v(x, p) + kubert_v(-x, p)
            rhs = kubert_v(x.scale(A), p) + kubert_v(x.scale(B), p)
            yield x, lhs, rhs

    return _criterion_scan(
        p, r_max, lhs_rhs, workers, "AxB", (A, B), hand_set
    )


def check_criterion_Atimes(
    p: int, p1: int, p2: int, A: int, r_max: int, workers: int = 1
) -> CriterionReport:
    """V(Ax) + V(Ax/(p1 p2)) + V(-x) >= V(Ax/p1) + V(Ax/p2) over
    denominators p^r - 1, plus the hand set x in (1/A)Z."""
    if math.gcd(A, p) != 1:
        raise ValueError("A must be prime to p")
    facs = set(_prime_factors(A))
    if facs != {p1, p2}:
        raise ValueError(f"A = {A} must be divisible by exactly {{{p1}, {p2}}}")

    def lhs_rhs(a, n, r):
        lhs = (
            digit_sum_vec(A * a % n, p)
            + digit_sum_vec(A // (p1 * p2) * a % n, p)
            + digit_sum_vec((n - a) % n, p)
        )
        rhs = digit_sum_vec(A // p1 * a % n, p) + digit_sum_vec(A // p2 * a % n, p)
        return lhs, rhs

    def hand_set():
        for a in range(A):
            x = QmodZ(a, A)
            lhs = (
                kubert_v(x.scale(A), p)
                + kubert_v(x.scale(A // (p1 * p2)), p)
                + kubert_v(-x, p)
            )
            rhs = kubert_v(x.scale(A // p1), p) + kubert_v(x.scale(A // p2), p)
            yield x, lhs, rhs

    return _criterion_scan(
        p, r_max, lhs_rhs, workers, "Atimes", (p1, p2, A), hand_set
    )


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
