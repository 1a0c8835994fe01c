import json
import math
from fractions import Fraction

import numpy as np
import pytest

from hypmono.cyclotomic import CycNumber
from hypmono.errors import CapExceededError
from hypmono.exp_sums import (
    EXTENSION_AT_ZERO,
    FAMILIES,
    export_csv,
    pullback_table,
    frobenius_invariance_check,
    galois_invariance_check,
    integrality_check,
    kloosterman,
    kloosterman_power_sum,
    moments,
    pullback_trace,
    purity_check,
    rationality_check,
    table_stats,
    trace_axb,
    trace_quartic,
    trace_table_all,
)
from hypmono.finite_field import build_field


@pytest.fixture(scope="module")
def f4():
    return build_field(2, 2)


@pytest.fixture(scope="module")
def f16():
    return build_field(2, 4)


@pytest.fixture(scope="module")
def f9():
    return build_field(3, 2)


@pytest.fixture(scope="module")
def table_f16(f16):
    return trace_table_all(f16, "AxB", A=3, B=13, mode="exact")


def test_twisted_sum_examples(f4):
    assert kloosterman_power_sum(f4, 13, 1).as_fraction() == -4
    assert kloosterman_power_sum(f4, 13, f4.generator) == 0
    with pytest.raises(ValueError):
        kloosterman_power_sum(f4, 13, 0)
    with pytest.raises(ValueError):
        kloosterman_power_sum(f4, 2, 1)  # B not prime to p


def test_kloosterman_examples():
    f2 = build_field(2, 1)
    assert kloosterman(f2, 1).as_fraction() == 1
    f4 = build_field(2, 2)
    for a in f4.units():
        v = kloosterman(f4, int(a))
        assert v.is_rational  # Galois invariance in char 2
    for field in (build_field(2, 4), build_field(2, 6), build_field(3, 3)):
        for a in field.units():
            val = kloosterman(field, int(a), mode="float").to_complex()
            assert abs(val) <= 2 * math.sqrt(field.q) + 1e-9
    with pytest.raises(ValueError):
        kloosterman(f4, 0)


def test_trace_f4_closed_form(f4):
    # T(s) = psi(1/s): only t_1 = t_2 = 1 contribute
    table = trace_table_all(f4, "AxB", A=3, B=13, mode="exact")
    assert trace_axb(f4, 3, 13, 1).as_fraction() == 1
    for s in f4.units():
        expected = CycNumber.root_of_unity(2, f4.trace_to_prime(f4.inv(int(s))))
        assert table.value(int(s)) == expected
        assert trace_axb(f4, 3, 13, int(s)) == expected


def test_trace_f4_brute_force_oracle(f4):
    # fully nested reference sum, no factoring of the inner sum at all
    import itertools

    q = f4.q
    for s in f4.units():
        total = 0.0
        for t1, t2 in itertools.product(range(1, q), repeat=2):
            inner = 0.0
            for x1, x2 in itertools.product(range(q), repeat=2):
                arg = f4.add(
                    f4.add(f4.scalar_mul(13, x1), f4.scalar_mul(13, x2)),
                    f4.add(
                        f4.mul(f4.pow(x1, 13), f4.inv(t1)),
                        f4.mul(f4.pow(x2, 13), f4.inv(t2)),
                    ),
                )
                inner += (-1.0) ** f4.trace_to_prime(arg)
            outer = (-1.0) ** f4.trace_to_prime(
                f4.mul(f4.mul(t1, t2), f4.inv(int(s)))
            )
            zeta3 = np.exp(2j * np.pi / 3)
            chi = zeta3 ** ((f4.log[t1] - f4.log[t2]) % 3)
            total += outer * chi * inner
        total /= q ** 2
        assert abs(total - trace_axb(f4, 3, 13, int(s)).to_complex()) < 1e-9


def test_direct_equals_restructured_f16(f16, table_f16):
    for s in f16.units():
        assert trace_axb(f16, 3, 13, int(s)) == table_f16.value(int(s))


def test_f16_table_properties(table_f16, f16):
    assert len(table_f16) == f16.q - 1
    assert rationality_check(table_f16)
    assert integrality_check(table_f16)  # 256 * T(s) integral
    assert purity_check(table_f16, 24)
    assert frobenius_invariance_check(table_f16)
    assert galois_invariance_check(table_f16).passed


def test_f16_float_agrees(f16, table_f16):
    tf = trace_table_all(f16, "AxB", A=3, B=13, mode="float")
    exact = np.array([v.to_complex() for v in table_f16.exact_values])
    assert np.abs(exact - tf.float_values).max() <= 1e-9 + tf.float_err


def test_quartic_family_f9(f9):
    table = trace_table_all(f9, "Atimes", B=7, mode="exact")
    for s in f9.units():
        direct = trace_quartic(f9, 7, int(s))
        assert direct == table.value(int(s))
    # 81 * T(s) is an algebraic integer with values in the cube-root span
    assert integrality_check(table)
    assert galois_invariance_check(table).passed
    assert frobenius_invariance_check(table)


def test_quartic_inner_sum_factorizes(f9):
    # the two-variable inner sum is the product of two one-variable sums
    import itertools

    B = 7
    for u, v in ((1, 1), (2, 5), (7, 3)):
        inner = 0.0
        zeta3 = np.exp(2j * np.pi / 3)
        for x, y in itertools.product(range(9), repeat=2):
            arg = f9.add(
                f9.add(f9.scalar_mul(B, x), f9.scalar_mul(B, y)),
                f9.neg(
                    f9.add(
                        f9.mul(f9.pow(x, B), f9.inv(u)),
                        f9.mul(f9.pow(y, B), f9.inv(v)),
                    )
                ),
            )
            inner += zeta3 ** f9.trace_to_prime(arg)
        su = -kloosterman_power_sum(f9, B, u).to_complex()
        sv = -kloosterman_power_sum(f9, B, v).to_complex()
        assert abs(inner - su * sv) < 1e-9


def test_axb_family_f9(f9):
    table = trace_table_all(f9, "AxB", A=4, B=5, mode="exact")
    for s in f9.units():
        assert trace_axb(f9, 4, 5, int(s)) == table.value(int(s))
    assert purity_check(table, 12)
    assert galois_invariance_check(table).passed


def test_f81_frobenius_and_span():
    f81 = build_field(3, 4)
    for kind, A, B in (("AxB", 4, 5), ("Atimes", None, 7)):
        table = trace_table_all(f81, kind, A=A, B=B, mode="exact")
        assert frobenius_invariance_check(table)  # T(s^9) = T(s)
        assert galois_invariance_check(table).passed
        assert purity_check(table, 12)


def test_trace_preconditions(f4, f9, f16):
    with pytest.raises(ValueError):
        trace_axb(f16, 3, 13, 0)
    with pytest.raises(ValueError):
        trace_axb(f16, 3, 9, 1)  # gcd(A, B) != 1
    with pytest.raises(ValueError):
        trace_axb(f16, 7, 13, 1)  # 7 does not divide q-1 = 15
    with pytest.raises(ValueError):
        trace_quartic(f4, 13, 1)  # even characteristic
    with pytest.raises(ValueError):
        trace_quartic(f9, 3, 1)  # B divisible by p


def test_pullback(f4):
    table = trace_table_all(f4, "AxB", A=3, B=13, mode="exact")
    # N = 1 is the identity on tables
    for s in f4.units():
        assert pullback_trace(table, 1, int(s)) == table.value(int(s))
    # N = 39: s^39 = 1 for every unit, so the pullback is constant T(1) = +1
    for s in f4.units():
        assert pullback_trace(table, 39, int(s)).as_fraction() == 1
    assert pullback_trace(table, 39, 0) is EXTENSION_AT_ZERO
    with pytest.raises(ValueError):
        pullback_trace(table, 2, 1)  # divisible by p
    with pytest.raises(ValueError):
        pullback_trace(table, 13, 0)  # tame order 39 does not divide 13


def test_pullback_constant_on_power_cosets(f16):
    table = trace_table_all(f16, "AxB", A=3, B=13, mode="exact")
    N = 5
    n = f16.q - 1
    for i in range(n):
        for j in range(n):
            if (i - j) * N % n == 0:
                a = pullback_trace(table, N, int(f16.antilog[i]))
                b = pullback_trace(table, N, int(f16.antilog[j]))
                assert a == b


def test_moments(f4, f16):
    table = trace_table_all(f4, "AxB", A=3, B=13, mode="exact")
    assert moments(table, 1) == pytest.approx(1.0)  # values are +-1
    assert moments(table, 1, exact=True) == 1
    tf = trace_table_all(f16, "AxB", A=3, B=13, mode="float")
    assert moments(tf, 1) >= 0
    assert moments(tf, 2) >= 0


def test_galois_check_requires_exact(f16):
    tf = trace_table_all(f16, "AxB", A=3, B=13, mode="float")
    with pytest.raises(ValueError):
        galois_invariance_check(tf)


def test_workers_do_not_change_float_table(f16):
    a = trace_table_all(f16, "AxB", A=3, B=13, mode="float", workers=1)
    b = trace_table_all(f16, "AxB", A=3, B=13, mode="float", workers=3)
    assert np.array_equal(a.float_values, b.float_values)


def test_exact_cap():
    f2048 = build_field(2, 11)
    with pytest.raises(CapExceededError):
        trace_table_all(f2048, "AxB", A=3, B=13, mode="exact")


def test_direct_cap():
    f729 = build_field(3, 6)
    with pytest.raises(CapExceededError):
        trace_axb(f729, 4, 5, 1)  # 728^3 tuples


def test_export_and_stats(tmp_path, f4, f16):
    import csv

    te = trace_table_all(f4, "AxB", A=3, B=13, mode="exact")
    p1 = tmp_path / "exact.csv"
    export_csv(te, p1)
    with open(p1, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["s_log_index", "exact"]
    assert len(rows) == 1 + 3
    payload = json.loads(rows[1][1])
    assert CycNumber.from_json(payload) == te.value_at_log(0)
    tf = trace_table_all(f16, "AxB", A=3, B=13, mode="float")
    p2 = tmp_path / "float.csv"
    export_csv(tf, p2)
    assert p2.read_text().splitlines()[0] == "s_log_index,re,im"
    stats = table_stats(te)
    assert stats["q"] == 4 and stats["M1"] == pytest.approx(1.0)
    assert stats["frobenius_pass"] is True


def test_family_registry():
    fam = FAMILIES["3x13"]
    assert (fam.p, fam.A, fam.B, fam.rank) == (2, 3, 13, 24)
    assert fam.base_degree == 2 and fam.tame_order == 39
    fam28 = FAMILIES["28x"]
    assert fam28.tame_order == 28 and fam28.base_degree == 2
    assert FAMILIES["4x5"].rank == 12


def test_f256_float_table_bounded_and_real():
    f256 = build_field(2, 8)
    table = trace_table_all(f256, "AxB", A=3, B=13, mode="float")
    vals = table.float_values
    assert np.abs(vals).max() <= 24 + 1e-6
    assert np.abs(vals.imag).max() <= 1e-9
    assert frobenius_invariance_check(table)


def test_pullback_table(f4, f16):
    base = trace_table_all(f4, "AxB", A=3, B=13, mode="exact")
    ident = pullback_table(base, 1)
    assert ident.family == "pullback"
    assert all(ident.value_at_log(i) == base.value_at_log(i) for i in range(3))
    const = pullback_table(base, 39)
    assert all(const.value_at_log(i).as_fraction() == 1 for i in range(3))
    tf = trace_table_all(f16, "AxB", A=3, B=13, mode="float")
    pb = pullback_table(tf, 5)
    assert np.array_equal(pb.float_values, tf.float_values[(np.arange(15) * 5) % 15])
    with pytest.raises(ValueError):
        pullback_table(base, 2)


def test_chunked_float_stages_match_single_block(monkeypatch, f16):
    import hypmono.exp_sums as es

    baseline = trace_table_all(f16, "AxB", A=3, B=13, mode="float")
    monkeypatch.setattr(es, "_BLOCK_ELEMS", 64)  # forces many row blocks
    chunked = es.trace_table_all(f16, "AxB", A=3, B=13, mode="float")
    assert np.array_equal(baseline.float_values, chunked.float_values)


def test_large_float_table_q4096():
    # q large enough that the row-block loops genuinely engage
    f4096 = build_field(2, 12)
    table = trace_table_all(f4096, "AxB", A=3, B=13, mode="float", workers=2)
    assert purity_check(table, 24)
    assert frobenius_invariance_check(table, tol=1e-6)
    assert rationality_check(table, tol=1e-6)
    assert abs(moments(table, 1) - 1.0) <= 10 / math.sqrt(4096)


def test_prefactor_recorded(f4, f9):
    t = trace_table_all(f4, "AxB", A=3, B=13, mode="exact")
    assert t.prefactor == Fraction(1, 16)
    t9 = trace_table_all(f9, "AxB", A=4, B=5, mode="exact")
    assert t9.prefactor == Fraction(-1, 729)
