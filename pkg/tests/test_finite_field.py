import numpy as np
import pytest

from hypmono.errors import (
    DegreeOutOfRangeError,
    NotASubfieldError,
    UnsupportedCharacteristicError,
)
from hypmono.finite_field import (
    PRIMITIVE_POLYS,
    FieldTable,
    build_field,
    load_cache,
    save_cache,
    subfield_embedding,
    subfield_norm_map,
)
from hypmono.kubert import multiplicative_order

SMALL_FIELDS = [(2, 1), (2, 2), (2, 3), (2, 4), (2, 6), (2, 8), (2, 10),
                (3, 1), (3, 2), (3, 3), (3, 4), (3, 6)]


def test_f4_is_the_unique_quadratic():
    f4 = build_field(2, 2)
    assert f4.modulus == (1, 1, 1)
    w = f4.generator  # class of t
    assert f4.mul(w, w) == f4.add(w, 1)  # w^2 = w + 1


def test_f4_examples():
    f4 = build_field(2, 2)
    w = f4.generator
    assert f4.mul(w, f4.mul(w, w)) == 1  # w * w^2 = 1
    assert f4.pow(w, 13) == w  # 13 mod 3 = 1
    assert f4.inv(1) == 1


def test_trace_examples():
    f4 = build_field(2, 2)
    assert f4.trace_to_prime(f4.generator) == 1
    assert f4.trace_to_prime(0) == 0
    f9 = build_field(3, 2)
    # Tr(1) = k * 1 = 2 in F_3
    assert f9.trace_to_prime(1) == 2
    # Tr(x) = x + x^3 evaluated in the field
    for x in range(9):
        assert f9.trace_to_prime(x) == f9.add(x, f9.pow(x, 3))


@pytest.mark.parametrize("p,k", SMALL_FIELDS)
def test_unit_group_order(p, k):
    field = build_field(p, k)
    n = field.q - 1
    units = field.units()
    assert np.all(field.pow(units, n) == 1)
    # log/antilog are mutually inverse
    assert np.array_equal(field.antilog[field.log[units]], units)


@pytest.mark.parametrize("p,k", [(2, 4), (2, 6), (3, 2), (3, 3)])
def test_frobenius_permutes_and_fixes_prime_field(p, k):
    field = build_field(p, k)
    xs = field.elements()
    fr = field.frobenius(xs)
    assert sorted(fr.tolist()) == sorted(xs.tolist())
    fixed = xs[fr == xs]
    assert fixed.tolist() == list(range(p))


@pytest.mark.parametrize("p,k", SMALL_FIELDS)
def test_additive_character_cancellation(p, k):
    field = build_field(p, k)
    counts = np.bincount(field.trace_table, minlength=p)
    # equidistributed trace <=> sum of zeta_p^Tr(x) vanishes exactly
    assert counts.tolist() == [field.q // p] * p


def test_rebuild_is_bit_identical():
    a = FieldTable(3, 4, PRIMITIVE_POLYS[(3, 4)])
    b = FieldTable(3, 4, PRIMITIVE_POLYS[(3, 4)])
    assert np.array_equal(a.antilog, b.antilog)
    assert np.array_equal(a.trace_table, b.trace_table)


def test_roots_of_unity_extensions():
    # F_2(mu_23) has degree 11, F_3(mu_11) has degree 5
    f = build_field(2, 11)
    assert (f.q - 1) % 23 == 0 and multiplicative_order(2, 23) == 11
    g = build_field(3, 5)
    assert (g.q - 1) % 11 == 0 and multiplicative_order(3, 11) == 5


def test_build_errors():
    with pytest.raises(UnsupportedCharacteristicError):
        build_field(5, 2)
    with pytest.raises(DegreeOutOfRangeError):
        build_field(2, 0)
    with pytest.raises(DegreeOutOfRangeError):
        build_field(2, 25)
    with pytest.raises(DegreeOutOfRangeError):
        build_field(3, 16)
    with pytest.raises(ZeroDivisionError):
        build_field(2, 3).inv(0)


def test_addition_digit_path_matches_table():
    f27 = build_field(3, 3)
    a = np.repeat(np.arange(27), 27)
    b = np.tile(np.arange(27), 27)
    assert np.array_equal(f27._add3(a, b), f27._add_table[a, b])


def test_field_axioms_small():
    for p, k in ((2, 3), (3, 2)):
        field = build_field(p, k)
        q = field.q
        for a in range(q):
            for b in range(q):
                assert field.add(a, b) == field.add(b, a)
                assert field.mul(a, b) == field.mul(b, a)
                for c in range(q):
                    assert field.mul(a, field.add(b, c)) == field.add(
                        field.mul(a, b), field.mul(a, c)
                    )


def test_norm_map():
    f16, f4 = build_field(2, 4), build_field(2, 2)
    assert subfield_norm_map(f16, f4, 1) == 1
    assert subfield_norm_map(f16, f4, 0) == 0
    g16 = f16.generator
    img = subfield_norm_map(f16, f4, g16)
    # the norm of a generator generates the subfield units
    assert f4.log[img] % 3 != 0 or f4.q - 1 == 3
    order = 1
    cur = img
    while cur != 1:
        cur = f4.mul(cur, img)
        order += 1
    assert order == 3
    # multiplicativity on random pairs
    rng = np.random.default_rng(5)
    for _ in range(50):
        a, b = int(rng.integers(1, 16)), int(rng.integers(1, 16))
        assert subfield_norm_map(f16, f4, f16.mul(a, b)) == f4.mul(
            subfield_norm_map(f16, f4, a), subfield_norm_map(f16, f4, b)
        )


def test_norm_f9_to_f3_is_fourth_power():
    f9, f3 = build_field(3, 2), build_field(3, 1)
    for x in range(1, 9):
        y = f9.pow(x, 4)
        assert y in (1, 2)  # lands in the prime subfield
        assert subfield_norm_map(f9, f3, x) == y


def test_embedding_is_field_homomorphism():
    f16, f4 = build_field(2, 4), build_field(2, 2)
    sigma = subfield_embedding(f16, f4)
    for a in range(4):
        for b in range(4):
            assert sigma[f4.add(a, b)] == f16.add(sigma[a], sigma[b])
            assert sigma[f4.mul(a, b)] == f16.mul(sigma[a], sigma[b])


def test_not_a_subfield():
    f8, f4 = build_field(2, 3), build_field(2, 2)
    with pytest.raises(NotASubfieldError):
        subfield_norm_map(f8, f4, 1)
    with pytest.raises(NotASubfieldError):
        subfield_norm_map(build_field(3, 2), build_field(2, 1), 1)


def test_cache_roundtrip(tmp_path):
    field = build_field(3, 4)
    path = tmp_path / "f81.tab"
    save_cache(field, path)
    loaded = load_cache(path)
    assert np.array_equal(loaded.antilog, field.antilog)
    assert np.array_equal(loaded.trace_table, field.trace_table)
    # corruption is rejected
    blob = bytearray(path.read_bytes())
    blob[-1] ^= 0xFF
    path.write_bytes(bytes(blob))
    with pytest.raises(ValueError):
        load_cache(path)


def test_cache_rejects_wrong_magic(tmp_path):
    path = tmp_path / "junk.tab"
    path.write_bytes(b"NOTMAGIC" + b"\0" * 64)
    with pytest.raises(ValueError):
        load_cache(path)


def test_moduli_table_is_primitive_everywhere():
    # every embedded modulus passes the constructor's full validation
    for (p, k) in PRIMITIVE_POLYS:
        if p ** k <= 3 ** 6:
            FieldTable(p, k, PRIMITIVE_POLYS[(p, k)])
