import math

import pytest

from hypmono.characters import (
    AddChar,
    MultChar,
    chars_of_exact_order,
    chars_of_order_dividing,
    eval_add,
    eval_mult,
    gauss_sum,
    hasse_davenport_lift_check,
)
from hypmono.cyclotomic import CycNumber
from hypmono.finite_field import build_field


def test_char_order_and_group_law():
    f16 = build_field(2, 4)
    chi = MultChar(f16, 5)  # order 3
    assert chi.order == 3
    assert (chi * chi).exponent == 10
    assert chi.conjugate().exponent == 10
    assert (chi ** 3).is_trivial
    assert MultChar(f16, 0).order == 1


def test_chars_of_order_dividing_counts():
    f4 = build_field(2, 2)
    assert len(chars_of_order_dividing(f4, 3, nontrivial_only=True)) == 2
    f9 = build_field(3, 2)
    quartics = chars_of_order_dividing(f9, 4, nontrivial_only=True)
    assert len(quartics) == 3
    assert sorted(c.order for c in quartics) == [2, 4, 4]
    assert [c.exponent for c in chars_of_order_dividing(f4, 1)] == [0]
    assert chars_of_order_dividing(f4, 1, nontrivial_only=True) == []
    with pytest.raises(ValueError):
        chars_of_order_dividing(f4, 5)


def test_chars_of_exact_order():
    f729 = build_field(3, 6)  # q - 1 = 728 is divisible by 28
    chars = chars_of_exact_order(f729, 28)
    assert len(chars) == 12
    assert all(c.order == 28 for c in chars)
    f9 = build_field(3, 2)
    assert len(chars_of_exact_order(f9, 2)) == 1
    assert chars_of_exact_order(f9, 2)[0].order == 2
    assert len(chars_of_exact_order(f9, 4)) == 2


def test_eval_add_examples():
    f4 = build_field(2, 2)
    psi = AddChar(f4)
    assert eval_add(psi, 0) == 1
    assert eval_add(psi, f4.generator) == -1  # Tr(w) = 1
    f9 = build_field(3, 2)
    psi9 = AddChar(f9)
    cube_roots = {CycNumber.root_of_unity(3, j) for j in range(3)}
    for x in range(9):
        assert eval_add(psi9, x) in cube_roots


def test_eval_mult_examples():
    f4 = build_field(2, 2)
    trivial = MultChar(f4, 0)
    for x in (1, 2, 3):
        assert eval_mult(trivial, x) == 1
    cubic = MultChar(f4, 1)
    assert eval_mult(cubic, f4.generator) == CycNumber.root_of_unity(3, 1)
    assert eval_mult(cubic, 1) == 1
    with pytest.raises(ValueError):
        eval_mult(cubic, 0)


def test_orthogonality():
    for p, k in ((2, 2), (2, 4), (2, 6), (3, 2), (3, 3)):
        field = build_field(p, k)
        n = field.q - 1
        for chi in chars_of_order_dividing(field, n, nontrivial_only=True):
            total = CycNumber.zero(chi.order)
            for x in field.units():
                total = total + eval_mult(chi, int(x))
            assert total == 0
        # sum over all characters of chi(x) = (q-1) [x = 1]
        for x in (1, int(field.generator)):
            total = CycNumber.zero(1)
            for chi in chars_of_order_dividing(field, n):
                total = total + eval_mult(chi, x)
            assert total == (n if x == 1 else 0)


def test_gauss_sum_trivial_char():
    for p, k in ((2, 3), (3, 2)):
        field = build_field(p, k)
        g = gauss_sum(AddChar(field), MultChar(field, 0))
        assert g == -1


def test_gauss_sum_norm_small_fields_exhaustive():
    # exact-mode check |g|^2 = q for every nontrivial character
    for p, kmax in ((2, 6), (3, 4)):
        for k in range(1, kmax + 1):
            field = build_field(p, k)
            n = field.q - 1
            psi = AddChar(field)
            for chi in chars_of_order_dividing(field, n, nontrivial_only=True):
                assert gauss_sum(psi, chi).abs2() == field.q


@pytest.mark.parametrize("p,k,exps", [(2, 7, (1, 5, 127 // 7)), (2, 8, (1, 3, 5, 17, 85))])
def test_gauss_sum_norm_boundary_sampled(p, k, exps):
    # the exact-mode cap boundary (q = 128, 256), sampled for runtime
    field = build_field(p, k)
    psi = AddChar(field)
    for e in exps:
        assert gauss_sum(psi, MultChar(field, e)).abs2() == field.q


def test_gauss_sum_float_beyond_cap():
    field = build_field(2, 10)
    psi = AddChar(field)
    for e in (1, 3, 11):
        g = gauss_sum(psi, MultChar(field, e), mode="float")
        assert g.mode == "float"
        assert abs(abs(g.to_complex()) ** 2 - field.q) <= 1e-9 * field.q


def test_gauss_sum_conjugation_identity():
    # g(psi, conj(chi)) = chi(-1) * conj(g(psi, chi))
    for p, k in ((2, 4), (3, 2), (3, 3)):
        field = build_field(p, k)
        psi = AddChar(field)
        n = field.q - 1
        for e in range(1, n):
            chi = MultChar(field, e)
            lhs = gauss_sum(psi, chi.conjugate())
            sign = eval_mult(chi, field.neg(1))
            assert lhs == sign * gauss_sum(psi, chi).conjugate()


def test_hasse_davenport():
    f4 = build_field(2, 2)
    # degree-1 extension is trivially true
    assert hasse_davenport_lift_check(f4, f4, MultChar(f4, 1))
    f16 = build_field(2, 4)
    assert hasse_davenport_lift_check(f4, f16, MultChar(f4, 1))
    f3, f9 = build_field(3, 1), build_field(3, 2)
    assert hasse_davenport_lift_check(f3, f9, MultChar(f3, 1))
    f81 = build_field(3, 4)
    for e in range(1, 8):
        assert hasse_davenport_lift_check(f9, f81, MultChar(f9, e))
    with pytest.raises(ValueError):
        hasse_davenport_lift_check(f16, f4, MultChar(f16, 1))


def test_auto_mode_switches_to_float():
    # a full-order character over F_2^10 needs phi(lcm(2, 1023)) = 600 > cap
    field = build_field(2, 10)
    g = gauss_sum(AddChar(field), MultChar(field, 1))
    assert g.mode == "float"
    assert math.isclose(abs(g.to_complex()) ** 2, field.q, rel_tol=1e-9)


def test_exact_float_paths_agree_per_field():
    # 1000 random character-value products and sums per field, exact vs float
    import random

    rng = random.Random(17)
    for p, k in ((2, 4), (2, 6), (3, 2), (3, 3)):
        field = build_field(p, k)
        n = field.q - 1
        psi = AddChar(field)
        for _ in range(1000):
            chi = MultChar(field, rng.randrange(n))
            x = int(field.antilog[rng.randrange(n)])
            y = int(field.antilog[rng.randrange(n)])
            exact = eval_mult(chi, x) * eval_add(psi, y) + eval_mult(chi, y)
            approx = (
                CycNumber.from_complex(eval_mult(chi, x).to_complex())
                * CycNumber.from_complex(eval_add(psi, y).to_complex())
                + CycNumber.from_complex(eval_mult(chi, y).to_complex())
            )
            assert approx.approx_eq(CycNumber.from_complex(exact.to_complex()),
                                    tol=1e-9)
