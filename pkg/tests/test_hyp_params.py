from fractions import Fraction

import pytest

from hypmono.hyp_params import (
    HypSpec,
    belyi_induction_match,
    build_Atimes,
    build_AxB,
    classification_report,
    det_product_check,
    inertia_model,
    kummer_induction_candidates,
    primitivity_verdict,
    selfdual_test,
    to_mult_chars,
)
from hypmono.finite_field import build_field


def test_build_axb_counts():
    spec = build_AxB(2, 3, 13)
    assert (spec.n, spec.m) == (24, 1)
    assert len(set(spec.upstairs)) == 24  # no repeats
    assert spec.downstairs == (0,)
    spec2 = build_AxB(3, 4, 5)
    assert (spec2.n, spec2.m) == (12, 1)
    with pytest.raises(ValueError):
        build_AxB(2, 4, 6)  # not coprime
    with pytest.raises(ValueError):
        build_AxB(3, 3, 5)  # A divisible by p


def test_build_atimes_counts():
    spec = build_Atimes(3, 28)
    assert spec.n == 12
    spec7 = build_Atimes(2, 7)
    assert spec7.n == 6
    # units are closed under negation
    assert sorted((-r) % 28 for r in spec.upstairs) == list(spec.upstairs)


def test_disjointness_enforced():
    with pytest.raises(ValueError):
        HypSpec(2, 15, (0, 1, 2), (0,))


def test_kummer_empty_for_main_families():
    assert kummer_induction_candidates(build_AxB(2, 3, 13)) == []
    assert kummer_induction_candidates(build_AxB(3, 4, 5)) == []
    assert kummer_induction_candidates(build_Atimes(3, 28)) == []


def test_kummer_detects_synthetic_stability():
    # all residues mod 6 upstairs, nothing downstairs: stable under every
    # shift, so every N dividing 6 and prime to p is a candidate
    spec = HypSpec(5, 6, (0, 1, 2, 3, 4, 5), ())
    assert kummer_induction_candidates(spec) == [2, 3, 6]
    # a shifted copy of the same multiset keeps the stability
    shifted = HypSpec(5, 6, tuple((r + 1) % 6 for r in range(6)), ())
    assert kummer_induction_candidates(shifted) == [2, 3, 6]
    # candidates divisible by p never survive: with M prime to p, a lifted
    # multiset cannot be stable under a shift of p-power order, and the
    # explicit filter enforces the precondition regardless
    spec4 = HypSpec(3, 4, (0, 1, 2, 3), ())
    assert kummer_induction_candidates(spec4) == [2, 4]


def test_belyi_empty_for_main_families():
    assert belyi_induction_match(build_AxB(2, 3, 13)) == []
    assert belyi_induction_match(build_AxB(3, 4, 5)) == []
    assert belyi_induction_match(build_Atimes(3, 28)) == []


def test_belyi_roundtrip_synthetic():
    # built from the split-covering shape with exponents (3, 5) in char 2:
    # upstairs the cube roots of 1/3 and fifth roots of 1/5, downstairs
    # the unique eighth division of their product
    lam, sigma = Fraction(1, 3), Fraction(1, 5)
    up = [Fraction(1 + 3 * j, 9) for j in range(3)]
    up += [Fraction(1 + 5 * j, 25) for j in range(5)]
    prod = lam + sigma  # 8/15
    tau = Fraction((8 * pow(8, -1, 15)) % 15, 15)
    M = 225
    spec = HypSpec(
        2, M,
        tuple(int(f * M) % M for f in up),
        (int(tau * M) % M,),
    )
    matches = belyi_induction_match(spec)
    assert any(
        m.case == "a" and {m.A, m.B} == {3, 5} and {m.lam, m.sigma} == {lam, sigma}
        for m in matches
    )
    verdict = primitivity_verdict(spec)
    assert verdict.status == "INCONCLUSIVE"  # rank 8 = 2^3, candidates found
    assert verdict.belyi


def test_primitivity_not_induced():
    for spec in (build_AxB(2, 3, 13), build_AxB(3, 4, 5), build_Atimes(3, 28)):
        verdict = primitivity_verdict(spec)
        assert verdict.status == "NOT_INDUCED"
        assert verdict.kummer == [] and verdict.belyi == []
        assert verdict.tensor_indecomposable_hypotheses


def test_selfdual():
    assert selfdual_test(build_AxB(2, 3, 13)) == (True, "orthogonal")
    assert selfdual_test(build_AxB(3, 4, 5)) == (False, "none")
    assert selfdual_test(build_Atimes(3, 28)) == (False, "none")
    # negation stability holds for both families
    for spec in (build_AxB(2, 3, 13), build_AxB(3, 4, 5)):
        up = list(spec.upstairs)
        assert sorted((-r) % spec.M for r in up) == up
    # a non-symmetric multiset is never self-dual
    lopsided = HypSpec(2, 7, (1, 2, 4), ())
    assert selfdual_test(lopsided) == (False, "none")


def test_det_product():
    assert det_product_check(build_AxB(2, 3, 13))
    assert det_product_check(build_AxB(3, 4, 5))
    assert det_product_check(build_Atimes(3, 28))
    assert not det_product_check(HypSpec(2, 5, (1,), ()))


def test_inertia_models():
    m1 = inertia_model(build_AxB(2, 3, 13))
    assert (m1.N, m1.f, m1.group) == (23, 11, "C2^11 : C23")
    assert m1.product_case == "trivial" and m1.hypothesis_met
    m2 = inertia_model(build_AxB(3, 4, 5))
    assert (m2.N, m2.f, m2.group) == (11, 5, "C3^5 : C11")
    m3 = inertia_model(build_Atimes(3, 28))
    assert (m3.N, m3.f, m3.group) == (11, 5, "C3^5 : C11")
    # f is minimal
    for m, p in ((m1, 2), (m2, 3)):
        assert all(pow(p, d, m.N) != 1 for d in range(1, m.f))
        assert pow(p, m.f, m.N) == 1
    with pytest.raises(ValueError):
        inertia_model(HypSpec(2, 15, (1, 2), ()))  # N = 2 divisible by p


def test_to_mult_chars_bridging():
    spec = build_AxB(2, 3, 13)
    f = build_field(2, 12)  # q - 1 = 4095 = 39 * 105
    chars = to_mult_chars(spec, f)
    assert len(chars) == 24
    orders = sorted({c.order for c in chars})
    assert orders == [39]  # every product character has full order 39
    with pytest.raises(ValueError):
        to_mult_chars(spec, build_field(2, 4))


def test_classification_report_shape():
    report = classification_report(build_AxB(2, 3, 13), "3x13", {"A": 3, "B": 13})
    assert report["primitivity"] == "NOT_INDUCED"
    assert report["selfdual"] == "orthogonal"
    assert report["det_trivial"] is True
    assert report["inertia"] == {
        "N": 23, "f": 11, "group": "C2^11 : C23",
        "product_case": "trivial", "hypothesis_met": True,
    }
    assert report["n"] == 24 and report["m"] == 1


def test_kummer_empty_for_more_axb_pairs():
    # a single trivial downstairs character forces the candidate list empty
    for p, A, B in ((2, 3, 5), (2, 5, 9), (3, 4, 7), (3, 5, 7), (2, 7, 9)):
        assert kummer_induction_candidates(build_AxB(p, A, B)) == []


def _fiber(target, k):
    return [Fraction(target.numerator + j * target.denominator,
                     target.denominator * k) for j in range(k)]


def test_belyi_roundtrip_wild_cases():
    # one covering exponent carries the wild part: exponents (3, 4) in
    # char 2 with d0 = 1, so seven upstairs characters (the 7th division
    # of the product) and four downstairs ones
    lam, sigma = Fraction(1, 3), Fraction(1, 5)
    prod = lam + sigma  # 8/15
    up = _fiber(prod, 7)
    down = _fiber(lam, 3) + [Fraction(4, 5)]  # sigma / 2^2 in Q/Z
    M = 315
    spec = HypSpec(
        2, M,
        tuple(int(f * M) % M for f in up),
        tuple(int(f * M) % M for f in down),
    )
    matches = belyi_induction_match(spec)
    cases = {m.case for m in matches}
    # the same residue data matches the two mirror-image shapes
    assert "b" in cases and "c" in cases
    mb = next(m for m in matches if m.case == "b")
    assert (mb.A, mb.B, mb.d0, mb.r) == (3, 4, 1, 2)
    assert (mb.lam, mb.sigma) == (lam, sigma)
    mc = next(m for m in matches if m.case == "c")
    assert (mc.A, mc.B, mc.d0, mc.r) == (4, 3, 1, 2)
    assert (mc.lam, mc.sigma) == (sigma, lam)
    assert primitivity_verdict(spec).status == "INCONCLUSIVE"
