import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from smalldoubling import (
    BS12,
    FIB,
    HEIS,
    BSElement,
    FibElement,
    FiniteSubset,
    GroupError,
    HeisElement,
    MixedGroupsError,
    Ordering,
    ZdElement,
    commutator,
    commute,
    compare,
    conjugate,
    doubling_report,
    identity,
    inv,
    mul,
    pairwise_commuting,
    power,
    product_set,
    square,
)
from smalldoubling.groups import generators
from oracles import ELEMENT_STRATEGIES, affine_compose, bs_affine, bs_from_affine


def Z(*xs):
    return FiniteSubset.of(ZdElement((x,)) for x in xs)


K6 = FiniteSubset.of(ZdElement(v) for v in [(0, 0), (1, 0), (2, 0), (0, 1), (0, 2), (1, 1)])

ha, hb, hc = (generators(HEIS)[n] for n in "abc")
fa, fb = generators(FIB)["a"], generators(FIB)["b"]
ba_, bb = generators(BS12)["a"], generators(BS12)["b"]


def test_mul_examples():
    assert mul(FibElement(1, 0, 0), FibElement(0, 0, 1)) == FibElement(1, 0, 1)
    assert mul(BSElement(0, 0, -1), BSElement(1, 0, 0)) == BSElement(1, 1, -1)
    for g in (ha, fa, ba_, ZdElement((3,))):
        assert mul(g, identity(g.tag)) == g


def test_inverse_examples():
    assert inv(FibElement(0, 0, 1)) == FibElement(0, 0, -1)
    assert inv(identity(HEIS)) == identity(HEIS)


def test_power_examples():
    assert power(ZdElement((3,)), 4) == ZdElement((12,))
    assert power(fb, 3) == FibElement(0, 0, 3)
    assert power(ba_, 5) == BSElement(5, 0, 0)


@given(st.sampled_from(sorted(ELEMENT_STRATEGIES)).flatmap(lambda n: ELEMENT_STRATEGIES[n]), st.integers(-7, 7))
def test_power_matches_repeated_product(g, n):
    base = g if n >= 0 else g.inverse()
    expect = identity(g.tag)
    for _ in range(abs(n)):
        expect = expect._mul(base)
    assert power(g, n) == expect


def test_conjugation_convention():
    assert conjugate(fa, fb) == FibElement(0, 1, 0)
    assert conjugate(ba_, bb) == BSElement(2, 0, 0)
    assert conjugate(fa, identity(FIB)) == fa
    # g^x = x^-1 g x
    assert conjugate(ha, hb) == hb.inverse() * ha * hb


def test_commutator_examples():
    assert commutator(ha, hb) == hc
    assert commutator(ha, hc).is_identity()
    # BS12 [b, a] computed through affine maps x -> x/2 and x -> x + 1
    b, a = bs_affine(bb), bs_affine(ba_)
    binv, ainv = bs_affine(bb.inverse()), bs_affine(ba_.inverse())
    oracle = bs_from_affine(affine_compose(affine_compose(binv, ainv), affine_compose(b, a)))
    assert commutator(bb, ba_) == oracle == ba_.inverse()


def test_compare_examples():
    assert compare(identity(FIB), fb) is Ordering.LT
    assert compare(identity(FIB), FibElement(-1, 1, 0)) is Ordering.LT
    assert compare(fa, fa) is Ordering.EQ
    assert compare(fb, identity(FIB)) is Ordering.GT


def test_mixed_tags_rejected():
    for op in (mul, conjugate, commutator, commute, compare):
        with pytest.raises(MixedGroupsError):
            op(ha, fa)
    with pytest.raises(MixedGroupsError):
        FiniteSubset.of([ha, fa])
    with pytest.raises(MixedGroupsError):
        product_set(FiniteSubset.of([ha]), FiniteSubset.of([fa]))


def test_finite_subset_sorted_and_deduplicated():
    s = FiniteSubset.of([fb, fa, identity(FIB), fa])
    assert s.elements == (identity(FIB), fa, fb)
    assert len(s) == 3 and s.min == identity(FIB) and s.max == fb
    with pytest.raises(GroupError):
        FiniteSubset.of([])


def test_product_set_examples():
    assert product_set(Z(0, 1, 3), Z(0, 1, 3)) == Z(0, 1, 2, 3, 4, 6)
    s = FiniteSubset.of([ha, ha * hc, hb, hb * hc])
    assert product_set(FiniteSubset.of([identity(HEIS)]), s) == s
    assert len(square(s)) == 10
    assert square(FiniteSubset.of([fa])) == FiniteSubset.of([fa * fa])


@given(st.sampled_from(sorted(ELEMENT_STRATEGIES)).flatmap(
    lambda n: st.lists(ELEMENT_STRATEGIES[n], min_size=1, max_size=6)))
def test_square_matches_brute_force(items):
    s = FiniteSubset.of(items)
    brute = {x * y for x, y in itertools.product(items, repeat=2)}
    assert set(square(s)) == brute
    assert list(square(s)) == sorted(brute)


def test_square_examples():
    prog = FiniteSubset.of(BSElement.make(i, 1, -1) for i in range(4))
    assert len(square(prog)) == 10
    assert len(square(K6)) == 15


def test_doubling_report_examples():
    r = doubling_report(Z(0, 1, 2))
    assert (r.k, r.square_size, r.pairwise_commuting) == (3, 5, True)
    r = doubling_report(FiniteSubset.of([ha, ha * hc, hb, hb * hc]))
    assert (r.k, r.square_size, r.exactly_3k_minus_2, r.pairwise_commuting) == (4, 10, True, False)
    lemma = FiniteSubset.of([fb, fb * fa, fb * conjugate(fa, fb), fb * conjugate(fa, power(fb, 2))])
    assert doubling_report(lemma).square_size == 10


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=8, unique=True))
def test_freiman_lower_bound_in_z(xs):
    r = doubling_report(Z(*xs))
    assert r.square_size >= 2 * r.k - 1
    assert r.meets_3k_minus_4 == (r.square_size <= 3 * r.k - 4)
    assert r.exactly_3k_minus_3 == (r.square_size == 3 * r.k - 3)


def test_pairwise_commuting():
    assert pairwise_commuting(Z(1, 5, 9))
    assert not pairwise_commuting([fa, fb])
    assert pairwise_commuting([fa, conjugate(fa, fb)])
