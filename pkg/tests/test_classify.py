import itertools
import json
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from smalldoubling.classify import (
    Case,
    ClassificationResult,
    PreconditionError,
    Relation,
    RelationError,
    _case_iii_c,
    _case_iii_d,
    classify_small_doubling,
    construct_case_i,
    construct_case_ii,
    construct_case_iii,
    detect_case_i,
    detect_case_ii,
    detect_case_iii,
    detect_geometric_progression,
    detect_triple_shape,
    freiman_isomorphic,
    minimal_covering_progression,
    relation_doubling,
)
from smalldoubling.core import FiniteSubset, conjugate, pairwise_commuting, power, square
from smalldoubling.groups import (
    BS12,
    FIB,
    HEIS,
    BSElement,
    FibElement,
    GroupError,
    HeisElement,
    ZdElement,
    generators,
    identity,
)
from smalldoubling.search import BallSpec, enumerate_ball, subsets
from oracles import brute_case_i

ha, hb, hc = (generators(HEIS)[n] for n in "abc")
fa, fb = generators(FIB)["a"], generators(FIB)["b"]
ba, bb = generators(BS12)["a"], generators(BS12)["b"]
E_H, E_F, E_B = identity(HEIS), identity(FIB), identity(BS12)


def S(*elems):
    return FiniteSubset.of(elems)


def Z(*xs):
    return FiniteSubset.of(ZdElement((x,)) for x in xs)


LEMMA_SET = S(fb, fb * fa, fb * conjugate(fa, fb), fb * conjugate(fa, power(fb, 2)))


def hits(tag, ball, k=4):
    universe = enumerate_ball(BallSpec.parse(tag, ball))
    return [s for s in subsets(universe, k) if len(square(s)) == 3 * k - 2 and not pairwise_commuting(s)]


HEIS_HITS = hits(HEIS, "1,1")
FIB_HITS = hits(FIB, "1,1,1")
BS_HITS = hits(BS12, "2,1,1")


# --- progressions -------------------------------------------------------------


def test_geometric_progression_examples():
    prog = S(*(BSElement.make(i, 1, -1) for i in range(4)))
    w = detect_geometric_progression(prog)
    assert (w.x, w.c, w.k) == (bb, ba, 4)
    w = detect_geometric_progression(Z(5, 7, 9))
    assert (w.x, w.c, w.k) == (ZdElement((5,)), ZdElement((2,)), 3)
    assert detect_geometric_progression(Z(0, 1, 3)) is None
    assert detect_geometric_progression(Z(4)) is None


def test_covering_progression_examples():
    w = minimal_covering_progression(Z(0, 2, 6))
    assert (w.x, w.c, w.k) == (ZdElement((0,)), ZdElement((2,)), 4)
    # rank two: a and a^b are independent
    assert minimal_covering_progression(S(E_F, fa, conjugate(fa, fb))) is None
    assert minimal_covering_progression(S(E_H, ha, hc)) is None
    x, y = fa, fa * power(conjugate(fa, fb), 2)
    w = minimal_covering_progression(S(x, y))
    assert (w.x, w.c, w.k) == (min(x, y), min(x, y).inverse() * max(x, y), 2)
    with pytest.raises(PreconditionError):
        minimal_covering_progression(S(fa, fb))


@given(st.lists(st.integers(-30, 30), min_size=2, max_size=7, unique=True))
def test_covering_progression_in_z_matches_gcd(xs):
    w = minimal_covering_progression(Z(*xs))
    g = math.gcd(*(x - min(xs) for x in xs))
    assert w.x == ZdElement((min(xs),))
    assert w.c == ZdElement((g,))
    assert w.k == (max(xs) - min(xs)) // g + 1


# (base, generator) pairs that commute, so every base * gen^e commutes too
CYCLIC_SAMPLES = {
    "heis": (power(hc, 5) * HeisElement(2, 1, 3), HeisElement(2, 1, 3)),
    "fib": (FibElement(3, 5, 0), FibElement(1, -1, 0)),
    "bs12": (power(BSElement.make(1, 0, 1), -3), BSElement.make(1, 0, 1)),
}


@pytest.mark.parametrize("name", sorted(CYCLIC_SAMPLES))
@given(st.data())
def test_covering_progression_on_cyclic_subsets(name, data):
    base, gen = CYCLIC_SAMPLES[name]
    exps = data.draw(st.lists(st.integers(-6, 6), min_size=2, max_size=6, unique=True))
    s = S(*(base * power(gen, e) for e in exps))
    w = minimal_covering_progression(s)
    assert w is not None and w.x == s.min and w.c > w.c.inverse()
    assert set(s) <= set(w.elements())
    g = math.gcd(*(e - min(exps) for e in exps))
    assert w.k <= (max(exps) - min(exps)) // g + 1


# --- relations ----------------------------------------------------------------


def test_relation_doubling_examples():
    assert relation_doubling(ba, bb) is Relation.CX_EQ_C2
    assert relation_doubling(ba, bb.inverse()) is Relation.C2X_EQ_C
    for x in (ha, hb, hc, ha * hb):
        assert relation_doubling(hc, x) is Relation.NEITHER


# --- case (i) -----------------------------------------------------------------


def test_case_i_examples():
    r = detect_case_i(S(ha, ha * hc, hb, hb * hc))
    assert r.params == {"a": ha, "b": hb, "c": hc, "i": 1, "j": 1, "orientation": "AB_BAC"}
    r = detect_case_i(S(ha, ha * hc, ha * hc * hc, hb))
    assert r.params == {"a": ha, "b": hb, "c": hc, "i": 2, "j": 0, "orientation": "AB_BAC"}
    assert detect_case_i(S(*(BSElement.make(i, 1, -1) for i in range(4)))) is None


def test_case_i_matches_partition_oracle_on_ball_hits():
    for s in HEIS_HITS + FIB_HITS + BS_HITS:
        assert (detect_case_i(s) is not None) == brute_case_i(s)


@pytest.mark.parametrize("tag,ball", [(HEIS, "1,2"), (BS12, "2,1,1"), (FIB, "1,1,1")])
def test_case_i_matches_partition_oracle_on_random_sets(tag, ball):
    rng = random.Random(7)
    universe = list(enumerate_ball(BallSpec.parse(tag, ball)))
    for _ in range(400):
        s = FiniteSubset.of(rng.sample(universe, rng.choice([4, 5])))
        assert (detect_case_i(s) is not None) == brute_case_i(s)


# --- case (ii) and (iii) ------------------------------------------------------


def test_case_ii_example():
    s = S(*(bb * power(ba, i) for i in range(5)))
    r = detect_case_ii(s)
    assert r.params == {"x": bb, "c": ba, "k": 5, "orientation": Relation.CX_EQ_C2}


def test_case_iii_examples():
    r = detect_case_iii(LEMMA_SET)
    assert r.case is Case.CASE_III_A and r.params == {"x": fb, "c": fa, "variant": "X"}
    r = detect_case_iii(S(E_B, ba, ba * ba, bb))
    assert r.case is Case.CASE_III_B
    assert r.params == {"c": ba, "x": bb, "orientation": Relation.CX_EQ_C2}
    assert detect_case_iii(S(ha, ha * hc, hb, hb * hc)) is None


def test_case_iii_c_and_d_detectors():
    # in BS(1,2) these shapes also read as {1, c, c^2, y}; the dedicated
    # detectors must still recover their own witnesses
    s = construct_case_iii("c", x=BSElement(2, 0, 0), c=BSElement(-1, 0, 0), y=bb.inverse())
    r = _case_iii_c(s)
    assert r.case is Case.CASE_III_C and r.rebuild() == s
    assert classify_small_doubling(s).case is Case.CASE_III_B
    s = construct_case_iii("d", x=E_B, c=ba, y=bb)
    r = _case_iii_d(s)
    assert r.case is Case.CASE_III_D and r.rebuild() == s


# --- full classifier ----------------------------------------------------------


def test_classify_examples():
    assert classify_small_doubling(S(ha, ha * hc, hb, hb * hc)).case is Case.CASE_I
    s = S(*(bb * power(ba, i) for i in range(5)))
    assert classify_small_doubling(s).case is Case.CASE_II
    # {0,1,3,7} is a Sidon set: |2S| = 10
    assert classify_small_doubling(Z(0, 1, 3, 7)).case is Case.ABELIAN
    assert classify_small_doubling(LEMMA_SET).case is Case.CASE_III_A


def test_classify_preconditions():
    with pytest.raises(PreconditionError, match=r"3\|S\|-2"):
        classify_small_doubling(Z(0, 1, 2, 3))
    with pytest.raises(PreconditionError):
        classify_small_doubling(Z(0, 1, 3))


@pytest.mark.parametrize("name,found,allowed", [
    ("heis", HEIS_HITS, {Case.CASE_I}),
    ("fib", FIB_HITS, {Case.CASE_III_A}),
    ("bs12", BS_HITS, {Case.CASE_II, Case.CASE_III_B, Case.CASE_III_C, Case.CASE_III_D}),
])
def test_ball_hits_classify_and_rebuild(name, found, allowed):
    assert found
    for s in found:
        r = classify_small_doubling(s)
        assert r.case in allowed
        assert r.rebuild() == s


def test_inverse_set_keeps_case_and_mirrors_orientation():
    mirror = {Relation.CX_EQ_C2: Relation.C2X_EQ_C, Relation.C2X_EQ_C: Relation.CX_EQ_C2}
    for s in HEIS_HITS + FIB_HITS + BS_HITS:
        r = classify_small_doubling(s)
        t = FiniteSubset.of(g.inverse() for g in s)
        assert len(square(t)) == len(square(s))
        r2 = classify_small_doubling(t)
        assert r2.case is r.case
        if isinstance(r.params.get("orientation"), Relation):
            assert r2.params["orientation"] is mirror[r.params["orientation"]]


def test_result_json():
    r = classify_small_doubling(S(ha, ha * hc, hb, hb * hc))
    assert json.loads(r.to_json()) == {
        "case": "CASE_I", "a": "H(1,0,0)", "b": "H(0,1,0)", "c": "H(0,0,1)",
        "i": 1, "j": 1, "orientation": "AB_BAC",
    }
    with pytest.raises(GroupError):
        ClassificationResult(Case.ABELIAN).rebuild()


# --- constructors -------------------------------------------------------------


def test_construct_case_i():
    s = construct_case_i(ha, hb, hc, 1, 1, "AB_BAC")
    assert len(s) == 4 and len(square(s)) == 10
    s = construct_case_i(ha, hb, hc, 2, 1, "AB_BAC")
    assert len(s) == 5 and len(square(s)) == 13
    with pytest.raises(RelationError):
        construct_case_i(ha, hb, E_H, 1, 1, "AB_BAC")
    with pytest.raises(RelationError):
        construct_case_i(ha, hb, hc, 1, 1, "BA_ABC")


@pytest.mark.parametrize("k,size", [(4, 10), (7, 19)])
def test_construct_case_ii(k, size):
    assert len(square(construct_case_ii(bb, ba, k))) == size


def test_construct_case_ii_mirrored():
    s = construct_case_ii(bb.inverse(), ba, 4)
    assert len(square(s)) == 10
    assert detect_case_ii(s).params["orientation"] is Relation.C2X_EQ_C
    with pytest.raises(RelationError):
        construct_case_ii(fb, fa, 4)


def test_construct_case_iii():
    assert construct_case_iii("a", x=fb, c=fa, variant="X") == LEMMA_SET
    assert len(square(LEMMA_SET)) == 10
    s = construct_case_iii("b", c=ba, x=bb)
    assert s == S(E_B, ba, ba * ba, bb) and len(square(s)) == 10
    with pytest.raises(RelationError):
        construct_case_iii("a", x=fa, c=fb)
    with pytest.raises(GroupError):
        construct_case_iii("e", x=fb, c=fa)


# --- triples ------------------------------------------------------------------


def test_triple_shape_examples():
    assert detect_triple_shape(S(fb, fb * fa, fb * conjugate(fa, fb))).shape == "PROP4_I"
    assert detect_triple_shape(S(bb, bb * ba, bb * ba * ba)).shape == "PROP4_III"
    assert detect_triple_shape(Z(0, 1, 5)).shape == "NONE"
    with pytest.raises(PreconditionError):
        detect_triple_shape(Z(0, 1))


@pytest.mark.parametrize("tag,ball", [(HEIS, "1,1"), (FIB, "1,1,1"), (BS12, "2,1,1")])
def test_triples_with_seven_products_have_a_shape(tag, ball):
    found = hits(tag, ball, 3)
    assert found
    for s in found:
        assert detect_triple_shape(s).shape != "NONE"


# --- Freiman ------------------------------------------------------------------


K6 = FiniteSubset.of(ZdElement(v) for v in [(0, 0), (1, 0), (2, 0), (0, 1), (0, 2), (1, 1)])


def test_freiman_examples():
    assert freiman_isomorphic(K6, K6)
    assert freiman_isomorphic(K6, Z(0, 1, 2, 5, 6, 10))
    assert not freiman_isomorphic(Z(0, 1, 2), Z(0, 1, 3))
    with pytest.raises(PreconditionError):
        freiman_isomorphic(Z(0, 1), Z(0, 1, 2))
    with pytest.raises(GroupError):
        freiman_isomorphic(S(fa, fb), S(fa, fb))


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=5, unique=True), st.integers(1, 4), st.integers(-5, 5))
def test_freiman_affine_images(xs, m, t):
    assert freiman_isomorphic(Z(*xs), Z(*(m * x + t for x in xs)))
    assert freiman_isomorphic(Z(*xs), Z(*(-x for x in xs)))


def test_freiman_preserves_square_size():
    for a, b in itertools.combinations([Z(0, 1, 2, 4), Z(0, 1, 3, 4), Z(0, 2, 3, 4), Z(0, 1, 3, 7)], 2):
        if freiman_isomorphic(a, b):
            assert len(square(a)) == len(square(b))
