from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import SMALL_MAPS, bundled, map_and_walk

from beadtrack.core import EdgePath
from beadtrack.errors import CapExceeded, InvalidMap, ParseError
from beadtrack.traintrack import (StratumKind, Turn, derivative, find_power_k1, is_legal_turn, is_r_legal,
                                  parse_ttm, seeds, turn_map, turn_orbit, verify_irtt)
from beadtrack.traintrack.filtration import pf_bounds, period
from beadtrack.traintrack.graphmap import iterate_map
from beadtrack.traintrack.turns import all_turns
from beadtrack.config import Caps


def test_image_raw_and_tightening(example):
    p = example.parse("E3 E2 ~E1")
    assert example.image_raw(p).literal() == "E3 ~E1 ~E2 E2 E1 ~E1"
    assert example.f_sharp(p).literal() == "E3 ~E1"
    assert example.f_sharp(example.parse("E1")).literal() == "E1"
    nielsen = example.parse("E2 E1 ~E2")
    assert example.f_sharp(nielsen) == nielsen
    empty = example.parse("", at="v")
    assert example.image_raw(empty) == EdgePath.empty(example.f_vertex("v"))


def test_iterate_images(example):
    g = iterate_map(example, 2)
    assert g.image[g.graph.edge("E2")].literal() == "E2 E1 E1"
    assert g.image[g.graph.edge("E3")].literal() == "E3 ~E1 ~E2 ~E1 ~E1 ~E2"
    one = iterate_map(example, 1)
    assert all(one.image[e] == example.image[e] for e in example.edges)
    assert g.iterate_of == ("example", 2)


def test_word_cap_is_an_error_not_truncation():
    f = bundled("fibonacci").with_caps(Caps(word_cap=50))
    with pytest.raises(CapExceeded):
        f.f_sharp(f.parse("a"), 12)


def test_filtration_of_example(example):
    filt = example.filtration
    assert [s.edges for s in filt.strata] == [("E1",), ("E2",), ("E3",)]
    assert all(s.kind is StratumKind.PARABOLIC and s.matrix == ((1,),) for s in filt.strata)
    assert filt.weight(example.parse("E3 ~E1")) == 3
    assert filt.weight(example.parse("E1")) == 1
    assert filt.weight(example.parse("E2 E1 ~E2")) == 2


def test_identity_rose_strata():
    filt = bundled("identity_rose").filtration
    assert filt.omega == 3
    assert all(s.kind is StratumKind.PARABOLIC for s in filt.strata)


def test_golden_ratio_stratum():
    filt = bundled("fibonacci").filtration
    assert filt.omega == 1
    s = filt[1]
    assert s.kind is StratumKind.EXPONENTIAL and s.aperiodic
    assert sorted(map(sorted, s.matrix)) == [[0, 1], [1, 1]]
    assert s.lambda_lo <= Fraction(161804, 100000) and Fraction(161803, 100000) <= s.lambda_hi
    assert s.lambda_hi - s.lambda_lo < Fraction(1, 100)


def test_pf_bounds_and_period():
    lo, hi = pf_bounds(((2, 0), (0, 2)))
    assert lo == hi == 2
    assert period(((0, 1), (1, 0))) == 2
    assert period(((1, 1), (1, 0))) == 1


def test_declared_order_is_verified():
    text = "edge a v v\nedge E v v\nmap a = a\nmap E = E a\norder E a\n"
    with pytest.raises(InvalidMap):
        parse_ttm(text)


@pytest.mark.parametrize("text", [
    "edge a v v\nmap a =\n",
    "edge a v w\nmap a = a a\n",
    "edge a v v\nmap b = a\n",
    "bogus\n",
    "",
])
def test_bad_ttm_rejected(text):
    with pytest.raises((ParseError, InvalidMap)):
        parse_ttm(text)


def test_turn_examples(example):
    e1, e2 = example.graph.edge("E1"), example.graph.edge("E2")
    assert turn_map(example, Turn.of(~e2, e1)) == Turn.of(~e1, e1)
    assert derivative(example, ~e2) == ~e1
    d = Turn.of(e1, e1)
    assert d.degenerate and turn_map(example, d).degenerate
    assert is_legal_turn(example, Turn.of(~e2, e2))[0]
    assert turn_map(example, Turn.of(~e2, e2)) == Turn.of(~e1, e2)
    assert not is_legal_turn(example, d)[0]


def test_golden_ratio_turns():
    f = bundled("fibonacci")
    a, b = f.graph.edge("a"), f.graph.edge("b")
    assert turn_map(f, Turn.of(~a, b)) == Turn.of(~b, a)
    legal, orbit = is_legal_turn(f, Turn.of(~a, b))
    assert legal
    assert orbit[:3] == [Turn.of(~a, b), Turn.of(~b, a), Turn.of(~a, a)]


def test_seeds(example):
    assert [s.literal() for s in seeds(example, 3)] == ["~E1 ~E2"]
    assert seeds(example, 1) == []
    assert seeds(bundled("fibonacci"), 1) == []


def test_irtt_verdicts(example):
    assert verify_irtt(example).ok
    assert verify_irtt(bundled("identity_rose")).ok
    fib = verify_irtt(bundled("fibonacci"), exact_only=True)
    assert fib.exact_ok
    broken = verify_irtt(bundled("broken"))
    names = {c.name for c in broken.failures()}
    assert "ne-(ii)" in names


def test_fibonacci_has_a_period_two_nielsen_path():
    # the bounded clause fails genuinely: the rose map a->ab, b->a is not improved
    rep = verify_irtt(bundled("fibonacci"))
    assert [c.name for c in rep.failures()] == ["periodic-nielsen-period-one"]


def test_find_power():
    assert find_power_k1(bundled("example"))[0] == 1
    assert find_power_k1(bundled("linear"))[0] == 1
    # exponential Nielsen path of length 4 with |f(E)| = 2 forces k1 >= 2
    k1, rep = find_power_k1(bundled("exp_inp"))
    assert k1 == 2
    assert any(i["clause"] == "exp-1" for i in rep.instances)


@given(map_and_walk(max_len=8), st.integers(1, 3))
def test_iterate_coherence(fw, k):
    f, p = fw
    g = iterate_map(f, k)
    step = p
    for _ in range(k):
        step = f.f_sharp(step)
    assert g.f_sharp(p) == step == f.f_sharp(p, k)


@given(st.sampled_from(SMALL_MAPS), st.integers(1, 4))
def test_filtration_invariance(name, k):
    f = bundled(name)
    filt = f.filtration
    for e in f.edges:
        w = filt.of_edge(e)
        img = f.f_sharp(EdgePath((e,), e.origin), k)
        assert filt.weight(img) <= w
        if filt[w].kind is not StratumKind.ZERO:
            assert filt.weight(img) == w


@given(st.sampled_from(SMALL_MAPS))
def test_turn_orbits_eventually_periodic(name):
    f = bundled(name)
    turns = all_turns(f)
    for t in turns:
        orbit = turn_orbit(f, t)
        assert orbit[-1] in orbit[:-1]
        assert len(orbit) - 1 <= len(turns)


@given(st.sampled_from(SMALL_MAPS))
def test_parabolic_images_split_off_their_edge(name):
    f = bundled(name)
    filt = f.filtration
    for s in filt.parabolic():
        e = f.graph.edge(s.edge)
        img = f.image[e]
        assert img[0] == e
        if len(img) > 1:
            assert filt.weight(img[1:]) < s.index


def _legal_decomposition(f, p, r):
    """Split into maximal runs of H_r edges and lower edges."""
    strat = f.filtration.stratum_of
    runs, cur = [], []
    for e in p:
        if cur and (strat[cur[-1].name] == r) != (strat[e.name] == r):
            runs.append(EdgePath(tuple(cur), cur[0].origin))
            cur = []
        cur.append(e)
    if cur:
        runs.append(EdgePath(tuple(cur), cur[0].origin))
    return runs


@given(map_and_walk(names=("fibonacci", "exp_over_fixed", "exp_inp"), max_len=8, tight=True, min_len=1))
def test_r_legal_paths_split_at_strata_junctions(fw):
    f, p = fw
    r = f.filtration.weight(p)
    if f.filtration[r].kind is not StratumKind.EXPONENTIAL or not is_r_legal(f, p, r):
        return
    pieces = [f.f_sharp(q) for q in _legal_decomposition(f, p, r)]
    whole = f.f_sharp(p)
    assert sum(len(q) for q in pieces) == len(whole)
    assert tuple(e for q in pieces for e in q) == whole.edges
    assert is_r_legal(f, whole, r)
