import json

import pytest
from hypothesis import given, strategies as st

from conftest import bundled, map_and_walk

from beadtrack.beads import (BeadParams, FamilyForest, NibbleKind, NibblePolicy, find_bead_params,
                             monochromatic_evidence, monochromatic_paths, nibbled_futures,
                             split_after_iteration, verify_bdt, verify_decomp_theorem, verify_refinements)
from beadtrack.beads.classify import BeadKind, beaded_decomposition, classify_bead
from beadtrack.beads.nibble import sample_monochromatic, tighten_survivors
from beadtrack.beads.verify import is_gep_fragment
from beadtrack.core import canonical_orientation, path_key, sub_edge_paths, tighten
from beadtrack.errors import EmptyPath
from beadtrack.traintrack import seeds
from beadtrack.traintrack.graphmap import iterate_map


def certified(f):
    return iterate_map(f, 1, k1_certified=True)


def test_entire_futures(example):
    out = [q.literal() for _, q, _ in nibbled_futures(example, example.parse("E3"), 2)]
    assert out == ["E3", "E3 ~E1 ~E2", "E3 ~E1 ~E2 ~E1 ~E1 ~E2"]
    zero = list(nibbled_futures(example, example.parse("E2 E1"), 0))
    assert [q.literal() for _, q, _ in zero] == ["E2 E1"]


def test_right_trim_turns_a_gep_into_a_pep(linear):
    policy = NibblePolicy(NibbleKind.RIGHT_ONLY, 1)
    out = [q for _, q, _ in nibbled_futures(linear, linear.parse("E ~a ~a ~F"), 1, policy)]
    assert out[-1].literal() == "E ~a ~a ~a"
    from beadtrack.nielsen_gep import is_pep
    pep = is_pep(certified(linear), out[-1])
    assert pep is not None and pep.form == "transient"


def test_trim_that_empties_is_an_error(example):
    policy = NibblePolicy(NibbleKind.BOTH_ENDS, 2)
    with pytest.raises(EmptyPath):
        list(nibbled_futures(example, example.parse("E2"), 1, policy))


def test_untight_start_rejected(example):
    with pytest.raises(ValueError):
        list(nibbled_futures(example, example.parse("E1 ~E1"), 1))


def test_monochromatic_depth_one(example):
    got = {p.literal() for d, p in monochromatic_paths(example, 1, 1)}
    want = set()
    for n in ("E1", "E2", "E3"):
        want.add(n)
        for s in sub_edge_paths(example.f_sharp(example.parse(n))):
            want.add(canonical_orientation(s).literal())
    assert got == want
    assert [p.literal() for _, p in monochromatic_paths(example, 1, 0)] == ["E1", "E2", "E3"]


def test_multiples_are_contained(example):
    one = {(p.start, path_key(p)) for _, p in monochromatic_paths(example, 1, 4)}
    two = {(p.start, path_key(p)) for _, p in monochromatic_paths(example, 2, 2)}
    assert two <= one


def test_classify_examples(example, linear):
    lc, ec = certified(linear), certified(example)
    assert classify_bead(lc, linear.parse("E ~a ~a ~F"), 1).kind is BeadKind.GEP
    assert classify_bead(ec, example.parse("E1"), 1).kind is BeadKind.NIELSEN
    assert classify_bead(ec, example.parse("E3"), 1).kind is BeadKind.ATOM
    assert classify_bead(lc, linear.parse("E ~a ~a"), 1).kind is BeadKind.PEP
    # too long for an atom, and not monochromatic anyway
    assert classify_bead(ec, example.parse("E3 E3 E3"), 1) is None


def test_beaded_decomposition_examples(example, linear):
    ec, lc = certified(example), certified(linear)
    res = beaded_decomposition(ec, example.parse("E3 ~E1 ~E2"), 1)
    assert [str(b) for b in res.beads] == ["Atom(E3)", "Nielsen(~E1)", "Atom(~E2)"]
    assert [str(b) for b in beaded_decomposition(lc, linear.parse("E ~a ~a ~F"), 1).beads] == ["Gep(E ~a ~a ~F)"]
    assert [str(b) for b in beaded_decomposition(ec, example.parse("E2 E1 ~E2"), 3).beads] == ["Nielsen(E2 E1 ~E2)"]
    bad = beaded_decomposition(ec, example.parse("E3 E2 ~E1"), 1)
    assert not bad.ok and bad.failure is not None


def test_find_bead_params():
    for name in ("example", "identity_rose", "linear"):
        p = find_bead_params(bundled(name), depth=3)
        assert (p.r, p.J) == (1, 1)
    assert find_bead_params(bundled("exp_inp"), depth=2, samples=40).r == 2


def test_verify_bdt_small():
    for name in ("example", "identity_rose", "linear"):
        rep = verify_bdt(bundled(name), BeadParams(1, 1), depth=3)
        assert rep.verified, rep.render()
    tower = verify_bdt(bundled("linear_tower"), BeadParams(1, 1), depth=3)
    assert tower.verified and tower.bead_counts["Gep"] > 0 and tower.bead_counts["Pep"] > 0


def test_decomp_theorem(example):
    rep = verify_decomp_theorem(bundled("linear"), 3, 3)
    assert rep.verified and rep.monotone
    assert rep.v_hat[1] == 1
    # E2 ~E1 reaches length 2 without any hard split and is no GEP future
    rep = verify_decomp_theorem(example, 2, 2)
    assert rep.v_hat == {1: 1, 2: 2}


def test_split_after_iteration(example, linear):
    i, dec = split_after_iteration(example, example.parse("E3 E2 ~E1"))
    assert i == 1 and dec.render() == "E3 ⊙ ~E1" and dec.annotations == ("edge", "lower")
    i, dec = split_after_iteration(example, example.parse("E2 E1 ~E2"))
    assert i == 0 and dec.annotations == ("nielsen",)
    i, dec = split_after_iteration(linear, linear.parse("E ~a ~a ~F"))
    assert i == 0 and dec.annotations == ("gep",)


def test_refinements_small():
    rep = verify_refinements(bundled("example"), BeadParams(1, 1), depth=3, trajectories=100)
    assert rep.verified, rep.render()
    assert [s.name for s in rep.subs] == ["a", "b", "c", "d"]


def test_gep_fragments(linear):
    assert is_gep_fragment(linear, linear.parse("E ~a ~a"))
    assert is_gep_fragment(linear, linear.parse("~a ~F"))
    assert not is_gep_fragment(linear, linear.parse("a a"))


def test_reports_are_deterministic_and_round_trip():
    f = bundled("exp_inp")
    params = BeadParams(2, 1)
    a = verify_bdt(f, params, depth=3, samples=30, seed=5).to_json()
    b = verify_bdt(f, params, depth=3, samples=30, seed=5).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert json.loads(json.dumps(a)) == a


@given(map_and_walk(max_len=6, tight=True, min_len=1), st.integers(1, 3))
def test_entire_policy_is_coherent(fw, steps):
    f, p = fw
    p = tighten(p)
    if not p:
        return
    prev = None
    for k, q, forest in nibbled_futures(f, p, steps):
        if prev is not None:
            assert q == f.f_sharp(prev)
        assert forest.steps == k and len(forest.levels[-1]) == len(q)
        prev = q


@given(map_and_walk(names=("example", "linear", "linear_tower", "exp_over_fixed"), max_len=5, tight=True, min_len=1),
       st.integers(0, 2 ** 16), st.integers(1, 3))
def test_forest_weights_never_rise(fw, seed, steps):
    f, p = fw
    p = tighten(p)
    if not p:
        return
    filt = f.filtration
    for k, q, forest in nibbled_futures(f, p, steps, NibblePolicy.seeded(seed), tightening_seed=seed):
        assert forest.weights_nonincreasing()
        if k == 0:
            continue
        prev = forest.levels[k - 1]
        for node in forest.levels[k]:
            parent = prev[node.parent_pos]
            if node.weight < parent.weight:
                # a weight drop happens inside a seed of the parent's stratum
                r = parent.weight
                names = {e.name for s in seeds(f, r) for e in s}
                assert filt.stratum_of[q[node.pos].name] < r
                assert q[node.pos].name in names


@given(st.lists(st.integers(0, 5), max_size=30), st.integers(0, 1000))
def test_random_tightening_keeps_the_reduced_word(word, seed):
    import random
    stack = [word[i] for i in tighten_survivors(word)]
    rand = [word[i] for i in tighten_survivors(word, random.Random(seed))]
    assert stack == rand


@pytest.mark.parametrize("name", ["example", "linear", "linear_tower"])
def test_monochromatic_closure(name):
    f = bundled(name)
    stream = list(monochromatic_paths(f, 1, 2))
    have = {(p.start, path_key(p)) for _, p in stream}
    for d, p in stream:
        if d == 2:
            continue
        for s in sub_edge_paths(f.f_sharp(p)):
            c = canonical_orientation(s)
            assert (c.start, path_key(c)) in have


def test_bdt_idempotent_audit():
    # verified implies each re-sampled path decomposes on its own
    f = bundled("linear_tower")
    g = certified(f)
    rep = verify_bdt(f, BeadParams(1, 1), depth=2)
    assert rep.verified
    for p in sample_monochromatic(f, 1, 2, 50, seed=3):
        assert beaded_decomposition(g, p, 1, evidence="generated").ok


def test_monochromatic_evidence(example):
    assert monochromatic_evidence(example, example.parse("E3"), 1, 3) == 0
    assert monochromatic_evidence(example, example.parse("~E1 ~E2"), 1, 3) == 1
    assert monochromatic_evidence(example, example.parse("E3 E3"), 1, 3) is None


def test_forest_json(example):
    _, _, forest = list(nibbled_futures(example, example.parse("E3"), 1))[-1]
    data = json.loads(json.dumps(forest.to_json()))
    assert data[1]["edges"][1] == {"pos": 1, "parent_pos": 0, "weight": 1}
    assert isinstance(forest, FamilyForest)
