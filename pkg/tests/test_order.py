import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from valim import (
    FiniteSpace,
    MonotoneMap,
    UpSet,
    check_space,
    closure,
    compose,
    enumerate_opens,
    identity_map,
    interior,
    lift,
    product_space,
    sobriety_witness,
    space_from_covers,
    subspace,
    upward_closure,
)
from valim.errors import SizeLimit, ValimError
from valim.generators import rand_poset
from valim.order import NotAPoset, NotMonotone

from _oracles import all_upsets

SIER = FiniteSpace(("bot", "top"), (0b11, 0b10))
DIAMOND = space_from_covers(
    ("bot", "a", "b", "top"), [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")]
)

seeds = st.integers(min_value=0, max_value=10_000)


def test_check_space_reflexive_transitive_closure():
    sp = check_space(("x", "y", "z"), [("x", "y"), ("y", "z")],
                     transitive_closure=True)
    assert sp.leq("x", "z")
    assert sp.leq("x", "x")


def test_check_space_rejects_cycles():
    with pytest.raises(NotAPoset):
        check_space(("x", "y"), [("x", "y"), ("y", "x")])


def test_check_space_rejects_nontransitive_relation():
    # without closure the input must already be transitive
    with pytest.raises(NotAPoset):
        check_space(("x", "y", "z"), [("x", "y"), ("y", "z")])


def test_covers_generate_the_order():
    assert DIAMOND.leq("bot", "top")
    assert not DIAMOND.leq("a", "b")
    assert DIAMOND.up[DIAMOND.index["bot"]] == DIAMOND.full_mask


@given(seeds, st.integers(min_value=1, max_value=6))
def test_enumerate_opens_matches_powerset_filter(seed, n):
    sp = rand_poset(random.Random(seed), n)
    assert sorted(u.mask for u in enumerate_opens(sp)) == all_upsets(sp)


def test_enumerate_opens_respects_limit():
    anti = FiniteSpace(tuple("abcdef"), tuple(1 << i for i in range(6)))
    with pytest.raises(SizeLimit):
        list(enumerate_opens(anti, max_opens=10))


def test_upset_validation():
    with pytest.raises(ValimError):
        UpSet(SIER, 0b01)  # {bot} is not upward closed
    u = UpSet(SIER, 0b10)
    assert u.members == ("top",)
    assert "top" in u and "bot" not in u


def test_upward_closure_and_interior_are_adjoint_to_closure():
    u = upward_closure(DIAMOND, ["a"])
    assert set(u.members) == {"a", "top"}
    v = interior(DIAMOND, ["a", "top", "b"])
    assert set(v.members) == {"a", "b", "top"}
    labs = closure(DIAMOND, ["top"])
    assert set(labs) == {"bot", "a", "b", "top"}


@given(seeds, st.integers(min_value=1, max_value=6))
def test_interior_is_largest_open_inside(seed, n):
    rng = random.Random(seed)
    sp = rand_poset(rng, n)
    pts = [lab for lab in sp.labels if rng.random() < 0.5]
    mask = sp.mask_of(pts)
    got = interior(sp, pts).mask
    best = 0
    for m in all_upsets(sp):
        if m & ~mask == 0:
            best |= m
    assert got == best


def test_sobriety_every_irreducible_closed_has_unique_generic_point():
    for sp in (SIER, DIAMOND, rand_poset(random.Random(3), 6)):
        pairs = sobriety_witness(sp)
        assert len(pairs) == sp.n
        for labs, pt in pairs:
            assert pt in labs


def test_lift_adds_a_fresh_bottom():
    anti = FiniteSpace(("x", "y"), (0b01, 0b10))
    lifted = lift(anti)
    bot = lifted.bottom()
    assert bot is not None and bot not in ("x", "y")
    assert lifted.n == 3
    assert lifted.leq(bot, "x") and lifted.leq(bot, "y")


def test_product_space_order_is_componentwise():
    prod, projs = product_space([SIER, SIER])
    assert prod.n == 4
    assert prod.leq(("bot", "bot"), ("top", "top"))
    assert not prod.leq(("top", "bot"), ("bot", "top"))
    for k, p in enumerate(projs):
        for lab in prod.labels:
            assert p(lab) == lab[k]


def test_product_space_size_limit():
    big = FiniteSpace(tuple(range(20)), tuple(1 << i for i in range(20)))
    with pytest.raises(SizeLimit):
        product_space([big, big, big], max_points=100)


def test_subspace_restricts_the_order():
    sub, inc = subspace(DIAMOND, ["bot", "a", "top"])
    assert sub.leq("bot", "top") and sub.leq("a", "top")
    assert inc.source is sub and inc.target is DIAMOND
    for lab in sub.labels:
        assert inc(lab) == lab


def test_monotone_map_rejects_order_breakers():
    with pytest.raises(NotMonotone):
        MonotoneMap(SIER, SIER, (1, 0))  # swaps bot above top


def test_identity_and_compose():
    f = MonotoneMap(SIER, SIER, (0, 0))
    assert compose(f, identity_map(SIER)).graph == f.graph
    assert compose(identity_map(SIER), f).graph == f.graph
    assert identity_map(SIER).is_identity()


@given(seeds)
@settings(max_examples=30)
def test_preimage_of_open_is_open(seed):
    rng = random.Random(seed)
    sp = rand_poset(rng, 5)
    from valim.generators import rand_monotone_map

    f = rand_monotone_map(rng, sp, rand_poset(rng, 4))
    for m in all_upsets(f.target):
        assert f.source.is_upset(f.preimage_mask(m))
