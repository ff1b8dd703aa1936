import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from valim import (
    AxiomViolation,
    ExtRat,
    FiniteSpace,
    MonotoneMap,
    NotSimple,
    NotSupported,
    TabulatedSetFunction,
    UpSet,
    Valuation,
    check_valuation,
    decompose_simple,
    first_differing_open,
    image_valuation,
    is_locally_finite,
    is_tight,
    mu_circ,
    nu_bullet,
    point_mass,
    restrict_to_open,
    support_check,
    valuations_equal,
    way_below,
    zero_valuation,
)
from valim.extreal import INF, ONE, ZERO
from valim.generators import rand_poset, rand_valuation

from _oracles import all_upsets, brute_first_differing, mask_value, push_weights

SIER = FiniteSpace(("bot", "top"), (0b11, 0b10))

seeds = st.integers(min_value=0, max_value=10_000)


def tabulate_full(nu):
    """dict mask -> value over the whole lattice, via the brute scanner."""
    return {m: mask_value(nu, m) for m in all_upsets(nu.space)}


def test_point_mass_and_zero():
    d = point_mass(SIER, "top")
    assert d.weights == (ZERO, ONE)
    assert d.evaluate(0b10) == ONE
    z = zero_valuation(SIER)
    assert z.total() == ZERO
    heavy = point_mass(SIER, "bot", ExtRat(3))
    assert heavy.total() == ExtRat(3)


def test_evaluate_accepts_upsets_and_masks():
    nu = Valuation(SIER, (ExtRat(1, 3), ExtRat(2, 3)))
    assert nu.evaluate(UpSet(SIER, 0b10)) == ExtRat(2, 3)
    assert nu.evaluate(0b11) == ONE
    assert nu.evaluate(0) == ZERO


@given(seeds, st.integers(min_value=1, max_value=6))
@settings(max_examples=60)
def test_simple_valuations_satisfy_the_axioms(seed, n):
    rng = random.Random(seed)
    sp = rand_poset(rng, n)
    nu = rand_valuation(rng, sp)
    table = tabulate_full(nu)
    assert table[0] == ZERO
    for a in table:
        for b in table:
            if a & ~b == 0:
                assert table[a] <= table[b]
            assert table[a] + table[b] == table[a | b] + table[a & b]


@given(seeds, st.integers(min_value=1, max_value=6))
@settings(max_examples=60)
def test_decompose_inverts_tabulation(seed, n):
    rng = random.Random(seed)
    sp = rand_poset(rng, n)
    nu = rand_valuation(rng, sp)
    got = decompose_simple(nu.tabulate())
    assert got.weights == nu.weights


def test_check_valuation_accepts_a_lawful_table():
    nu = Valuation(SIER, (ExtRat(1, 4), ExtRat(1, 2)))
    back = check_valuation(nu.tabulate())
    assert back.weights == nu.weights


def _full_table(space, values):
    masks = sorted(all_upsets(space), key=lambda m: (bin(m).count("1"), m))
    return TabulatedSetFunction(space, tuple(masks),
                                tuple(values[m] for m in masks))


def test_check_valuation_strictness_witness():
    vals = {0: ONE, 0b10: ONE, 0b11: ONE}
    with pytest.raises(AxiomViolation) as e:
        check_valuation(_full_table(SIER, vals))
    assert e.value.axiom == "strictness"


def test_check_valuation_monotonicity_witness():
    vals = {0: ZERO, 0b10: ONE, 0b11: ExtRat(1, 2)}
    with pytest.raises(AxiomViolation) as e:
        check_valuation(_full_table(SIER, vals))
    assert e.value.axiom == "monotonicity"
    u, v = e.value.witness
    assert u.mask & ~v.mask == 0
    # the table really does drop along that inclusion
    assert vals[u.mask] > vals[v.mask]


def test_check_valuation_modularity_witness():
    dia = FiniteSpace(("bot", "a", "b", "top"), (0b1111, 0b1010, 0b1100, 0b1000))
    vals = {m: ExtRat(bin(m).count("1"), 4) for m in all_upsets(dia)}
    vals[0b1110] = ExtRat(1, 2)  # modularity forces 3/4 here
    with pytest.raises(AxiomViolation) as e:
        check_valuation(_full_table(dia, vals))
    assert e.value.axiom == "modularity"
    u, v = e.value.witness
    assert vals[u.mask] + vals[v.mask] != vals[u.mask | v.mask] + vals[u.mask & v.mask]


def test_check_valuation_requires_the_whole_lattice():
    from valim.errors import ValimError

    t = TabulatedSetFunction(SIER, (0, 0b10), (ZERO, ONE))
    with pytest.raises(ValimError):
        check_valuation(t)


def test_masked_infinity_is_not_simple():
    # inf strictly above a finite point swallows its weight
    nu = Valuation(SIER, (ExtRat(1, 2), INF))
    table = nu.tabulate()
    with pytest.raises(NotSimple) as e:
        decompose_simple(table)
    assert "inf - inf" in str(e.value)


def test_unmasked_infinity_is_fine():
    # inf at the bottom shadows nobody
    nu = Valuation(SIER, (INF, ExtRat(1, 2)))
    got = decompose_simple(nu.tabulate())
    assert got.weights == nu.weights


@given(seeds, st.integers(min_value=1, max_value=5))
@settings(max_examples=60)
def test_masked_table_dichotomy(seed, n):
    """decompose raises NotSimple exactly when some point is shadowed by
    an infinite weight strictly above it."""
    rng = random.Random(seed)
    sp = rand_poset(rng, n)
    nu = rand_valuation(rng, sp, inf_prob=0.3)
    shadowed = any(
        not nu.weights[y].is_finite and y != x and (sp.up[x] >> y) & 1
        for x in range(sp.n)
        for y in range(sp.n)
    )
    if shadowed:
        with pytest.raises(NotSimple):
            decompose_simple(nu.tabulate())
    else:
        assert decompose_simple(nu.tabulate()).weights == nu.weights


@given(seeds, st.integers(min_value=1, max_value=6))
@settings(max_examples=60)
def test_first_differing_open_matches_brute_scan(seed, n):
    rng = random.Random(seed)
    sp = rand_poset(rng, n)
    nu_a = rand_valuation(rng, sp, inf_prob=0.2)
    nu_b = rand_valuation(rng, sp, inf_prob=0.2)
    brute = brute_first_differing(nu_a, nu_b)
    got = first_differing_open(nu_a, nu_b)
    if brute is None:
        assert got is None
        assert valuations_equal(nu_a, nu_b)
    else:
        assert got is not None
        # candidate scan may land on a different open; both must disagree
        assert nu_a.evaluate(got.mask) != nu_b.evaluate(got.mask)
        assert not valuations_equal(nu_a, nu_b)


def test_equal_tables_with_different_weights():
    # a finite weight hidden strictly below an infinite point mass
    nu_a = Valuation(SIER, (ExtRat(1, 2), INF))
    nu_b = Valuation(SIER, (ExtRat(1, 3), INF))
    assert valuations_equal(nu_a, nu_b)
    assert nu_a.weights != nu_b.weights


@given(seeds, st.integers(min_value=2, max_value=6))
@settings(max_examples=40)
def test_image_valuation_matches_fiber_sums(seed, n):
    rng = random.Random(seed)
    src = rand_poset(rng, n)
    dst = rand_poset(rng, max(1, n - 1), prefix="y")
    from valim.generators import rand_monotone_map

    f = rand_monotone_map(rng, src, dst)
    nu = rand_valuation(rng, src)
    assert image_valuation(f, nu).weights == push_weights(f, nu).weights


def test_image_valuation_rejects_wrong_space():
    from valim.errors import ValimError

    f = MonotoneMap(SIER, SIER, (0, 1))
    other = FiniteSpace(("p",), (1,))
    with pytest.raises(ValimError):
        image_valuation(f, Valuation(other, (ONE,)))


def test_restrict_to_open():
    nu = Valuation(SIER, (ExtRat(1, 3), ExtRat(2, 3)))
    r = restrict_to_open(nu, UpSet(SIER, 0b10))
    assert r.space.labels == ("top",)
    assert r.weights == (ExtRat(2, 3),)


def test_support_check_accepts_the_support():
    nu = Valuation(SIER, (ZERO, ExtRat(2, 3)))
    res = support_check(nu, ["top"])
    assert res.space.labels == ("top",)
    assert res.valuation.weights == (ExtRat(2, 3),)
    # mu(U cap A) = nu(U) on every open
    assert res.valuation.evaluate(0b1) == nu.evaluate(0b10)


def test_support_check_witness_pair():
    nu = Valuation(SIER, (ExtRat(1, 3), ExtRat(2, 3)))
    with pytest.raises(NotSupported) as e:
        support_check(nu, ["top"])
    u, v = e.value.witness
    assert u.mask & nu.space.mask_of(["top"]) == v.mask & nu.space.mask_of(["top"])
    assert nu.evaluate(u.mask) != nu.evaluate(v.mask)


def test_support_check_with_masking_infinity():
    # the hidden 1/2 at bot is invisible: supported on {top} regardless
    nu = Valuation(SIER, (ExtRat(1, 2), INF))
    res = support_check(nu, ["top"])
    assert res.valuation.weights == (INF,)


@given(seeds, st.integers(min_value=1, max_value=5))
@settings(max_examples=40)
def test_support_check_on_weighted_points_roundtrips(seed, n):
    rng = random.Random(seed)
    sp = rand_poset(rng, n)
    nu = rand_valuation(rng, sp)
    pts = nu.support_points()
    res = support_check(nu, pts)
    back = [ZERO] * sp.n
    for lab, w in zip(res.space.labels, res.valuation.weights):
        back[sp.index[lab]] = w
    assert valuations_equal(nu, Valuation(sp, tuple(back)))


def test_nu_bullet_equals_table_on_upsets():
    nu = Valuation(SIER, (ExtRat(1, 4), ExtRat(1, 2)))
    nb = nu_bullet(nu)
    for m in nb.masks:
        assert nb.lookup(m) == nu.evaluate(m)


def test_mu_circ_recovers_valuation_from_nu_bullet():
    rng = random.Random(5)
    sp = rand_poset(rng, 5)
    nu = rand_valuation(rng, sp)
    comp = mu_circ(nu_bullet(nu))
    for m in comp.masks:
        assert comp.lookup(m) == nu.evaluate(m)


@given(seeds, st.integers(min_value=1, max_value=5))
@settings(max_examples=40)
def test_simple_valuations_are_tight(seed, n):
    rng = random.Random(seed)
    sp = rand_poset(rng, n)
    nu = rand_valuation(rng, sp, inf_prob=0.15)
    rep = is_tight(nu)
    assert rep.verdict
    assert rep.composite_matches
    # every recorded witness is a compact (= up-set) inside its open
    for (u, r), q in rep.witnesses.items():
        assert q & ~u == 0
        assert way_below(r, nu.evaluate(u))


def test_tightness_witness_lookup():
    nu = Valuation(SIER, (ExtRat(1, 3), ExtRat(2, 3)))
    rep = is_tight(nu)
    q = rep.witness(UpSet(SIER, 0b11), ExtRat(2, 3))
    assert q is not None and q.mask & ~0b11 == 0
    assert nu.evaluate(q.mask) >= ExtRat(2, 3)


def test_local_finiteness_flags_infinite_opens():
    nu = Valuation(SIER, (ZERO, INF))
    rep = is_locally_finite(nu)
    assert not rep.verdict
    fin = is_locally_finite(Valuation(SIER, (ONE, ONE)))
    assert fin.verdict


def test_tabulated_set_function_lookup_and_items():
    t = Valuation(SIER, (ONE, ZERO)).tabulate()
    assert t.lookup(0) == ZERO
    assert dict(t.items())[0b11] == ONE
    with pytest.raises(Exception):
        t.lookup(0b01)  # not an up-set, never tabulated
