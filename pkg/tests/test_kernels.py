"""The compiled backend must agree with the pure kernels bit for bit,
including which witness a failing scan reports first."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import valim._kernels as K
from valim._kernels import pure
from valim.generators import rand_poset

compiled = pytest.importorskip("valim._kernels._fastcore")

seeds = st.integers(min_value=0, max_value=100_000)


def lattice_of(seed, n):
    sp = rand_poset(random.Random(seed), n)
    opens = pure.enumerate_upsets(sp.up, sp.n, 1 << 20)
    return sp, opens


@given(seeds, st.integers(min_value=0, max_value=9))
@settings(max_examples=80)
def test_enumerate_upsets_agree(seed, n):
    sp = rand_poset(random.Random(seed), max(n, 1)) if n else None
    up = sp.up if sp else ()
    assert compiled.enumerate_upsets(list(up), len(up), 1 << 20) == \
        pure.enumerate_upsets(up, len(up), 1 << 20)


def test_enumerate_upsets_limit_exceeded_is_none():
    up = [1 << i for i in range(10)]  # antichain: 1024 up-sets
    assert compiled.enumerate_upsets(up, 10, 100) is None
    assert pure.enumerate_upsets(tuple(up), 10, 100) is None


@given(seeds, st.integers(min_value=1, max_value=7))
@settings(max_examples=80)
def test_scan_axioms_agree_on_lawful_tables(seed, n):
    rng = random.Random(seed)
    sp, opens = lattice_of(seed, n)
    weights = [rng.randint(0, 50) for _ in range(sp.n)]
    values = pure.eval_weights(weights, opens)
    assert compiled.scan_axioms(opens, values, sp.n) == \
        pure.scan_axioms(opens, values)


@given(seeds, st.integers(min_value=2, max_value=7))
@settings(max_examples=120)
def test_scan_axioms_agree_on_corrupted_tables(seed, n):
    # corrupt one entry; both backends must report the same first witness
    rng = random.Random(seed)
    sp, opens = lattice_of(seed, n)
    weights = [rng.randint(0, 9) for _ in range(sp.n)]
    values = pure.eval_weights(weights, opens)
    k = rng.randrange(len(values))
    values[k] = rng.randint(0, 60)
    assert compiled.scan_axioms(opens, values, sp.n) == \
        pure.scan_axioms(opens, values)


@given(seeds, st.integers(min_value=1, max_value=7))
@settings(max_examples=80)
def test_eval_weights_agree_including_infinity(seed, n):
    rng = random.Random(seed)
    sp, opens = lattice_of(seed, n)
    weights = [
        -1 if rng.random() < 0.2 else rng.randint(0, 1000)
        for _ in range(sp.n)
    ]
    assert compiled.eval_weights(weights, opens) == \
        pure.eval_weights(weights, opens)


def test_dispatch_falls_back_on_huge_values():
    # values beyond the int64 guard must take the pure path, not overflow
    opens = [0, 1]
    huge = 1 << 70
    assert K.scan_axioms(opens, [0, huge], 1) == (0, -1, -1)
    assert K.eval_weights([huge], opens, 1) == [0, huge]


def test_backend_reported():
    assert K.BACKEND in ("pure", "compiled")
