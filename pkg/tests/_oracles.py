"""Brute-force reference implementations the tests check against.

Everything here is written the slow, obvious way on purpose: filter all
2^n subsets, scan all opens, iterate bonds until nothing moves.  Keep
these independent of the package internals so a bug cannot hide in both
places at once.
"""

from fractions import Fraction

from valim import ExtRat, FiniteSpace, UpSet, Valuation
from valim.extreal import ZERO


def all_upsets(space: FiniteSpace):
    """Every upward-closed mask, by filtering the full power set."""
    out = []
    for m in range(1 << space.n):
        if all(not (m >> i) & 1 or (space.up[i] & ~m) == 0
               for i in range(space.n)):
            out.append(m)
    return out


def mask_value(nu: Valuation, mask: int) -> ExtRat:
    total = ZERO
    for i in range(nu.space.n):
        if (mask >> i) & 1:
            total = total + nu.weights[i]
    return total


def brute_first_differing(nu_a: Valuation, nu_b: Valuation):
    """Smallest open (by size, then mask) where the two tables differ."""
    assert nu_a.space == nu_b.space
    opens = sorted(all_upsets(nu_a.space), key=lambda m: (bin(m).count("1"), m))
    for m in opens:
        if mask_value(nu_a, m) != mask_value(nu_b, m):
            return m
    return None


def push_weights(f, nu: Valuation) -> Valuation:
    """Pushforward by summing the weights over each fiber."""
    weights = [ZERO] * f.target.n
    for i, w in enumerate(nu.weights):
        j = f.apply_index(i)
        weights[j] = weights[j] + w
    return Valuation(f.target, tuple(weights))


def brute_adjoint_mask(limit, i, u_mask: int) -> int:
    """Union of the level-i opens whose cylinders fit inside u."""
    level = limit.system.space(i)
    p = limit.projections[i]
    best = 0
    for v in all_upsets(level):
        pre = p.preimage_mask(v)
        if pre & ~u_mask == 0:
            best |= v
    return best


def brute_eventual_image(chain, i, horizon: int) -> int:
    """Intersection of bond images from above, iterated to the horizon."""
    space = chain.space(i)
    mask = space.full_mask
    for j in range(i + 1, horizon + 1):
        mask &= chain.bond(i, j).image_mask(chain.space(j).full_mask)
    return mask


def independent_joint(spaces, factor_vals):
    """Product-space valuation with coordinatewise multiplied weights.

    Only sound when all the factor weights are finite; the tests keep it
    that way.
    """
    from valim import product_space

    prod, _ = product_space(spaces)
    weights = []
    for lab in prod.labels:
        f = Fraction(1)
        for pos, point in enumerate(lab):
            w = factor_vals[pos].weights[spaces[pos].index[point]]
            f *= w.frac
        weights.append(ExtRat(f))
    return Valuation(prod, tuple(weights))


def modularity_holds(table, space) -> bool:
    """table: dict mask -> ExtRat over the full open lattice."""
    masks = sorted(table)
    for a in masks:
        for b in masks:
            if table[a] + table[b] != table[a | b] + table[a & b]:
                return False
    return True
