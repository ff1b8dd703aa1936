"""Pure-Python bitmask kernels.

Semantics here are the reference; the compiled backend must agree bit for
bit, including which witness a scan reports first.  Subsets of a space with
n points are Python ints with bit i standing for point i.  Values are
arbitrary-precision non-negative ints with -1 standing for infinity.
"""

__all__ = ["enumerate_upsets", "scan_axioms", "eval_weights"]


def enumerate_upsets(up, n, limit):
    """All upward-closed subsets as masks, sorted by (popcount, mask).

    up[i] is the mask of weak upper bounds of point i.  Output-sensitive
    DFS: cost is O(n * count), never O(2^n).  Returns None when more than
    `limit` up-sets exist.
    """
    if n == 0:
        return [0]
    # maximal points first, so a point's strict upper bounds are decided
    # before the point itself
    order = sorted(range(n), key=lambda i: (up[i].bit_count(), i))
    above = [up[i] & ~(1 << i) for i in range(n)]
    out = []

    def rec(k, mask):
        if len(out) > limit:
            return
        if k == n:
            out.append(mask)
            return
        e = order[k]
        rec(k + 1, mask)
        if above[e] & ~mask == 0:
            rec(k + 1, mask | (1 << e))

    rec(0, 0)
    if len(out) > limit:
        return None
    out.sort(key=lambda m: (m.bit_count(), m))
    return out


def _le(a, b):
    # -1 is infinity
    if b == -1:
        return True
    if a == -1:
        return False
    return a <= b


def _add(a, b):
    if a == -1 or b == -1:
        return -1
    return a + b


def scan_axioms(opens, values):
    """Check strictness, monotonicity and modularity over a full table.

    `opens` must be sorted by (popcount, mask) with `values` parallel.
    Returns (code, i, j): code 0 = all laws hold, 1 = strictness fails at
    entry i, 2 = monotonicity fails on the pair (i, j), 3 = modularity
    fails on the pair (i, j), 4 = the family is not closed under union or
    intersection at the pair (i, j).  The first violation in scan order is
    the one reported.
    """
    idx = {m: k for k, m in enumerate(opens)}
    k0 = idx.get(0)
    if k0 is None or values[k0] != 0:
        return (1, 0 if k0 is None else k0, -1)
    m = len(opens)
    for i in range(m):
        mi = opens[i]
        vi = values[i]
        for j in range(i + 1, m):
            mj = opens[j]
            if mi & ~mj == 0:
                # comparable pair: modularity is automatic, order matters
                if not _le(vi, values[j]):
                    return (2, i, j)
                continue
            ku = idx.get(mi | mj)
            kw = idx.get(mi & mj)
            if ku is None or kw is None:
                return (4, i, j)
            if _add(values[ku], values[kw]) != _add(vi, values[j]):
                return (3, i, j)
    return (0, -1, -1)


def eval_weights(weights, opens):
    """Table of a weighted sum over each mask; weight -1 makes a value -1."""
    out = []
    for m in opens:
        s = 0
        mm = m
        while mm:
            b = mm & -mm
            w = weights[b.bit_length() - 1]
            if w < 0:
                s = -1
                break
            s += w
            mm ^= b
        out.append(s)
    return out
