"""Projective systems of finite T0 spaces and their limits.

A system assigns a space to every index of a directed order and a bond
map to every comparable pair, contravariantly: bond(i, j) maps the space
at the higher index j onto the space at the lower index i, with identity
bonds on the diagonal and composition along chains.

Three presentations:

* PosetSystem: an explicit finite directed index poset, all data given.
* PrefixChain: an omega-chain that is constant beyond a finite prefix;
  everything about it is exact because the tail is the identity.
* LazyChain: an omega-chain given by rules and probed up to a depth
  bound; answers that depend on the unseen tail carry an explicit
  exact/upper-bound status and are never silently truncated.

The canonical limit is the space of threads (tuples matching under all
bonds) with componentwise order; for a PrefixChain it is presented as the
last prefix space itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .errors import SizeLimit, ValimError
from .order import (
    DEFAULT_MAX_OPENS,
    DEFAULT_MAX_POINTS,
    EpPair,
    FiniteSpace,
    MonotoneMap,
    UpSet,
    compose,
    identity_map,
)
from .valuation import Valuation, first_differing_open, image_valuation

__all__ = [
    "BondLawViolation",
    "Incompatible",
    "EpLawViolation",
    "NotAProjection",
    "NotDirected",
    "InconclusiveAtDepth",
    "PosetSystem",
    "PrefixChain",
    "LazyChain",
    "ValuedSystem",
    "LimitSpace",
    "EpSystem",
    "CylinderOpen",
    "EventualImage",
    "SteenrodResult",
    "CompactFamily",
    "check_system",
    "check_compatibility",
    "materialize_limit",
    "upper_adjoint",
    "embedding_from_projection",
    "check_ep_system",
    "limit_ep_structure",
    "verify_ep_limit_laws",
    "cylinder_meet",
    "cylinder_join",
    "cylinders_equal",
    "eventual_images",
    "steenrod_nonempty",
    "find_dominating_level",
]


class BondLawViolation(ValimError):
    def __init__(self, law, witness):
        self.law = law
        self.witness = witness
        super().__init__(f"bond law {law} fails at {witness!r}")


class Incompatible(ValimError):
    def __init__(self, i, j, witness):
        self.pair = (i, j)
        self.witness = witness
        super().__init__(
            f"marginals at {i} and {j} disagree on {witness.members}"
        )


class EpLawViolation(ValimError):
    def __init__(self, law, witness):
        self.law = law
        self.witness = witness
        super().__init__(f"ep law {law} fails at {witness!r}")


class NotAProjection(ValimError):
    """The map admits no lower adjoint at the witness point."""

    def __init__(self, point, candidates):
        self.point = point
        self.candidates = candidates
        super().__init__(
            f"no least preimage point above {point!r}; minimal candidates "
            f"{candidates!r}"
        )


class NotDirected(ValimError):
    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"index pair {pair!r} has no upper bound")


class InconclusiveAtDepth(ValimError):
    def __init__(self, what, depth):
        self.what = what
        self.depth = depth
        super().__init__(f"{what}: not decided within depth {depth}")


@dataclass(frozen=True)
class PosetSystem:
    """A projective system over an explicit finite directed index poset.

    Indices are the points of index_poset in canonical order; spaces[k]
    sits at index k.  bonds maps every comparable index pair (i, j) with
    i below j to the bond X_j -> X_i; missing non-cover pairs are filled
    in by composing along covers (check_system then confirms the family
    is composition-consistent, so the filling is sound).
    """

    index_poset: FiniteSpace
    spaces: tuple
    bonds: dict = field(hash=False)

    kind = "poset"

    def __post_init__(self):
        n = self.index_poset.n
        if n == 0:
            raise ValimError("the index poset must be nonempty")
        if len(self.spaces) != n:
            raise ValimError("one space per index required")
        for i in range(n):
            for j in range(n):
                if self.index_poset.up[i] & self.index_poset.up[j] == 0:
                    raise NotDirected(
                        (self.index_poset.labels[i], self.index_poset.labels[j])
                    )
        object.__setattr__(self, "bonds", dict(self.bonds))
        self._complete_bonds()

    def _complete_bonds(self):
        idx = self.index_poset
        for i in range(idx.n):
            for j in range(idx.n):
                if (idx.up[i] >> j) & 1:
                    self._derive_bond(i, j)

    def _derive_bond(self, i, j) -> MonotoneMap:
        if (i, j) in self.bonds:
            return self.bonds[(i, j)]
        if i == j:
            m = identity_map(self.spaces[i])
        else:
            idx = self.index_poset
            for k in range(idx.n):
                if (k, j) in self.bonds and k != j \
                        and (idx.up[i] >> k) & 1 and (idx.up[k] >> j) & 1:
                    m = compose(self._derive_bond(i, k), self.bonds[(k, j)])
                    break
            else:
                raise BondLawViolation(
                    "missing bond",
                    (idx.labels[i], idx.labels[j]),
                )
        self.bonds[(i, j)] = m
        return m

    def indices(self):
        return range(self.index_poset.n)

    def index_leq(self, i, j) -> bool:
        return bool((self.index_poset.up[i] >> j) & 1)

    def designated_ub(self, i, j) -> int:
        """The chosen upper bound of an index pair: least canonical label."""
        both = self.index_poset.up[i] & self.index_poset.up[j]
        return (both & -both).bit_length() - 1

    def top_index(self) -> int:
        # a finite directed poset has a greatest element
        for i in self.indices():
            if self.index_poset.down[i] == self.index_poset.full_mask:
                return i
        raise NotDirected(self.index_poset.labels)

    def space(self, i) -> FiniteSpace:
        return self.spaces[i]

    def bond(self, i, j) -> MonotoneMap:
        if not self.index_leq(i, j):
            raise ValimError(f"indices not comparable: {i}, {j}")
        return self.bonds[(i, j)]


@dataclass(frozen=True)
class PrefixChain:
    """An omega-chain that is the identity beyond its explicit prefix.

    steps[k] is the bond from level k+1 down to level k.  Level n for
    n beyond the prefix is the last prefix space, bonded by identities,
    which is what makes every limit-level question exact.
    """

    spaces: tuple
    steps: tuple

    kind = "prefix"

    def __post_init__(self):
        if not self.spaces:
            raise ValimError("a chain needs at least one level")
        if len(self.steps) != len(self.spaces) - 1:
            raise ValimError("need exactly one step map per adjacent pair")

    @property
    def last(self) -> int:
        return len(self.spaces) - 1

    def indices(self):
        return range(self.last + 1)

    def index_leq(self, i, j) -> bool:
        return i <= j

    def designated_ub(self, i, j) -> int:
        return max(i, j)

    def top_index(self) -> int:
        return self.last

    def space(self, i) -> FiniteSpace:
        return self.spaces[min(i, self.last)]

    def bond(self, i, j) -> MonotoneMap:
        if i > j:
            raise ValimError(f"indices not comparable: {i}, {j}")
        lo, hi = min(i, self.last), min(j, self.last)
        f = identity_map(self.spaces[hi])
        for k in range(hi - 1, lo - 1, -1):
            f = compose(self.steps[k], f)
        return f


@dataclass
class LazyChain:
    """An omega-chain given by rules, probed up to a fixed depth.

    space_rule(n) yields level n; step_rule(n) yields the bond from level
    n+1 down to level n.  Rules must be pure; results are memoized.
    Nothing beyond `depth` is ever consulted, and operations that would
    need the tail report upper bounds or raise InconclusiveAtDepth.
    """

    space_rule: object
    step_rule: object
    depth: int

    kind = "lazy"

    def __post_init__(self):
        if self.depth < 0:
            raise ValimError("depth must be non-negative")
        self._spaces = {}
        self._steps = {}

    @property
    def last(self) -> int:
        return self.depth

    def indices(self):
        return range(self.depth + 1)

    def index_leq(self, i, j) -> bool:
        return i <= j

    def designated_ub(self, i, j) -> int:
        return max(i, j)

    def space(self, i) -> FiniteSpace:
        if i > self.depth:
            raise InconclusiveAtDepth(f"space at level {i}", self.depth)
        if i not in self._spaces:
            self._spaces[i] = self.space_rule(i)
        return self._spaces[i]

    def step(self, k) -> MonotoneMap:
        if k + 1 > self.depth:
            raise InconclusiveAtDepth(f"step at level {k}", self.depth)
        if k not in self._steps:
            m = self.step_rule(k)
            if m.source != self.space(k + 1) or m.target != self.space(k):
                raise BondLawViolation("step alignment", k)
            self._steps[k] = m
        return self._steps[k]

    def bond(self, i, j) -> MonotoneMap:
        if i > j:
            raise ValimError(f"indices not comparable: {i}, {j}")
        f = identity_map(self.space(j))
        for k in range(j - 1, i - 1, -1):
            f = compose(self.step(k), f)
        return f


def check_system(sys):
    """Validate bond laws on the verified range; returns the system.

    Poset systems get the full treatment: identity bonds on the diagonal,
    alignment, and composition over every index triple.  Chains store
    only their step maps, so composition holds by construction and only
    alignment needs checking.
    """
    if sys.kind == "poset":
        for i in sys.indices():
            b = sys.bond(i, i)
            if b.source != sys.space(i) or not b.is_identity():
                raise BondLawViolation(
                    "identity", sys.index_poset.labels[i]
                )
            for j in sys.indices():
                if not sys.index_leq(i, j):
                    continue
                b = sys.bond(i, j)
                if b.source != sys.space(j) or b.target != sys.space(i):
                    raise BondLawViolation(
                        "alignment",
                        (sys.index_poset.labels[i], sys.index_poset.labels[j]),
                    )
                for k in sys.indices():
                    if not sys.index_leq(j, k):
                        continue
                    left = compose(sys.bond(i, j), sys.bond(j, k))
                    if left != sys.bond(i, k):
                        raise BondLawViolation(
                            "composition",
                            (
                                sys.index_poset.labels[i],
                                sys.index_poset.labels[j],
                                sys.index_poset.labels[k],
                            ),
                        )
    elif sys.kind == "prefix":
        for k, step in enumerate(sys.steps):
            if step.source != sys.spaces[k + 1] or step.target != sys.spaces[k]:
                raise BondLawViolation("step alignment", k)
    elif sys.kind == "lazy":
        for k in range(sys.depth):
            sys.step(k)
    else:
        raise ValimError(f"unknown system kind {sys.kind!r}")
    return sys


@dataclass(frozen=True)
class ValuedSystem:
    """A system with one valuation per verified index."""

    system: object
    valuations: tuple

    def __post_init__(self):
        idxs = list(self.system.indices())
        if len(self.valuations) != len(idxs):
            raise ValimError("one valuation per index required")
        for i in idxs:
            if self.valuations[i].space != self.system.space(i):
                raise ValimError(f"valuation at {i} lives on the wrong space")

    def val(self, i) -> Valuation:
        if self.system.kind == "prefix":
            return self.valuations[min(i, self.system.last)]
        return self.valuations[i]


def check_compatibility(vs: ValuedSystem) -> ValuedSystem:
    """Exact marginal compatibility over every verified index pair.

    Pushing the valuation at j down the bond must reproduce the
    valuation at i as a set function on every open; a differing open is
    recovered as the Incompatible witness when it fails.
    """
    sys = vs.system
    for i in sys.indices():
        for j in sys.indices():
            if not sys.index_leq(i, j):
                continue
            pushed = image_valuation(sys.bond(i, j), vs.val(j))
            w = first_differing_open(vs.val(i), pushed)
            if w is not None:
                raise Incompatible(i, j, w)
    return vs


@dataclass(frozen=True)
class LimitSpace:
    """A materialized canonical limit: carrier plus all projections."""

    system: object
    space: FiniteSpace
    projections: tuple

    def projection(self, i) -> MonotoneMap:
        if self.system.kind == "prefix":
            return self.projections[min(i, self.system.last)]
        return self.projections[i]


def materialize_limit(sys, max_points: int = DEFAULT_MAX_POINTS) -> LimitSpace:
    """Build the limit space of threads.

    PrefixChain: the last prefix level is the limit (identity tail), its
    projections are the bonds down from there.  PosetSystem: a finite
    directed index has a top, and a thread is determined by (and free at)
    its top component, so the carrier is the top space relabeled with the
    full thread tuples; this keeps the carrier size at the top space
    rather than the product of all levels.  LazyChain has no materialized
    limit; use cylinder-level operations instead.
    """
    check_system(sys)
    if sys.kind == "prefix":
        top = sys.last
        projections = tuple(sys.bond(i, top) for i in sys.indices())
        return LimitSpace(sys, sys.space(top), projections)
    if sys.kind != "poset":
        raise ValimError("only poset systems and prefix chains materialize")
    top = sys.top_index()
    xt = sys.space(top)
    if xt.n > max_points:
        raise SizeLimit("limit points", max_points)
    idxs = list(sys.indices())
    labels = tuple(
        tuple(sys.bond(i, top)(xt.labels[x]) for i in idxs)
        for x in range(xt.n)
    )
    carrier = FiniteSpace(labels, xt.up)
    projections = tuple(
        MonotoneMap(carrier, sys.space(i), sys.bond(i, top).graph)
        for i in idxs
    )
    return LimitSpace(sys, carrier, projections)


def upper_adjoint(limit: LimitSpace, i, u: UpSet) -> UpSet:
    """Largest open V at index i whose cylinder sits inside u.

    Satisfies the Galois law: preimage(V') inside u iff V' inside V.
    """
    if u.space != limit.space:
        raise ValimError("the open must live on the limit")
    p = limit.projection(i)
    xi = p.target
    out = 0
    for x in range(xi.n):
        if p.preimage_mask(xi.up[x]) & ~u.mask == 0:
            out |= 1 << x
    return UpSet(xi, out)


def embedding_from_projection(p: MonotoneMap) -> EpPair:
    """Recover the embedding from a projection, when it exists.

    e(x) must be the least point of the preimage of the up-set of x, and
    p(e(x)) must land back on x; otherwise p is not the upper half of an
    ep-pair and the witness point with its minimal candidates is
    reported.
    """
    big, small = p.source, p.target
    graph = []
    for x in range(small.n):
        sx = p.preimage_mask(small.up[x])
        least = None
        for y in range(big.n):
            if (sx >> y) & 1 and sx & ~big.up[y] == 0:
                least = y
                break
        if least is None or p.graph[least] != x:
            minimals = [
                big.labels[y]
                for y in range(big.n)
                if (sx >> y) & 1 and big.down[y] & sx == (1 << y)
            ]
            raise NotAProjection(small.labels[x], tuple(minimals))
        graph.append(least)
    e = MonotoneMap(small, big, tuple(graph))
    return EpPair(p, e)


@dataclass(frozen=True)
class EpSystem:
    """A projective system whose bonds are all projections of ep-pairs."""

    system: object

    @cached_property
    def _cache(self) -> dict:
        return {}

    def pair(self, i, j) -> EpPair:
        key = (i, j)
        if key not in self._cache:
            self._cache[key] = embedding_from_projection(self.system.bond(i, j))
        return self._cache[key]

    def embedding(self, i, j) -> MonotoneMap:
        return self.pair(i, j).embedding


def check_ep_system(sys) -> EpSystem:
    """Verify the ep laws across the system.

    Every bond must admit an embedding; embeddings must be the identity
    on the diagonal and compose upward the way bonds compose downward.
    """
    check_system(sys)
    eps = EpSystem(sys)
    idxs = list(sys.indices())
    for i in idxs:
        if not eps.embedding(i, i).is_identity():
            raise EpLawViolation("identity embedding", i)
    for i in idxs:
        for j in idxs:
            if not (sys.index_leq(i, j) and i != j):
                continue
            eps.pair(i, j)  # EpPair construction validates both laws
            for k in idxs:
                if not (sys.index_leq(j, k) and j != k):
                    continue
                left = compose(eps.embedding(j, k), eps.embedding(i, j))
                if left != eps.embedding(i, k):
                    raise EpLawViolation("embedding composition", (i, j, k))
    return eps


def limit_ep_structure(limit: LimitSpace, eps: EpSystem) -> tuple:
    """Ep-pairs between each level and the limit.

    The embedding of a level point is assembled componentwise: its j-th
    coordinate is the bond image of its embedding into any common upper
    index.  The designated upper bound fixes the choice; the result does
    not depend on it, which the ep-law validation below re-confirms.
    """
    sys = limit.system
    if sys is not eps.system and sys != eps.system:
        raise ValimError("ep structure belongs to a different system")
    out = []
    if sys.kind == "prefix":
        top = sys.last
        for i in sys.indices():
            e = eps.embedding(i, top)
            out.append(EpPair(limit.projection(i), e))
        return tuple(out)
    if sys.kind != "poset":
        raise ValimError("limit ep structure needs a materialized limit")
    carrier = limit.space
    thread_index = {lab: t for t, lab in enumerate(carrier.labels)}
    idxs = list(sys.indices())
    for i in idxs:
        xi = sys.space(i)
        graph = []
        for x in range(xi.n):
            components = []
            for j in idxs:
                k = sys.designated_ub(i, j)
                lifted = eps.embedding(i, k)(xi.labels[x])
                components.append(sys.bond(j, k)(lifted))
            lab = tuple(components)
            t = thread_index.get(lab)
            if t is None:
                raise EpLawViolation("embedded point is not a thread", lab)
            graph.append(t)
        e = MonotoneMap(xi, carrier, tuple(graph))
        out.append(EpPair(limit.projection(i), e))
    return tuple(out)


def verify_ep_limit_laws(limit: LimitSpace, pairs,
                         max_opens: int = DEFAULT_MAX_OPENS):
    """Assert the limit-level ep laws.

    (a) embeddings factor: e_j after e_ij equals e_i; (b) the round trips
    e_i p_i sit below the identity, increase with the index, and reach
    every thread at some index; (c) their preimages of any open increase
    to that open.  Raises EpLawViolation with a witness.
    """
    sys = limit.system
    idxs = list(sys.indices())
    eps = EpSystem(sys)
    for i in idxs:
        for j in idxs:
            if not (sys.index_leq(i, j) and i != j):
                continue
            left = compose(pairs[j].embedding, eps.embedding(i, j))
            if left != pairs[i].embedding:
                raise EpLawViolation("embedding factorization", (i, j))
    carrier = limit.space
    rounds = [compose(pairs[i].embedding, limit.projection(i)) for i in idxs]
    for t in range(carrier.n):
        seen_top = False
        for i in idxs:
            ri = rounds[i].graph[t]
            if not (carrier.up[ri] >> t) & 1:
                raise EpLawViolation(
                    "round trip not below identity", (i, carrier.labels[t])
                )
            if ri == t:
                seen_top = True
            for j in idxs:
                if sys.index_leq(i, j):
                    rj = rounds[j].graph[t]
                    if not (carrier.up[ri] >> rj) & 1:
                        raise EpLawViolation(
                            "round trips not increasing",
                            (i, j, carrier.labels[t]),
                        )
        if not seen_top:
            raise EpLawViolation("thread not reached", carrier.labels[t])
    for u in carrier.open_masks(max_opens):
        union = 0
        for i in idxs:
            m = rounds[i].preimage_mask(u)
            union |= m
            for j in idxs:
                if sys.index_leq(i, j) and m & ~rounds[j].preimage_mask(u):
                    raise EpLawViolation(
                        "preimages not increasing", (i, j, carrier.points_of(u))
                    )
        if union != u:
            raise EpLawViolation(
                "preimages do not exhaust the open", carrier.points_of(u)
            )


@dataclass(frozen=True)
class CylinderOpen:
    """A basic open of the limit: the cylinder over an open at one level."""

    system: object
    level: int
    base: UpSet

    def __post_init__(self):
        if self.base.space != self.system.space(self.level):
            raise ValimError("base does not live at the stated level")

    def denotation(self, limit: LimitSpace) -> UpSet:
        if limit.system is not self.system and limit.system != self.system:
            raise ValimError("cylinder belongs to a different system")
        return limit.projection(self.level).preimage(self.base)

    def at_level(self, j) -> "CylinderOpen":
        """The same cylinder re-based at a higher level."""
        sys = self.system
        if not sys.index_leq(self.level, j):
            raise ValimError("can only push a cylinder upward")
        pulled = sys.bond(self.level, j).preimage(self.base)
        return CylinderOpen(sys, j, pulled)

    def normalize(self) -> "CylinderOpen":
        """Chains: re-express at the least level that can carry the base.

        Descending one step is possible exactly when the largest lower
        base pulls back onto the current base; greedy descent therefore
        finds the least expressible level.  Not a complete invariant:
        distinct bases at one level can still denote the same open when
        the projections are not surjective, so equality of cylinders is
        decided by cylinders_equal, not by comparing normal forms.
        Poset-indexed cylinders are returned unchanged.
        """
        sys = self.system
        if sys.kind == "poset":
            return self
        level, mask = self.level, self.base.mask
        while level > 0:
            step = _chain_step(sys, level - 1)
            below = step.target
            cand = 0
            for x in range(below.n):
                if step.preimage_mask(below.up[x]) & ~mask == 0:
                    cand |= 1 << x
            if step.preimage_mask(cand) != mask:
                break
            level, mask = level - 1, cand
        return CylinderOpen(sys, level, UpSet(sys.space(level), mask))


def _chain_step(sys, k) -> MonotoneMap:
    if sys.kind == "prefix":
        if k >= sys.last:
            return identity_map(sys.space(sys.last))
        return sys.steps[k]
    return sys.step(k)


def _common_level(c1: CylinderOpen, c2: CylinderOpen) -> int:
    if c1.system is not c2.system and c1.system != c2.system:
        raise ValimError("cylinders belong to different systems")
    return c1.system.designated_ub(c1.level, c2.level)


def cylinder_meet(c1: CylinderOpen, c2: CylinderOpen) -> CylinderOpen:
    k = _common_level(c1, c2)
    a, b = c1.at_level(k), c2.at_level(k)
    out = CylinderOpen(c1.system, k, a.base & b.base)
    return out.normalize()


def cylinder_join(c1: CylinderOpen, c2: CylinderOpen) -> CylinderOpen:
    k = _common_level(c1, c2)
    a, b = c1.at_level(k), c2.at_level(k)
    out = CylinderOpen(c1.system, k, a.base | b.base)
    return out.normalize()


def cylinders_equal(c1: CylinderOpen, c2: CylinderOpen,
                    max_points: int = DEFAULT_MAX_POINTS) -> bool:
    """Equality as opens of the limit.

    Bases are compared at a common level, restricted to the points the
    limit actually projects onto.  Exact for poset systems and prefix
    chains.  For lazy chains only a superset of that image is known, so
    agreement on it certifies equality but disagreement is inconclusive.
    """
    k = _common_level(c1, c2)
    a, b = c1.at_level(k).base.mask, c2.at_level(k).base.mask
    sys = c1.system
    img = eventual_images(sys, k)
    if a & img.mask == b & img.mask:
        return True
    if img.exact:
        return False
    raise InconclusiveAtDepth("cylinder equality", sys.depth)


@dataclass(frozen=True)
class EventualImage:
    """What survives at a level from far up the system.

    Images of monotone maps need not be upward closed, so this is a bare
    point set.  exact=True only when the tail is certified (prefix
    chains, poset systems); lazy probes yield upper bounds.
    """

    space: FiniteSpace
    mask: int
    exact: bool

    @property
    def members(self) -> tuple:
        return self.space.points_of(self.mask)


def eventual_images(sys, i, depth=None) -> EventualImage:
    if sys.kind == "prefix":
        top = sys.last
        if i >= top:
            return EventualImage(sys.space(i), sys.space(i).full_mask, True)
        img = sys.bond(i, top).image_mask(sys.space(top).full_mask)
        return EventualImage(sys.space(i), img, True)
    if sys.kind == "poset":
        top = sys.top_index()
        img = sys.bond(i, top).image_mask(sys.space(top).full_mask)
        return EventualImage(sys.space(i), img, True)
    limit_depth = sys.depth if depth is None else min(depth, sys.depth)
    if i > limit_depth:
        raise InconclusiveAtDepth(f"eventual image at {i}", sys.depth)
    img = sys.bond(i, limit_depth).image_mask(sys.space(limit_depth).full_mask)
    return EventualImage(sys.space(i), img, False)


@dataclass(frozen=True)
class SteenrodResult:
    """Either a witness thread (labels per verified index) or the first
    index whose space is empty."""

    thread: tuple | None
    empty_at: object | None

    @property
    def nonempty(self) -> bool:
        return self.thread is not None


def steenrod_nonempty(sys, max_points: int = DEFAULT_MAX_POINTS) -> SteenrodResult:
    """Produce a point of the limit whenever every level is nonempty.

    Prefix chains use selection through the exact eventual images: pick
    any surviving point at the bottom, then repeatedly a surviving
    preimage one level up; survival guarantees the next choice exists.
    Poset systems materialize (their directed index has a top, so the
    limit is the top space in disguise).
    """
    check_system(sys)
    for i in sys.indices():
        if sys.space(i).n == 0:
            label = (sys.index_poset.labels[i] if sys.kind == "poset" else i)
            return SteenrodResult(None, label)
    if sys.kind == "prefix":
        imgs = [eventual_images(sys, i).mask for i in sys.indices()]
        thread = []
        prev = None
        for i in sys.indices():
            xi = sys.space(i)
            allowed = imgs[i]
            if prev is not None:
                allowed &= _chain_step(sys, i - 1).preimage_mask(1 << prev)
            if allowed == 0:
                raise ValimError("selection through eventual images failed")
            prev = (allowed & -allowed).bit_length() - 1
            thread.append(xi.labels[prev])
        return SteenrodResult(tuple(thread), None)
    if sys.kind != "poset":
        # lazy chain, no empty level in sight: the tail stays unknown
        raise InconclusiveAtDepth("thread existence", sys.depth)
    limit = materialize_limit(sys, max_points)
    if limit.space.n == 0:
        raise ValimError(
            "empty limit although every level is nonempty; bond data broken"
        )
    t = limit.space.labels[0]
    return SteenrodResult(tuple(t), None)


@dataclass(frozen=True)
class CompactFamily:
    """Compact saturated sets, one per verified index, matched by bonds:
    the bond image of the set at j must land inside the set at i."""

    system: object
    parts: tuple

    def __post_init__(self):
        idxs = list(self.system.indices())
        if len(self.parts) != len(idxs):
            raise ValimError("one part per index required")
        for i in idxs:
            if self.parts[i].space != self.system.space(i):
                raise ValimError(f"part at {i} lives on the wrong space")

    def part(self, i) -> UpSet:
        if self.system.kind == "prefix":
            return self.parts[min(i, self.system.last)]
        return self.parts[i]

    def verify(self) -> "CompactFamily":
        sys = self.system
        for i in sys.indices():
            for j in sys.indices():
                if not sys.index_leq(i, j):
                    continue
                img = sys.bond(i, j).image_mask(self.part(j).mask)
                if img & ~self.part(i).mask:
                    raise ValimError(
                        f"family not matched under the bond {i} <= {j}"
                    )
        return self

    def limit_mask(self, limit: LimitSpace) -> int:
        """Threads whose every component stays inside the family."""
        out = 0
        for t in range(limit.space.n):
            if all(
                (self.part(i).mask >> limit.projection(i).graph[t]) & 1
                for i in limit.system.indices()
            ):
                out |= 1 << t
        return out


def find_dominating_level(limit, i, family: CompactFamily, u: UpSet):
    """Least index j above i whose family part is already trapped in u.

    Precondition (verified when a limit is given): u is an open
    neighborhood of the saturation of the projected family limit.  On
    prefix chains and poset systems the scan always succeeds under the
    precondition; lazy chains have no materialized limit, so pass None,
    skip the precondition, and accept InconclusiveAtDepth when the scan
    exhausts the probe range.
    """
    sys = family.system if limit is None else limit.system
    family.verify()
    xi = sys.space(i)
    if u.space != xi:
        raise ValimError("the open must live at the base index")
    if limit is not None:
        qlim = family.limit_mask(limit)
        sat = xi.up_close(limit.projection(i).image_mask(qlim))
        if sat & ~u.mask:
            raise ValimError(
                "precondition: the open does not contain the projected family"
            )
    for j in sys.indices():
        if not sys.index_leq(i, j):
            continue
        img = xi.up_close(sys.bond(i, j).image_mask(family.part(j).mask))
        if img & ~u.mask == 0:
            return j
    if sys.kind == "lazy":
        raise InconclusiveAtDepth("dominating level", sys.depth)
    raise ValimError(
        "no dominating level found on a materialized system; broken data"
    )
