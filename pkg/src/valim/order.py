"""Finite T0 spaces as finite posets.

A finite T0 topology and its specialization order determine each other:
opens are exactly the upward-closed sets, continuous maps are exactly the
monotone ones.  Everything here works on the order side and treats subsets
as bitmasks (bit i = point i in canonical label order).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from . import _kernels
from .errors import SizeLimit, ValimError

DEFAULT_MAX_OPENS = 1 << 20
DEFAULT_MAX_POINTS = 4096

__all__ = [
    "FiniteSpace",
    "UpSet",
    "MonotoneMap",
    "EpPair",
    "NotAPoset",
    "NotMonotone",
    "NotEpPair",
    "check_space",
    "space_from_covers",
    "enumerate_opens",
    "upward_closure",
    "interior",
    "closure",
    "sobriety_witness",
    "lift",
    "product_space",
    "subspace",
    "identity_map",
    "compose",
    "DEFAULT_MAX_OPENS",
    "DEFAULT_MAX_POINTS",
]


class NotAPoset(ValimError):
    def __init__(self, axiom, witness):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"{axiom} fails at {witness!r}")


class NotMonotone(ValimError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"map not monotone at {witness!r}")


class NotEpPair(ValimError):
    def __init__(self, law, witness):
        self.law = law
        self.witness = witness
        super().__init__(f"{law} fails at {witness!r}")


@dataclass(frozen=True)
class FiniteSpace:
    """A finite poset; equivalently a finite T0 topological space.

    labels fixes the canonical point order.  up[i] is the bitmask of weak
    upper bounds of point i, so bit j of up[i] means i <= j.
    """

    labels: tuple
    up: tuple

    def __post_init__(self):
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise NotAPoset("distinct labels", self.labels)
        if len(self.up) != n:
            raise NotAPoset("up table length", (len(self.up), n))
        full = (1 << n) - 1
        for i, row in enumerate(self.up):
            if row & ~full:
                raise NotAPoset("up table range", self.labels[i])
            if not (row >> i) & 1:
                raise NotAPoset("reflexivity", self.labels[i])
        # transitivity: i <= j forces up[j] subset of up[i]
        for i in range(n):
            row = self.up[i]
            m = row
            while m:
                b = m & -m
                j = b.bit_length() - 1
                m ^= b
                if self.up[j] & ~row:
                    k = (self.up[j] & ~row).bit_length() - 1
                    raise NotAPoset(
                        "transitivity",
                        (self.labels[i], self.labels[j], self.labels[k]),
                    )
                if i != j and (self.up[j] >> i) & 1:
                    raise NotAPoset(
                        "antisymmetry", (self.labels[i], self.labels[j])
                    )

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def down(self) -> tuple:
        # down[j] = mask of weak lower bounds of j
        rows = [0] * self.n
        for i in range(self.n):
            m = self.up[i]
            while m:
                b = m & -m
                rows[b.bit_length() - 1] |= 1 << i
                m ^= b
        return tuple(rows)

    def leq(self, a, b) -> bool:
        return bool((self.up[self.index[a]] >> self.index[b]) & 1)

    def mask_of(self, points) -> int:
        m = 0
        for p in points:
            m |= 1 << self.index[p]
        return m

    def points_of(self, mask) -> tuple:
        return tuple(
            self.labels[i] for i in range(self.n) if (mask >> i) & 1
        )

    def up_close(self, mask: int) -> int:
        out = 0
        m = mask
        while m:
            b = m & -m
            out |= self.up[b.bit_length() - 1]
            m ^= b
        return out

    def down_close(self, mask: int) -> int:
        out = 0
        m = mask
        while m:
            b = m & -m
            out |= self.down[b.bit_length() - 1]
            m ^= b
        return out

    def is_upset(self, mask: int) -> bool:
        return self.up_close(mask) == mask

    def open_masks(self, max_opens: int = DEFAULT_MAX_OPENS) -> list:
        """All open sets as masks, sorted by (size, mask).  Cached once built."""
        cached = self.__dict__.get("_open_masks")
        if cached is not None:
            return cached
        masks = _kernels.enumerate_upsets(self.up, self.n, max_opens)
        if masks is None:
            raise SizeLimit("open lattice", max_opens)
        self.__dict__["_open_masks"] = masks
        return masks

    def minimal_mask(self) -> int:
        out = 0
        for i in range(self.n):
            if self.down[i] == (1 << i):
                out |= 1 << i
        return out

    def bottom(self):
        """The least point, or None if there is no single least point."""
        for i in range(self.n):
            if self.up[i] == self.full_mask:
                return self.labels[i]
        return None


@dataclass(frozen=True)
class UpSet:
    """An open (= upward-closed) subset of a FiniteSpace."""

    space: FiniteSpace
    mask: int

    def __post_init__(self):
        if self.mask & ~self.space.full_mask:
            raise ValimError("mask outside the space")
        if not self.space.is_upset(self.mask):
            raise ValimError(
                f"not upward closed: {self.space.points_of(self.mask)}"
            )

    @property
    def members(self) -> tuple:
        return self.space.points_of(self.mask)

    def __repr__(self) -> str:
        return "UpSet{%s}" % ", ".join(map(str, self.members))

    def __contains__(self, label) -> bool:
        return bool((self.mask >> self.space.index[label]) & 1)

    def __or__(self, other: "UpSet") -> "UpSet":
        _same_space(self.space, other.space)
        return UpSet(self.space, self.mask | other.mask)

    def __and__(self, other: "UpSet") -> "UpSet":
        _same_space(self.space, other.space)
        return UpSet(self.space, self.mask & other.mask)

    def __le__(self, other: "UpSet") -> bool:
        _same_space(self.space, other.space)
        return self.mask & ~other.mask == 0


def _same_space(a: FiniteSpace, b: FiniteSpace):
    if a != b:
        raise ValimError("operands live on different spaces")


def check_space(labels, relation, *, reflexive_closure=True,
                transitive_closure=False) -> FiniteSpace:
    """Validate a relation given as (below, above) label pairs.

    The reflexive part is implied by default; pass reflexive_closure=False
    to demand explicit (x, x) pairs.  Transitivity is checked, not
    repaired, unless transitive_closure is set.  Raises NotAPoset naming
    the first violated axiom with a witness.
    """
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise NotAPoset("distinct labels", labels)
    idx = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)
    up = [0] * n
    for a, b in relation:
        if a not in idx or b not in idx:
            raise NotAPoset("unknown label", (a, b))
        up[idx[a]] |= 1 << idx[b]
    if reflexive_closure:
        for i in range(n):
            up[i] |= 1 << i
    else:
        for i in range(n):
            if not (up[i] >> i) & 1:
                raise NotAPoset("reflexivity", labels[i])
    if transitive_closure:
        for k in range(n):
            for i in range(n):
                if (up[i] >> k) & 1:
                    up[i] |= up[k]
    return FiniteSpace(labels, tuple(up))


def space_from_covers(labels, covers) -> FiniteSpace:
    """Build a space from cover pairs (lower, upper); closure applied."""
    return check_space(labels, covers, transitive_closure=True)


def enumerate_opens(space: FiniteSpace, max_opens: int = DEFAULT_MAX_OPENS):
    """The open sets, by (cardinality, canonical bit order).  SizeLimit if
    there are more than max_opens of them."""
    return [UpSet(space, m) for m in space.open_masks(max_opens)]


def upward_closure(space: FiniteSpace, points) -> UpSet:
    return UpSet(space, space.up_close(space.mask_of(points)))


def interior(space: FiniteSpace, points) -> UpSet:
    """Largest open contained in the given subset."""
    mask = space.mask_of(points)
    out = 0
    for i in range(space.n):
        if (mask >> i) & 1 and space.up[i] & ~mask == 0:
            out |= 1 << i
    return UpSet(space, out)


def closure(space: FiniteSpace, points) -> tuple:
    """Topological closure = downward closure; returned as a label tuple."""
    return space.points_of(space.down_close(space.mask_of(points)))


def sobriety_witness(space: FiniteSpace,
                     max_opens: int = DEFAULT_MAX_OPENS) -> list:
    """Each irreducible closed set with its unique generic point.

    Irreducibility is checked against the definition (no cover by two
    smaller closed sets), not via the order; uniqueness of the generic
    point is asserted.  Returns [(closed labels, point)] sorted by point.
    """
    closed = [space.full_mask & ~m for m in space.open_masks(max_opens)]
    out = []
    for c in closed:
        if c == 0:
            continue
        ok = True
        for c1 in closed:
            if not ok:
                break
            if c & ~c1 == 0:
                continue
            for c2 in closed:
                if c & ~(c1 | c2) == 0 and c & ~c2:
                    ok = False
                    break
        if not ok:
            continue
        generic = [
            i for i in range(space.n)
            if (c >> i) & 1 and space.down[i] == c
        ]
        if len(generic) != 1:
            raise ValimError(
                f"not sober: {space.points_of(c)} has generic points "
                f"{[space.labels[i] for i in generic]}"
            )
        out.append((space.points_of(c), space.labels[generic[0]]))
    out.sort(key=lambda t: space.index[t[1]])
    return out


_BOTTOM_NAMES = ("⊥", "_bot", "_bottom")


def lift(space: FiniteSpace, label=None) -> FiniteSpace:
    """Add a fresh point below everything.  Opens become the old opens
    plus the whole new space."""
    if label is None:
        for cand in _BOTTOM_NAMES:
            if cand not in space.index:
                label = cand
                break
        else:
            k = 2
            while f"_bot{k}" in space.index:
                k += 1
            label = f"_bot{k}"
    elif label in space.index:
        raise ValimError(f"label already used: {label!r}")
    labels = space.labels + (label,)
    n = space.n
    up = tuple(space.up) + ((1 << (n + 1)) - 1,)
    return FiniteSpace(labels, up)


def product_space(factors, max_points: int = DEFAULT_MAX_POINTS):
    """Product with componentwise order.

    Point labels are tuples, in itertools.product order (first factor
    slowest).  Returns (space, projections).  SizeLimit when the point
    count would exceed max_points.
    """
    total = 1
    for f in factors:
        total *= f.n
    if total > max_points:
        raise SizeLimit("product points", max_points)
    if not factors:
        space = FiniteSpace(((),), (1,))
        return space, []
    combos = [()]
    for f in factors:
        combos = [c + (lab,) for c in combos for lab in f.labels]
    labels = tuple(combos)
    k = len(factors)
    idxs = [tuple(f.index[lab[d]] for d, f in enumerate(factors))
            for lab in labels]
    n = len(labels)
    up = []
    for i in range(n):
        row = 0
        for j in range(n):
            if all((factors[d].up[idxs[i][d]] >> idxs[j][d]) & 1
                   for d in range(k)):
                row |= 1 << j
        up.append(row)
    space = FiniteSpace(labels, tuple(up))
    projections = [
        MonotoneMap(space, f, tuple(idxs[i][d] for i in range(n)))
        for d, f in enumerate(factors)
    ]
    return space, projections


def subspace(space: FiniteSpace, points):
    """Induced order on a subset.  Returns (sub, inclusion)."""
    mask = points if isinstance(points, int) else space.mask_of(points)
    keep = [i for i in range(space.n) if (mask >> i) & 1]
    pos = {i: p for p, i in enumerate(keep)}
    labels = tuple(space.labels[i] for i in keep)
    up = []
    for i in keep:
        row = 0
        for j in keep:
            if (space.up[i] >> j) & 1:
                row |= 1 << pos[j]
        up.append(row)
    sub = FiniteSpace(labels, tuple(up))
    inclusion = MonotoneMap(sub, space, tuple(keep))
    return sub, inclusion


@dataclass(frozen=True)
class MonotoneMap:
    """A continuous (= monotone) map between finite T0 spaces.

    graph[i] is the target index of source point i.  Monotonicity is
    validated at construction.
    """

    source: FiniteSpace
    target: FiniteSpace
    graph: tuple

    def __post_init__(self):
        if len(self.graph) != self.source.n:
            raise NotMonotone("graph length")
        for i in self.graph:
            if not 0 <= i < self.target.n:
                raise NotMonotone(f"target index {i} out of range")
        for i in range(self.source.n):
            m = self.source.up[i]
            while m:
                b = m & -m
                j = b.bit_length() - 1
                m ^= b
                if not (self.target.up[self.graph[i]] >> self.graph[j]) & 1:
                    raise NotMonotone(
                        (self.source.labels[i], self.source.labels[j])
                    )

    @classmethod
    def from_dict(cls, source, target, mapping) -> "MonotoneMap":
        graph = tuple(
            target.index[mapping[lab]] for lab in source.labels
        )
        return cls(source, target, graph)

    def __call__(self, label):
        return self.target.labels[self.graph[self.source.index[label]]]

    def apply_index(self, i: int) -> int:
        return self.graph[i]

    def image_mask(self, mask: int) -> int:
        out = 0
        m = mask
        while m:
            b = m & -m
            out |= 1 << self.graph[b.bit_length() - 1]
            m ^= b
        return out

    def preimage_mask(self, mask: int) -> int:
        out = 0
        for i in range(self.source.n):
            if (mask >> self.graph[i]) & 1:
                out |= 1 << i
        return out

    def preimage(self, u: UpSet) -> UpSet:
        _same_space(u.space, self.target)
        return UpSet(self.source, self.preimage_mask(u.mask))

    def is_identity(self) -> bool:
        return self.source == self.target and all(
            self.graph[i] == i for i in range(self.source.n)
        )


def identity_map(space: FiniteSpace) -> MonotoneMap:
    return MonotoneMap(space, space, tuple(range(space.n)))


def compose(outer: MonotoneMap, inner: MonotoneMap) -> MonotoneMap:
    """compose(f, g) applies g first: x -> f(g(x))."""
    if inner.target != outer.source:
        raise ValimError("maps do not compose")
    graph = tuple(outer.graph[inner.graph[i]] for i in range(inner.source.n))
    return MonotoneMap(inner.source, outer.target, graph)


@dataclass(frozen=True)
class EpPair:
    """An embedding-projection pair: p . e = id and e . p <= id pointwise."""

    projection: MonotoneMap
    embedding: MonotoneMap

    def __post_init__(self):
        p, e = self.projection, self.embedding
        if e.source != p.target or e.target != p.source:
            raise NotEpPair("spaces", (p.source.labels, p.target.labels))
        for i in range(e.source.n):
            if p.graph[e.graph[i]] != i:
                raise NotEpPair("p . e = id", e.source.labels[i])
        big = p.source
        for y in range(big.n):
            if not (big.up[e.graph[p.graph[y]]] >> y) & 1:
                raise NotEpPair("e . p <= id", big.labels[y])

    @property
    def big(self) -> FiniteSpace:
        return self.projection.source

    @property
    def small(self) -> FiniteSpace:
        return self.projection.target
