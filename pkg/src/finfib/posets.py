"""Finite partial orders viewed as T0 topological spaces.

A finite T0 space is the same thing as a finite poset: the minimal open
set of a point is its down set, the closure of a point is its up set,
and a function between two such spaces is continuous exactly when it is
order preserving.  Everything downstream trades on this dictionary, so
the whole engine is plain combinatorics on posets.

Order rows are stored as bitmasks (one int per element), which keeps
closure, reduction and the various intersections cheap without any
third-party dependency.  Element identity is the name (a string);
derived posets generate deterministic composite names such as "(a,0)".
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator, Optional, Sequence

from .errors import (
    CodomainMismatch,
    CycleDetected,
    DuplicateName,
    GuardExceeded,
    NotMonotone,
    SearchBudgetExhausted,
    UnknownElement,
)

DEFAULT_GUARD = 100_000


def _bits(mask: int) -> Iterator[int]:
    """Yield set bit positions of mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Poset:
    """Finite poset with named elements.

    ``below[i]`` is the bitmask of indices j with j <= i (the minimal
    open set of element i), ``above[i]`` the bitmask of j >= i (its
    closure).  Instances are immutable and hashable; equality is on the
    element tuple plus the order, so it is equality of spaces, not of
    isomorphism classes.
    """

    __slots__ = ("elements", "index", "below", "above", "_covers", "_heights", "_hash")

    def __init__(self, elements: Sequence[str], below: Sequence[int]):
        self.elements = tuple(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        self.below = tuple(below)
        above = [0] * len(self.elements)
        for i, row in enumerate(self.below):
            for j in _bits(row):
                above[j] |= 1 << i
        self.above = tuple(above)
        self._covers = None
        self._heights = None
        self._hash = hash((self.elements, self.below))

    # -- construction ------------------------------------------------

    @classmethod
    def build(cls, elements: Iterable[str], pairs: Iterable[tuple[str, str]]) -> "Poset":
        """Build a poset from named elements and strict relation pairs.

        ``pairs`` lists (lo, hi) with lo < hi; they may be covers or any
        generating set, the reflexive-transitive closure is taken.  A
        closure that is not antisymmetric raises CycleDetected, since
        the corresponding finite space would not be T0.
        """
        names = list(elements)
        seen = set()
        for name in names:
            if not isinstance(name, str):
                raise UnknownElement(f"element names must be strings, got {name!r}")
            if name in seen:
                raise DuplicateName(f"duplicate element name {name!r}")
            seen.add(name)
        index = {e: i for i, e in enumerate(names)}
        n = len(names)
        up_adj = [0] * n
        dn_adj = [0] * n
        for lo, hi in pairs:
            if lo not in index:
                raise UnknownElement(f"unknown element {lo!r} in relation pair")
            if hi not in index:
                raise UnknownElement(f"unknown element {hi!r} in relation pair")
            if lo == hi:
                raise CycleDetected(f"element {lo!r} declared below itself")
            i, j = index[lo], index[hi]
            up_adj[i] |= 1 << j
            dn_adj[j] |= 1 << i
        # Kahn order; leftovers mean a cycle.
        indeg = [dn_adj[i].bit_count() for i in range(n)]
        queue = [i for i in range(n) if indeg[i] == 0]
        topo = []
        while queue:
            i = queue.pop()
            topo.append(i)
            for j in _bits(up_adj[i]):
                indeg[j] -= 1
                if indeg[j] == 0:
                    queue.append(j)
        if len(topo) != n:
            stuck = min(i for i in range(n) if indeg[i] > 0)
            raise CycleDetected(f"relation has a cycle through {names[stuck]!r}")
        below = [0] * n
        for i in topo:
            row = 1 << i
            for j in _bits(dn_adj[i]):
                row |= below[j]
            below[i] = row
        return cls(names, below)

    @classmethod
    def chain(cls, names: Sequence[str]) -> "Poset":
        """Total order with the given names, first name at the bottom."""
        return cls.build(names, [(names[i], names[i + 1]) for i in range(len(names) - 1)])

    @classmethod
    def antichain(cls, names: Sequence[str]) -> "Poset":
        return cls.build(names, [])

    @classmethod
    def empty(cls) -> "Poset":
        return cls((), ())

    # -- basics ------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)

    def __contains__(self, name: object) -> bool:
        return name in self.index

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Poset)
            and self.elements == other.elements
            and self.below == other.below
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Poset({len(self.elements)} elements)"

    def idx(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise UnknownElement(f"element {name!r} is not in this poset") from None

    def names(self, mask: int) -> tuple[str, ...]:
        """Element names of a bitmask, in index order."""
        return tuple(self.elements[i] for i in _bits(mask))

    def mask(self, names: Iterable[str]) -> int:
        m = 0
        for name in names:
            m |= 1 << self.idx(name)
        return m

    # -- order -------------------------------------------------------

    def le(self, a: str, b: str) -> bool:
        return bool(self.below[self.idx(b)] >> self.idx(a) & 1)

    def lt(self, a: str, b: str) -> bool:
        return a != b and self.le(a, b)

    def down_set(self, a: str) -> tuple[str, ...]:
        """Minimal open set U_a = {x : x <= a}."""
        return self.names(self.below[self.idx(a)])

    def strict_down_set(self, a: str) -> tuple[str, ...]:
        i = self.idx(a)
        return self.names(self.below[i] & ~(1 << i))

    def up_set(self, a: str) -> tuple[str, ...]:
        """Closure F_a = {x : x >= a}."""
        return self.names(self.above[self.idx(a)])

    def strict_up_set(self, a: str) -> tuple[str, ...]:
        i = self.idx(a)
        return self.names(self.above[i] & ~(1 << i))

    def covers(self) -> tuple[tuple[str, str], ...]:
        """Hasse relation (transitive reduction), as (lo, hi) pairs."""
        if self._covers is None:
            out = []
            for i in range(self.n):
                for j in _bits(self.below[i] & ~(1 << i)):
                    # j is covered by i iff the interval [j, i] has 2 points
                    if (self.below[i] & self.above[j]).bit_count() == 2:
                        out.append((j, i))
            out.sort()
            self._covers = tuple((self.elements[j], self.elements[i]) for j, i in out)
        return self._covers

    def lower_covers(self, a: str) -> tuple[str, ...]:
        return tuple(lo for lo, hi in self.covers() if hi == a)

    def upper_covers(self, a: str) -> tuple[str, ...]:
        return tuple(hi for lo, hi in self.covers() if lo == a)

    def minimal_elements(self) -> tuple[str, ...]:
        return tuple(e for i, e in enumerate(self.elements) if self.below[i] == 1 << i)

    def maximal_elements(self) -> tuple[str, ...]:
        return tuple(e for i, e in enumerate(self.elements) if self.above[i] == 1 << i)

    def max_of(self, names: Iterable[str]) -> Optional[str]:
        """Maximum of a subset if it has one, else None."""
        return self.max_of_mask(self.mask(names))

    def min_of(self, names: Iterable[str]) -> Optional[str]:
        return self.min_of_mask(self.mask(names))

    def max_of_mask(self, m: int) -> Optional[str]:
        for i in _bits(m):
            if m & ~self.below[i] == 0:
                return self.elements[i]
        return None

    def min_of_mask(self, m: int) -> Optional[str]:
        for i in _bits(m):
            if m & ~self.above[i] == 0:
                return self.elements[i]
        return None

    def maximum(self) -> Optional[str]:
        return self.max_of_mask((1 << self.n) - 1) if self.n else None

    def minimum(self) -> Optional[str]:
        return self.min_of_mask((1 << self.n) - 1) if self.n else None

    def heights(self) -> tuple[int, ...]:
        """Longest chain length (in edges) ending at each element."""
        if self._heights is None:
            order = sorted(range(self.n), key=lambda i: (self.below[i].bit_count(), i))
            h = [0] * self.n
            for i in order:
                strict = self.below[i] & ~(1 << i)
                h[i] = 1 + max((h[j] for j in _bits(strict)), default=-1)
            self._heights = tuple(h)
        return self._heights

    def height(self) -> int:
        """Length of the longest chain; -1 for the empty poset."""
        return max(self.heights(), default=-1)

    def depths(self) -> tuple[int, ...]:
        """Longest chain length starting at each element (dual of heights)."""
        heights_op = self.op().heights()
        return heights_op

    # -- connectivity ------------------------------------------------

    def components(self) -> tuple[tuple[str, ...], ...]:
        """Connected components, each listed in index order.

        Connectedness of a finite space is connectedness of the
        comparability graph (which also equals path-connectedness).
        """
        seen = 0
        out = []
        for start in range(self.n):
            if seen >> start & 1:
                continue
            comp = 1 << start
            frontier = comp
            while frontier:
                grown = 0
                for i in _bits(frontier):
                    grown |= self.below[i] | self.above[i]
                frontier = grown & ~comp
                comp |= grown
            seen |= comp
            out.append(self.names(comp))
        return tuple(out)

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    # -- derived posets ----------------------------------------------

    def op(self) -> "Poset":
        """Opposite poset: same elements, order reversed."""
        return Poset(self.elements, self.above)

    def sub(self, keep: Iterable[str]) -> "Poset":
        """Subposet induced on the given elements, relative order kept."""
        keep_mask = self.mask(keep)
        kept = list(_bits(keep_mask))
        pos = {i: k for k, i in enumerate(kept)}
        below = []
        for i in kept:
            row = 0
            for j in _bits(self.below[i] & keep_mask):
                row |= 1 << pos[j]
            below.append(row)
        return Poset(tuple(self.elements[i] for i in kept), below)


def pair_name(x: str, y: str) -> str:
    return f"({x},{y})"


def product(p: Poset, q: Poset) -> tuple[Poset, "MonotoneMap", "MonotoneMap"]:
    """Product poset with componentwise order, plus its two projections.

    Elements are named "(x,y)"; x runs slowest, so the order of the
    element list is deterministic.
    """
    names = [pair_name(x, y) for x in p.elements for y in q.elements]
    nq = q.n
    below = []
    for i in range(p.n):
        for j in range(q.n):
            row = 0
            for a in _bits(p.below[i]):
                for b in _bits(q.below[j]):
                    row |= 1 << (a * nq + b)
            below.append(row)
    prod = Poset(names, below)
    to_p = MonotoneMap(prod, p, tuple(i for i in range(p.n) for _ in range(nq)))
    to_q = MonotoneMap(prod, q, tuple(j for _ in range(p.n) for j in range(nq)))
    return prod, to_p, to_q


def sub_poset(p: Poset, keep: Iterable[str]) -> tuple[Poset, "MonotoneMap"]:
    """Induced subposet together with its inclusion into p."""
    sub = p.sub(keep)
    incl = MonotoneMap(sub, p, tuple(p.index[e] for e in sub.elements))
    return sub, incl


class MonotoneMap:
    """Order-preserving map between two posets.

    Monotonicity is checked at construction (via ``build``); the raw
    constructor trusts its input and is used internally where the
    property holds by design.
    """

    __slots__ = ("dom", "cod", "vals", "_hash")

    def __init__(self, dom: Poset, cod: Poset, vals: Sequence[int]):
        self.dom = dom
        self.cod = cod
        self.vals = tuple(vals)
        self._hash = hash((self.dom, self.cod, self.vals))

    @classmethod
    def build(cls, dom: Poset, cod: Poset, values: dict[str, str]) -> "MonotoneMap":
        vals = []
        for e in dom.elements:
            if e not in values:
                raise UnknownElement(f"no value assigned to element {e!r}")
            vals.append(cod.idx(values[e]))
        extra = set(values) - set(dom.elements)
        if extra:
            raise UnknownElement(f"values assigned to unknown elements {sorted(extra)}")
        for lo, hi in dom.covers():
            a, b = vals[dom.index[lo]], vals[dom.index[hi]]
            if not cod.below[b] >> a & 1:
                raise NotMonotone(
                    f"{lo!r} <= {hi!r} in the domain but "
                    f"{cod.elements[a]!r} <= {cod.elements[b]!r} fails in the codomain"
                )
        return cls(dom, cod, vals)

    @classmethod
    def identity(cls, p: Poset) -> "MonotoneMap":
        return cls(p, p, range(p.n))

    @classmethod
    def constant(cls, dom: Poset, cod: Poset, value: str) -> "MonotoneMap":
        return cls(dom, cod, (cod.idx(value),) * dom.n)

    def __call__(self, name: str) -> str:
        return self.cod.elements[self.vals[self.dom.idx(name)]]

    @property
    def values(self) -> dict[str, str]:
        return {e: self.cod.elements[v] for e, v in zip(self.dom.elements, self.vals)}

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MonotoneMap)
            and self.dom == other.dom
            and self.cod == other.cod
            and self.vals == other.vals
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"MonotoneMap({self.dom.n}->{self.cod.n} elements)"

    def then(self, g: "MonotoneMap") -> "MonotoneMap":
        """Composite g o self."""
        if g.dom != self.cod:
            raise CodomainMismatch("composite needs matching middle poset")
        return MonotoneMap(self.dom, g.cod, tuple(g.vals[v] for v in self.vals))

    def le(self, other: "MonotoneMap") -> bool:
        """Pointwise order on maps; this is the exponential order."""
        if self.dom != other.dom or self.cod != other.cod:
            raise CodomainMismatch("maps are comparable only with equal dom and cod")
        below = self.cod.below
        return all(below[w] >> v & 1 for v, w in zip(self.vals, other.vals))

    def image_mask(self) -> int:
        m = 0
        for v in self.vals:
            m |= 1 << v
        return m

    def image(self) -> tuple[str, ...]:
        return self.cod.names(self.image_mask())

    def is_surjective(self) -> bool:
        return self.image_mask() == (1 << self.cod.n) - 1

    def is_injective(self) -> bool:
        return len(set(self.vals)) == self.dom.n

    def is_iso(self) -> bool:
        """Bijective with monotone inverse, i.e. a homeomorphism."""
        if self.dom.n != self.cod.n or not self.is_injective():
            return False
        inv = [0] * self.cod.n
        for i, v in enumerate(self.vals):
            inv[v] = i
        dom_below, cod_below = self.dom.below, self.cod.below
        for j in range(self.cod.n):
            for k in _bits(cod_below[j]):
                if not dom_below[inv[j]] >> inv[k] & 1:
                    return False
        return True

    def inverse(self) -> "MonotoneMap":
        if not self.is_iso():
            raise NotMonotone("map is not an isomorphism")
        inv = [0] * self.cod.n
        for i, v in enumerate(self.vals):
            inv[v] = i
        return MonotoneMap(self.cod, self.dom, inv)

    def restrict(self, sub_dom: Poset) -> "MonotoneMap":
        """Restriction to a subposet of the domain (same names)."""
        return MonotoneMap(sub_dom, self.cod, tuple(self.vals[self.dom.idx(e)] for e in sub_dom.elements))

    def corestrict(self, sub_cod: Poset) -> "MonotoneMap":
        """Corestriction onto a subposet of the codomain containing the image."""
        return MonotoneMap(self.dom, sub_cod, tuple(sub_cod.idx(self.cod.elements[v]) for v in self.vals))

    def op(self) -> "MonotoneMap":
        """The same function, seen between the opposite posets."""
        return MonotoneMap(self.dom.op(), self.cod.op(), self.vals)

    def preimage_mask(self, cod_mask: int) -> int:
        m = 0
        for i, v in enumerate(self.vals):
            if cod_mask >> v & 1:
                m |= 1 << i
        return m


def compose(g: MonotoneMap, f: MonotoneMap) -> MonotoneMap:
    return f.then(g)


# -- enumeration of monotone maps -------------------------------------


def _linear_extension(p: Poset) -> list[int]:
    # |U_x| strictly grows along the order, so this sort is a linear
    # extension, and it is deterministic.
    return sorted(range(p.n), key=lambda i: (p.below[i].bit_count(), i))


def _enumerate_monotone(
    dom: Poset, cod: Poset, cand: Sequence[int], guard: Optional[int]
) -> Iterator[tuple[int, ...]]:
    """Yield value tuples of monotone maps with per-element candidate masks.

    The guard is checked against the product of candidate set sizes
    before any work happens.
    """
    if dom.n == 0:
        yield ()
        return
    bound = 1
    for m in cand:
        bound *= m.bit_count()
    if guard is not None and bound > guard:
        raise GuardExceeded(bound, guard)
    if bound == 0:
        return
    order = _linear_extension(dom)
    pos_of = [0] * dom.n
    for k, i in enumerate(order):
        pos_of[i] = k
    # strict lower covers of each element, as positions already assigned
    lower = []
    cover_dn = {e: dom.lower_covers(e) for e in dom.elements}
    for i in order:
        lower.append([dom.index[c] for c in cover_dn[dom.elements[i]]])
    vals = [0] * dom.n
    above = cod.above

    def rec(k: int) -> Iterator[tuple[int, ...]]:
        if k == dom.n:
            yield tuple(vals)
            return
        i = order[k]
        m = cand[i]
        for j in lower[k]:
            m &= above[vals[j]]
        for v in _bits(m):
            vals[i] = v
            yield from rec(k + 1)

    yield from rec(0)


def monotone_maps(
    dom: Poset,
    cod: Poset,
    guard: Optional[int] = DEFAULT_GUARD,
    *,
    lower: Optional[MonotoneMap] = None,
    upper: Optional[MonotoneMap] = None,
    over: Optional[tuple[MonotoneMap, MonotoneMap]] = None,
    fixed: Optional[dict[str, str]] = None,
) -> Iterator[MonotoneMap]:
    """Enumerate monotone maps dom -> cod, optionally constrained.

    lower / upper bound the maps pointwise (f >= lower, f <= upper);
    ``over=(p, q)`` keeps only maps f with q o f = p, for p out of dom
    and q out of cod into a common base; ``fixed`` pins given elements.
    The guard limits the product of candidate-set sizes.
    """
    full = (1 << cod.n) - 1
    cand = [full] * dom.n
    if lower is not None:
        if lower.dom != dom or lower.cod != cod:
            raise CodomainMismatch("lower bound must be a map dom -> cod")
        for i in range(dom.n):
            cand[i] &= cod.above[lower.vals[i]]
    if upper is not None:
        if upper.dom != dom or upper.cod != cod:
            raise CodomainMismatch("upper bound must be a map dom -> cod")
        for i in range(dom.n):
            cand[i] &= cod.below[upper.vals[i]]
    if over is not None:
        p, q = over
        if p.dom != dom or q.dom != cod or p.cod != q.cod:
            raise CodomainMismatch("'over' needs p: dom -> B and q: cod -> B")
        fibers: dict[int, int] = {}
        for i, v in enumerate(q.vals):
            fibers[v] = fibers.get(v, 0) | 1 << i
        for i in range(dom.n):
            cand[i] &= fibers.get(p.vals[i], 0)
    if fixed:
        for name, target in fixed.items():
            cand[dom.idx(name)] &= 1 << cod.idx(target)
    for vals in _enumerate_monotone(dom, cod, cand, guard):
        yield MonotoneMap(dom, cod, vals)


class HomPoset:
    """All monotone maps dom -> cod under the pointwise order."""

    __slots__ = ("source", "target", "maps", "_index")

    def __init__(self, source: Poset, target: Poset, maps: Sequence[MonotoneMap]):
        self.source = source
        self.target = target
        self.maps = tuple(sorted(maps, key=lambda f: f.vals))
        self._index = {f.vals: k for k, f in enumerate(self.maps)}

    def __len__(self) -> int:
        return len(self.maps)

    def __iter__(self) -> Iterator[MonotoneMap]:
        return iter(self.maps)

    def le(self, f: MonotoneMap, g: MonotoneMap) -> bool:
        return f.le(g)

    def position(self, f: MonotoneMap) -> int:
        try:
            return self._index[f.vals]
        except KeyError:
            raise UnknownElement("map is not in this hom poset") from None

    def comparability_classes(self) -> list[list[MonotoneMap]]:
        """Connected components of the comparability graph.

        Two maps land in one class iff they are connected by a zigzag
        of pointwise inequalities, i.e. iff they are homotopic.
        """
        n = len(self.maps)
        parent = list(range(n))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i in range(n):
            for j in range(i + 1, n):
                fi, fj = self.maps[i], self.maps[j]
                if fi.le(fj) or fj.le(fi):
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[rj] = ri
        groups: dict[int, list[MonotoneMap]] = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(self.maps[i])
        return [groups[r] for r in sorted(groups, key=lambda r: self.maps[r].vals)]


def hom_poset(dom: Poset, cod: Poset, guard: Optional[int] = DEFAULT_GUARD) -> HomPoset:
    """The poset of all monotone maps dom -> cod.

    The guard is prechecked against |cod| ** |dom| before enumerating.
    """
    if dom.n and guard is not None:
        bound = cod.n ** dom.n
        if bound > guard:
            raise GuardExceeded(bound, guard)
    return HomPoset(dom, cod, list(monotone_maps(dom, cod, None)))


def hom_over_base(
    p: MonotoneMap, q: MonotoneMap, guard: Optional[int] = DEFAULT_GUARD
) -> HomPoset:
    """Maps f: dom(p) -> dom(q) with q o f = p, under the pointwise order."""
    if p.cod != q.cod:
        raise CodomainMismatch("maps over a base need the same codomain")
    maps = list(monotone_maps(p.dom, q.dom, guard, over=(p, q)))
    return HomPoset(p.dom, q.dom, maps)


# -- isomorphism search ------------------------------------------------


def _cover_adjacency(p: Poset) -> tuple[list[list[int]], list[list[int]]]:
    dn: list[list[int]] = [[] for _ in range(p.n)]
    up: list[list[int]] = [[] for _ in range(p.n)]
    for lo, hi in p.covers():
        dn[p.index[hi]].append(p.index[lo])
        up[p.index[lo]].append(p.index[hi])
    return dn, up


def _joint_labels(
    p: Poset,
    q: Poset,
    extra_p: Optional[Sequence[object]],
    extra_q: Optional[Sequence[object]],
) -> tuple[list[int], list[int]]:
    """Structural labels refined jointly over both posets.

    Elements that can correspond under an isomorphism (respecting the
    optional extra labels) end with equal labels; the converse fails in
    general, the backtracking handles the rest.  Canonicalization is
    shared each round, so labels are comparable across the two posets.
    """

    def initial(s: Poset, extra: Optional[Sequence[object]]) -> list[object]:
        heights = s.heights()
        depths = s.depths()
        return [
            (
                s.below[i].bit_count(),
                s.above[i].bit_count(),
                heights[i],
                depths[i],
                None if extra is None else extra[i],
            )
            for i in range(s.n)
        ]

    lab_p = initial(p, extra_p)
    lab_q = initial(q, extra_q)
    dn_p, up_p = _cover_adjacency(p)
    dn_q, up_q = _cover_adjacency(q)
    for _ in range(p.n + q.n):
        key_p = [
            (lab_p[i], tuple(sorted(lab_p[j] for j in dn_p[i])), tuple(sorted(lab_p[j] for j in up_p[i])))
            for i in range(p.n)
        ]
        key_q = [
            (lab_q[i], tuple(sorted(lab_q[j] for j in dn_q[i])), tuple(sorted(lab_q[j] for j in up_q[i])))
            for i in range(q.n)
        ]
        canon: dict[object, int] = {}
        for k in sorted(set(key_p) | set(key_q), key=repr):
            canon[k] = len(canon)
        new_p = [canon[k] for k in key_p]
        new_q = [canon[k] for k in key_q]
        if new_p == lab_p and new_q == lab_q:
            break
        lab_p, lab_q = new_p, new_q
    return lab_p, lab_q  # type: ignore[return-value]


def isomorphisms(
    p: Poset,
    q: Poset,
    *,
    extra_p: Optional[Sequence[object]] = None,
    extra_q: Optional[Sequence[object]] = None,
    budget: Optional[int] = None,
) -> Iterator[dict[str, str]]:
    """Yield order isomorphisms p -> q as name dictionaries.

    Candidates are pruned by refined structural labels and searched by
    backtracking with deterministic index-order tie-breaking.  A budget
    counts attempted assignments; running out raises
    SearchBudgetExhausted, so absence of output from an unbudgeted call
    is an exhausted-search certificate.
    """
    if p.n != q.n:
        return
    if p.n == 0:
        yield {}
        return
    lab_p, lab_q = _joint_labels(p, q, extra_p, extra_q)
    if sorted(lab_p) != sorted(lab_q):
        return
    by_label: dict[int, list[int]] = {}
    for j, l in enumerate(lab_q):
        by_label.setdefault(l, []).append(j)
    # assign elements in order of rising candidate count, then index
    order = sorted(range(p.n), key=lambda i: (len(by_label.get(lab_p[i], ())), i))
    assigned = [-1] * p.n
    used = 0
    nodes = [0]

    def rec(k: int) -> Iterator[dict[str, str]]:
        nonlocal used
        if k == p.n:
            yield {p.elements[i]: q.elements[assigned[i]] for i in range(p.n)}
            return
        i = order[k]
        for j in by_label.get(lab_p[i], ()):
            if used >> j & 1:
                continue
            nodes[0] += 1
            if budget is not None and nodes[0] > budget:
                raise SearchBudgetExhausted(
                    f"isomorphism search exceeded budget of {budget} nodes"
                )
            ok = True
            for k2 in range(k):
                i2 = order[k2]
                j2 = assigned[i2]
                if (p.below[i] >> i2 & 1) != (q.below[j] >> j2 & 1) or (
                    p.below[i2] >> i & 1
                ) != (q.below[j2] >> j & 1):
                    ok = False
                    break
            if not ok:
                continue
            assigned[i] = j
            used |= 1 << j
            yield from rec(k + 1)
            used &= ~(1 << j)
            assigned[i] = -1

    yield from rec(0)


def find_isomorphism(p: Poset, q: Poset, budget: Optional[int] = None) -> Optional[dict[str, str]]:
    """First isomorphism p -> q in deterministic search order, or None."""
    return next(isomorphisms(p, q, budget=budget), None)


def find_isomorphism_over_base(
    p: MonotoneMap, q: MonotoneMap, budget: Optional[int] = None
) -> Optional[dict[str, str]]:
    """Isomorphism h: dom(p) -> dom(q) with q o h = p, or None.

    Both maps must share their codomain; the base value of each element
    is folded into the search labels, so h automatically commutes.
    """
    if p.cod != q.cod:
        raise CodomainMismatch("isomorphism over a base needs a common codomain")
    gen = isomorphisms(p.dom, q.dom, extra_p=p.vals, extra_q=q.vals, budget=budget)
    return next(gen, None)


def automorphisms(p: Poset, budget: Optional[int] = None) -> Iterator[dict[str, str]]:
    return isomorphisms(p, p, budget=budget)
