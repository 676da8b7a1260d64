"""Beat points, cores and homotopy of finite T0 spaces.

A point is a down beat point when its strict down set has a maximum,
an up beat point when its strict up set has a minimum.  Removing a
beat point is a strong deformation retraction, and iterating until
none are left lands on a core: a space without beat points, unique up
to homeomorphism.  Two finite spaces are homotopy equivalent exactly
when their cores are isomorphic, which turns homotopy questions into
the finite searches implemented here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

from .errors import CodomainMismatch, GuardExceeded, NotDescending, UnknownElement
from .posets import (
    DEFAULT_GUARD,
    HomPoset,
    MonotoneMap,
    Poset,
    _bits,
    find_isomorphism,
    hom_poset,
    monotone_maps,
)

# A picker receives the ordered candidate tuple ((element, kind), ...)
# and returns one entry; the default policy takes the first, i.e. the
# lowest-indexed down beat point, falling back to up beat points only
# when no down beat point is left.
Picker = Callable[[tuple[tuple[str, str], ...]], tuple[str, str]]


@dataclass(frozen=True)
class BeatPointReport:
    """Beat points of a space, each with its witness.

    ``down[e]`` is max of the strict down set of e, ``up[e]`` the min
    of the strict up set.
    """

    down: dict[str, str]
    up: dict[str, str]

    @property
    def is_minimal(self) -> bool:
        return not self.down and not self.up


@dataclass(frozen=True)
class ReductionTrace:
    """Record of successive beat-point removals.

    ``removed`` lists (element, kind) in removal order; ``retraction``
    is the composite strong deformation retraction source -> result,
    each removed element going to its witness at removal time.
    """

    source: Poset
    result: Poset
    removed: tuple[tuple[str, str], ...]
    retraction: MonotoneMap

    def inclusion(self) -> MonotoneMap:
        return MonotoneMap(
            self.result, self.source, tuple(self.source.idx(e) for e in self.result.elements)
        )

    def idempotent(self) -> MonotoneMap:
        """The retraction followed by the inclusion, as an endomap."""
        incl = self.inclusion()
        return MonotoneMap(
            self.source, self.source, tuple(incl.vals[v] for v in self.retraction.vals)
        )


def _beat_candidates(
    x: Poset, alive: int, kinds: tuple[str, ...], fiber_vals: Optional[Sequence[int]] = None
) -> list[tuple[int, str, int]]:
    """Beat points of the subspace induced on ``alive``.

    Returns (index, kind, witness index) tuples ordered kind-major
    (order of ``kinds``), index-minor.  With ``fiber_vals`` given, only
    beat points whose witness has the same value survive; these are
    the beat points of the map those values describe.
    """
    out = []
    for kind in kinds:
        rows = x.below if kind == "down" else x.above
        pick = x.max_of_mask if kind == "down" else x.min_of_mask
        for i in _bits(alive):
            strict = rows[i] & alive & ~(1 << i)
            if not strict:
                continue
            w = pick(strict)
            if w is None:
                continue
            wi = x.index[w]
            if fiber_vals is not None and fiber_vals[wi] != fiber_vals[i]:
                continue
            out.append((i, kind, wi))
    return out


def beat_points(x: Poset) -> BeatPointReport:
    alive = (1 << x.n) - 1
    down = {}
    up = {}
    for i, kind, wi in _beat_candidates(x, alive, ("down", "up")):
        (down if kind == "down" else up)[x.elements[i]] = x.elements[wi]
    return BeatPointReport(down, up)


def _reduce(
    x: Poset,
    kinds: tuple[str, ...],
    picker: Optional[Picker],
    keep: int = 0,
    fiber_vals: Optional[Sequence[int]] = None,
) -> ReductionTrace:
    """Greedy beat-point removal engine shared by all reductions.

    ``keep`` masks elements that must not be removed; ``fiber_vals``
    switches to beat points of a map.  The composite retraction is
    accumulated as each removed element is redirected to its witness.
    """
    alive = (1 << x.n) - 1
    cur = list(range(x.n))
    removed: list[tuple[str, str]] = []
    while True:
        cands = [
            (i, kind, wi)
            for i, kind, wi in _beat_candidates(x, alive, kinds, fiber_vals)
            if not keep >> i & 1
        ]
        if not cands:
            break
        if picker is None:
            i, kind, wi = cands[0]
        else:
            choice = picker(tuple((x.elements[i], kind) for i, kind, _ in cands))
            matches = [c for c in cands if (x.elements[c[0]], c[1]) == choice]
            if not matches:
                raise UnknownElement(f"picker returned {choice!r}, not a candidate")
            i, kind, wi = matches[0]
        alive &= ~(1 << i)
        removed.append((x.elements[i], kind))
        for k in range(x.n):
            if cur[k] == i:
                cur[k] = wi
    result = x.sub(x.names(alive))
    retraction = MonotoneMap(x, result, tuple(result.index[x.elements[cur[k]]] for k in range(x.n)))
    return ReductionTrace(x, result, tuple(removed), retraction)


def core(x: Poset, *, picker: Optional[Picker] = None) -> ReductionTrace:
    """Reduce to a core by removing beat points.

    Default policy is kind-major: all down beat points are consumed
    (lowest index first, recomputing each step) before any up beat
    point is touched.  Any other policy gives an isomorphic result.
    """
    return _reduce(x, ("down", "up"), picker)


def is_contractible(x: Poset) -> bool:
    return core(x).result.n == 1


def homotopy_equivalent(x: Poset, y: Poset) -> tuple[bool, Optional[dict[str, str]]]:
    """Homotopy equivalence test via core isomorphism."""
    iso = find_isomorphism(core(x).result, core(y).result)
    return iso is not None, iso


def smallest_dbp_retract(x: Poset, *, picker: Optional[Picker] = None) -> ReductionTrace:
    """Greedy removal of down beat points only.

    The result is the minimum element of the family of subspaces
    reachable by such removals, so it does not depend on the order;
    the trace's ``idempotent()`` is the unique descending idempotent
    onto it, which is also the minimum of the maps below the identity.
    """
    return _reduce(x, ("down",), picker)


def smallest_ubp_retract(x: Poset, *, picker: Optional[Picker] = None) -> ReductionTrace:
    return _reduce(x, ("up",), picker)


def is_dbp_retract(x: Poset, keep: Sequence[str]) -> Optional[ReductionTrace]:
    """Trace showing ``keep`` is reachable by down beat point removals.

    Greedy is complete here: removing any down beat point outside a
    subspace reachable this way keeps it reachable, so a stuck state
    not equal to ``keep`` certifies absence (returns None).
    """
    keep_mask = x.mask(keep)
    trace = _reduce(x, ("down",), None, keep=keep_mask)
    return trace if trace.result.n == keep_mask.bit_count() else None


def is_ubp_retract(x: Poset, keep: Sequence[str]) -> Optional[ReductionTrace]:
    keep_mask = x.mask(keep)
    trace = _reduce(x, ("up",), None, keep=keep_mask)
    return trace if trace.result.n == keep_mask.bit_count() else None


def _all_bp_retracts(x: Poset, kind: str, limit: Optional[int]) -> tuple[tuple[str, ...], ...]:
    full = (1 << x.n) - 1
    seen = {full}
    frontier = [full]
    while frontier:
        alive = frontier.pop()
        for i, _, _ in _beat_candidates(x, alive, (kind,)):
            nxt = alive & ~(1 << i)
            if nxt not in seen:
                if limit is not None and len(seen) >= limit:
                    raise GuardExceeded(len(seen) + 1, limit)
                seen.add(nxt)
                frontier.append(nxt)
    return tuple(x.names(m) for m in sorted(seen, key=lambda m: (-m.bit_count(), m)))


def all_dbp_retracts(x: Poset, limit: Optional[int] = 10_000) -> tuple[tuple[str, ...], ...]:
    """Every subspace reachable by removing down beat points."""
    return _all_bp_retracts(x, "down", limit)


def all_ubp_retracts(x: Poset, limit: Optional[int] = 10_000) -> tuple[tuple[str, ...], ...]:
    return _all_bp_retracts(x, "up", limit)


def f_infinity(f: MonotoneMap) -> MonotoneMap:
    """Stabilized iterate of a descending endomap.

    For f <= Id the pointwise images can only go down, so some power
    satisfies f^N = f^(N+1); that power is idempotent and has the same
    stable image as every later one.
    """
    if f.dom != f.cod:
        raise CodomainMismatch("f_infinity needs an endomap")
    for i, v in enumerate(f.vals):
        if not f.dom.below[i] >> v & 1:
            raise NotDescending(f"f({f.dom.elements[i]!r}) = {f.dom.elements[v]!r} is not <= it")
    g = f
    for _ in range(f.dom.n + 1):
        nxt = g.then(f)
        if nxt == g:
            assert g.then(g) == g
            return g
        g = nxt
    raise AssertionError("descending endomap failed to stabilize")


def endomaps_below_identity(x: Poset, guard: Optional[int] = DEFAULT_GUARD) -> Iterator[MonotoneMap]:
    """All monotone f: x -> x with f <= Id."""
    return monotone_maps(x, x, guard, upper=MonotoneMap.identity(x))


def endomaps_above_identity(x: Poset, guard: Optional[int] = DEFAULT_GUARD) -> Iterator[MonotoneMap]:
    return monotone_maps(x, x, guard, lower=MonotoneMap.identity(x))


def homotopy_classes(x: Poset, y: Poset, guard: Optional[int] = DEFAULT_GUARD) -> list[list[MonotoneMap]]:
    """Partition of hom(x, y) into homotopy classes.

    Two maps are homotopic iff they are joined by a zigzag of pointwise
    inequalities, i.e. iff they lie in one comparability component.
    """
    return hom_poset(x, y, guard).comparability_classes()
