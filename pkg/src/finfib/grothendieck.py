"""Cartesian lifts, transport functors and the Grothendieck construction.

A map p: E -> B is a Grothendieck fibration when every e and every
b <= p(e) admit a cartesian lift: U_e intersected with p^{-1}(U_b) has
a maximum lying in the fiber over b.  Opfibrations are dual (minimum
of F_e inside p^{-1}(F_b)), and a bifibration is both.  Fibrations
give a contravariant transport functor alpha on the base, opfibrations
a covariant one beta, and integrating beta back rebuilds p up to an
isomorphism over the base.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    FinfibError,
    FunctorialityViolated,
    NotGrothendieckFibration,
    NotGrothendieckOpfibration,
    PreconditionViolated,
    ReconstructionMismatch,
    SearchBudgetExhausted,
    UnknownElement,
)
from .posets import (
    MonotoneMap,
    Poset,
    _bits,
    find_isomorphism_over_base,
    pair_name,
    product,
)
from .slices import MapLike, SliceMap, as_slice, restrict_over


@dataclass(frozen=True)
class LiftOutcome:
    """Result of one (co)cartesian lift request.

    ``element`` is the transport when it exists; otherwise ``reason``
    says what broke and ``stray`` names the extremum that landed in
    the wrong fiber, when there is one.
    """

    element: Optional[str]
    reason: Optional[str] = None
    stray: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.element is not None


@dataclass(frozen=True)
class LiftFailure:
    """First failing lift on one side of the classification."""

    side: str  # 'cartesian' | 'cocartesian'
    e: str
    b: str
    reason: str
    stray: Optional[str] = None


def cartesian_lift(p: MapLike, e: str, b: str) -> LiftOutcome:
    """Maximum of U_e inside p^{-1}(U_b), required to sit over b.

    Precondition b <= p(e); the lift of the trivial case b = p(e) is e
    itself.
    """
    s = as_slice(p)
    ei = s.total.idx(e)
    bi = s.base.idx(b)
    pe = s.map.vals[ei]
    if not s.base.below[pe] >> bi & 1:
        raise PreconditionViolated(f"cartesian lift needs {b!r} <= p({e!r})")
    m = s.total.below[ei] & s.map.preimage_mask(s.base.below[bi])
    top = s.total.max_of_mask(m)
    if top is None:
        return LiftOutcome(None, "no_maximum")
    if s.map.vals[s.total.idx(top)] != bi:
        return LiftOutcome(None, "maximum_outside_fiber", top)
    return LiftOutcome(top)


def cocartesian_lift(p: MapLike, e: str, b: str) -> LiftOutcome:
    """Minimum of F_e inside p^{-1}(F_b), required to sit over b."""
    s = as_slice(p)
    ei = s.total.idx(e)
    bi = s.base.idx(b)
    pe = s.map.vals[ei]
    if not s.base.above[pe] >> bi & 1:
        raise PreconditionViolated(f"cocartesian lift needs {b!r} >= p({e!r})")
    m = s.total.above[ei] & s.map.preimage_mask(s.base.above[bi])
    bot = s.total.min_of_mask(m)
    if bot is None:
        return LiftOutcome(None, "no_minimum")
    if s.map.vals[s.total.idx(bot)] != bi:
        return LiftOutcome(None, "minimum_outside_fiber", bot)
    return LiftOutcome(bot)


class PosetFunctor:
    """A functor from a poset into finite posets.

    ``fibers[b]`` is the poset at b.  ``transitions`` holds one
    monotone map per strictly related pair (lo, hi): covariant
    functors map fibers[lo] -> fibers[hi], contravariant ones
    fibers[hi] -> fibers[lo].  Construction validates shapes and path
    independence, so instances are always genuine functors.
    """

    __slots__ = ("base", "variance", "fibers", "transitions")

    def __init__(
        self,
        base: Poset,
        variance: str,
        fibers: dict[str, Poset],
        transitions: dict[tuple[str, str], MonotoneMap],
    ):
        if variance not in ("covariant", "contravariant"):
            raise FunctorialityViolated(f"unknown variance {variance!r}")
        if set(fibers) != set(base.elements):
            raise UnknownElement("fibers must be indexed exactly by the base elements")
        self.base = base
        self.variance = variance
        self.fibers = dict(fibers)
        self.transitions = dict(transitions)
        self._validate()

    def _validate(self) -> None:
        for (lo, hi), t in self.transitions.items():
            if lo not in self.base or hi not in self.base:
                raise UnknownElement(f"transition pair ({lo!r}, {hi!r}) is not in the base")
            if not self.base.lt(lo, hi):
                raise FunctorialityViolated(f"transition pair ({lo!r}, {hi!r}) is not strictly related")
            src, dst = (lo, hi) if self.variance == "covariant" else (hi, lo)
            if t.dom != self.fibers[src] or t.cod != self.fibers[dst]:
                raise FunctorialityViolated(f"transition for ({lo!r}, {hi!r}) has the wrong fibers")
        for bi, b in enumerate(self.base.elements):
            for vi in _bits(self.base.below[bi] & ~(1 << bi)):
                v = self.base.elements[vi]
                if (v, b) not in self.transitions:
                    raise FunctorialityViolated(f"missing transition for ({v!r}, {b!r})")
        # path independence over every strictly ordered triple
        for lo, hi in self.transitions:
            for mi in _bits(self.base.below[self.base.idx(hi)] & self.base.above[self.base.idx(lo)]):
                mid = self.base.elements[mi]
                if mid == lo or mid == hi:
                    continue
                if self.variance == "covariant":
                    through = self.transitions[(lo, mid)].then(self.transitions[(mid, hi)])
                else:
                    through = self.transitions[(mid, hi)].then(self.transitions[(lo, mid)])
                if through != self.transitions[(lo, hi)]:
                    raise FunctorialityViolated(
                        f"transitions do not compose along {lo!r} <= {mid!r} <= {hi!r}"
                    )

    @classmethod
    def build(
        cls,
        base: Poset,
        variance: str,
        fibers: dict[str, Poset],
        transitions: dict[tuple[str, str], MonotoneMap],
    ) -> "PosetFunctor":
        """Build a functor, composing cover transitions for absent pairs."""
        filled = dict(transitions)
        # bottom-up over the base, and within each top element nearest
        # lower elements first, so both halves of a composite exist
        for bi in sorted(range(base.n), key=lambda i: (base.below[i].bit_count(), i)):
            b = base.elements[bi]
            lows = sorted(
                _bits(base.below[bi] & ~(1 << bi)),
                key=lambda vi: -base.below[vi].bit_count(),
            )
            for vi in lows:
                v = base.elements[vi]
                if (v, b) in filled:
                    continue
                step = None
                for ci in _bits(base.below[bi] & ~(1 << bi)):
                    c = base.elements[ci]
                    if base.lt(v, c) and (v, c) in filled and (c, b) in filled:
                        step = c
                        break
                if step is None:
                    raise FunctorialityViolated(f"missing transition for ({v!r}, {b!r})")
                if variance == "covariant":
                    filled[(v, b)] = filled[(v, step)].then(filled[(step, b)])
                else:
                    filled[(v, b)] = filled[(step, b)].then(filled[(v, step)])
        return cls(base, variance, fibers, filled)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PosetFunctor):
            return NotImplemented
        return (
            self.base == other.base
            and self.variance == other.variance
            and self.fibers == other.fibers
            and self.transitions == other.transitions
        )

    def __hash__(self) -> int:
        return hash((self.base, self.variance, tuple(sorted(self.transitions))))

    def __repr__(self) -> str:
        return f"PosetFunctor({self.variance} over {self.base!r})"

    def transition(self, lo: str, hi: str) -> MonotoneMap:
        """Transport along lo <= hi (the identity when lo == hi)."""
        if lo == hi:
            if lo not in self.fibers:
                raise UnknownElement(f"{lo!r} is not in the base")
            return MonotoneMap.identity(self.fibers[lo])
        try:
            return self.transitions[(lo, hi)]
        except KeyError:
            raise PreconditionViolated(f"{lo!r} <= {hi!r} does not hold in the base") from None

    def is_morphism_inverting(self) -> bool:
        """True when every transition is an isomorphism."""
        return all(t.is_iso() for t in self.transitions.values())


def _scan_lifts(
    s: SliceMap, side: str
) -> tuple[Optional[LiftFailure], dict[tuple[int, int], int]]:
    """All lifts on one side, plus the first failure in index order.

    Transport indices are recorded for every total element e and every
    base element strictly below (cartesian) or above (cocartesian)
    p(e); scanning order is e-major, base-index-minor.
    """
    total, base, vals = s.total, s.base, s.map.vals
    rows = base.below if side == "cartesian" else base.above
    lift = cartesian_lift if side == "cartesian" else cocartesian_lift
    failure = None
    transports: dict[tuple[int, int], int] = {}
    for ei, e in enumerate(total.elements):
        for bi in _bits(rows[vals[ei]] & ~(1 << vals[ei])):
            out = lift(s, e, base.elements[bi])
            if out.ok:
                transports[(ei, bi)] = total.idx(out.element)
            elif failure is None:
                failure = LiftFailure(side, e, base.elements[bi], out.reason, out.stray)
    return failure, transports


def _transport_functor(s: SliceMap, side: str, transports: dict[tuple[int, int], int]) -> PosetFunctor:
    """Package one side's transports as a functor on the base.

    Cartesian transports form a contravariant functor (alpha), the
    cocartesian ones a covariant functor (beta); fibers carry their
    order as subspaces of the total space.
    """
    total, base, vals = s.total, s.base, s.map.vals
    fibers = {b: s.fiber(b) for b in base.elements}
    transitions: dict[tuple[str, str], MonotoneMap] = {}
    for bi, b in enumerate(base.elements):
        for vi in _bits(base.below[bi] & ~(1 << bi)):
            v = base.elements[vi]
            if side == "cartesian":
                src, dst = fibers[b], fibers[v]
                key = lambda ei: (ei, vi)
            else:
                src, dst = fibers[v], fibers[b]
                key = lambda ei: (ei, bi)
            tvals = tuple(
                dst.index[total.elements[transports[key(total.index[x])]]] for x in src.elements
            )
            transitions[(v, b)] = MonotoneMap(src, dst, tvals)
    variance = "contravariant" if side == "cartesian" else "covariant"
    return PosetFunctor(base, variance, fibers, transitions)


@dataclass(frozen=True)
class GrothendieckReport:
    """Classification of a map on both lift sides.

    ``alpha`` (contravariant transport) is present iff the map is a
    Grothendieck fibration, ``beta`` (covariant) iff an opfibration.
    """

    is_fibration: bool
    is_opfibration: bool
    fibration_failure: Optional[LiftFailure] = None
    opfibration_failure: Optional[LiftFailure] = None
    alpha: Optional[PosetFunctor] = field(default=None, compare=False)
    beta: Optional[PosetFunctor] = field(default=None, compare=False)

    @property
    def is_bifibration(self) -> bool:
        return self.is_fibration and self.is_opfibration


def classify_grothendieck(p: MapLike) -> GrothendieckReport:
    """Decide fibration and opfibration status by checking every lift.

    Witnesses are the first failing (element, base point) pair in
    index order on each failing side; transport functors are attached
    for each side that holds.
    """
    s = as_slice(p)
    fib_fail, cart = _scan_lifts(s, "cartesian")
    opfib_fail, cocart = _scan_lifts(s, "cocartesian")
    alpha = _transport_functor(s, "cartesian", cart) if fib_fail is None else None
    beta = _transport_functor(s, "cocartesian", cocart) if opfib_fail is None else None
    return GrothendieckReport(
        fib_fail is None, opfib_fail is None, fib_fail, opfib_fail, alpha, beta
    )


def alpha_functor(p: MapLike) -> PosetFunctor:
    """Contravariant transport functor of a Grothendieck fibration.

    alpha(b' >= b) sends e in the fiber over b' to its cartesian
    transport max(U_e inside p^{-1}(b)); fails with the first lift
    failure if p is not a fibration.
    """
    s = as_slice(p)
    failure, cart = _scan_lifts(s, "cartesian")
    if failure is not None:
        raise NotGrothendieckFibration(
            f"no cartesian lift of {failure.e!r} over {failure.b!r} ({failure.reason})",
            witness=failure,
        )
    return _transport_functor(s, "cartesian", cart)


def beta_functor(p: MapLike) -> PosetFunctor:
    """Covariant transport functor of a Grothendieck opfibration."""
    s = as_slice(p)
    failure, cocart = _scan_lifts(s, "cocartesian")
    if failure is not None:
        raise NotGrothendieckOpfibration(
            f"no cocartesian lift of {failure.e!r} over {failure.b!r} ({failure.reason})",
            witness=failure,
        )
    return _transport_functor(s, "cocartesian", cocart)


def grothendieck_construction(d: PosetFunctor) -> SliceMap:
    """Total space and projection of a transport functor.

    For covariant d over B the points are the pairs (b, x) with x in
    d(b), ordered by (v, y) <= (b, x) iff v <= b in B and the
    transport of y into the fiber over b is <= x there.  This is the
    specialization order of the topology generated by the sets
    {v in U_b} x transition(v, b)^{-1}(V) for V open in d(b).

    A contravariant d is integrated as the covariant functor it
    defines over the opposite base, with opposite fibers; the result
    then projects to d.base.op().  Integrating the cartesian functor
    of a fibration p this way rebuilds p.op().
    """
    if d.variance == "contravariant":
        flipped: dict[tuple[str, str], MonotoneMap] = {}
        for (lo, hi), t in d.transitions.items():
            flipped[(hi, lo)] = t.op()
        avatar = PosetFunctor(
            d.base.op(), "covariant", {b: f.op() for b, f in d.fibers.items()}, flipped
        )
        return grothendieck_construction(avatar)
    base = d.base
    names: list[str] = []
    owner: list[tuple[int, int]] = []  # (base index, index inside that fiber)
    offset: dict[int, int] = {}
    for bi, b in enumerate(base.elements):
        offset[bi] = len(names)
        for xi, x in enumerate(d.fibers[b].elements):
            names.append(pair_name(b, x))
            owner.append((bi, xi))
    below = [0] * len(names)
    for k, (bi, xi) in enumerate(owner):
        b = base.elements[bi]
        fib_b = d.fibers[b]
        m = 0
        for vi in _bits(base.below[bi]):
            v = base.elements[vi]
            t = d.transition(v, b)
            for yj in range(d.fibers[v].n):
                if fib_b.below[xi] >> t.vals[yj] & 1:
                    m |= 1 << offset[vi] + yj
        below[k] = m
    total = Poset(names, below)
    for k in range(total.n):
        for j in _bits(below[k]):
            if below[j] & ~below[k]:
                raise FunctorialityViolated("transition data does not generate a poset")
    proj = MonotoneMap(total, base, tuple(bi for bi, _ in owner))
    return SliceMap(proj)


def reconstruct_over_base(p: MapLike) -> tuple[SliceMap, MonotoneMap]:
    """Integrate the covariant transport of an opfibration and match it.

    Returns the constructed projection and the isomorphism onto the
    original total space given by (b, x) -> x; any failure of that
    correspondence to be an isomorphism over the base raises
    ReconstructionMismatch, so a clean return is a machine check of
    the reconstruction.
    """
    s = as_slice(p)
    integ = grothendieck_construction(beta_functor(s))
    try:
        phi = MonotoneMap.build(
            integ.total,
            s.total,
            {pair_name(b, x): x for b in s.base.elements for x in s.fiber(b).elements},
        )
    except FinfibError as exc:
        raise ReconstructionMismatch(f"correspondence is not monotone: {exc}") from exc
    if not phi.is_iso():
        raise ReconstructionMismatch("correspondence (b, x) -> x is not an isomorphism")
    if phi.then(s.map) != integ.map:
        raise ReconstructionMismatch("correspondence does not commute with the projections")
    return integ, phi


@dataclass(frozen=True)
class BundleReport:
    """Local triviality over every minimal open set of the base.

    ``trivializations[b]`` matches the restriction over U_b with the
    product U_b x fiber(b); ``failed_at`` is the first base point with
    no such matching (a certified failure, the search is exhaustive),
    ``undecided_at`` the first point where a budget ran out.
    """

    status: str  # 'bundle' | 'not_bundle' | 'undecided'
    trivializations: dict[str, dict[str, str]]
    failed_at: Optional[str] = None
    undecided_at: Optional[str] = None


def is_fiber_bundle(p: MapLike, budget: Optional[int] = None) -> BundleReport:
    """Check local triviality base point by base point, in index order.

    Fibers over one U_b may differ from fiber(b) or sit in it the
    wrong way; the isomorphism-over-base search is exhaustive, so a
    miss is a proof.  With a budget, an exhausted search stops the
    scan and reports undecided.
    """
    s = as_slice(p)
    trivializations: dict[str, dict[str, str]] = {}
    for b in s.base.elements:
        rest = restrict_over(s, s.base.down_set(b))
        prod, to_base, _ = product(rest.base, s.fiber(b))
        try:
            iso = find_isomorphism_over_base(rest.map, to_base, budget)
        except SearchBudgetExhausted:
            return BundleReport("undecided", trivializations, undecided_at=b)
        if iso is None:
            return BundleReport("not_bundle", trivializations, failed_at=b)
        trivializations[b] = iso
    return BundleReport("bundle", trivializations)


def lower_lift(p: MapLike, f: MonotoneMap, g: MonotoneMap) -> MonotoneMap:
    """The largest lift of g through a fibration p below f.

    For g <= p o f pointwise, h(x) is the cartesian transport of f(x)
    into the fiber over g(x); then h <= f and p o h = g.  The map p
    must be a Grothendieck fibration.
    """
    s = as_slice(p)
    if f.cod != s.total or g.cod != s.base or f.dom != g.dom:
        raise PreconditionViolated("need f: X -> total and g: X -> base on one domain")
    if not g.le(f.then(s.map)):
        raise PreconditionViolated("g <= p o f must hold pointwise")
    failure, cart = _scan_lifts(s, "cartesian")
    if failure is not None:
        raise NotGrothendieckFibration(
            f"no cartesian lift of {failure.e!r} over {failure.b!r} ({failure.reason})",
            witness=failure,
        )
    vals = []
    for i in range(f.dom.n):
        ei, bi = f.vals[i], g.vals[i]
        vals.append(ei if s.map.vals[ei] == bi else cart[(ei, bi)])
    h = MonotoneMap(f.dom, s.total, tuple(vals))
    assert h.le(f) and h.then(s.map) == g
    return h
