"""Hurewicz fibration verdicts: certificates, witnesses, honest unknowns.

The decision pipeline works per connected component of the base with a
nonempty preimage.  Removing down beat points of the map preserves the
Hurewicz property in both directions, so the map is first reduced to
its smallest such retract p0.  If p0 is not a Grothendieck bifibration
the map is certainly not a fibration (witnessed by a missing lift).
If the component has a minimum, bifibration of p0 is also sufficient;
if it has a maximum and height 1, an explicit retract-of-projection
certificate is constructed; if p0 is isomorphic over the base to a
product projection, that is a certificate too.  Otherwise the verdict
is unknown and a battery of necessary conditions is reported, each
with a concrete witness when it fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from typing import Optional

from .errors import EmptyDomain, PreconditionViolated, SearchBudgetExhausted
from .grothendieck import (
    GrothendieckReport,
    _scan_lifts,
    classify_grothendieck,
)
from .posets import (
    DEFAULT_GUARD,
    MonotoneMap,
    Poset,
    _bits,
    find_isomorphism_over_base,
    monotone_maps,
    product,
)
from .slices import (
    MapLike,
    MapReduction,
    SliceMap,
    as_slice,
    map_beat_points,
    restrict_over_component,
    smallest_dbp_retract_of_map,
)
from .stong import beat_points, is_contractible, is_dbp_retract, smallest_dbp_retract


def is_open_map(p: MapLike) -> tuple[bool, Optional[dict]]:
    """Check p(U_e) = U_{p(e)} for every e; witness the first miss.

    Openness is equivalent to every fiber below p(e) meeting U_e, so a
    witness names the element and the unreached base point.
    """
    s = as_slice(p)
    for ei, e in enumerate(s.total.elements):
        got = 0
        for j in _bits(s.total.below[ei]):
            got |= 1 << s.map.vals[j]
        miss = s.base.below[s.map.vals[ei]] & ~got
        if miss:
            b = s.base.elements[(miss & -miss).bit_length() - 1]
            return False, {"e": e, "missing": b}
    return True, None


def is_closed_map(p: MapLike) -> tuple[bool, Optional[dict]]:
    """Check p(F_e) = F_{p(e)} for every e; witness the first miss."""
    s = as_slice(p)
    for ei, e in enumerate(s.total.elements):
        got = 0
        for j in _bits(s.total.above[ei]):
            got |= 1 << s.map.vals[j]
        miss = s.base.above[s.map.vals[ei]] & ~got
        if miss:
            b = s.base.elements[(miss & -miss).bit_length() - 1]
            return False, {"e": e, "missing": b}
    return True, None


CONDITION_NAMES = (
    "open_map",
    "down_fiber_nonempty",
    "down_fiber_contractible",
    "up_reachability",
    "reduced_bifibration",
    "minimalE_implies_minimalB",
    "Ed_inside_preimage_Bd",
    "beat_point_dichotomy",
)


@dataclass(frozen=True)
class ConditionResult:
    name: str
    passed: bool
    witness: Optional[dict] = None


@dataclass(frozen=True)
class NecessaryReport:
    """Conditions every Hurewicz fibration must satisfy.

    Evaluated per touched base component and aggregated; a failed
    condition carries the first witness found in component order.
    None of these is sufficient; all of them failing to fail is what
    keeps a verdict honestly unknown.
    """

    conditions: tuple[ConditionResult, ...]

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.conditions)

    def get(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def failing(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.conditions if not c.passed)


def _cond_open_map(pc: SliceMap) -> Optional[dict]:
    ok, w = is_open_map(pc)
    return None if ok else w


def _cond_down_fiber_nonempty(pc: SliceMap) -> Optional[dict]:
    # openness restated fiberwise: U_e must meet every fiber below p(e)
    for ei, e in enumerate(pc.total.elements):
        pe = pc.map.vals[ei]
        for bi in _bits(pc.base.below[pe]):
            if not pc.total.below[ei] & pc.fiber_mask(pc.base.elements[bi]):
                return {"e": e, "b": pc.base.elements[bi]}
    return None


def _cond_down_fiber_contractible(pc: SliceMap) -> Optional[dict]:
    for ei, e in enumerate(pc.total.elements):
        pe = pc.map.vals[ei]
        for bi in _bits(pc.base.below[pe]):
            b = pc.base.elements[bi]
            m = pc.total.below[ei] & pc.fiber_mask(b)
            if not m:
                return {"e": e, "b": b, "reason": "empty"}
            if not is_contractible(pc.total.sub(pc.total.names(m))):
                return {"e": e, "b": b, "reason": "not_contractible"}
    return None


def _cond_up_reachability(pc: SliceMap) -> Optional[dict]:
    # some e' <= e in the fiber of p(e) must have closure meeting
    # every fiber above p(e)
    for ei, e in enumerate(pc.total.elements):
        pe = pc.map.vals[ei]
        lower_same_fiber = pc.total.below[ei] & pc.fiber_mask(pc.base.elements[pe])
        for bi in _bits(pc.base.above[pe] & ~(1 << pe)):
            target = pc.fiber_mask(pc.base.elements[bi])
            if not any(pc.total.above[j] & target for j in _bits(lower_same_fiber)):
                return {"e": e, "b": pc.base.elements[bi]}
    return None


def _reduced_witness(red: MapReduction, rep: GrothendieckReport) -> dict:
    fail = rep.fibration_failure or rep.opfibration_failure
    w = {"side": fail.side, "e": fail.e, "b": fail.b, "reason": fail.reason}
    if fail.stray is not None:
        w["stray"] = fail.stray
    if red.trace.removed:
        w["removed"] = list(red.trace.removed)
    return w


def _cond_reduced_bifibration(pc: SliceMap) -> Optional[dict]:
    red = smallest_dbp_retract_of_map(pc)
    rep = classify_grothendieck(red.reduced)
    return None if rep.is_bifibration else _reduced_witness(red, rep)


def _cond_minimal_e_implies_minimal_b(pc: SliceMap) -> Optional[dict]:
    if not beat_points(pc.total).is_minimal:
        return None
    bp = beat_points(pc.base)
    if bp.is_minimal:
        return None
    if bp.down:
        b = min(bp.down, key=pc.base.idx)
        return {"base_beat_point": b, "kind": "down"}
    b = min(bp.up, key=pc.base.idx)
    return {"base_beat_point": b, "kind": "up"}


def _cond_ed_inside_preimage_bd(pc: SliceMap) -> Optional[dict]:
    ed = smallest_dbp_retract(pc.total).result
    bd = smallest_dbp_retract(pc.base).result
    pre_mask = pc.map.preimage_mask(pc.base.mask(bd.elements))
    pre_names = pc.total.names(pre_mask)
    allowed = set(pre_names)
    for x in ed.elements:
        if x not in allowed:
            return {"stray": x}
    sub = pc.total.sub(pre_names)
    if is_dbp_retract(sub, ed.elements) is None:
        return {"reason": "not_a_dbp_retract", "subspace": list(pre_names)}
    return None


def _cond_beat_point_dichotomy(pc: SliceMap) -> Optional[dict]:
    bp_e = beat_points(pc.total)
    bp_b = beat_points(pc.base)
    mbp = map_beat_points(pc)
    for e0 in sorted(bp_e.down, key=pc.total.idx):
        if pc.map(e0) not in bp_b.down and e0 not in mbp.down:
            return {"e": e0, "kind": "down"}
    if not mbp.down:
        for e0 in sorted(bp_e.up, key=pc.total.idx):
            if pc.map(e0) not in bp_b.up and e0 not in mbp.up:
                return {"e": e0, "kind": "up"}
    return None


_CONDITION_FUNCS = {
    "open_map": _cond_open_map,
    "down_fiber_nonempty": _cond_down_fiber_nonempty,
    "down_fiber_contractible": _cond_down_fiber_contractible,
    "up_reachability": _cond_up_reachability,
    "reduced_bifibration": _cond_reduced_bifibration,
    "minimalE_implies_minimalB": _cond_minimal_e_implies_minimal_b,
    "Ed_inside_preimage_Bd": _cond_ed_inside_preimage_bd,
    "beat_point_dichotomy": _cond_beat_point_dichotomy,
}


def necessary_conditions(p: MapLike) -> NecessaryReport:
    """Evaluate every necessary condition on every touched component.

    Results aggregate over components: a condition passes when it
    passes everywhere, and otherwise carries the first witness, tagged
    with its component.
    """
    s = as_slice(p)
    if s.is_empty:
        raise EmptyDomain("necessary conditions need a nonempty total space")
    comps = [restrict_over_component(s, c) for c in s.touched_components()]
    results = []
    for name in CONDITION_NAMES:
        func = _CONDITION_FUNCS[name]
        witness = None
        for pc in comps:
            w = func(pc)
            if w is not None:
                witness = dict(w)
                witness["component"] = list(pc.base.elements)
                break
        results.append(ConditionResult(name, witness is None, witness))
    return NecessaryReport(tuple(results))


@dataclass(frozen=True)
class RetractCertificate:
    """Presentation of a map as a retract of a product projection.

    The map p: E -> B is a retract of pi_X: X x Y -> X through
    i: E -> X x Y, r: X x Y -> E, j: B -> X, s: X -> B satisfying
    r i = Id_E, s j = Id_B, pi_X i = j p and p r = s pi_X.  Retracts
    of fibrations are fibrations and projections are fibrations, so a
    verified certificate proves the Hurewicz property.
    """

    x: Poset
    y: Poset
    i: MonotoneMap
    r: MonotoneMap
    j: MonotoneMap
    s: MonotoneMap

    @property
    def ambient(self) -> Poset:
        return self.i.cod


def verify_retract_certificate(
    p: MapLike, cert: RetractCertificate
) -> tuple[bool, Optional[str]]:
    """Re-check a retract certificate from scratch.

    Returns (True, None) or (False, reason), the reason naming the
    shape constraint or the first violated identity.
    """
    sl = as_slice(p)
    prod, to_x, _ = product(cert.x, cert.y)
    if cert.i.dom != sl.total or cert.i.cod != prod:
        return False, "i must map the total space into x times y"
    if cert.r.dom != prod or cert.r.cod != sl.total:
        return False, "r must map x times y onto the total space"
    if cert.j.dom != sl.base or cert.j.cod != cert.x:
        return False, "j must map the base into x"
    if cert.s.dom != cert.x or cert.s.cod != sl.base:
        return False, "s must map x onto the base"
    if cert.i.then(cert.r) != MonotoneMap.identity(sl.total):
        return False, "r i = Id_E fails"
    if cert.j.then(cert.s) != MonotoneMap.identity(sl.base):
        return False, "s j = Id_B fails"
    if cert.i.then(to_x) != sl.map.then(cert.j):
        return False, "pi_X i = j p fails"
    if cert.r.then(sl.map) != to_x.then(cert.s):
        return False, "p r = s pi_X fails"
    return True, None


def projection_retract_height1(p0: MapLike) -> RetractCertificate:
    """Constructive retract certificate over a height <= 1 base with maximum.

    With X = B and Y = E, the section is i(e) = (p(e), e).  The
    retraction first pushes (b, e) up into the fiber of the maximum
    (cocartesian transport, unless p(e) = b already), then back down
    into the fiber of b (cartesian transport).  Height 1 makes that
    composite monotone; preconditions are checked up front and every
    claimed identity is validated on the result.
    """
    s = as_slice(p0)
    if s.is_empty:
        raise PreconditionViolated("certificate construction needs a nonempty total space")
    b0 = s.base.maximum()
    if b0 is None:
        raise PreconditionViolated("base has no maximum element")
    if s.base.height() > 1:
        raise PreconditionViolated("base height exceeds 1")
    fib_fail, cart = _scan_lifts(s, "cartesian")
    opfib_fail, cocart = _scan_lifts(s, "cocartesian")
    if fib_fail is not None or opfib_fail is not None:
        raise PreconditionViolated("map is not a Grothendieck bifibration")

    total, base, vals = s.total, s.base, s.map.vals
    b0i = base.idx(b0)
    prod, _, _ = product(base, total)
    # product elements are base-major: index (bi, ei) -> bi * total.n + ei
    i = MonotoneMap(total, prod, tuple(vals[ei] * total.n + ei for ei in range(total.n)))
    r_vals = [0] * prod.n
    for k in range(prod.n):
        bi, ei = divmod(k, total.n)
        if vals[ei] == bi:
            r_vals[k] = ei
            continue
        mid = ei if vals[ei] == b0i else cocart[(ei, b0i)]
        # the lifted point sits over the maximum and is >= the original
        assert total.below[mid] >> ei & 1
        r_vals[k] = mid if bi == b0i else cart[(mid, bi)]
    r = MonotoneMap.build(
        prod, total, {prod.elements[k]: total.elements[r_vals[k]] for k in range(prod.n)}
    )
    # downward transport never leaves the minimal open of its argument
    for ei in range(total.n):
        for bi in _bits(base.below[vals[ei]]):
            v = ei if vals[ei] == bi else cart[(ei, bi)]
            assert total.below[ei] >> v & 1
    cert = RetractCertificate(
        base, total, i, r, MonotoneMap.identity(base), MonotoneMap.identity(base)
    )
    ok, reason = verify_retract_certificate(s, cert)
    assert ok, reason
    return cert


def is_trivial_over_base(p: MapLike, budget: Optional[int] = None) -> Optional[dict]:
    """Isomorphism over B with the projection B x F -> B, if one exists.

    F is the fiber over the first base element; a size mismatch rules
    the isomorphism out without searching.
    """
    s = as_slice(p)
    if s.base.n == 0:
        return None
    b0 = s.base.elements[0]
    fiber = s.fiber(b0)
    if s.base.n * fiber.n != s.total.n:
        return None
    prod, to_base, _ = product(s.base, fiber)
    iso = find_isomorphism_over_base(s.map, to_base, budget)
    if iso is None:
        return None
    return {"fiber_of": b0, "iso": iso}


def _all_labeled_posets(names: tuple[str, ...]):
    """Every partial order on the given labeled elements."""
    n = len(names)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    for choice in iproduct((False, True), repeat=len(pairs)):
        rel = [[i == j for j in range(n)] for i in range(n)]
        ok = True
        for (i, j), on in zip(pairs, choice):
            if on:
                rel[i][j] = True
        for i in range(n):
            for j in range(n):
                if i != j and rel[i][j] and rel[j][i]:
                    ok = False
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if rel[i][j] and rel[j][k] and not rel[i][k]:
                        ok = False
        if not ok:
            continue
        below = [0] * n
        for j in range(n):
            for i in range(n):
                if rel[i][j]:
                    below[j] |= 1 << i
        yield Poset(names, below)


def search_retract_certificate(
    p: MapLike, max_y: int = 3, guard: Optional[int] = DEFAULT_GUARD
) -> Optional[RetractCertificate]:
    """Bounded exhaustive search for a retract certificate with X = B.

    Enumerates every labeled poset Y with at most max_y elements,
    every monotone g: E -> Y making i = (p, g) injective, and every
    fiber-preserving monotone r with r i = Id.  The X side is pinned
    to the base with j = s = Id, the shape every certificate this
    engine emits has; None is an exhausted-search result for that
    shape, not a proof that wilder certificates cannot exist.
    """
    s = as_slice(p)
    for k in range(1, max_y + 1):
        names = tuple(f"y{t}" for t in range(k))
        for y in _all_labeled_posets(names):
            prod, to_x, _ = product(s.base, y)
            for g in monotone_maps(s.total, y, guard):
                i_vals = tuple(s.map.vals[ei] * y.n + g.vals[ei] for ei in range(s.total.n))
                if len(set(i_vals)) < s.total.n:
                    continue
                pins = {prod.elements[v]: s.total.elements[ei] for ei, v in enumerate(i_vals)}
                r = next(monotone_maps(prod, s.total, guard, over=(to_x, s.map), fixed=pins), None)
                if r is None:
                    continue
                i = MonotoneMap(s.total, prod, i_vals)
                cert = RetractCertificate(
                    s.base, y, i, r, MonotoneMap.identity(s.base), MonotoneMap.identity(s.base)
                )
                ok, reason = verify_retract_certificate(s, cert)
                assert ok, reason
                return cert
    return None


@dataclass(frozen=True)
class Certificate:
    """A machine-checkable reason a verdict is Fibration."""

    kind: str  # minimum_base_bifibration | height1_max_retract | trivial_over_base | explicit_retract
    data: dict


@dataclass(frozen=True)
class ComponentVerdict:
    component: tuple[str, ...]
    status: str  # fibration | not_fibration | unknown
    certificate: Optional[Certificate] = None
    witness: Optional[dict] = None
    necessary: Optional[NecessaryReport] = None


@dataclass(frozen=True)
class Verdict:
    """Outcome of the Hurewicz decision.

    Overall status is not_fibration if any component fails, else
    unknown if any component is undecided, else fibration.  The
    top-level certificate is the single component's certificate when
    there is exactly one analyzed component, or the explicit retract
    certificate that upgraded an unknown; multi-component fibrations
    carry their certificates per component.
    """

    status: str
    components: tuple[ComponentVerdict, ...]
    skipped_components: tuple[tuple[str, ...], ...] = ()
    certificate: Optional[Certificate] = None
    witness: Optional[dict] = None

    @property
    def exit_code(self) -> int:
        return {"fibration": 0, "not_fibration": 1, "unknown": 2}[self.status]


def _decide_component(pc: SliceMap, budget: Optional[int]) -> ComponentVerdict:
    comp = pc.base.elements
    missing = pc.missed()
    if missing:
        return ComponentVerdict(
            comp,
            "not_fibration",
            witness={
                "condition": "surjective_over_component",
                "missing": missing[0],
                "component": list(comp),
            },
        )
    red = smallest_dbp_retract_of_map(pc)
    rep = classify_grothendieck(red.reduced)
    if not rep.is_bifibration:
        w = _reduced_witness(red, rep)
        w["condition"] = "reduced_bifibration"
        w["component"] = list(comp)
        return ComponentVerdict(comp, "not_fibration", witness=w)
    if pc.base.minimum() is not None:
        cert = Certificate(
            "minimum_base_bifibration",
            {"minimum": pc.base.minimum(), "reduction": red, "classification": rep},
        )
        return ComponentVerdict(comp, "fibration", certificate=cert)
    if pc.base.maximum() is not None and pc.base.height() <= 1:
        retract = projection_retract_height1(red.reduced)
        cert = Certificate(
            "height1_max_retract",
            {"maximum": pc.base.maximum(), "reduction": red, "retract": retract},
        )
        return ComponentVerdict(comp, "fibration", certificate=cert)
    trivial_exhausted = False
    try:
        triv = is_trivial_over_base(red.reduced, budget)
    except SearchBudgetExhausted:
        triv = None
        trivial_exhausted = True
    if triv is not None:
        cert = Certificate(
            "trivial_over_base",
            {"fiber_of": triv["fiber_of"], "iso": triv["iso"], "reduction": red},
        )
        return ComponentVerdict(comp, "fibration", certificate=cert)
    report = necessary_conditions(pc)
    witness = {"condition": "undecided", "component": list(comp)}
    if trivial_exhausted:
        witness["trivial_search"] = "budget_exhausted"
    return ComponentVerdict(comp, "unknown", witness=witness, necessary=report)


def decide_hurewicz(
    p: MapLike,
    *,
    budget: Optional[int] = None,
    certificate: Optional[RetractCertificate] = None,
) -> Verdict:
    """Three-valued Hurewicz decision with certificates and witnesses.

    Components of the base with empty preimage are skipped (nothing to
    lift into them).  A caller-supplied retract certificate is only
    consulted to upgrade an otherwise unknown verdict; it can never
    mask a refutation.
    """
    s = as_slice(p)
    if s.is_empty:
        raise EmptyDomain("the empty map is not analyzed; every lift is vacuous")
    touched = s.touched_components()
    skipped = tuple(c for c in s.base.components() if c not in touched)
    parts = tuple(
        _decide_component(restrict_over_component(s, c), budget) for c in touched
    )
    if any(c.status == "not_fibration" for c in parts):
        first = next(c for c in parts if c.status == "not_fibration")
        return Verdict("not_fibration", parts, skipped, witness=first.witness)
    if any(c.status == "unknown" for c in parts):
        if certificate is not None:
            ok, _ = verify_retract_certificate(s, certificate)
            if ok:
                cert = Certificate("explicit_retract", {"certificate": certificate})
                return Verdict("fibration", parts, skipped, certificate=cert)
        first = next(c for c in parts if c.status == "unknown")
        return Verdict("unknown", parts, skipped, witness=first.witness)
    top = parts[0].certificate if len(parts) == 1 else None
    return Verdict("fibration", parts, skipped, certificate=top)
