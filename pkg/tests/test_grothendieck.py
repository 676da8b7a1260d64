"""Lifts, transport functors, the construction, and bundle detection."""

import pytest

from finfib.errors import (
    FunctorialityViolated,
    NotGrothendieckFibration,
    NotGrothendieckOpfibration,
    PreconditionViolated,
)
from finfib.gallery import gallery_map
from finfib.grothendieck import (
    PosetFunctor,
    alpha_functor,
    beta_functor,
    cartesian_lift,
    classify_grothendieck,
    cocartesian_lift,
    grothendieck_construction,
    is_fiber_bundle,
    lower_lift,
    reconstruct_over_base,
)
from finfib.posets import MonotoneMap, Poset, monotone_maps, pair_name, product
from finfib.slices import as_slice
from helpers import (
    brute_lift,
    rand_bundle,
    rand_functor,
    rand_monotone,
    rand_poset,
    seeded,
)


def all_gallery_maps():
    return [gallery_map(i) for i in ("p1", "p1op", "p2", "p3", "pi_sierpinski", "p5_minimal_bifib")]


def assert_lifts_match_brute_force(m):
    s = as_slice(m)
    for e in s.total.elements:
        for b in s.base.elements:
            if s.base.le(b, s.map(e)):
                got = cartesian_lift(s, e, b)
                want, _ = brute_lift(s, e, b, "cartesian")
                assert got.element == want
            if s.base.le(s.map(e), b):
                got = cocartesian_lift(s, e, b)
                want, _ = brute_lift(s, e, b, "cocartesian")
                assert got.element == want


def test_lifts_agree_with_brute_force_on_gallery_maps():
    for m in all_gallery_maps():
        assert_lifts_match_brute_force(m)


def test_lifts_agree_with_brute_force_on_random_maps():
    rng = seeded(97)
    for _ in range(40):
        dom = rand_poset(rng, rng.randint(1, 7), prefix="e")
        cod = rand_poset(rng, rng.randint(1, 4), prefix="b")
        assert_lifts_match_brute_force(rand_monotone(rng, dom, cod))


def test_trivial_lift_is_the_element_itself():
    p3 = gallery_map("p3")
    for e in p3.dom.elements:
        assert cartesian_lift(p3, e, p3(e)).element == e
        assert cocartesian_lift(p3, e, p3(e)).element == e


def test_lift_preconditions():
    p1 = gallery_map("p1")
    with pytest.raises(PreconditionViolated):
        cartesian_lift(p1, "(a,0)", "b")
    with pytest.raises(PreconditionViolated):
        cocartesian_lift(p1, "(b,0)", "a")


def test_classification_of_gallery_maps():
    rep = classify_grothendieck(gallery_map("p1"))
    assert rep.is_fibration and not rep.is_opfibration
    assert rep.opfibration_failure.side == "cocartesian"
    rep = classify_grothendieck(gallery_map("p1op"))
    assert not rep.is_fibration and rep.is_opfibration
    fail = rep.fibration_failure
    assert (fail.e, fail.b, fail.reason) == ("(a,1)", "b", "no_maximum")
    rep = classify_grothendieck(gallery_map("p2"))
    assert rep.is_fibration and not rep.is_opfibration
    fail = rep.opfibration_failure
    assert (fail.e, fail.b, fail.reason) == ("(a,2)", "b", "no_minimum")
    assert classify_grothendieck(gallery_map("p3")).is_bifibration
    assert classify_grothendieck(gallery_map("p5_minimal_bifib")).is_bifibration


def test_reported_failure_is_the_first_in_index_order():
    rng = seeded(101)
    checked = 0
    for _ in range(60):
        dom = rand_poset(rng, rng.randint(1, 6), prefix="e")
        cod = rand_poset(rng, rng.randint(1, 4), prefix="b")
        m = rand_monotone(rng, dom, cod)
        s = as_slice(m)
        rep = classify_grothendieck(s)
        for side, fail in (
            ("cartesian", rep.fibration_failure),
            ("cocartesian", rep.opfibration_failure),
        ):
            first = None
            for e in s.total.elements:
                for b in s.base.elements:
                    related = (
                        s.base.le(b, s.map(e)) if side == "cartesian" else s.base.le(s.map(e), b)
                    )
                    if related and first is None:
                        el, _ = brute_lift(s, e, b, side)
                        if el is None:
                            first = (e, b)
            if fail is None:
                assert first is None
            else:
                checked += 1
                assert (fail.e, fail.b) == first
    assert checked >= 20


def test_transport_functors_require_their_side():
    with pytest.raises(NotGrothendieckFibration):
        alpha_functor(gallery_map("p1op"))
    with pytest.raises(NotGrothendieckOpfibration):
        beta_functor(gallery_map("p1"))


def collect_bifibrations(rng, count):
    """Random Grothendieck constructions filtered to bifibrations."""
    out = []
    while len(out) < count:
        d = rand_functor(rng)
        proj = grothendieck_construction(d)
        rep = classify_grothendieck(proj)
        assert rep.is_opfibration  # construction of a covariant functor
        if rep.is_bifibration:
            out.append((d, proj, rep))
    return out


def test_construction_fibers_realize_the_functor():
    rng = seeded(103)
    for _ in range(15):
        d = rand_functor(rng)
        s = grothendieck_construction(d)
        assert s.base == d.base
        for b in d.base.elements:
            fib = s.fiber(b)
            names = {pair_name(b, x): x for x in d.fibers[b].elements}
            assert set(fib.elements) == set(names)
            down = MonotoneMap.build(fib, d.fibers[b], names)
            assert down.is_iso()


def test_construction_cocartesian_transport_is_the_functor():
    rng = seeded(107)
    for _ in range(15):
        d = rand_functor(rng)
        s = grothendieck_construction(d)
        beta = beta_functor(s)
        for lo, hi in d.base.covers():
            t = d.transition(lo, hi)
            bt = beta.transition(lo, hi)
            for x in d.fibers[lo].elements:
                assert bt(pair_name(lo, x)) == pair_name(hi, t(x))


def test_transport_identities_on_random_bifibrations():
    """The four adjunction clauses, on sixty random bifibrations."""
    rng = seeded(109)
    for _, proj, rep in collect_bifibrations(rng, 60):
        s = as_slice(proj)
        alpha, beta = rep.alpha, rep.beta
        for lo in s.base.elements:
            for hi in s.base.elements:
                if not s.base.lt(lo, hi):
                    continue
                al = alpha.transition(lo, hi)
                be = beta.transition(lo, hi)
                id_lo = MonotoneMap.identity(s.fiber(lo))
                id_hi = MonotoneMap.identity(s.fiber(hi))
                assert id_lo.le(be.then(al))
                assert al.then(be).le(id_hi)
                assert be.then(al).then(be) == be
                assert al.then(be).then(al) == al


def test_transports_are_the_pointwise_lifts():
    rng = seeded(113)
    for _, proj, rep in collect_bifibrations(rng, 25):
        s = as_slice(proj)
        for lo in s.base.elements:
            for hi in s.base.elements:
                if not s.base.lt(lo, hi):
                    continue
                al = rep.alpha.transition(lo, hi)
                be = rep.beta.transition(lo, hi)
                for e in s.fiber(hi).elements:
                    assert al(e) == cartesian_lift(s, e, lo).element
                for e in s.fiber(lo).elements:
                    assert be(e) == cocartesian_lift(s, e, hi).element


def test_transport_functoriality_along_chains():
    rng = seeded(127)
    for _, proj, rep in collect_bifibrations(rng, 25):
        s = as_slice(proj)
        for b in s.base.elements:
            assert rep.alpha.transition(b, b) == MonotoneMap.identity(s.fiber(b))
            assert rep.beta.transition(b, b) == MonotoneMap.identity(s.fiber(b))
        for lo in s.base.elements:
            for mid in s.base.elements:
                for hi in s.base.elements:
                    if s.base.lt(lo, mid) and s.base.lt(mid, hi):
                        assert rep.alpha.transition(mid, hi).then(
                            rep.alpha.transition(lo, mid)
                        ) == rep.alpha.transition(lo, hi)
                        assert rep.beta.transition(lo, mid).then(
                            rep.beta.transition(mid, hi)
                        ) == rep.beta.transition(lo, hi)


def test_integrating_beta_recovers_the_map():
    rng = seeded(131)
    for _, proj, _ in collect_bifibrations(rng, 40):
        integ, phi = reconstruct_over_base(proj)
        assert phi.is_iso()
        assert phi.then(as_slice(proj).map) == integ.map
    # and also for plain opfibrations, where only the beta side exists
    for _ in range(10):
        d = rand_functor(rng)
        reconstruct_over_base(grothendieck_construction(d))


def test_functor_build_composes_covers():
    base = Poset.chain(["u", "v", "w"])
    fib = Poset.chain(["0", "1"])
    flip = {"0": "0", "1": "1"}
    step = MonotoneMap.build(fib, fib, flip)
    d = PosetFunctor.build(
        base,
        "covariant",
        {b: fib for b in base.elements},
        {("u", "v"): step, ("v", "w"): step},
    )
    assert d.transition("u", "w") == step.then(step)
    with pytest.raises(FunctorialityViolated):
        PosetFunctor.build(base, "covariant", {b: fib for b in base.elements}, {("u", "v"): step})


def test_functor_build_rejects_path_dependence():
    diamond = Poset.build(
        ["bot", "l", "r", "top"],
        [("bot", "l"), ("bot", "r"), ("l", "top"), ("r", "top")],
    )
    fib = Poset.antichain(["0", "1"])
    ident = MonotoneMap.identity(fib)
    swap = MonotoneMap.build(fib, fib, {"0": "1", "1": "0"})
    with pytest.raises(FunctorialityViolated):
        PosetFunctor.build(
            diamond,
            "covariant",
            {b: fib for b in diamond.elements},
            {
                ("bot", "l"): ident,
                ("bot", "r"): ident,
                ("l", "top"): ident,
                ("r", "top"): swap,
            },
        )


def test_bundle_status_of_gallery_maps():
    expect = {
        "p1": ("not_bundle", "b"),
        "p1op": ("not_bundle", "a"),
        "p2": ("not_bundle", "b"),
        "p3": ("not_bundle", "c"),
        "pi_sierpinski": ("bundle", None),
        "p5_minimal_bifib": ("not_bundle", "c"),
    }
    for pid, (status, failed_at) in expect.items():
        rep = is_fiber_bundle(gallery_map(pid))
        assert rep.status == status
        assert rep.failed_at == failed_at


def test_bundle_trivializations_recheck():
    pi = gallery_map("pi_sierpinski")
    s = as_slice(pi)
    rep = is_fiber_bundle(pi)
    assert rep.status == "bundle"
    from finfib.slices import restrict_over

    for b, iso in rep.trivializations.items():
        rest = restrict_over(s, s.base.down_set(b))
        prod, to_base, _ = product(rest.base, s.fiber(b))
        phi = MonotoneMap.build(rest.total, prod, iso)
        assert phi.is_iso()
        assert phi.then(to_base) == rest.map


def test_automorphism_constructions_are_bundles():
    rng = seeded(137)
    for _ in range(20):
        d, proj = rand_bundle(rng)
        beta = beta_functor(proj)
        assert beta.is_morphism_inverting()
        assert is_fiber_bundle(proj).status == "bundle"


def test_bundle_budget_runs_out_gracefully():
    rep = is_fiber_bundle(gallery_map("pi_sierpinski"), budget=0)
    assert rep.status == "undecided"
    assert rep.undecided_at == "0"
    assert rep.failed_at is None


def test_lower_lift_is_the_greatest_lift_below():
    rng = seeded(139)
    checked = 0
    for _ in range(60):
        base = rand_poset(rng, rng.randint(1, 3), prefix="b")
        fib = rand_poset(rng, rng.randint(1, 3), prefix="f")
        _, p, _ = product(base, fib)
        dom = rand_poset(rng, rng.randint(1, 3), prefix="d")
        f = rand_monotone(rng, dom, p.dom)
        candidates = list(monotone_maps(dom, base, upper=f.then(p)))
        if not candidates:
            continue
        g = rng.choice(candidates)
        h = lower_lift(p, f, g)
        assert h.then(p) == g
        assert h.le(f)
        for other in monotone_maps(dom, p.dom, upper=f, over=(g, p)):
            assert other.le(h)
        checked += 1
    assert checked >= 20
