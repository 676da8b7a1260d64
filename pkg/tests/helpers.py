"""Brute-force oracles and random instance generators shared by the suite.

The oracles deliberately avoid the library's bitmask machinery: lifts
are found by filtering and pairwise comparison, isomorphisms by a raw
permutation scan.  Generators draw from a seeded random.Random so every
test run sees the same instances.
"""

import itertools
import random

from finfib.grothendieck import PosetFunctor, grothendieck_construction
from finfib.posets import MonotoneMap, Poset, product
from finfib.slices import SliceMap, as_slice


# -- independent oracles -----------------------------------------------


def brute_lift(p, e, b, side):
    """(co)cartesian lift by exhaustive filtering and pairwise extremum.

    Returns (element, None) on success and (None, reason) otherwise,
    with reason 'no_extremum' or 'stray' mirroring the engine's two
    failure modes.
    """
    s = as_slice(p)
    if side == "cartesian":
        pool = [x for x in s.total.elements if s.total.le(x, e) and s.base.le(s.map(x), b)]
        ext = [m for m in pool if all(s.total.le(x, m) for x in pool)]
    else:
        pool = [x for x in s.total.elements if s.total.le(e, x) and s.base.le(b, s.map(x))]
        ext = [m for m in pool if all(s.total.le(m, x) for x in pool)]
    if not ext:
        return None, "no_extremum"
    if s.map(ext[0]) != b:
        return None, "stray"
    return ext[0], None


def brute_iso(p, q):
    """Isomorphism by scanning all permutations; usable up to n = 7."""
    if p.n != q.n:
        return None
    for perm in itertools.permutations(range(q.n)):
        if all(
            (p.below[j] >> i & 1) == (q.below[perm[j]] >> perm[i] & 1)
            for i in range(p.n)
            for j in range(p.n)
        ):
            return {p.elements[i]: q.elements[perm[i]] for i in range(p.n)}
    return None


def is_beat_point_brute(x, a):
    """Beat point test straight from the definition, via down/up sets."""
    down = [z for z in x.strict_down_set(a)]
    up = [z for z in x.strict_up_set(a)]
    has_max = any(all(x.le(z, m) for z in down) for m in down)
    has_min = any(all(x.le(m, z) for z in up) for m in up)
    return has_max or has_min


# -- random instance generators ----------------------------------------


def rand_poset(rng, n, prob=0.35, prefix="x"):
    """Random poset on n points: random DAG edges, shuffled element order."""
    names = [f"{prefix}{i}" for i in range(n)]
    pairs = [
        (names[i], names[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < prob
    ]
    order = names[:]
    rng.shuffle(order)
    return Poset.build(order, pairs)


def rand_monotone(rng, dom, cod, tries=60):
    """Random monotone map dom -> cod.

    Walks a linear extension picking each image above the images of
    the lower covers; a dead end restarts, and a constant map is the
    (always monotone) last resort.
    """
    order = sorted(dom.elements, key=lambda a: len(dom.down_set(a)))
    for _ in range(tries):
        vals = {}
        for a in order:
            allowed = set(cod.elements)
            for l in dom.lower_covers(a):
                allowed &= set(cod.up_set(vals[l]))
            if not allowed:
                break
            vals[a] = rng.choice(sorted(allowed))
        else:
            return MonotoneMap.build(dom, cod, vals)
    return MonotoneMap.constant(dom, cod, rng.choice(cod.elements))


def forest_base(rng, n, prefix="b"):
    """Poset whose down sets are chains, so Hasse paths are unique."""
    names = [f"{prefix}{i}" for i in range(n)]
    pairs = []
    for j in range(1, n):
        if rng.random() < 0.8:
            pairs.append((names[rng.randrange(j)], names[j]))
    order = names[:]
    rng.shuffle(order)
    return Poset.build(order, pairs)


def rand_functor(rng, fiber_pool=None, max_base=5, max_fiber=4):
    """Covariant functor over a forest base with random cover transitions.

    fiber_pool, when given, is a list of posets to draw fibers from;
    otherwise fibers are fresh random posets.  Unique Hasse paths make
    path independence automatic, so build always succeeds.
    """
    base = forest_base(rng, rng.randint(2, max_base))
    fibers = {}
    for k, b in enumerate(base.elements):
        if fiber_pool is not None:
            fibers[b] = rng.choice(fiber_pool)
        else:
            fibers[b] = rand_poset(rng, rng.randint(1, max_fiber), prefix=f"f{k}_")
    transitions = {
        (lo, hi): rand_monotone(rng, fibers[lo], fibers[hi]) for lo, hi in base.covers()
    }
    return PosetFunctor.build(base, "covariant", fibers, transitions)


def minimal_fiber_pool():
    """Small spaces with no beat points: point, antichains, a crown."""
    return [
        Poset.antichain(["m0"]),
        Poset.antichain(["m0", "m1"]),
        Poset.antichain(["m0", "m1", "m2"]),
        Poset.build(
            ["m0", "m1", "m2", "m3"],
            [("m0", "m2"), ("m0", "m3"), ("m1", "m2"), ("m1", "m3")],
        ),
    ]


def rand_bundle(rng, max_base=4, max_fiber=4):
    """Grothendieck construction with one fiber and automorphism transitions."""
    from finfib.posets import automorphisms

    base = forest_base(rng, rng.randint(2, max_base))
    fiber = rand_poset(rng, rng.randint(2, max_fiber), prefix="f")
    auts = [MonotoneMap.build(fiber, fiber, a) for a in automorphisms(fiber)]
    transitions = {(lo, hi): rng.choice(auts) for lo, hi in base.covers()}
    d = PosetFunctor.build(
        base, "covariant", {b: fiber for b in base.elements}, transitions
    )
    return d, grothendieck_construction(d)


def based_poset(rng, n, prefix="b"):
    """Random poset with a fresh minimum adjoined below everything."""
    top = rand_poset(rng, n, prefix=prefix)
    root = f"{prefix}_min"
    pairs = list(top.covers()) + [(root, m) for m in top.minimal_elements()]
    return Poset.build([root] + list(top.elements), pairs)


def insert_map_down_beat_point(rng, p, tag):
    """Duplicate a random total-space point x just above itself.

    The copy sits over the same base point, covers x and keeps x's
    strict upper bounds, so it is a down beat point of the map with
    witness x; removing it recovers the original map.
    """
    s = as_slice(p)
    x = rng.choice(s.total.elements)
    dup = f"{x}+{tag}"
    pairs = list(s.total.covers()) + [(x, dup)]
    pairs += [(dup, z) for z in s.total.upper_covers(x)]
    total = Poset.build(list(s.total.elements) + [dup], pairs)
    values = s.map.values
    values[dup] = s.map(x)
    return MonotoneMap.build(total, s.base, values)


def rand_fibration(rng):
    """Product projection over a based poset plus a few beat-point insertions."""
    base = based_poset(rng, rng.randint(1, 3))
    fiber = rand_poset(rng, rng.randint(1, 3), prefix="f")
    _, to_base, _ = product(base, fiber)
    p = to_base
    for k in range(rng.randint(0, 3)):
        p = insert_map_down_beat_point(rng, p, str(k))
    return p


def shuffling_picker(rng):
    """Reduction picker taking a uniformly random candidate each step."""
    return lambda cands: rng.choice(cands)


def seeded(seed):
    return random.Random(seed)
