"""Seeded random corpora for round-trip testing."""

from __future__ import annotations

import random

from omlogic.derive import derive_composed, derive_measurement
from omlogic.lattice import FiniteOrthoLattice, boolean, hexagon, mo
from omlogic.propagation import PowersetMap, perfect_measurement_map
from omlogic.syntax import (
    Actual,
    Const,
    Constraint,
    Forall,
    Induced,
    Lolli,
    Measurement,
    OrthoTerm,
    Plus,
    Reachable,
    Sequent,
    Tensor,
    Var,
    normalize_formula,
)

VAR_POOL = ("u", "v", "w", "p", "q", "r")
NAME_POOL = ("north", "south", "spin_up", "spin_dn", "left", "right", "x1", "x2", "y1", "y2", "z1", "z2", "t1", "t2")


def random_lattice(rng: random.Random) -> FiniteOrthoLattice:
    """A generated family, optionally with renamed elements (<= 16 elements)."""
    kind = rng.randrange(3)
    if kind == 0:
        lat = boolean(rng.randint(1, 4))
    elif kind == 1:
        lat = mo(rng.randint(1, 7))
    else:
        lat = hexagon()
    if rng.random() < 0.4:
        fresh = list(NAME_POOL)
        rng.shuffle(fresh)
        mapping = {}
        for e in lat.elements:
            mapping[e] = e if e in ("0", "1") else (fresh.pop() if fresh else e)
        lat = FiniteOrthoLattice(
            lat.name + "_renamed",
            [mapping[e] for e in lat.elements],
            [(mapping[x], mapping[y]) for x, y in lat.covers()],
            [(mapping[x], mapping[y]) for x, y in lat.ortho_pairs()],
        )
    return lat


def random_map(lat: FiniteOrthoLattice, rng: random.Random) -> PowersetMap:
    if rng.random() < 0.3 and lat.verify().ok:
        f = perfect_measurement_map(lat, rng.choice(lat.nonzero()))
        return PowersetMap(
            lat, dict(f.items()), kind="measurement",
            label=f"m{rng.randrange(100)}", measured=f.measured,
        )
    domain = lat.nonzero()
    action = {b: {e for e in domain if rng.random() < 0.3} for b in domain}
    return PowersetMap(lat, action, label=f"g{rng.randrange(100)}")


def random_term(lat, rng: random.Random, depth: int):
    nonzero_ortho = [e for e in lat.nonzero() if lat.ortho(e) != "0"]
    roll = rng.random()
    if depth > 0 and roll < 0.2 and nonzero_ortho:
        # single former only: doubles would normalize away and break identity
        inner = rng.choice([Const(rng.choice(nonzero_ortho)), Var(rng.choice(VAR_POOL))])
        return OrthoTerm(inner) if isinstance(inner, Var) else Const(lat.ortho(inner.name))
    if roll < 0.7:
        return Const(rng.choice(lat.nonzero()))
    return Var(rng.choice(VAR_POOL))


def random_formula(lat, rng: random.Random, depth: int):
    def atom():
        roll = rng.randrange(4)
        if roll == 0:
            return Actual(random_term(lat, rng, depth))
        if roll == 1:
            return Reachable(random_term(lat, rng, depth))
        if roll == 2:
            t = random_term(lat, rng, depth)
            if isinstance(t, Const):
                pair = [p for p in (t.name, lat.ortho(t.name)) if p != "0"]
                t = Const(min(pair, key=lat.index))
            return Measurement(t)
        return Induced(rng.choice(("alpha", "beta", "gamma")))

    if depth <= 0:
        return atom()
    roll = rng.random()
    if roll < 0.35:
        return atom()
    if roll < 0.55:
        return Tensor(random_formula(lat, rng, depth - 1), random_formula(lat, rng, depth - 1))
    if roll < 0.75:
        return Plus(random_formula(lat, rng, depth - 1), random_formula(lat, rng, depth - 1))
    if roll < 0.9:
        return Lolli(random_formula(lat, rng, depth - 1), random_formula(lat, rng, depth - 1))
    guard = []
    for _ in range(rng.randrange(3)):
        k = rng.random()
        if k < 0.4:
            guard.append(Constraint("<=", Const(rng.choice(lat.elements))))
        elif k < 0.8:
            guard.append(Constraint("!<=", Const(rng.choice(lat.elements))))
        else:
            guard.append(Constraint("!inK", rng.choice(("alpha", "beta"))))
    return Forall(
        rng.choice(VAR_POOL), tuple(guard), random_formula(lat, rng, depth - 1)
    )


def random_normal_formula(lat, rng: random.Random, depth: int):
    return normalize_formula(random_formula(lat, rng, depth), lat)


def random_sequent(lat, rng: random.Random) -> Sequent:
    ctx = tuple(
        random_normal_formula(lat, rng, rng.randint(0, 3))
        for _ in range(rng.randint(0, 3))
    )
    return Sequent(ctx, random_normal_formula(lat, rng, rng.randint(0, 3)))


def random_derivation(rng: random.Random):
    lat = mo(2) if rng.random() < 0.5 else boolean(3)
    names = lat.nonzero()
    if rng.random() < 0.5:
        d = derive_measurement(lat, rng.choice(names), rng.choice(names))
    else:
        d = derive_composed(
            lat, rng.choice(names), rng.choice(names), rng.choice(names)
        )
    return lat, d
