"""Axiom schemas with semantically evaluated guards.

Each schema is instantiated against a bound lattice: guards are checked as
lattice relations, lattice-valued subterms (projections, meets, joins, map
images) are computed, and the result is a closed sequent over constants.
Implication-shaped schemas conclude an empty-context sequent by default;
``unfold=True`` moves the antecedent into the context instead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping

from omlogic.lattice import FiniteOrthoLattice
from omlogic.propagation import PowersetMap, kill_set
from omlogic.syntax import (
    Induced,
    Lolli,
    Plus,
    Sequent,
    Tensor,
    actual,
    measurement,
    reachable,
)

__all__ = [
    "GuardViolation",
    "UnknownSchemaError",
    "AxiomSchema",
    "SCHEMAS",
    "instantiate_axiom",
]

MapRegistry = Mapping[str, PowersetMap]


class GuardViolation(Exception):
    """A schema guard failed; the message names the violated constraint."""


class UnknownSchemaError(Exception):
    pass


@dataclass(frozen=True)
class AxiomSchema:
    """Name, parameter signature, guard description, and the instantiation
    body.  ``params`` is documentation; variadic schemas validate keys
    themselves."""

    name: str
    params: tuple[str, ...]
    guard: str
    build: Callable[[FiniteOrthoLattice, dict[str, str], MapRegistry], Sequent]


def _need(bindings: dict[str, str], *names: str) -> list[str]:
    missing = [v for v in names if v not in bindings]
    if missing:
        raise GuardViolation(f"unbound variable {missing[0]!r}")
    extra = set(bindings) - set(names)
    if extra:
        raise GuardViolation(f"unexpected binding {sorted(extra)[0]!r}")
    return [bindings[v] for v in names]


def _in_and_r(lat: FiniteOrthoLattice, x: str) -> Tensor:
    return Tensor(actual(lat, x), reachable(lat, x))


def _oql_meet(lat, bindings, maps):
    keys = sorted(bindings)
    if not keys or any(not re.fullmatch(r"x[0-9]+", k) for k in keys):
        raise GuardViolation("bindings must be x1, x2, ... (at least one)")
    keys.sort(key=lambda k: int(k[1:]))
    xs = [bindings[k] for k in keys]
    m = lat.meet_set(xs)
    if m == "0":
        raise GuardViolation("meet of the bound properties is 0")
    lhs = actual(lat, xs[0])
    for x in xs[1:]:
        lhs = Tensor(lhs, actual(lat, x))
    return Sequent((lhs,), actual(lat, m))


def _oql_join(lat, bindings, maps):
    x, y = _need(bindings, "x", "y")
    return Sequent((actual(lat, x),), actual(lat, lat.join(x, y)))


def _trans(lat, bindings, maps):
    y, z = _need(bindings, "y", "z")
    w = lat.sasaki(z, y)
    if w == "0":
        raise GuardViolation(f"projection of {y!r} onto {z!r} is 0")
    return Sequent(
        (), Lolli(Tensor(actual(lat, y), reachable(lat, z)), _in_and_r(lat, w))
    )


def _adjust1(lat, bindings, maps):
    x, y = _need(bindings, "x", "y")
    lat.index(y)
    if lat.leq(y, x):
        raise GuardViolation(f"y !<= x violated: {y} <= {x}")
    if lat.leq(y, lat.ortho(x)):
        raise GuardViolation(f"y !<= ortho(x) violated: {y} <= {lat.ortho(x)}")
    antecedent = Tensor(measurement(lat, x), _in_and_r(lat, y))
    consequent = Tensor(
        actual(lat, y), Plus(reachable(lat, x), reachable(lat, lat.ortho(x)))
    )
    return Sequent((), Lolli(antecedent, consequent))


def _adjust2(lat, bindings, maps):
    x, y = _need(bindings, "x", "y")
    lat.index(x)
    if not lat.leq(y, x):
        raise GuardViolation(f"y <= x violated: {y} !<= {x}")
    antecedent = Tensor(measurement(lat, x), _in_and_r(lat, y))
    return Sequent((), Lolli(antecedent, _in_and_r(lat, y)))


def _general_propagation(lat, bindings, maps):
    alpha, x = _need(bindings, "alpha", "x")
    if alpha not in maps:
        raise GuardViolation(f"unknown propagation map {alpha!r}")
    f = maps[alpha]
    if f.lattice != lat:
        raise GuardViolation(f"map {alpha!r} is over a different lattice")
    lat.index(x)
    if x == "0" or x in kill_set(f):
        raise GuardViolation(f"x !in K({alpha}) violated for {x!r}")
    branches = sorted(f.singleton(x), key=lat.index)
    rhs = actual(lat, branches[0])
    for z in branches[1:]:
        rhs = Plus(rhs, actual(lat, z))
    return Sequent((), Lolli(Tensor(Induced(alpha), actual(lat, x)), rhs))


SCHEMAS: dict[str, AxiomSchema] = {
    s.name: s
    for s in (
        AxiomSchema("OQL-Meet", ("x1", "..."), "meet nonzero", _oql_meet),
        AxiomSchema("OQL-Join", ("x", "y"), "none", _oql_join),
        AxiomSchema("Trans", ("y", "z"), "projection nonzero", _trans),
        AxiomSchema("Adjust1", ("x", "y"), "y !<= x, y !<= ortho(x)", _adjust1),
        AxiomSchema("Adjust2", ("x", "y"), "y <= x", _adjust2),
        AxiomSchema(
            "GeneralPropagation", ("alpha", "x"), "x !in K(alpha)", _general_propagation
        ),
    )
}


def instantiate_axiom(
    lat: FiniteOrthoLattice,
    schema: str,
    bindings: Mapping[str, str],
    maps: MapRegistry | None = None,
    unfold: bool = False,
) -> Sequent:
    """Instantiate a schema; guards are evaluated in the lattice and failures
    raise :class:`GuardViolation` naming the violated constraint.  With
    ``unfold`` an implication-shaped conclusion is returned with its
    antecedent as the (single-formula) context.
    """
    if schema not in SCHEMAS:
        raise UnknownSchemaError(f"unknown axiom schema {schema!r}")
    seq = SCHEMAS[schema].build(lat, dict(bindings), maps or {})
    if unfold and not seq.context and isinstance(seq.succedent, Lolli):
        return Sequent((seq.succedent.antecedent,), seq.succedent.consequent)
    return seq
