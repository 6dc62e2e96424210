"""Seeded mutations that damage valid derivations in fixed ways.

Used to harden the kernel: a checker with implicit exchange, weakening, or
contraction, lazy guard evaluation, or a missing eigenvariable condition
would accept at least one of these mutants.
"""

from __future__ import annotations

import dataclasses
import random

from omlogic.kernel import AxiomApp, Derivation, RuleApp
from omlogic.lattice import FiniteOrthoLattice
from omlogic.syntax import Actual, Forall, Reachable, Sequent, Tensor, Var

__all__ = ["MUTATION_KINDS", "mutate", "capture_case"]

MUTATION_KINDS = ("exchange", "contraction", "weakening", "guard", "capture")


def _walk(d: Derivation, path=()):
    yield path, d
    if isinstance(d, RuleApp):
        for i, child in enumerate(d.children):
            yield from _walk(child, path + (i,))


def _replace(d: Derivation, path: tuple[int, ...], new: Derivation) -> Derivation:
    if not path:
        return new
    kids = list(d.children)
    kids[path[0]] = _replace(kids[path[0]], path[1:], new)
    return dataclasses.replace(d, children=tuple(kids))


def _with_context(node: Derivation, ctx: tuple) -> Derivation:
    seq = Sequent(ctx, node.conclusion.succedent)
    return dataclasses.replace(node, conclusion=seq)


def mutate(
    d: Derivation, kind: str, rng: random.Random, lat: FiniteOrthoLattice
) -> Derivation | None:
    """Apply one mutation kind; None when no node in the tree is eligible."""
    if kind == "exchange":
        candidates = []
        for path, node in _walk(d):
            ctx = node.conclusion.context
            pairs = [
                (i, j)
                for i in range(len(ctx))
                for j in range(i + 1, len(ctx))
                if ctx[i] != ctx[j]
            ]
            if pairs:
                candidates.append((path, node, pairs))
        if not candidates:
            return None
        path, node, pairs = rng.choice(candidates)
        i, j = rng.choice(pairs)
        ctx = list(node.conclusion.context)
        ctx[i], ctx[j] = ctx[j], ctx[i]
        return _replace(d, path, _with_context(node, tuple(ctx)))

    if kind == "contraction":
        candidates = [
            (path, node) for path, node in _walk(d) if node.conclusion.context
        ]
        if not candidates:
            return None
        path, node = rng.choice(candidates)
        ctx = list(node.conclusion.context)
        i = rng.randrange(len(ctx))
        ctx.insert(i, ctx[i])
        return _replace(d, path, _with_context(node, tuple(ctx)))

    if kind == "weakening":
        candidates = [
            (path, node) for path, node in _walk(d) if node.conclusion.context
        ]
        if not candidates:
            return None
        path, node = rng.choice(candidates)
        ctx = list(node.conclusion.context)
        del ctx[rng.randrange(len(ctx))]
        return _replace(d, path, _with_context(node, tuple(ctx)))

    if kind == "guard":
        candidates = [
            (path, node)
            for path, node in _walk(d)
            if isinstance(node, AxiomApp) and node.schema in ("Adjust1", "Adjust2")
        ]
        if not candidates:
            return None
        path, node = rng.choice(candidates)
        bindings = dict(node.bindings)
        if node.schema == "Adjust1":
            bindings["y"] = bindings["x"]  # y !<= x now fails reflexively
        else:
            violating = [
                e for e in lat.nonzero() if not lat.leq(e, bindings["x"])
            ]
            if violating:
                bindings["y"] = rng.choice(violating)
            else:
                bindings["x"] = "0"  # y <= 0 is unsatisfiable for nonzero y
        mutated = dataclasses.replace(node, bindings=tuple(sorted(bindings.items())))
        return _replace(d, path, mutated)

    if kind == "capture":
        raise ValueError("capture mutants are built by capture_case")
    raise ValueError(f"unknown mutation kind {kind!r}")


def capture_case(
    lat: FiniteOrthoLattice, rng: random.Random
) -> tuple[Derivation, Derivation]:
    """A valid quantifier introduction over a variable-bearing identity leaf,
    and its capture mutant: the bound variable renamed onto a variable that is
    free in the context."""
    v = rng.choice(["u", "v", "w"])
    fresh = rng.choice(["p", "q", "r"])
    shape = rng.randrange(3)
    t = Var(v)
    body = [Actual(t), Reachable(t), Tensor(Actual(t), Reachable(t))][shape]
    leaf = RuleApp("id", Sequent((body,), body), ())
    valid = RuleApp(
        "forall_r", Sequent((body,), Forall(fresh, (), body)), (leaf,)
    )
    captured = RuleApp(
        "forall_r", Sequent((body,), Forall(v, (), body)), (leaf,)
    )
    return valid, captured
