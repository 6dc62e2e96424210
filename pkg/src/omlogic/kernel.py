"""Proof kernel: derivation trees and their validation.

Rules (single succedent, no exchange/weakening/contraction; contexts are
ordered and split exactly):

    id        A |- A
    cut       G |- A   and   G1, A, G2 |- D      gives  G1, G, G2 |- D
    tensor_r  G1 |- A  and   G2 |- B             gives  G1, G2 |- A * B
    tensor_l  G1, A, B, G2 |- D                  gives  G1, (A * B), G2 |- D
    plus_r1   G |- A                             gives  G |- A + B
    plus_r2   G |- B                             gives  G |- A + B
    plus_l    G1, A, G2 |- D  and  G1, B, G2 |- D  gives  G1, (A + B), G2 |- D
    lolli_r   A, G |- B                          gives  G |- A -o B
    lolli_l   G |- A   and   G1, B, G2 |- D      gives  G1, G, (A -o B), G2 |- D
    forall_r  G |- A                             gives  G |- forall x . A
              (x not free in G)
    forall_l  G1, A[w/x], G2 |- D                gives  G1, forall x A, G2 |- D
              (explicit ground witness w; the guard must hold for w)

Axiom leaves carry a schema name and bindings; they are valid when the
re-instantiated schema (in either its implication or unfolded form)
reproduces the stored conclusion and its guard passes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from omlogic.axioms import GuardViolation, MapRegistry, SCHEMAS, instantiate_axiom
from omlogic.lattice import FiniteOrthoLattice, LatticeError
from omlogic.propagation import kill_set
from omlogic.syntax import (
    Const,
    Constraint,
    Forall,
    Lolli,
    Plus,
    Sequent,
    Tensor,
    Term,
    ascii_term,
    free_vars,
    normalize_term,
    substitute,
)

__all__ = [
    "RuleApp",
    "AxiomApp",
    "Derivation",
    "RULE_ARITY",
    "CheckFailure",
    "CheckResult",
    "check_derivation",
]


@dataclass(frozen=True)
class RuleApp:
    rule: str
    conclusion: Sequent
    children: tuple["Derivation", ...]
    witness: Term | None = None  # forall_l only


@dataclass(frozen=True)
class AxiomApp:
    schema: str
    bindings: tuple[tuple[str, str], ...]  # sorted (variable, value) pairs
    conclusion: Sequent


Derivation = Union[RuleApp, AxiomApp]

RULE_ARITY = {
    "id": 0,
    "cut": 2,
    "tensor_r": 2,
    "tensor_l": 1,
    "plus_r1": 1,
    "plus_r2": 1,
    "plus_l": 2,
    "lolli_r": 1,
    "lolli_l": 2,
    "forall_r": 1,
    "forall_l": 1,
}


@dataclass(frozen=True)
class CheckFailure:
    path: tuple[int, ...]
    rule: str
    reason: str


@dataclass(frozen=True)
class CheckResult:
    failure: CheckFailure | None = None

    @property
    def valid(self) -> bool:
        return self.failure is None


def _eval_guard(
    lat: FiniteOrthoLattice,
    guard: tuple[Constraint, ...],
    subject: Term,
    maps: MapRegistry,
) -> str | None:
    """Evaluate a guard for a ground subject; returns the violated constraint
    text, or None when all conjuncts hold."""
    if not isinstance(subject, Const):
        return f"witness {ascii_term(subject)} is not ground"
    w = subject.name
    for c in guard:
        if c.op == "!inK":
            if c.rhs not in maps:
                return f"unknown propagation map {c.rhs!r}"
            if w == "0" or w in kill_set(maps[c.rhs]):
                return f"!in K({c.rhs}) fails for {w}"
            continue
        if not isinstance(c.rhs, Const):
            return f"guard bound {ascii_term(c.rhs)} is not ground"
        holds = lat.leq(w, c.rhs.name)
        if c.op == "<=" and not holds:
            return f"<= {c.rhs.name} fails for {w}"
        if c.op == "!<=" and holds:
            return f"!<= {c.rhs.name} fails for {w}"
    return None


def check_derivation(
    lat: FiniteOrthoLattice, d: Derivation, maps: MapRegistry | None = None
) -> CheckResult:
    """Validate every node; the verdict carries the first failing node (in
    post-order) with its path from the root and a reason."""
    maps = maps or {}

    def fail(path, rule, reason) -> CheckResult:
        return CheckResult(CheckFailure(tuple(path), rule, reason))

    def walk(node: Derivation, path: tuple[int, ...]) -> CheckResult:
        if isinstance(node, RuleApp):
            for i, child in enumerate(node.children):
                sub = walk(child, path + (i,))
                if not sub.valid:
                    return sub
            reason = _check_rule(lat, node, maps)
            if reason is not None:
                return fail(path, node.rule, reason)
            return CheckResult()
        if isinstance(node, AxiomApp):
            reason = _check_axiom(lat, node, maps)
            if reason is not None:
                return fail(path, f"axiom {node.schema}", reason)
            return CheckResult()
        return fail(path, "?", f"not a derivation node: {node!r}")

    return walk(d, ())


def _check_axiom(lat, node: AxiomApp, maps) -> str | None:
    if node.schema not in SCHEMAS:
        return f"unknown axiom schema {node.schema!r}"
    try:
        base = instantiate_axiom(lat, node.schema, dict(node.bindings), maps)
        unfolded = instantiate_axiom(
            lat, node.schema, dict(node.bindings), maps, unfold=True
        )
    except GuardViolation as g:
        return f"guard violated: {g}"
    except (LatticeError, ValueError) as err:
        return str(err)
    if node.conclusion not in (base, unfolded):
        return "conclusion does not match the instantiated schema"
    return None


def _check_rule(lat, node: RuleApp, maps) -> str | None:
    rule = node.rule
    if rule not in RULE_ARITY:
        return f"unknown rule {rule!r}"
    if len(node.children) != RULE_ARITY[rule]:
        return (
            f"{rule} expects {RULE_ARITY[rule]} premises, "
            f"got {len(node.children)}"
        )
    if node.witness is not None and rule != "forall_l":
        return f"{rule} takes no witness"
    prem = [c.conclusion for c in node.children]
    concl = node.conclusion
    ctx, rhs = concl.context, concl.succedent

    if rule == "id":
        if ctx == (rhs,):
            return None
        return "id requires a single context formula equal to the succedent"

    if rule == "cut":
        left, right = prem
        if rhs != right.succedent:
            return "cut conclusion succedent differs from the right premise"
        for j, f in enumerate(right.context):
            if f != left.succedent:
                continue
            expected = right.context[:j] + left.context + right.context[j + 1 :]
            if ctx == expected:
                return None
        return "no cut-formula position reproduces the conclusion context"

    if rule == "tensor_r":
        left, right = prem
        if not isinstance(rhs, Tensor):
            return "tensor_r succedent is not a tensor"
        if rhs.left != left.succedent or rhs.right != right.succedent:
            return "tensor parts differ from the premise succedents"
        if ctx != left.context + right.context:
            return "context is not the ordered concatenation of the premises"
        return None

    if rule == "tensor_l":
        (p,) = prem
        if rhs != p.succedent:
            return "tensor_l changes the succedent"
        for j, f in enumerate(ctx):
            if not isinstance(f, Tensor):
                continue
            expected = ctx[:j] + (f.left, f.right) + ctx[j + 1 :]
            if p.context == expected:
                return None
        return "no tensor position splits into the premise context"

    if rule in ("plus_r1", "plus_r2"):
        (p,) = prem
        if not isinstance(rhs, Plus):
            return f"{rule} succedent is not a plus"
        part = rhs.left if rule == "plus_r1" else rhs.right
        if part != p.succedent:
            return "selected disjunct differs from the premise succedent"
        if ctx != p.context:
            return f"{rule} changes the context"
        return None

    if rule == "plus_l":
        left, right = prem
        if left.succedent != rhs or right.succedent != rhs:
            return "plus_l premises must share the conclusion succedent"
        for j, f in enumerate(ctx):
            if not isinstance(f, Plus):
                continue
            if (
                left.context == ctx[:j] + (f.left,) + ctx[j + 1 :]
                and right.context == ctx[:j] + (f.right,) + ctx[j + 1 :]
            ):
                return None
        return "no plus position matches both premise contexts"

    if rule == "lolli_r":
        (p,) = prem
        if not isinstance(rhs, Lolli):
            return "lolli_r succedent is not an implication"
        if p.succedent != rhs.consequent:
            return "premise succedent differs from the consequent"
        if p.context != (rhs.antecedent,) + ctx:
            return "premise context must be the antecedent followed by the context"
        return None

    if rule == "lolli_l":
        left, right = prem
        if rhs != right.succedent:
            return "lolli_l conclusion succedent differs from the right premise"
        for j, f in enumerate(right.context):
            expected = (
                right.context[:j]
                + left.context
                + (Lolli(left.succedent, f),)
                + right.context[j + 1 :]
            )
            if ctx == expected:
                return None
        return "no implication position reproduces the conclusion context"

    if rule == "forall_r":
        (p,) = prem
        if not isinstance(rhs, Forall):
            return "forall_r succedent is not a quantifier"
        if p.succedent != rhs.body:
            return "premise succedent differs from the quantifier body"
        if p.context != ctx:
            return "forall_r changes the context"
        for f in ctx:
            if rhs.var in free_vars(f):
                return f"eigenvariable {rhs.var!r} is free in the context"
        return None

    if rule == "forall_l":
        (p,) = prem
        if node.witness is None:
            return "forall_l requires an explicit witness term"
        witness = normalize_term(node.witness, lat)
        if not isinstance(witness, Const):
            return f"witness {ascii_term(node.witness)} is not ground"
        if rhs != p.succedent:
            return "forall_l changes the succedent"
        guard_failure = None
        for j, f in enumerate(ctx):
            if not isinstance(f, Forall):
                continue
            instance = substitute(f.body, f.var, witness, lat)
            if p.context != ctx[:j] + (instance,) + ctx[j + 1 :]:
                continue
            violation = _eval_guard(lat, f.guard, witness, maps)
            if violation is None:
                return None
            guard_failure = f"guard violated: {violation}"
        return guard_failure or "no quantifier position matches the instantiated premise"

    return f"unknown rule {rule!r}"
