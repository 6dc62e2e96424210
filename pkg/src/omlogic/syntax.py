"""Formula language for property transitions.

Atoms state that a property is actual (``In``), that exactly one property is
reachable (``R``), that a two-outcome measurement context is imposed (``M``),
or that a named propagation map is induced (``IND``).  Connectives are a
non-associative multiplicative conjunction, an additive disjunction, and a
linear implication, plus a guarded universal quantifier over property terms.

Terms are constants (lattice element names), variables, or an
orthocomplement former.  Normalization reduces the former over constants and
cancels double complements; the measurement atom is canonicalized to one
representative of its unordered outcome pair.  Formula equality is plain
structural equality of the normalized trees; in particular the two groupings
of a triple conjunction are distinct formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from omlogic.lattice import FiniteOrthoLattice

__all__ = [
    "Const",
    "Var",
    "OrthoTerm",
    "Term",
    "Actual",
    "Reachable",
    "Measurement",
    "Induced",
    "Tensor",
    "Plus",
    "Lolli",
    "Forall",
    "Constraint",
    "Formula",
    "Sequent",
    "normalize_term",
    "actual",
    "reachable",
    "measurement",
    "free_vars",
    "substitute",
    "ascii_term",
    "ascii_formula",
    "ascii_sequent",
    "pretty_formula",
    "pretty_sequent",
]


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class OrthoTerm:
    arg: "Term"


Term = Union[Const, Var, OrthoTerm]


@dataclass(frozen=True)
class Actual:
    term: Term


@dataclass(frozen=True)
class Reachable:
    term: Term


@dataclass(frozen=True)
class Measurement:
    term: Term


@dataclass(frozen=True)
class Induced:
    alpha: str


@dataclass(frozen=True)
class Tensor:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Plus:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Lolli:
    antecedent: "Formula"
    consequent: "Formula"


@dataclass(frozen=True)
class Constraint:
    """One guard conjunct.  ``op`` is ``<=`` or ``!<=`` with a term on the
    right, or ``!inK`` with a propagation-map name on the right."""

    op: str
    rhs: Term | str


@dataclass(frozen=True)
class Forall:
    var: str
    guard: tuple[Constraint, ...]
    body: "Formula"


Formula = Union[Actual, Reachable, Measurement, Induced, Tensor, Plus, Lolli, Forall]

ATOMS = (Actual, Reachable, Measurement, Induced)


@dataclass(frozen=True)
class Sequent:
    """Ordered context and a single succedent.  Order is significant: there is
    no implicit exchange, weakening, or contraction."""

    context: tuple[Formula, ...]
    succedent: Formula


# -- normalization -------------------------------------------------------------


def normalize_term(t: Term, lat: FiniteOrthoLattice) -> Term:
    """Reduce complement formers: over constants evaluate via the lattice,
    and cancel double complements everywhere."""
    if isinstance(t, OrthoTerm):
        inner = normalize_term(t.arg, lat)
        if isinstance(inner, Const):
            return Const(lat.ortho(inner.name))
        if isinstance(inner, OrthoTerm):
            return inner.arg
        return OrthoTerm(inner)
    return t


def _nonzero_const(t: Term, lat: FiniteOrthoLattice, atom: str) -> None:
    if isinstance(t, Const):
        lat.index(t.name)
        if t.name == "0":
            raise ValueError(f"{atom} cannot hold the absurd property 0")


def actual(lat: FiniteOrthoLattice, name: str) -> Actual:
    t = Const(name)
    _nonzero_const(t, lat, "In")
    return Actual(t)


def reachable(lat: FiniteOrthoLattice, name: str) -> Reachable:
    t = Const(name)
    _nonzero_const(t, lat, "R")
    return Reachable(t)


def measurement(lat: FiniteOrthoLattice, name: str) -> Measurement:
    """Measurement atom, canonicalized to one member of the unordered outcome
    pair {x, x'}: the nonzero member of least index."""
    lat.index(name)
    pair = [p for p in (name, lat.ortho(name)) if p != "0"]
    rep = min(pair, key=lat.index)
    return Measurement(Const(rep))


def normalize_formula(f: Formula, lat: FiniteOrthoLattice) -> Formula:
    if isinstance(f, Actual):
        t = normalize_term(f.term, lat)
        _nonzero_const(t, lat, "In")
        return Actual(t)
    if isinstance(f, Reachable):
        t = normalize_term(f.term, lat)
        _nonzero_const(t, lat, "R")
        return Reachable(t)
    if isinstance(f, Measurement):
        t = normalize_term(f.term, lat)
        if isinstance(t, Const):
            return measurement(lat, t.name)
        return Measurement(t)
    if isinstance(f, Induced):
        return f
    if isinstance(f, Tensor):
        return Tensor(normalize_formula(f.left, lat), normalize_formula(f.right, lat))
    if isinstance(f, Plus):
        return Plus(normalize_formula(f.left, lat), normalize_formula(f.right, lat))
    if isinstance(f, Lolli):
        return Lolli(
            normalize_formula(f.antecedent, lat), normalize_formula(f.consequent, lat)
        )
    if isinstance(f, Forall):
        guard = tuple(
            Constraint(c.op, normalize_term(c.rhs, lat) if c.op != "!inK" else c.rhs)
            for c in f.guard
        )
        return Forall(f.var, guard, normalize_formula(f.body, lat))
    raise TypeError(f"not a formula: {f!r}")


# -- variables and substitution --------------------------------------------------


def _term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset({t.name})
    if isinstance(t, OrthoTerm):
        return _term_vars(t.arg)
    return frozenset()


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, (Actual, Reachable, Measurement)):
        return _term_vars(f.term)
    if isinstance(f, Induced):
        return frozenset()
    if isinstance(f, (Tensor, Plus)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Lolli):
        return free_vars(f.antecedent) | free_vars(f.consequent)
    if isinstance(f, Forall):
        inner = free_vars(f.body)
        for c in f.guard:
            if c.op != "!inK":
                inner |= _term_vars(c.rhs)
        return inner - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def _subst_term(t: Term, var: str, value: Term) -> Term:
    if isinstance(t, Var):
        return value if t.name == var else t
    if isinstance(t, OrthoTerm):
        return OrthoTerm(_subst_term(t.arg, var, value))
    return t


def substitute(f: Formula, var: str, value: Term, lat: FiniteOrthoLattice) -> Formula:
    """Replace a free variable by a term and renormalize."""
    if isinstance(f, Actual):
        return normalize_formula(Actual(_subst_term(f.term, var, value)), lat)
    if isinstance(f, Reachable):
        return normalize_formula(Reachable(_subst_term(f.term, var, value)), lat)
    if isinstance(f, Measurement):
        return normalize_formula(Measurement(_subst_term(f.term, var, value)), lat)
    if isinstance(f, Induced):
        return f
    if isinstance(f, Tensor):
        return Tensor(substitute(f.left, var, value, lat), substitute(f.right, var, value, lat))
    if isinstance(f, Plus):
        return Plus(substitute(f.left, var, value, lat), substitute(f.right, var, value, lat))
    if isinstance(f, Lolli):
        return Lolli(
            substitute(f.antecedent, var, value, lat),
            substitute(f.consequent, var, value, lat),
        )
    if isinstance(f, Forall):
        if f.var == var:
            return f  # shadowed
        guard = tuple(
            c if c.op == "!inK" else Constraint(c.op, _subst_term(c.rhs, var, value))
            for c in f.guard
        )
        return Forall(f.var, guard, substitute(f.body, var, value, lat))
    raise TypeError(f"not a formula: {f!r}")


# -- rendering -------------------------------------------------------------------


def ascii_term(t: Term) -> str:
    if isinstance(t, (Const, Var)):
        return t.name
    return f"ortho({ascii_term(t.arg)})"


def _constraint(c: Constraint) -> str:
    if c.op == "!inK":
        return f"!in K({c.rhs})"
    return f"{c.op} {ascii_term(c.rhs)}"


def ascii_formula(f: Formula) -> str:
    """Canonical surface form: the multiplicative conjunction requires
    explicit parentheses for nesting; the additive disjunction is written
    left-associated; the implication is right-associated and lowest."""

    def wrap(sub: Formula, needed: bool) -> str:
        s = ascii_formula(sub)
        return f"({s})" if needed else s

    if isinstance(f, Actual):
        return f"In({ascii_term(f.term)})"
    if isinstance(f, Reachable):
        return f"R({ascii_term(f.term)})"
    if isinstance(f, Measurement):
        return f"M({ascii_term(f.term)})"
    if isinstance(f, Induced):
        return f"IND({f.alpha})"
    if isinstance(f, Tensor):
        return (
            f"{wrap(f.left, not isinstance(f.left, ATOMS))}"
            f" * {wrap(f.right, not isinstance(f.right, ATOMS))}"
        )
    if isinstance(f, Plus):
        return (
            f"{wrap(f.left, isinstance(f.left, (Lolli, Forall)))}"
            f" + {wrap(f.right, isinstance(f.right, (Plus, Lolli, Forall)))}"
        )
    if isinstance(f, Lolli):
        return (
            f"{wrap(f.antecedent, isinstance(f.antecedent, (Lolli, Forall)))}"
            f" -o {ascii_formula(f.consequent)}"
        )
    if isinstance(f, Forall):
        head = f"forall {f.var}"
        if f.guard:
            head += " {" + ", ".join(_constraint(c) for c in f.guard) + "}"
        return f"{head} . {ascii_formula(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def ascii_sequent(s: Sequent) -> str:
    ctx = ", ".join(ascii_formula(f) for f in s.context)
    rhs = ascii_formula(s.succedent)
    return f"{ctx} |- {rhs}" if ctx else f"|- {rhs}"


def _pretty_term(t: Term) -> str:
    if isinstance(t, (Const, Var)):
        return t.name
    return f"{_pretty_term(t.arg)}⊥"


def pretty_formula(f: Formula) -> str:
    """Display-only Unicode form; files always use the ASCII surface."""

    def rec(g: Formula) -> str:
        if isinstance(g, Actual):
            return f"In({_pretty_term(g.term)})"
        if isinstance(g, Reachable):
            return f"R({_pretty_term(g.term)})"
        if isinstance(g, Measurement):
            t = _pretty_term(g.term)
            return f"M({t}, {t}⊥)"
        if isinstance(g, Induced):
            return f"IND({g.alpha})"
        if isinstance(g, Tensor):
            l, r = rec(g.left), rec(g.right)
            if not isinstance(g.left, ATOMS):
                l = f"({l})"
            if not isinstance(g.right, ATOMS):
                r = f"({r})"
            return f"{l} ⊗ {r}"
        if isinstance(g, Plus):
            l, r = rec(g.left), rec(g.right)
            if isinstance(g.left, (Lolli, Forall)):
                l = f"({l})"
            if isinstance(g.right, (Plus, Lolli, Forall)):
                r = f"({r})"
            return f"{l} ⊕ {r}"
        if isinstance(g, Lolli):
            l = rec(g.antecedent)
            if isinstance(g.antecedent, (Lolli, Forall)):
                l = f"({l})"
            return f"{l} ⊸ {rec(g.consequent)}"
        if isinstance(g, Forall):
            head = f"∀{g.var}"
            if g.guard:
                head += "{" + ", ".join(_pretty_constraint(c) for c in g.guard) + "}"
            return f"{head} . {rec(g.body)}"
        raise TypeError(f"not a formula: {g!r}")

    return rec(f)


def _pretty_constraint(c: Constraint) -> str:
    if c.op == "!inK":
        return f"∉ K({c.rhs})"
    rhs = _pretty_term(c.rhs)
    return ("≤ " if c.op == "<=" else "≰ ") + rhs


def pretty_sequent(s: Sequent) -> str:
    ctx = ", ".join(pretty_formula(f) for f in s.context)
    rhs = pretty_formula(s.succedent)
    return f"{ctx} ⊢ {rhs}" if ctx else f"⊢ {rhs}"
