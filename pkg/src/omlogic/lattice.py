"""Finite orthomodular lattices: construction, verification, and queries.

A lattice is given by an explicit finite order (generating pairs, closed
reflexively and transitively at construction) together with an
orthocomplement table.  Meets and joins are always computed from the order,
never supplied, so the order relation stays the single source of truth.

Element handles are plain names (strings); the position of a name in
``elements`` is its index.  All structures are immutable after construction
and every query is pure, so concurrent reads are safe.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "LatticeError",
    "UnknownElementError",
    "IncompleteLatticeError",
    "NotOrthomodularError",
    "LawCheck",
    "VerificationReport",
    "FiniteOrthoLattice",
    "boolean",
    "mo",
    "hexagon",
    "build_family",
    "distributivity_oracle",
]


class LatticeError(Exception):
    """Base class for lattice construction and query errors."""


class UnknownElementError(LatticeError):
    """A name does not denote an element of the lattice."""


class IncompleteLatticeError(LatticeError):
    """A meet or join was requested for a pair that has none."""


class NotOrthomodularError(LatticeError):
    """An operation requiring a verified orthomodular lattice was refused."""


@dataclass(frozen=True)
class LawCheck:
    """Outcome of one law: name, pass flag, and a witness tuple on failure."""

    law: str
    passed: bool
    witness: tuple[str, ...] | None = None


@dataclass(frozen=True)
class VerificationReport:
    """Ordered list of law checks; ``ok`` iff every law passed."""

    checks: tuple[LawCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> tuple[LawCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def __getitem__(self, law: str) -> LawCheck:
        for c in self.checks:
            if c.law == law:
                return c
        raise KeyError(law)


# Element names must be plain identifiers so every surface grammar can carry
# them; a trailing prime marks orthocomplement partners in generated families.
_NAME_RE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_']*")


class FiniteOrthoLattice:
    """A finite bounded poset with an orthocomplement table.

    Construction is permissive: any relation/table that is structurally
    buildable is accepted, and :meth:`verify` reports which laws hold.  The
    distinguished bottom and top are the elements named ``0`` and ``1``,
    which must be present.  The pair ``(0, 1)`` is always orthocomplementary
    and need not be listed in ``ortho_pairs``.
    """

    def __init__(
        self,
        name: str,
        elements: Sequence[str],
        leq_pairs: Iterable[tuple[str, str]] = (),
        ortho_pairs: Iterable[tuple[str, str]] = (),
    ):
        elements = tuple(elements)
        if len(set(elements)) != len(elements):
            dup = [e for e in elements if elements.count(e) > 1]
            raise LatticeError(f"duplicate element name {dup[0]!r}")
        for e in elements:
            if not _NAME_RE.fullmatch(e):
                raise LatticeError(f"invalid element name {e!r}")
        if "0" not in elements or "1" not in elements:
            raise LatticeError("elements must include '0' and '1'")
        self.name = name
        self.elements = elements
        self._index = {e: i for i, e in enumerate(elements)}
        n = len(elements)

        # Upward closure as bitmasks: _up[i] has bit j set iff i <= j.
        up = [1 << i for i in range(n)]
        for x, y in leq_pairs:
            up[self.index(x)] |= 1 << self.index(y)
        for k in range(n):
            bit = 1 << k
            for i in range(n):
                if up[i] & bit:
                    up[i] |= up[k]
        self._up = up
        down = [0] * n
        for i in range(n):
            for j in range(n):
                if up[j] >> i & 1:
                    down[i] |= 1 << j
        self._down = down

        ortho: list[int | None] = [None] * n
        pairs = list(ortho_pairs) + [("0", "1")]
        for x, y in pairs:
            i, j = self.index(x), self.index(y)
            for a, b in ((i, j), (j, i)):
                if ortho[a] is not None and ortho[a] != b:
                    raise LatticeError(
                        f"conflicting orthocomplement for {elements[a]!r}"
                    )
                ortho[a] = b
        self._ortho = ortho

        self._meet = [[self._glb(i, j) for j in range(n)] for i in range(n)]
        self._join = [[self._lub(i, j) for j in range(n)] for i in range(n)]
        self._report: VerificationReport | None = None

    # -- basic access -------------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteOrthoLattice):
            return NotImplemented
        return (
            self.name == other.name
            and self.elements == other.elements
            and self._up == other._up
            and self._ortho == other._ortho
        )

    def __repr__(self) -> str:
        return f"FiniteOrthoLattice({self.name!r}, {len(self)} elements)"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownElementError(
                f"unknown element {name!r} in lattice {self.name!r}"
            ) from None

    @property
    def bottom(self) -> str:
        return "0"

    @property
    def top(self) -> str:
        return "1"

    def nonzero(self) -> tuple[str, ...]:
        """Elements other than 0, in index order."""
        return tuple(e for e in self.elements if e != "0")

    def ortho_pairs(self) -> list[tuple[str, str]]:
        """Orthocomplementary pairs, one entry each, excluding the implied
        (0, 1) pair and any element without a table entry."""
        out = []
        seen: set[str] = set()
        for x in self.elements:
            o = self._ortho[self.index(x)]
            if o is None:
                continue
            y = self.elements[o]
            if x in seen or y in seen or {x, y} == {"0", "1"}:
                continue
            seen.update({x, y})
            out.append((x, y))
        return out

    def covers(self) -> list[tuple[str, str]]:
        """Hasse edges (x, y) with x < y and nothing strictly between."""
        n = len(self)
        out = []
        for i in range(n):
            for j in range(n):
                if i == j or not self._up[i] >> j & 1:
                    continue
                between = self._up[i] & self._down[j] & ~(1 << i) & ~(1 << j)
                if between == 0:
                    out.append((self.elements[i], self.elements[j]))
        return out

    # -- order and operations ------------------------------------------------

    def leq(self, a: str, b: str) -> bool:
        return bool(self._up[self.index(a)] >> self.index(b) & 1)

    def _glb(self, i: int, j: int) -> int | None:
        common = self._down[i] & self._down[j]
        m = common
        while m:
            k = (m & -m).bit_length() - 1
            if common & ~self._down[k] == 0:
                return k
            m &= m - 1
        return None

    def _lub(self, i: int, j: int) -> int | None:
        common = self._up[i] & self._up[j]
        m = common
        while m:
            k = (m & -m).bit_length() - 1
            if common & ~self._up[k] == 0:
                return k
            m &= m - 1
        return None

    def meet(self, a: str, b: str) -> str:
        m = self._meet[self.index(a)][self.index(b)]
        if m is None:
            raise IncompleteLatticeError(f"no meet for ({a!r}, {b!r})")
        return self.elements[m]

    def join(self, a: str, b: str) -> str:
        m = self._join[self.index(a)][self.index(b)]
        if m is None:
            raise IncompleteLatticeError(f"no join for ({a!r}, {b!r})")
        return self.elements[m]

    def meet_set(self, names: Iterable[str]) -> str:
        """Meet of a finite set; the empty meet is 1."""
        out = self.top
        for x in names:
            out = self.meet(out, x)
        return out

    def join_set(self, names: Iterable[str]) -> str:
        """Join of a finite set; the empty join is 0."""
        out = self.bottom
        for x in names:
            out = self.join(out, x)
        return out

    def ortho(self, a: str) -> str:
        o = self._ortho[self.index(a)]
        if o is None:
            raise IncompleteLatticeError(f"no orthocomplement for {a!r}")
        return self.elements[o]

    def sasaki(self, a: str, b: str) -> str:
        """Sasaki projection of b onto a: ``a meet (b join ortho(a))``."""
        return self.meet(a, self.join(b, self.ortho(a)))

    def compatible(self, a: str, b: str) -> bool:
        """Commutation criterion: a = (a^b) v (a^b')."""
        return a == self.join(self.meet(a, b), self.meet(a, self.ortho(b)))

    # -- verification ---------------------------------------------------------

    def verify(self) -> VerificationReport:
        """Check every law; the report is cached (lattices are immutable)."""
        if self._report is None:
            self._report = self._verify()
        return self._report

    def ensure_verified(self) -> None:
        report = self.verify()
        if not report.ok:
            laws = ", ".join(c.law for c in report.failed())
            raise NotOrthomodularError(
                f"lattice {self.name!r} fails: {laws}"
            )

    def _verify(self) -> VerificationReport:
        n = len(self)
        els = self.elements
        checks: list[LawCheck] = []

        def add(law: str, witness: tuple[str, ...] | None) -> None:
            checks.append(LawCheck(law, witness is None, witness))

        missing = [els[i] for i in range(n) if self._ortho[i] is None]
        add("structure", (missing[0],) if missing else None)

        add("reflexivity", None)  # closure guarantees it; kept for the record
        w = None
        for i in range(n):
            for j in range(n):
                if i != j and self._up[i] >> j & 1 and self._up[j] >> i & 1:
                    w = (els[i], els[j])
                    break
            if w:
                break
        add("antisymmetry", w)
        w = None
        for i in range(n):
            m = self._up[i]
            acc = m
            while m:
                k = (m & -m).bit_length() - 1
                acc |= self._up[k]
                m &= m - 1
            if acc != self._up[i]:
                w = (els[i],)
                break
        add("transitivity", w)

        w = None
        zero, one = self.index("0"), self.index("1")
        for i in range(n):
            if not (self._up[zero] >> i & 1 and self._up[i] >> one & 1):
                w = (els[i],)
                break
        add("bounds", w)

        w = None
        for i in range(n):
            for j in range(i, n):
                if self._meet[i][j] is None or self._join[i][j] is None:
                    w = (els[i], els[j])
                    break
            if w:
                break
        add("completeness", w)

        def o(i: int) -> int | None:
            return self._ortho[i]

        w = None
        for i in range(n):
            oi = o(i)
            if oi is not None and o(oi) != i:
                w = (els[i],)
                break
        add("ortho-involution", w)

        w = None
        for i in range(n):
            for j in range(n):
                oi, oj = o(i), o(j)
                if oi is None or oj is None:
                    continue
                if self._up[i] >> j & 1 and not self._up[oj] >> oi & 1:
                    w = (els[i], els[j])
                    break
            if w:
                break
        add("ortho-antitone", w)

        w = None
        for i in range(n):
            oi = o(i)
            if oi is None:
                continue
            m = self._meet[i][oi]
            if m is not None and m != zero:
                w = (els[i],)
                break
        add("complement-meet", w)

        w = None
        for i in range(n):
            oi = o(i)
            if oi is None:
                continue
            j = self._join[i][oi]
            if j is not None and j != one:
                w = (els[i],)
                break
        add("complement-join", w)

        # a <= b  implies  a v (a' ^ b) = b
        w = None
        for i in range(n):
            oi = o(i)
            if oi is None:
                continue
            for j in range(n):
                if not self._up[i] >> j & 1:
                    continue
                m = self._meet[oi][j]
                if m is None:
                    continue
                jn = self._join[i][m]
                if jn is not None and jn != j:
                    w = (els[i], els[j])
                    break
            if w:
                break
        add("orthomodularity", w)

        return VerificationReport(tuple(checks))


def distributivity_oracle(lat: FiniteOrthoLattice, a: str, b: str) -> bool:
    """Brute-force compatibility check: close {a, a', b, b'} under meet and
    join, then test the distributive law on every triple of the closure.

    Independent of :meth:`FiniteOrthoLattice.compatible`; the two are required
    to agree on verified orthomodular lattices.
    """
    closed = {a, lat.ortho(a), b, lat.ortho(b)}
    while True:
        new = set()
        for x, y in itertools.product(closed, repeat=2):
            new.add(lat.meet(x, y))
            new.add(lat.join(x, y))
        if new <= closed:
            break
        closed |= new
    for x, y, z in itertools.product(closed, repeat=3):
        if lat.meet(x, lat.join(y, z)) != lat.join(lat.meet(x, y), lat.meet(x, z)):
            return False
    return True


# -- generated families -------------------------------------------------------

_ATOM_LETTERS = "abcdefgh"


def boolean(n: int, names: Sequence[str] | None = None) -> FiniteOrthoLattice:
    """Powerset lattice of n atoms (n <= 6).

    Subsets are named by concatenating their sorted atom names; the empty set
    is ``0`` and the full set is ``1``.
    """
    if not 1 <= n <= 6:
        raise ValueError(f"boolean(n) requires 1 <= n <= 6, got {n}")
    atoms = list(names) if names is not None else list(_ATOM_LETTERS[:n])
    if len(atoms) != n:
        raise ValueError(f"expected {n} atom names, got {len(atoms)}")
    sep = "" if all(len(x) == 1 for x in atoms) else "_"

    def label(mask: int) -> str:
        if mask == 0:
            return "0"
        if mask == (1 << n) - 1:
            return "1"
        return sep.join(atoms[i] for i in range(n) if mask >> i & 1)

    masks = sorted(range(1 << n), key=lambda m: (bin(m).count("1"), label(m)))
    elements = [label(m) for m in masks]
    if len(set(elements)) != len(elements):
        raise ValueError("atom names produce colliding subset names")
    leq = [
        (label(x), label(y))
        for x, y in itertools.product(masks, repeat=2)
        if x & y == x
    ]
    full = (1 << n) - 1
    ortho = [(label(m), label(full & ~m)) for m in masks]
    return FiniteOrthoLattice(f"boolean{n}", elements, leq, ortho)


def mo(n: int, names: Sequence[str] | None = None) -> FiniteOrthoLattice:
    """0, 1, and n orthocomplementary pairs of pairwise-incomparable atoms
    (n <= 8).  Pair partners are named with a trailing prime: a, a'.
    """
    if not 1 <= n <= 8:
        raise ValueError(f"mo(n) requires 1 <= n <= 8, got {n}")
    bases = list(names) if names is not None else list(_ATOM_LETTERS[:n])
    if len(bases) != n:
        raise ValueError(f"expected {n} atom names, got {len(bases)}")
    elements = ["0"]
    for x in bases:
        elements += [x, x + "'"]
    elements.append("1")
    leq = [("0", e) for e in elements] + [(e, "1") for e in elements]
    ortho = [(x, x + "'") for x in bases]
    return FiniteOrthoLattice(f"mo{n}", elements, leq, ortho)


def hexagon() -> FiniteOrthoLattice:
    """The 6-element benzene-ring ortholattice: 0 < a < b < 1 and
    0 < b' < a' < 1.  An ortholattice that is not orthomodular.
    """
    elements = ["0", "a", "b", "b'", "a'", "1"]
    leq = [("0", "a"), ("a", "b"), ("b", "1"), ("0", "b'"), ("b'", "a'"), ("a'", "1")]
    ortho = [("a", "a'"), ("b", "b'")]
    return FiniteOrthoLattice("hexagon", elements, leq, ortho)


def build_family(
    family: str, n: int | None = None, names: Sequence[str] | None = None
) -> FiniteOrthoLattice:
    """Dispatch on a family name: ``boolean(n)``, ``mo(n)``, or ``hexagon``."""
    if family == "boolean":
        if n is None:
            raise ValueError("boolean family requires n")
        return boolean(n, names)
    if family == "mo":
        if n is None:
            raise ValueError("mo family requires n")
        return mo(n, names)
    if family == "hexagon":
        return hexagon()
    raise ValueError(f"unknown family {family!r}")
