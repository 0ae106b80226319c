"""Core reaction network model.

A network is a finite list of reactions between complexes.  Complexes are
nonnegative rational combinations of species, the zero complex included.
Species are identified by name and ordered by first appearance in the
reaction list; every matrix and report uses that order.

Everything here is immutable once constructed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    DuplicateReactionError,
    NegativeCoefficientError,
    SelfLoopError,
    UnknownSpeciesError,
)


class Complex:
    """A nonnegative rational combination of species.

    Terms keep the order in which they were given (this drives species
    ordering), but equality and hashing only look at the coefficient map.
    """

    __slots__ = ("_terms", "_key")

    def __init__(self, terms: Mapping[str, object] | Iterable[tuple[str, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[str, Fraction] = {}
        for name, coef in items:
            coef = Fraction(coef)
            if coef < 0:
                raise NegativeCoefficientError(f"negative coefficient {coef} for {name!r}")
            merged[name] = merged.get(name, Fraction(0)) + coef
        self._terms = tuple((n, c) for n, c in merged.items() if c != 0)
        self._key = frozenset(self._terms)

    @classmethod
    def zero(cls) -> "Complex":
        return cls()

    @classmethod
    def of(cls, *names: str) -> "Complex":
        """Unit-coefficient complex, e.g. ``Complex.of("E", "S0")``."""
        return cls((n, 1) for n in names)

    @property
    def terms(self) -> tuple[tuple[str, Fraction], ...]:
        return self._terms

    @property
    def species(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self._terms)

    def coefficient(self, name: str) -> Fraction:
        for n, c in self._terms:
            if n == name:
                return c
        return Fraction(0)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def solo_species(self) -> str | None:
        """Name of S when the complex is exactly ``1 S``, else None."""
        if len(self._terms) == 1 and self._terms[0][1] == 1:
            return self._terms[0][0]
        return None

    def without(self, names) -> "Complex":
        drop = set(names)
        return Complex((n, c) for n, c in self._terms if n not in drop)

    def restricted_to(self, names) -> "Complex":
        keep = set(names)
        return Complex((n, c) for n, c in self._terms if n in keep)

    def __add__(self, other: "Complex") -> "Complex":
        return Complex(self._terms + other._terms)

    def __eq__(self, other):
        return isinstance(other, Complex) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __bool__(self):
        return bool(self._terms)

    def __str__(self):
        if not self._terms:
            return "0"
        return " + ".join(n if c == 1 else f"{c} {n}" for n, c in self._terms)

    def __repr__(self):
        return f"Complex({str(self)!r})"


@dataclass(frozen=True)
class Reaction:
    reactant: Complex
    product: Complex

    def __post_init__(self):
        if self.reactant == self.product:
            raise SelfLoopError(f"reaction {self.reactant} -> {self.product} is a self-loop")

    @property
    def species(self) -> tuple[str, ...]:
        seen = dict.fromkeys(self.reactant.species)
        seen.update(dict.fromkeys(self.product.species))
        return tuple(seen)

    def reversed(self) -> "Reaction":
        return Reaction(self.product, self.reactant)

    def __str__(self):
        return f"{self.reactant} -> {self.product}"


def reaction(reactant, product) -> Reaction:
    """Convenience constructor accepting mappings or Complex values."""
    r = reactant if isinstance(reactant, Complex) else Complex(reactant)
    p = product if isinstance(product, Complex) else Complex(product)
    return Reaction(r, p)


class RationalMatrix:
    """Dense matrix of Fractions with explicit shape (so 0-row shapes work)."""

    __slots__ = ("rows", "n_rows", "n_cols")

    def __init__(self, rows, n_cols: int | None = None):
        self.rows = tuple(tuple(Fraction(x) for x in row) for row in rows)
        self.n_rows = len(self.rows)
        if n_cols is None:
            n_cols = len(self.rows[0]) if self.rows else 0
        self.n_cols = n_cols
        if any(len(row) != n_cols for row in self.rows):
            raise ValueError("ragged matrix rows")

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.rows[i]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.rows)

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(
            [[self.rows[i][j] for i in range(self.n_rows)] for j in range(self.n_cols)],
            n_cols=self.n_rows,
        )

    T = property(transpose)

    def apply(self, v) -> tuple[Fraction, ...]:
        """M v"""
        return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in self.rows)

    def left_apply(self, w) -> tuple[Fraction, ...]:
        """wᵀ M"""
        out = [Fraction(0)] * self.n_cols
        for wi, row in zip(w, self.rows):
            if wi:
                for j, a in enumerate(row):
                    if a:
                        out[j] += wi * a
        return tuple(out)

    def rank(self) -> int:
        return rank([list(r) for r in self.rows])

    def to_lists(self) -> list[list[Fraction]]:
        return [list(r) for r in self.rows]

    def __eq__(self, other):
        if isinstance(other, RationalMatrix):
            return self.shape == other.shape and self.rows == other.rows
        return NotImplemented

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self):
        return f"RationalMatrix({[[str(x) for x in r] for r in self.rows]})"


def rank(rows: list[list[Fraction]]) -> int:
    """Exact rank by Gaussian elimination (mutates a copy)."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return 0
    n_cols = len(m[0])
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][c]
        for i in range(r + 1, len(m)):
            f = m[i][c]
            if f:
                f /= p
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


class ReactionNetwork:
    """Species, complexes and reactions derived from a reaction list.

    Two networks compare equal when they have the same set of reactions;
    list order (and hence species order) is not part of identity.
    """

    __slots__ = ("reactions", "species", "complexes", "_species_index", "_complex_index")

    def __init__(self, reactions: Iterable[Reaction] = ()):
        reactions = tuple(reactions)
        seen = set()
        for r in reactions:
            if not isinstance(r, Reaction):
                raise TypeError(f"expected Reaction, got {type(r).__name__}")
            if r in seen:
                raise DuplicateReactionError(f"duplicate reaction {r}")
            seen.add(r)
        species: dict[str, None] = {}
        complexes: dict[Complex, None] = {}
        for r in reactions:
            for c in (r.reactant, r.product):
                complexes.setdefault(c)
                for name in c.species:
                    species.setdefault(name)
        self.reactions = reactions
        self.species = tuple(species)
        self.complexes = tuple(complexes)
        self._species_index = {s: i for i, s in enumerate(self.species)}
        self._complex_index = {c: i for i, c in enumerate(self.complexes)}

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def n_reactions(self) -> int:
        return len(self.reactions)

    def index(self, name: str) -> int:
        try:
            return self._species_index[name]
        except KeyError:
            raise UnknownSpeciesError(f"unknown species {name!r}") from None

    def complex_index(self, c: Complex) -> int:
        return self._complex_index[c]

    def has_complex(self, c: Complex) -> bool:
        return c in self._complex_index

    def has_species(self, name: str) -> bool:
        return name in self._species_index

    def check_species(self, names) -> frozenset[str]:
        names = frozenset(names)
        for n in names:
            self.index(n)
        return names

    def vector(self, c: Complex) -> tuple[Fraction, ...]:
        v = [Fraction(0)] * self.n_species
        for n, coef in c.terms:
            v[self.index(n)] = coef
        return tuple(v)

    def is_empty(self) -> bool:
        return not self.reactions

    def __eq__(self, other):
        if not isinstance(other, ReactionNetwork):
            return NotImplemented
        return frozenset(self.reactions) == frozenset(other.reactions)

    def __hash__(self):
        return hash(frozenset(self.reactions))

    def __len__(self):
        return len(self.reactions)

    def __iter__(self):
        return iter(self.reactions)

    def __str__(self):
        return "\n".join(str(r) for r in self.reactions)

    def __repr__(self):
        body = "; ".join(str(r) for r in self.reactions)
        return f"ReactionNetwork([{body}])"


def build_network(reactions: Iterable[Reaction]) -> ReactionNetwork:
    """Validate a reaction list and derive species and complexes."""
    return ReactionNetwork(reactions)


def stoichiometric_matrix(net: ReactionNetwork) -> RationalMatrix:
    """Species by reactions matrix with columns product minus reactant."""
    rows = [[Fraction(0)] * net.n_reactions for _ in range(net.n_species)]
    for j, r in enumerate(net.reactions):
        for name, c in r.product.terms:
            rows[net.index(name)][j] += c
        for name, c in r.reactant.terms:
            rows[net.index(name)][j] -= c
    return RationalMatrix(rows, n_cols=net.n_reactions)


def incidence_matrix(net: ReactionNetwork) -> RationalMatrix:
    """Complexes by reactions; -1 at the reactant, +1 at the product."""
    rows = [[0] * net.n_reactions for _ in net.complexes]
    for j, r in enumerate(net.reactions):
        rows[net.complex_index(r.reactant)][j] = -1
        rows[net.complex_index(r.product)][j] = 1
    return RationalMatrix(rows, n_cols=net.n_reactions)


def implied_subnetwork(net: ReactionNetwork, species) -> ReactionNetwork:
    """Reactions whose reactant and product are supported inside ``species``."""
    keep = net.check_species(species)
    return ReactionNetwork(r for r in net.reactions if set(r.species) <= keep)


def _adjacency(net: ReactionNetwork) -> list[list[int]]:
    adj = [[] for _ in net.complexes]
    for r in net.reactions:
        adj[net.complex_index(r.reactant)].append(net.complex_index(r.product))
    return adj


def connected_components(net: ReactionNetwork) -> list[tuple[Complex, ...]]:
    """Components of the undirected reaction graph (linkage classes).

    Ordered by least complex index; members in complex order.
    """
    parent = list(range(len(net.complexes)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for r in net.reactions:
        a, b = find(net.complex_index(r.reactant)), find(net.complex_index(r.product))
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in range(len(net.complexes)):
        groups.setdefault(find(i), []).append(i)
    return [tuple(net.complexes[i] for i in g) for g in sorted(groups.values())]


def strongly_connected_components(net: ReactionNetwork) -> list[tuple[Complex, ...]]:
    """Tarjan's algorithm, iterative, on the complex digraph."""
    adj = _adjacency(net)
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            if pos < len(adj[v]):
                work.append((v, pos + 1))
                w = adj[v][pos]
                if index[w] == -1:
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    comps.sort()
    return [tuple(net.complexes[i] for i in c) for c in comps]


def components_strongly_connected(net: ReactionNetwork) -> bool:
    """True when every connected component is strongly connected
    (weak reversibility)."""
    return len(strongly_connected_components(net)) == len(connected_components(net))


def is_monomolecular(net: ReactionNetwork) -> bool:
    """Every complex is zero or a single species with coefficient one."""
    return all(c.is_zero() or c.solo_species() is not None for c in net.complexes)
