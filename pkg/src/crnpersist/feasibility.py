"""Exact rational feasibility engine and semiflow queries.

Every structural test in the package reduces to "does this system of linear
equalities and inequalities have a rational solution".  The solver is a
phase-one simplex over ``Fraction`` with Bland's rule, so it is exact and
terminates.  Strict positivity is handled by scaling: because each cone we
care about is closed under positive scaling, ``x > 0`` can be replaced with
``x >= 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatchError, EmptySetError
from .network import RationalMatrix

RationalVector = tuple  # tuple[Fraction, ...], indexed by species or reactions

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class FeasibilityProblem:
    """``eq_rows · x == eq_rhs`` and ``ge_rows · x >= ge_rhs``.

    Variables are free unless ``nonnegative`` is set.
    """

    n_vars: int
    eq_rows: tuple = ()
    eq_rhs: tuple = ()
    ge_rows: tuple = ()
    ge_rhs: tuple = ()
    nonnegative: bool = False

    def __post_init__(self):
        if len(self.eq_rows) != len(self.eq_rhs) or len(self.ge_rows) != len(self.ge_rhs):
            raise DimensionMismatchError("row count differs from right-hand side length")
        for row in (*self.eq_rows, *self.ge_rows):
            if len(row) != self.n_vars:
                raise DimensionMismatchError(
                    f"constraint row of length {len(row)} for {self.n_vars} variables"
                )

    def is_satisfied_by(self, x) -> bool:
        if len(x) != self.n_vars:
            return False
        if self.nonnegative and any(v < 0 for v in x):
            return False
        dot = lambda row: sum((a * b for a, b in zip(row, x)), _ZERO)  # noqa: E731
        return all(dot(r) == b for r, b in zip(self.eq_rows, self.eq_rhs)) and all(
            dot(r) >= b for r, b in zip(self.ge_rows, self.ge_rhs)
        )


def solve_feasibility(problem: FeasibilityProblem) -> RationalVector | None:
    """Return an exact solution of ``problem`` or None when none exists."""
    n = problem.n_vars
    # standard form: A z = b, z >= 0, b >= 0
    split = not problem.nonnegative
    n_struct = 2 * n if split else n
    n_slack = len(problem.ge_rows)
    width = n_struct + n_slack

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []

    def expand(row):
        row = [Fraction(a) for a in row]
        return row + [-a for a in row] if split else row

    for row, b in zip(problem.eq_rows, problem.eq_rhs):
        rows.append(expand(row) + [_ZERO] * n_slack)
        rhs.append(Fraction(b))
    for k, (row, b) in enumerate(zip(problem.ge_rows, problem.ge_rhs)):
        slack = [_ZERO] * n_slack
        slack[k] = -_ONE
        rows.append(expand(row) + slack)
        rhs.append(Fraction(b))

    # drop trivial rows, detect trivially infeasible ones
    kept_rows, kept_rhs = [], []
    for row, b in zip(rows, rhs):
        if any(row):
            kept_rows.append(row)
            kept_rhs.append(b)
        elif b != 0:
            return None
    z = _phase_one(kept_rows, kept_rhs, width)
    if z is None:
        return None
    if split:
        x = tuple(z[i] - z[n + i] for i in range(n))
    else:
        x = tuple(z[:n])
    assert problem.is_satisfied_by(x), "simplex produced an infeasible point"
    return x


def _phase_one(rows, rhs, width):
    """Minimise the sum of artificials; Bland's rule for entering/leaving."""
    m = len(rows)
    if m == 0:
        return [_ZERO] * width
    tab = []
    for row, b in zip(rows, rhs):
        if b < 0:
            row = [-a for a in row]
            b = -b
        art = [_ZERO] * m
        tab.append(row + art + [b])
    for i in range(m):
        tab[i][width + i] = _ONE
    basis = [width + i for i in range(m)]
    total = width + m
    # reduced costs of the phase-one objective (artificial columns start at 0)
    cost = [_ZERO] * (total + 1)
    for i in range(m):
        for j in range(width):
            cost[j] -= tab[i][j]
        cost[total] -= tab[i][total]

    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][total] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            # unbounded direction cannot occur: the objective is bounded below by 0
            raise AssertionError("phase-one simplex reported unboundedness")
        _pivot(tab, cost, leave, enter)
        basis[leave] = enter

    if -cost[total] != 0:
        return None
    z = [_ZERO] * width
    for i, var in enumerate(basis):
        if var < width:
            z[var] = tab[i][-1]
    return z


def _pivot(tab, cost, r, c):
    prow = tab[r]
    p = prow[c]
    if p != 1:
        prow = [a / p for a in prow]
        tab[r] = prow
    nz = [(j, a) for j, a in enumerate(prow) if a]
    for i, row in enumerate(tab):
        if i != r:
            f = row[c]
            if f:
                for j, a in nz:
                    row[j] -= f * a
    f = cost[c]
    if f:
        for j, a in nz:
            cost[j] -= f * a


class WitnessKind(enum.Enum):
    P_SEMIFLOW = "p-semiflow"
    T_SEMIFLOW = "t-semiflow"
    DRAIN = "drain"
    REPLICATE = "replicate"
    SUPPORTED_SEMIFLOW = "supported-semiflow"


class Sign(enum.Enum):
    NEGATIVE = -1
    POSITIVE = 1


@dataclass(frozen=True)
class Witness:
    """A certificate vector together with what it claims.

    ``species_set`` holds the row indices the claim is about (only for
    drain, replicate and supported-semiflow witnesses).
    """

    kind: WitnessKind
    vector: RationalVector
    species_set: tuple[int, ...] = field(default=())

    def verify(self, N: RationalMatrix) -> bool:
        """Replay the claim against ``N`` with exact arithmetic."""
        v = self.vector
        if any(x < 0 for x in v):
            return False
        if self.kind in (WitnessKind.P_SEMIFLOW, WitnessKind.SUPPORTED_SEMIFLOW):
            if len(v) != N.n_rows or any(N.left_apply(v)):
                return False
            if self.kind is WitnessKind.P_SEMIFLOW:
                return all(x >= 1 for x in v)
            allowed = set(self.species_set)
            return sum(v) == 1 and all(x == 0 for i, x in enumerate(v) if i not in allowed)
        if len(v) != N.n_cols:
            return False
        if self.kind is WitnessKind.T_SEMIFLOW:
            return all(x >= 1 for x in v) and not any(N.apply(v))
        if any(x.denominator != 1 for x in v):
            return False
        change = N.apply(v)
        if self.kind is WitnessKind.DRAIN:
            return all(change[i] <= -1 for i in self.species_set)
        return all(change[i] >= 1 for i in self.species_set)


def positive_left_kernel(N: RationalMatrix) -> Witness | None:
    """Strictly positive conservation law ``ω ≥ 1`` with ``ωᵀN = 0``."""
    n, m = N.shape
    if n == 0:
        return Witness(WitnessKind.P_SEMIFLOW, ())
    # ω = 1 + u with u ≥ 0:  Nᵀ u = -Nᵀ 1
    rows = tuple(N.column(j) for j in range(m))
    rhs = tuple(-sum(col, _ZERO) for col in rows)
    u = solve_feasibility(FeasibilityProblem(n, rows, rhs, nonnegative=True))
    if u is None:
        return None
    return Witness(WitnessKind.P_SEMIFLOW, tuple(x + 1 for x in u))


def positive_kernel(N: RationalMatrix) -> Witness | None:
    """Strictly positive flux ``v ≥ 1`` with ``Nv = 0``."""
    n, m = N.shape
    if m == 0:
        return Witness(WitnessKind.T_SEMIFLOW, ())
    rows = N.rows
    rhs = tuple(-sum(row, _ZERO) for row in rows)
    u = solve_feasibility(FeasibilityProblem(m, rows, rhs, nonnegative=True))
    if u is None:
        return None
    return Witness(WitnessKind.T_SEMIFLOW, tuple(x + 1 for x in u))


def _check_indices(N: RationalMatrix, sigma: Sequence[int]) -> tuple[int, ...]:
    sigma = tuple(sorted(set(sigma)))
    if not sigma:
        raise EmptySetError("species set must be nonempty")
    if sigma[0] < 0 or sigma[-1] >= N.n_rows:
        raise DimensionMismatchError(f"species index out of range for {N.n_rows} rows")
    return sigma


def semiflow_supported_in(N: RationalMatrix, sigma: Sequence[int]) -> Witness | None:
    """Nonnegative ``ω`` with ``ωᵀN = 0``, support inside ``sigma`` and
    entries summing to one.  None means ``sigma`` is critical."""
    sigma = _check_indices(N, sigma)
    k = len(sigma)
    rows = [tuple(N[i, j] for i in sigma) for j in range(N.n_cols)]
    rows.append((_ONE,) * k)
    rhs = (_ZERO,) * N.n_cols + (_ONE,)
    sol = solve_feasibility(FeasibilityProblem(k, tuple(rows), rhs, nonnegative=True))
    if sol is None:
        return None
    omega = [_ZERO] * N.n_rows
    for i, x in zip(sigma, sol):
        omega[i] = x
    return Witness(WitnessKind.SUPPORTED_SEMIFLOW, tuple(omega), sigma)


def signed_combination(N: RationalMatrix, sigma: Sequence[int], sign: Sign) -> Witness | None:
    """Integer ``v ≥ 0`` whose net change ``Nv`` is ≤ -1 (NEGATIVE) or ≥ 1
    (POSITIVE) on every species of ``sigma``."""
    sigma = _check_indices(N, sigma)
    m = N.n_cols
    if m == 0:
        return None
    s = sign.value
    rows = tuple(tuple(s * a for a in N.row(i)) for i in sigma)
    sol = solve_feasibility(
        FeasibilityProblem(m, ge_rows=rows, ge_rhs=(_ONE,) * len(sigma), nonnegative=True)
    )
    if sol is None:
        return None
    scale = math.lcm(*(x.denominator for x in sol))
    kind = WitnessKind.DRAIN if sign is Sign.NEGATIVE else WitnessKind.REPLICATE
    return Witness(kind, tuple(x * scale for x in sol), sigma)
