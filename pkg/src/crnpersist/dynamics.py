"""Mass-action simulation for empirical sanity checks.

Nothing here feeds the verdict logic; trajectories are evidence only.  The
integrator is classical fourth-order Runge-Kutta with a fixed nominal step
that is halved whenever a step would leave the nonnegative orthant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .errors import NonFiniteStateError, StepUnderflowError
from .network import ReactionNetwork
from .siphons import is_siphon


@dataclass(frozen=True)
class MassActionSystem:
    network: ReactionNetwork
    rates: tuple[Fraction, ...]
    initial: tuple[float, ...]

    def __post_init__(self):
        if len(self.rates) != self.network.n_reactions:
            raise ValueError("one rate constant per reaction is required")
        if len(self.initial) != self.network.n_species:
            raise ValueError("one initial value per species is required")
        if any(k <= 0 for k in self.rates):
            raise ValueError("rate constants must be positive")
        if any(x < 0 for x in self.initial):
            raise ValueError("initial state must be nonnegative")

    @classmethod
    def uniform(cls, net: ReactionNetwork, initial: Sequence[float], rate=1) -> "MassActionSystem":
        return cls(net, (Fraction(rate),) * net.n_reactions, tuple(float(x) for x in initial))

    @classmethod
    def from_document(cls, doc) -> "MassActionSystem":
        net = doc.network
        return cls(
            net,
            tuple(doc.rate_of(r) for r in net.reactions),
            tuple(float(doc.initial_value(s)) for s in net.species),
        )

    @cached_property
    def _kinetics(self):
        net = self.network
        reactant_terms = []
        changes = []
        for r in net.reactions:
            reactant_terms.append(
                [(net.index(s), int(c) if c.denominator == 1 else float(c)) for s, c in r.reactant.terms]
            )
            delta = {}
            for s, c in r.product.terms:
                delta[net.index(s)] = delta.get(net.index(s), 0.0) + float(c)
            for s, c in r.reactant.terms:
                delta[net.index(s)] = delta.get(net.index(s), 0.0) - float(c)
            changes.append([(i, d) for i, d in delta.items() if d])
        return [float(k) for k in self.rates], reactant_terms, changes

    def reaction_rates(self, s: Sequence[float]) -> list[float]:
        ks, terms, _ = self._kinetics
        out = []
        for k, tj in zip(ks, terms):
            rate = k
            for i, a in tj:
                rate *= s[i] ** a
            out.append(rate)
        return out

    def vector_field(self, s: Sequence[float]) -> list[float]:
        _, _, changes = self._kinetics
        ds = [0.0] * len(s)
        for rate, ch in zip(self.reaction_rates(s), changes):
            if rate:
                for i, d in ch:
                    ds[i] += d * rate
        return ds


@dataclass(frozen=True)
class TrajectoryRecord:
    times: tuple[float, ...]
    states: tuple[tuple[float, ...], ...]
    minima: tuple[float, ...]
    residual: float
    clamped: int
    halvings: int

    @property
    def final(self) -> tuple[float, ...]:
        return self.states[-1]


def _rk4(system: MassActionSystem, s: list[float], h: float) -> list[float]:
    f = system.vector_field
    k1 = f(s)
    k2 = f([x + 0.5 * h * d for x, d in zip(s, k1)])
    k3 = f([x + 0.5 * h * d for x, d in zip(s, k2)])
    k4 = f([x + h * d for x, d in zip(s, k3)])
    return [x + h / 6.0 * (a + 2 * b + 2 * c + d) for x, a, b, c, d in zip(s, k1, k2, k3, k4)]


def integrate(
    system: MassActionSystem,
    horizon: float,
    dt: float = 0.01,
    min_dt: float = 1e-10,
    clamp_tol: float = 1e-12,
    record_every: int = 1,
    error_tol: float = 1e-8,
) -> TrajectoryRecord:
    """Integrate from ``system.initial`` up to ``horizon``.

    Each step is taken once whole and once as two halves; the halves are
    kept.  The step is retried with half the size when the two disagree by
    more than ``error_tol`` (relative to the state's magnitude) or when a
    coordinate drops below ``-clamp_tol``.  Smaller overshoots are clamped
    to zero and counted.  Raises StepUnderflowError when the step would drop
    below ``min_dt`` and NonFiniteStateError on overflow or NaN.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    s = [float(x) for x in system.initial]
    t = 0.0
    times, states = [t], [tuple(s)]
    minima = list(s)
    clamped = halvings = 0
    n_steps = 0
    while t < horizon:
        h = min(dt, horizon - t)
        while True:
            try:
                whole = _rk4(system, s, h)
                new = _rk4(system, _rk4(system, s, h / 2), h / 2)
            except OverflowError:
                raise NonFiniteStateError(f"overflow near t={t:g}") from None
            if not all(math.isfinite(x) for x in new):
                raise NonFiniteStateError(f"non-finite state near t={t:g}")
            scale = 1.0 + max((abs(x) for x in new), default=0.0)
            error = max((abs(a - b) for a, b in zip(whole, new)), default=0.0)
            if error <= error_tol * scale and min(new, default=0.0) >= -clamp_tol:
                break
            h /= 2
            halvings += 1
            if h < min_dt:
                raise StepUnderflowError(f"step fell below {min_dt:g} near t={t:g}")
        for i, x in enumerate(new):
            if x < 0:
                new[i] = 0.0
                clamped += 1
        s = new
        t = t + h if horizon - t - h > 1e-12 * horizon else horizon
        n_steps += 1
        for i, x in enumerate(s):
            if x < minima[i]:
                minima[i] = x
        if n_steps % record_every == 0 or t >= horizon:
            times.append(t)
            states.append(tuple(s))
    return TrajectoryRecord(
        tuple(times), tuple(states), tuple(minima), steady_state_residual(system, s), clamped, halvings
    )


def steady_state_residual(system: MassActionSystem, s: Sequence[float]) -> float:
    """Max-norm of the vector field at ``s``."""
    return max((abs(x) for x in system.vector_field(s)), default=0.0)


def zero_set_siphon_check(system: MassActionSystem, s: Sequence[float], tol: float = 0.0) -> bool:
    """At a steady state, the set of species with zero concentration must be
    a siphon (or empty).  Returns True whenever that holds or the premise
    does not apply."""
    zero = {name for name, x in zip(system.network.species, s) if x == 0}
    if not zero or steady_state_residual(system, s) > tol:
        return True
    return is_siphon(system.network, zero)
