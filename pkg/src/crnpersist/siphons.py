"""Siphons: predicate, minimal enumeration, classification and pathways."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import EmptySetError, ExplosionCapError, NotASiphonError
from .feasibility import (
    Sign,
    Witness,
    semiflow_supported_in,
    signed_combination,
)
from .network import ReactionNetwork, stoichiometric_matrix

logger = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 10**6
NODE_BUDGET_ENV = "CRN_NODE_BUDGET"

Siphon = frozenset  # frozenset[str]


def _as_set(net: ReactionNetwork, sigma: Iterable[str]) -> frozenset[str]:
    sigma = frozenset(sigma)
    if not sigma:
        raise EmptySetError("species set must be nonempty")
    return net.check_species(sigma)


def is_siphon(net: ReactionNetwork, sigma: Iterable[str]) -> bool:
    """Every reaction producing a member of ``sigma`` also consumes one."""
    sigma = _as_set(net, sigma)
    for r in net.reactions:
        if any(s in sigma for s in r.product.species) and not any(
            s in sigma for s in r.reactant.species
        ):
            return False
    return True


def largest_siphon_within(net: ReactionNetwork, species: Iterable[str]) -> frozenset[str]:
    """Union of all siphons contained in ``species`` (possibly empty)."""
    current = set(species)
    changed = True
    while changed:
        changed = False
        for r in net.reactions:
            if not any(s in current for s in r.reactant.species):
                hit = [s for s in r.product.species if s in current]
                if hit:
                    current.difference_update(hit)
                    changed = True
    return frozenset(current)


def _node_budget(budget: int | None) -> int:
    if budget is not None:
        return budget
    env = os.environ.get(NODE_BUDGET_ENV)
    return int(env) if env else DEFAULT_NODE_BUDGET


def minimal_siphons(net: ReactionNetwork, budget: int | None = None) -> list[frozenset[str]]:
    """All inclusion-minimal siphons.

    Branch and bound seeded by each species in order.  A branch grows a
    partial set by picking the first reaction that produces a member
    without consuming one and trying each of its reactant species.  From a
    seed only species of equal or larger ordinal are admitted, so each
    minimal siphon is found from its smallest member.  Partial sets that
    already contain a found siphon are pruned.  Raises ExplosionCapError if
    more than ``budget`` nodes are visited (default 10**6, or the value of
    the CRN_NODE_BUDGET environment variable).
    """
    limit = _node_budget(budget)
    n = net.n_species
    index = {s: i for i, s in enumerate(net.species)}
    # reactions as (reactant index set, product index set)
    rxns = [
        (frozenset(index[s] for s in r.reactant.species), frozenset(index[s] for s in r.product.species))
        for r in net.reactions
    ]
    producers: list[list[int]] = [[] for _ in range(n)]
    for k, (_, prod) in enumerate(rxns):
        for i in prod:
            producers[i].append(k)

    found: list[frozenset[int]] = []
    nodes = 0

    def violated(members: frozenset[int]):
        for i in sorted(members):
            for k in producers[i]:
                if not (rxns[k][0] & members):
                    return k
        return None

    for seed in range(n):
        stack = [frozenset([seed])]
        seen_partial = set()
        while stack:
            members = stack.pop()
            if members in seen_partial:
                continue
            seen_partial.add(members)
            nodes += 1
            if nodes > limit:
                raise ExplosionCapError(limit)
            if any(f <= members for f in found):
                continue
            k = violated(members)
            if k is None:
                found.append(members)
                continue
            # reverse so the smallest ordinal is explored first
            for i in sorted(rxns[k][0], reverse=True):
                if i >= seed:
                    stack.append(members | {i})

    minimal = [f for f in found if not any(g < f for g in found)]
    minimal = sorted(set(minimal), key=lambda f: sorted(f))
    logger.debug("minimal siphons: %d found after %d nodes", len(minimal), nodes)
    return [frozenset(net.species[i] for i in f) for f in minimal]


def is_minimal_siphon(net: ReactionNetwork, sigma: Iterable[str]) -> bool:
    sigma = frozenset(sigma)
    if not is_siphon(net, sigma):
        return False
    return all(not largest_siphon_within(net, sigma - {s}) for s in sigma)


@dataclass(frozen=True)
class SiphonClassification:
    siphon: frozenset[str]
    minimal: bool
    critical: bool
    drainable: Witness | None
    self_replicable: Witness | None
    semiflow: Witness | None


def _indices(net: ReactionNetwork, sigma) -> list[int]:
    return sorted(net.index(s) for s in sigma)


def classify_siphon(net: ReactionNetwork, sigma: Iterable[str]) -> SiphonClassification:
    sigma = _as_set(net, sigma)
    if not is_siphon(net, sigma):
        raise NotASiphonError(f"{sorted(sigma)} is not a siphon")
    N = stoichiometric_matrix(net)
    idx = _indices(net, sigma)
    semiflow = semiflow_supported_in(N, idx)
    return SiphonClassification(
        siphon=sigma,
        minimal=is_minimal_siphon(net, sigma),
        critical=semiflow is None,
        drainable=signed_combination(N, idx, Sign.NEGATIVE),
        self_replicable=signed_combination(N, idx, Sign.POSITIVE),
        semiflow=semiflow,
    )


def is_drainable(net: ReactionNetwork, sigma: Iterable[str]) -> Witness | None:
    sigma = _as_set(net, sigma)
    return signed_combination(stoichiometric_matrix(net), _indices(net, sigma), Sign.NEGATIVE)


def is_self_replicable(net: ReactionNetwork, sigma: Iterable[str]) -> Witness | None:
    sigma = _as_set(net, sigma)
    return signed_combination(stoichiometric_matrix(net), _indices(net, sigma), Sign.POSITIVE)


@dataclass(frozen=True)
class SiphonPropertyVerdict:
    holds: bool
    violating_siphon: frozenset[str] | None
    witnesses: tuple[tuple[frozenset[str], Witness], ...]


def siphon_psemiflow_property(
    net: ReactionNetwork, siphons: Sequence[frozenset[str]] | None = None
) -> SiphonPropertyVerdict:
    """Whether every minimal siphon carries a P-semiflow.

    Checking minimal siphons suffices since every siphon contains one.
    Witnesses pair each checked siphon with its supported semiflow.
    """
    if siphons is None:
        siphons = minimal_siphons(net)
    N = stoichiometric_matrix(net)
    witnesses = []
    for sigma in siphons:
        w = semiflow_supported_in(N, _indices(net, sigma))
        if w is None:
            return SiphonPropertyVerdict(False, sigma, tuple(witnesses))
        witnesses.append((sigma, w))
    return SiphonPropertyVerdict(True, None, tuple(witnesses))


def _first_signed(net, siphons, sign):
    N = stoichiometric_matrix(net)
    for sigma in siphons:
        w = signed_combination(N, _indices(net, sigma), sign)
        if w is not None:
            return sigma, w
    return None


def drainable_siphon(net: ReactionNetwork, siphons=None) -> tuple[frozenset[str], Witness] | None:
    """First drainable minimal siphon with its witness, if any.

    Subsets of drainable sets are drainable, so a drainable siphon exists
    exactly when a drainable minimal siphon does.  The same holds for
    self-replicable siphons.
    """
    if siphons is None:
        siphons = minimal_siphons(net)
    return _first_signed(net, siphons, Sign.NEGATIVE)


def self_replicable_siphon(net: ReactionNetwork, siphons=None) -> tuple[frozenset[str], Witness] | None:
    if siphons is None:
        siphons = minimal_siphons(net)
    return _first_signed(net, siphons, Sign.POSITIVE)


def no_drainable_or_self_replicable(net: ReactionNetwork, siphons=None) -> bool:
    """The sign-combination route to the siphon/P-semiflow property."""
    if siphons is None:
        siphons = minimal_siphons(net)
    return drainable_siphon(net, siphons) is None and self_replicable_siphon(net, siphons) is None


@dataclass(frozen=True)
class PathwayStep:
    reaction: int
    context: tuple[Fraction, ...]


@dataclass(frozen=True)
class GReactionPathway:
    states: tuple[tuple[Fraction, ...], ...]
    steps: tuple[PathwayStep, ...]

    def net_change(self) -> tuple[Fraction, ...]:
        return tuple(b - a for a, b in zip(self.states[0], self.states[-1]))


def pathway_from_sequence(net: ReactionNetwork, seq: Sequence[int]) -> GReactionPathway:
    """Realise a multiset of reactions as a chain of feasible transitions.

    The context carried along at step j is every reactant still to come
    plus every product already made, so each step only consumes what is
    present.
    """
    if not seq:
        raise ValueError("reaction sequence must be nonempty")
    reactants = [net.vector(net.reactions[j].reactant) for j in seq]
    products = [net.vector(net.reactions[j].product) for j in seq]
    n = net.n_species
    w = [sum((reactants[i][s] for i in range(1, len(seq))), Fraction(0)) for s in range(n)]
    states = [tuple(a + b for a, b in zip(reactants[0], w))]
    steps = []
    for j in range(len(seq)):
        steps.append(PathwayStep(seq[j], tuple(w)))
        states.append(tuple(a + b for a, b in zip(products[j], w)))
        if j + 1 < len(seq):
            w = [p + x - y for p, x, y in zip(products[j], w, reactants[j + 1])]
    return GReactionPathway(tuple(states), tuple(steps))
