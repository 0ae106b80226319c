"""Intermediate and catalyst removal, the reduction driver, and lifting of
certificates from a reduced network back to the one it came from.

Intermediates are species that only ever appear alone with coefficient one
and sit on reaction paths between other complexes; removing them collapses
each path through them into a single reaction.  Catalysts are species that
every mixed reaction leaves unchanged; removing them projects reactions onto
the remaining species.
"""

from __future__ import annotations

import enum
import logging
import random
import warnings
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .errors import (
    CatalystSubnetworkNotConservativeError,
    InvalidCatalystsError,
    InvalidIntermediatesError,
    NotAConservationLawError,
    NotASiphonError,
    NotATSemiflowError,
    ZeroComplexObstruction,
)
from .feasibility import positive_kernel, positive_left_kernel
from .network import (
    Complex,
    Reaction,
    ReactionNetwork,
    connected_components,
    implied_subnetwork,
    is_monomolecular,
    stoichiometric_matrix,
)
from .siphons import is_drainable, is_self_replicable, is_siphon, minimal_siphons, no_drainable_or_self_replicable

logger = logging.getLogger(__name__)

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str

    def __str__(self):
        return f"({self.rule}) {self.message}"


class StepKind(enum.Enum):
    INTERMEDIATES = "intermediates"
    CATALYSTS = "catalysts"


@dataclass(frozen=True)
class ReductionStep:
    """One removal, with the bookkeeping needed to lift certificates.

    For intermediate steps ``vanished`` lists species that are neither
    removed nor present afterwards, and ``representatives`` maps each
    intermediate to a non-intermediate complex of its linkage class.  For
    catalyst steps ``catalyst_species`` are the species of the
    catalyst-only subnetwork, ``free_catalysts`` the remaining catalysts,
    and ``sources[j]`` the indices of the original reactions that project
    onto reaction ``j`` of ``after``.
    """

    kind: StepKind
    removed: tuple[str, ...]
    before: ReactionNetwork
    after: ReactionNetwork
    vanished: tuple[str, ...] = ()
    representatives: tuple[tuple[str, Complex], ...] = ()
    catalyst_species: tuple[str, ...] = ()
    free_catalysts: tuple[str, ...] = ()
    sources: tuple[tuple[int, ...], ...] = ()


@dataclass(frozen=True)
class ReductionTrace:
    original: ReactionNetwork
    steps: tuple[ReductionStep, ...] = field(default=())

    @property
    def final(self) -> ReactionNetwork:
        return self.steps[-1].after if self.steps else self.original

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


# ---------------------------------------------------------------- intermediates


def _successors(net: ReactionNetwork) -> dict[Complex, list[Complex]]:
    succ: dict[Complex, list[Complex]] = {c: [] for c in net.complexes}
    for r in net.reactions:
        succ[r.reactant].append(r.product)
    return succ


def _predecessors(net: ReactionNetwork) -> dict[Complex, list[Complex]]:
    pred: dict[Complex, list[Complex]] = {c: [] for c in net.complexes}
    for r in net.reactions:
        pred[r.product].append(r.reactant)
    return pred


def _intermediate_path_failures(net: ReactionNetwork, members: frozenset[str]) -> dict[str, str]:
    """Members lacking an entry or an exit path through intermediate complexes."""
    ycomp = {Complex.of(y): y for y in members if net.has_complex(Complex.of(y))}
    succ, pred = _successors(net), _predecessors(net)

    def closure(start, step):
        seen = set(start)
        queue = deque(start)
        while queue:
            c = queue.popleft()
            for d in step[c]:
                if d in ycomp and d not in seen:
                    seen.add(d)
                    queue.append(d)
        return seen

    entered = closure([c for c in ycomp if any(p not in ycomp for p in pred[c])], succ)
    exits = closure([c for c in ycomp if any(s not in ycomp for s in succ[c])], pred)
    failures = {}
    for y in members:
        c = Complex.of(y)
        if c not in ycomp:
            failures[y] = "never appears as a complex on its own"
        elif c not in entered:
            failures[y] = "no reaction path enters it from a non-intermediate complex"
        elif c not in exits:
            failures[y] = "no reaction path leaves it to a non-intermediate complex"
    return failures


def _exchange_only(net: ReactionNetwork, members: frozenset[str]) -> set[str]:
    """Members whose paths in and out only meet the zero complex."""
    ycomp = {Complex.of(y) for y in members}
    succ, pred = _successors(net), _predecessors(net)
    out = set()
    for y in members:
        start = Complex.of(y)
        if start not in succ:
            continue
        ends = set()
        for step in (succ, pred):
            seen = {start}
            queue = deque([start])
            while queue:
                for d in step[queue.popleft()]:
                    if d not in ycomp:
                        ends.add(d)
                    elif d not in seen:
                        seen.add(d)
                        queue.append(d)
        if ends and all(c.is_zero() for c in ends):
            out.add(y)
    return out


def validate_intermediates(net: ReactionNetwork, intermediates: Iterable[str]) -> list[Violation]:
    """Empty list when ``intermediates`` is a valid set of intermediates."""
    members = net.check_species(intermediates)
    if not members:
        return [Violation("I1", "intermediate set is empty")]
    out = []
    for c in net.complexes:
        inside = [s for s in c.species if s in members]
        if inside and c.solo_species() is None:
            out.append(Violation("I1", f"complex {c} mixes intermediate {inside[0]} with other terms"))
    for y, why in sorted(_intermediate_path_failures(net, members).items(), key=lambda t: net.index(t[0])):
        out.append(Violation("I2", f"{y}: {why}"))
    return out


def intermediate_candidates(net: ReactionNetwork) -> frozenset[str]:
    """Species that only ever occur as a complex on their own with
    coefficient one."""
    bad = set()
    for c in net.complexes:
        if c.solo_species() is None:
            bad.update(c.species)
    return frozenset(s for s in net.species if s not in bad)


def detect_intermediates(
    net: ReactionNetwork, priority: Callable[[str], object] | None = None
) -> frozenset[str] | None:
    """Largest set found by pruning candidates until every path condition holds.

    Violators are dropped one at a time.  Those that still fail once every
    other violator is set aside go first; ties are broken by lowest
    ``priority`` (species ordinal by default).  When two species are
    interchangeable, the one dropped first stays in the network and the
    other becomes the intermediate.

    Monomolecular networks are left alone: every question about them is
    already answered by their graph structure, and collapsing a strongly
    connected component would only erase it.  For the same reason a species
    that is only produced from and degraded to nothing is never offered.
    """
    if is_monomolecular(net):
        return None
    key = priority or net.index

    def failing(members: frozenset[str]) -> set[str]:
        return set(_intermediate_path_failures(net, members)) | _exchange_only(net, members)

    members = set(intermediate_candidates(net))
    while members:
        failures = failing(frozenset(members))
        if not failures:
            break
        # a member failing only because of another failing member may recover once that one goes
        hard = {y for y in failures if y in failing(frozenset(members - failures | {y}))}
        members.discard(min(hard or failures, key=key))
    return frozenset(members) or None


def remove_intermediates(net: ReactionNetwork, intermediates: Iterable[str]) -> tuple[ReactionNetwork, ReductionStep]:
    members = frozenset(intermediates)
    violations = validate_intermediates(net, members)
    if violations:
        raise InvalidIntermediatesError(violations)
    ycomp = {Complex.of(y) for y in members}
    succ = _successors(net)
    exits_cache: dict[Complex, list[Complex]] = {}

    def exits(start: Complex) -> list[Complex]:
        if start not in exits_cache:
            seen = {start}
            queue = deque([start])
            found: dict[Complex, None] = {}
            while queue:
                c = queue.popleft()
                for d in succ[c]:
                    if d in ycomp:
                        if d not in seen:
                            seen.add(d)
                            queue.append(d)
                    else:
                        found.setdefault(d)
            exits_cache[start] = list(found)
        return exits_cache[start]

    out: dict[Reaction, None] = {}
    for r in net.reactions:
        a, b = r.reactant, r.product
        if a in ycomp:
            continue
        if b not in ycomp:
            out.setdefault(r)
            continue
        for target in exits(b):
            if target != a:
                out.setdefault(Reaction(a, target))
    after = ReactionNetwork(out)

    removed = tuple(s for s in net.species if s in members)
    vanished = tuple(s for s in net.species if s not in members and not after.has_species(s))
    reps = []
    for comp in connected_components(net):
        inside = [c for c in comp if c in ycomp]
        if inside:
            rep = next(c for c in comp if c not in ycomp)
            reps.extend((c.solo_species(), rep) for c in inside)
    reps.sort(key=lambda t: net.index(t[0]))
    step = ReductionStep(
        kind=StepKind.INTERMEDIATES,
        removed=removed,
        before=net,
        after=after,
        vanished=vanished,
        representatives=tuple(reps),
    )
    logger.debug("removed intermediates %s: %d -> %d reactions", removed, len(net), len(after))
    return after, step


# -------------------------------------------------------------------- catalysts


def _catalyst_c1_failures(net: ReactionNetwork, members: frozenset[str]) -> list[tuple[int, set[str]]]:
    """Reactions that change the catalyst part while touching other species,
    paired with the catalysts whose coefficient changes."""
    out = []
    for j, r in enumerate(net.reactions):
        changed = {s for s in members if r.reactant.coefficient(s) != r.product.coefficient(s)}
        if not changed:
            continue
        mixed = any(s not in members for s in r.species)
        if mixed:
            out.append((j, changed))
    return out


def validate_catalysts(net: ReactionNetwork, catalysts: Iterable[str]) -> list[Violation]:
    members = net.check_species(catalysts)
    if not members:
        return [Violation("C1", "catalyst set is empty")]
    out = [
        Violation("C1", f"{net.reactions[j]} changes {', '.join(sorted(ch))} and involves other species")
        for j, ch in _catalyst_c1_failures(net, members)
    ]
    sub = implied_subnetwork(net, members)
    if not no_drainable_or_self_replicable(sub):
        out.append(Violation("C2", "the catalyst-only subnetwork has a drainable or self-replicable siphon"))
    return out


def detect_catalysts(net: ReactionNetwork) -> frozenset[str] | None:
    """Catalyst set found by pruning.

    Candidates are species that appear unchanged on both sides of at least
    one reaction.  Any candidate whose coefficient changes in a reaction
    that also involves non-candidates is dropped, until stable.  Reactions
    among the survivors only are allowed to change them, provided that
    catalyst-only subnetwork has no drainable or self-replicable siphon;
    species of offending siphons are dropped and the pruning repeats.
    """
    members = {
        s
        for r in net.reactions
        for s, c in r.reactant.terms
        if r.product.coefficient(s) == c
    }
    while members:
        failures = _catalyst_c1_failures(net, frozenset(members))
        if failures:
            for _, changed in failures:
                members -= changed
            continue
        sub = implied_subnetwork(net, members)
        bad = [
            sigma
            for sigma in minimal_siphons(sub)
            if is_drainable(sub, sigma) is not None or is_self_replicable(sub, sigma) is not None
        ]
        if not bad:
            break
        members -= frozenset().union(*bad)
    return frozenset(members) or None


def remove_catalysts(net: ReactionNetwork, catalysts: Iterable[str]) -> tuple[ReactionNetwork, ReductionStep]:
    members = frozenset(catalysts)
    violations = validate_catalysts(net, members)
    if violations:
        raise InvalidCatalystsError(violations)
    projected: dict[Reaction, list[int]] = {}
    for j, r in enumerate(net.reactions):
        a, b = r.reactant.without(members), r.product.without(members)
        if a.is_zero() and b.is_zero():
            continue  # catalyst-only reaction
        if a == b:
            raise AssertionError(f"catalyst projection of {r} is a self-loop")
        projected.setdefault(Reaction(a, b), []).append(j)
    after = ReactionNetwork(projected)
    sub = implied_subnetwork(net, members)
    removed = tuple(s for s in net.species if s in members)
    step = ReductionStep(
        kind=StepKind.CATALYSTS,
        removed=removed,
        before=net,
        after=after,
        catalyst_species=sub.species,
        free_catalysts=tuple(s for s in removed if not sub.has_species(s)),
        sources=tuple(tuple(projected[r]) for r in after.reactions),
    )
    logger.debug("removed catalysts %s: %d -> %d reactions", removed, len(net), len(after))
    return after, step


# ------------------------------------------------------------------------ driver


def primitive_reduction(
    net: ReactionNetwork, rng: random.Random | None = None, shuffle_ties: bool = False
) -> tuple[ReactionNetwork, ReductionTrace]:
    """Remove intermediates and catalysts until neither detector fires.

    Intermediates are always tried first.  Passing ``rng`` randomises the
    order in which the detectors are tried and splits every intermediate
    removal into single-species removals in random order; the final network
    should not depend on either.  Ties between interchangeable species are
    always broken by their order in ``net``.  ``shuffle_ties`` randomises
    that too, which can only rename species in the result.
    """
    steps = []
    current = net
    original = {s: i for i, s in enumerate(net.species)}
    while True:
        kinds = [StepKind.INTERMEDIATES, StepKind.CATALYSTS]
        priority = original.__getitem__
        if rng is not None:
            rng.shuffle(kinds)
            if shuffle_ties:
                priority = {s: rng.random() for s in current.species}.__getitem__
        for kind in kinds:
            if kind is StepKind.INTERMEDIATES:
                found = detect_intermediates(current, priority)
                if found is None:
                    continue
                if rng is None:
                    current, step = remove_intermediates(current, found)
                    steps.append(step)
                else:
                    order = sorted(found)
                    rng.shuffle(order)
                    for y in order:
                        current, step = remove_intermediates(current, {y})
                        steps.append(step)
                break
            found = detect_catalysts(current)
            if found is not None:
                current, step = remove_catalysts(current, found)
                steps.append(step)
                break
        else:
            return current, ReductionTrace(net, tuple(steps))


# ---------------------------------------------------------------------- lifting


def _check_length(vec, n, what):
    if len(vec) != n:
        raise ValueError(f"{what} has length {len(vec)}, expected {n}")
    return tuple(Fraction(x) for x in vec)


def lift_conservation_law(
    step: ReductionStep,
    omega_star,
    x=None,
    omega_catalyst=None,
    free=None,
) -> tuple[Fraction, ...]:
    """Extend a conservation law of ``step.after`` to ``step.before``.

    Intermediate steps take ``x`` over ``step.vanished``; each intermediate
    gets the value of its representative complex.  Catalyst steps take a
    conservation law ``omega_catalyst`` of the catalyst-only subnetwork
    (over ``step.catalyst_species``) and arbitrary values ``free`` for the
    remaining catalysts.  Omitted parts default to zero.
    """
    before, after = step.before, step.after
    omega_star = _check_length(omega_star, after.n_species, "omega_star")
    if any(stoichiometric_matrix(after).left_apply(omega_star)):
        raise NotAConservationLawError("omega_star does not annihilate the reduced network")
    values = dict(zip(after.species, omega_star))

    if step.kind is StepKind.INTERMEDIATES:
        x = _check_length(x if x is not None else [0] * len(step.vanished), len(step.vanished), "x")
        values.update(zip(step.vanished, x))
        for y, rep in step.representatives:
            values[y] = sum((values.get(s, _ZERO) * c for s, c in rep.terms), _ZERO)
        positive_in = all(v > 0 for v in omega_star) and all(v > 0 for v in x)
        if positive_in and any(rep.is_zero() for _, rep in step.representatives):
            warnings.warn(
                "an intermediate is linked to the zero complex; the lifted law is not strictly positive",
                ZeroComplexObstruction,
                stacklevel=2,
            )
    else:
        sub_species = step.catalyst_species
        oc = _check_length(
            omega_catalyst if omega_catalyst is not None else [0] * len(sub_species),
            len(sub_species),
            "omega_catalyst",
        )
        if sub_species:
            sub = implied_subnetwork(before, step.removed)
            if any(stoichiometric_matrix(sub).left_apply(oc)):
                raise NotAConservationLawError("omega_catalyst does not annihilate the catalyst subnetwork")
        fr = _check_length(free if free is not None else [0] * len(step.free_catalysts), len(step.free_catalysts), "free")
        values.update(zip(sub_species, oc))
        values.update(zip(step.free_catalysts, fr))

    omega = tuple(values[s] for s in before.species)
    assert not any(stoichiometric_matrix(before).left_apply(omega)), "lifted law fails replay"
    return omega


def _check_t_semiflow(net: ReactionNetwork, v) -> tuple[Fraction, ...]:
    v = _check_length(v, net.n_reactions, "v_star")
    if any(x <= 0 for x in v) or any(stoichiometric_matrix(net).apply(v)):
        raise NotATSemiflowError("expected a strictly positive flux with zero net change")
    return v


def _lift_single_intermediate(big: ReactionNetwork, small: ReactionNetwork, y: str, v: dict) -> dict:
    yc = Complex.of(y)
    original = set(big.reactions)
    into = [r.reactant for r in big.reactions if r.product == yc]
    out_of = [r.product for r in big.reactions if r.reactant == yc]
    through = {Reaction(a, b) for a in into for b in out_of if a != b}
    both_ways = set(into) & set(out_of)

    w = {}
    for r in small.reactions:
        if r in original:
            w[r] = v[r] / 2 if r in through else v[r]
    for a in into:
        total = Fraction(1) if a in both_ways else _ZERO
        for r in through:
            if r.reactant == a:
                total += v[r] / 2 if r in original else v[r]
        w[Reaction(a, yc)] = total
    for b in out_of:
        total = Fraction(1) if b in both_ways else _ZERO
        for r in through:
            if r.product == b:
                total += v[r] / 2 if r in original else v[r]
        w[Reaction(yc, b)] = total
    return w


def lift_t_semiflow(step: ReductionStep, v_star) -> tuple[Fraction, ...]:
    """Extend a strictly positive flux of ``step.after`` to ``step.before``."""
    before, after = step.before, step.after
    v_star = _check_t_semiflow(after, v_star)

    if step.kind is StepKind.INTERMEDIATES:
        chain = [before]
        for y in step.removed:
            chain.append(remove_intermediates(chain[-1], {y})[0])
        if chain[-1] != after:
            raise AssertionError("one-at-a-time removal disagrees with the recorded step")
        flux = dict(zip(after.reactions, v_star))
        for k in range(len(step.removed) - 1, -1, -1):
            flux = _lift_single_intermediate(chain[k], chain[k + 1], step.removed[k], flux)
        v = tuple(flux[r] for r in before.reactions)
    else:
        sub = implied_subnetwork(before, step.removed)
        v_list = [_ZERO] * before.n_reactions
        if sub.n_reactions:
            N_sub = stoichiometric_matrix(sub)
            if positive_left_kernel(N_sub) is None:
                raise CatalystSubnetworkNotConservativeError(
                    "the catalyst-only subnetwork is not conservative"
                )
            sub_flux = positive_kernel(N_sub)
            if sub_flux is None:
                raise CatalystSubnetworkNotConservativeError(
                    "the catalyst-only subnetwork is not consistent"
                )
            pos = {r: j for j, r in enumerate(before.reactions)}
            for r, x in zip(sub.reactions, sub_flux.vector):
                v_list[pos[r]] = x
        for value, srcs in zip(v_star, step.sources):
            for j in srcs:
                v_list[j] = value / len(srcs)
        v = tuple(v_list)

    assert all(x > 0 for x in v) and not any(stoichiometric_matrix(before).apply(v)), "lifted flux fails replay"
    return v


def lift_siphon(step: ReductionStep, sigma_star: Iterable[str]) -> frozenset[str]:
    """Siphon of ``step.before`` whose trace on the reduced species is
    ``sigma_star``."""
    sigma_star = frozenset(sigma_star)
    if not is_siphon(step.after, sigma_star):
        raise NotASiphonError(f"{sorted(sigma_star)} is not a siphon of the reduced network")
    if step.kind is StepKind.CATALYSTS:
        lifted = sigma_star
    else:
        before = step.before
        ycomp = {Complex.of(y) for y in step.removed}
        pred = _predecessors(before)
        hit = [c for c in before.complexes if c not in ycomp and any(s in sigma_star for s in c.species)]
        marked = set()
        queue = deque(p for c in hit for p in pred[c] if p in ycomp)
        while queue:
            c = queue.popleft()
            if c in marked:
                continue
            marked.add(c)
            queue.extend(p for p in pred[c] if p in ycomp and p not in marked)
        lifted = sigma_star | {c.solo_species() for c in marked}
    assert is_siphon(step.before, lifted), "lifted set is not a siphon"
    return lifted


def project_siphon(step: ReductionStep, sigma: Iterable[str]) -> frozenset[str] | None:
    """Trace of a siphon on the reduced species, or None if that trace is
    empty or fails to be a siphon of the reduced network."""
    sigma = frozenset(sigma)
    if not is_siphon(step.before, sigma):
        raise NotASiphonError(f"{sorted(sigma)} is not a siphon")
    proj = frozenset(s for s in sigma if step.after.has_species(s))
    if proj and is_siphon(step.after, proj):
        return proj
    return None


def conservation_dimension(net: ReactionNetwork) -> int:
    """Dimension of the space of conservation laws (left kernel of N)."""
    return net.n_species - stoichiometric_matrix(net).rank()
