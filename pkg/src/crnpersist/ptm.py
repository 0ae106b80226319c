"""Post-translational modification systems and cascades of them.

A PTM system splits its species into enzymes, substrates and intermediates
(enzyme-substrate complexes).  Reactions either convert one substrate into
another, possibly with an enzyme riding along unchanged, or bind/release an
enzyme-substrate intermediate.  Removing the intermediates and then the
enzymes leaves a monomolecular network on the substrates, and persistence
of the whole system is decided by whether that network is weakly
reversible.  Cascades stack PTM layers where substrates of one layer may act
as enzymes of an earlier one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .analysis import Verdict
from .errors import CRNError, LayerOverlapError, NotAConservationLawError, NotAPartitionError
from .feasibility import positive_kernel
from .network import (
    Complex,
    ReactionNetwork,
    components_strongly_connected,
    implied_subnetwork,
    stoichiometric_matrix,
)
from .reduction import Violation, remove_catalysts, remove_intermediates, validate_intermediates
from .siphons import drainable_siphon, minimal_siphons, siphon_psemiflow_property


class InvalidPTMError(CRNError, ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = list(violations)


@dataclass(frozen=True)
class PTMPartition:
    enzymes: frozenset[str]
    substrates: frozenset[str]
    intermediates: frozenset[str] = frozenset()

    @classmethod
    def of(cls, enzymes: Iterable[str], substrates: Iterable[str], intermediates: Iterable[str] = ()):
        return cls(frozenset(enzymes), frozenset(substrates), frozenset(intermediates))

    @property
    def species(self) -> frozenset[str]:
        return self.enzymes | self.substrates | self.intermediates

    def check_disjoint(self):
        pairs = [
            ("enzymes", "substrates", self.enzymes & self.substrates),
            ("enzymes", "intermediates", self.enzymes & self.intermediates),
            ("substrates", "intermediates", self.substrates & self.intermediates),
        ]
        for a, b, common in pairs:
            if common:
                raise NotAPartitionError(f"{a} and {b} share {sorted(common)}")


@dataclass(frozen=True)
class CascadeSpec:
    layers: tuple[PTMPartition, ...]


def _check_partition(net: ReactionNetwork, part: PTMPartition):
    part.check_disjoint()
    declared = part.species
    net.check_species(declared)
    missing = [s for s in net.species if s not in declared]
    if missing:
        raise NotAPartitionError(f"species {missing} are not assigned to a class")


def _enzyme_substrate(c: Complex, part: PTMPartition):
    """(substrate, enzyme) when ``c`` is ``S + E``, else None."""
    if len(c.terms) != 2 or any(k != 1 for _, k in c.terms):
        return None
    names = set(c.species)
    sub, enz = names & part.substrates, names & part.enzymes
    if len(sub) == 1 and len(enz) == 1:
        return next(iter(sub)), next(iter(enz))
    return None


def _classify_reaction(r, part: PTMPartition) -> str | None:
    a_solo, b_solo = r.reactant.solo_species(), r.product.solo_species()
    a_pair, b_pair = _enzyme_substrate(r.reactant, part), _enzyme_substrate(r.product, part)
    if a_solo in part.substrates and b_solo in part.substrates:
        return "substrate"
    if a_pair and b_pair and a_pair[1] == b_pair[1]:
        return "substrate+enzyme"
    if a_pair and b_solo in part.intermediates:
        return "binding"
    if a_solo in part.intermediates and b_pair:
        return "release"
    if a_solo in part.intermediates and b_solo in part.intermediates:
        return "intermediate"
    return None


def validate_ptm(net: ReactionNetwork, part: PTMPartition) -> list[Violation]:
    """Empty list when ``part`` makes ``net`` a PTM system."""
    _check_partition(net, part)
    out = []
    for r in net.reactions:
        if _classify_reaction(r, part) is None:
            out.append(Violation("M1", f"{r} has none of the allowed shapes"))
    if part.intermediates:
        out.extend(Violation("M2", str(v)) for v in validate_intermediates(net, part.intermediates))
    out.extend(_enzyme_preservation(net, part))
    return out


def _enzyme_preservation(net: ReactionNetwork, part: PTMPartition) -> list[Violation]:
    succ: dict[Complex, list[Complex]] = {}
    for r in net.reactions:
        succ.setdefault(r.reactant, []).append(r.product)
    out = []
    for r in net.reactions:
        pair = _enzyme_substrate(r.reactant, part)
        if pair is None or r.product.solo_species() not in part.intermediates:
            continue
        enzyme = pair[1]
        seen = {r.product}
        queue = deque([r.product])
        while queue:
            c = queue.popleft()
            for d in succ.get(c, ()):
                if d.solo_species() in part.intermediates:
                    if d not in seen:
                        seen.add(d)
                        queue.append(d)
                    continue
                released = _enzyme_substrate(d, part)
                if released is not None and released[1] != enzyme:
                    out.append(Violation("M3", f"{enzyme} binds via {r} but {released[1]} is released at {d}"))
    return out


def underlying_substrate_network(net: ReactionNetwork, part: PTMPartition) -> ReactionNetwork:
    violations = validate_ptm(net, part)
    if violations:
        raise InvalidPTMError(violations)
    current = net
    if part.intermediates:
        current, _ = remove_intermediates(current, part.intermediates)
    enzymes = [e for e in current.species if e in part.enzymes]
    if enzymes:
        current, _ = remove_catalysts(current, enzymes)
    return current


@dataclass(frozen=True)
class PTMVerdict:
    verdict: Verdict
    substrate_networks: tuple[ReactionNetwork, ...]
    table: tuple[tuple[str, bool], ...]

    @property
    def persistent(self) -> bool:
        return self.verdict is Verdict.PERSISTENT


def _equivalence_table(net: ReactionNetwork, weakly_reversible: bool) -> tuple[tuple[str, bool], ...]:
    siphons = minimal_siphons(net)
    return (
        ("substrate networks weakly reversible", weakly_reversible),
        ("consistent", positive_kernel(stoichiometric_matrix(net)) is not None),
        ("siphon/P-semiflow property", siphon_psemiflow_property(net, siphons).holds),
        ("no drainable siphons", drainable_siphon(net, siphons) is None),
    )


def ptm_persistence(net: ReactionNetwork, part: PTMPartition) -> PTMVerdict:
    """Persistent exactly when every linkage class of the substrate network
    is strongly connected."""
    sub = underlying_substrate_network(net, part)
    wr = components_strongly_connected(sub)
    return PTMVerdict(
        Verdict.PERSISTENT if wr else Verdict.NOT_PERSISTENT,
        (sub,),
        _equivalence_table(net, wr),
    )


def layer_network(net: ReactionNetwork, part: PTMPartition) -> ReactionNetwork:
    return implied_subnetwork(net, part.species)


def validate_cascade(net: ReactionNetwork, spec: CascadeSpec) -> list[Violation]:
    if not spec.layers:
        return [Violation("F1", "a cascade needs at least one layer")]
    out = []
    covered = set()
    for k, part in enumerate(spec.layers, 1):
        part.check_disjoint()
        net.check_species(part.species)
        layer = layer_network(net, part)
        covered.update(layer.reactions)
        absent = sorted(part.species - set(layer.species))
        if absent:
            out.append(Violation("F1", f"layer {k}: {absent} take part in no reaction of the layer"))
            continue
        out.extend(Violation("F1", f"layer {k}: {v}") for v in validate_ptm(layer, part))
    for r in net.reactions:
        if r not in covered:
            out.append(Violation("F1", f"{r} belongs to no layer"))
    all_enz_sub = set()
    for part in spec.layers:
        all_enz_sub |= part.enzymes | part.substrates
    for j, part in enumerate(spec.layers):
        earlier_sub = set().union(*(p.substrates for p in spec.layers[:j]))
        if part.substrates & earlier_sub:
            out.append(Violation("F2", f"layer {j + 1} reuses substrates {sorted(part.substrates & earlier_sub)}"))
        upto_sub = earlier_sub | part.substrates
        if part.enzymes & upto_sub:
            out.append(Violation("F3", f"layer {j + 1} enzymes {sorted(part.enzymes & upto_sub)} are substrates at or before it"))
        if part.intermediates & all_enz_sub:
            out.append(Violation("F4", f"layer {j + 1} intermediates {sorted(part.intermediates & all_enz_sub)} are enzymes or substrates"))
    return out


def _require_cascade(net, spec):
    violations = validate_cascade(net, spec)
    if any(v.rule in ("F2", "F3", "F4") for v in violations):
        raise LayerOverlapError("; ".join(str(v) for v in violations))
    if violations:
        raise InvalidPTMError(violations)


def cascade_persistence(net: ReactionNetwork, spec: CascadeSpec) -> PTMVerdict:
    """Persistent exactly when every layer's substrate network is weakly
    reversible."""
    _require_cascade(net, spec)
    subs = tuple(underlying_substrate_network(layer_network(net, p), p) for p in spec.layers)
    wr = all(components_strongly_connected(s) for s in subs)
    return PTMVerdict(
        Verdict.PERSISTENT if wr else Verdict.NOT_PERSISTENT,
        subs,
        _equivalence_table(net, wr),
    )


def cascade_conservation_law(net: ReactionNetwork, spec: CascadeSpec) -> tuple[Fraction, ...]:
    """Weight one on enzymes and substrates, two on intermediates."""
    _require_cascade(net, spec)
    weight = {}
    for part in spec.layers:
        weight.update((s, Fraction(1)) for s in part.enzymes | part.substrates)
        weight.update((s, Fraction(2)) for s in part.intermediates)
    omega = tuple(weight[s] for s in net.species)
    if any(stoichiometric_matrix(net).left_apply(omega)):
        raise NotAConservationLawError("the layer weights do not give a conservation law")
    return omega


def peel_top_layer(net: ReactionNetwork, spec: CascadeSpec) -> tuple[ReactionNetwork, CascadeSpec]:
    """Drop the last layer and strip its enzymes from the remaining ones.

    Intermediates are removed first.  The result is a cascade with one
    layer fewer whose layers have the same substrate networks as before.
    """
    _require_cascade(net, spec)
    inter = frozenset().union(*(p.intermediates for p in spec.layers))
    current = remove_intermediates(net, inter)[0] if inter else net
    layers = [
        PTMPartition(p.enzymes & set(current.species), p.substrates & set(current.species))
        for p in spec.layers
    ]
    top, rest = layers[-1], layers[:-1]
    lower = ReactionNetwork(
        dict.fromkeys(r for p in rest for r in layer_network(current, p).reactions)
    )
    shared = top.enzymes & frozenset().union(*(p.enzymes for p in rest))
    if shared:
        lower, _ = remove_catalysts(lower, shared)
    new_layers = tuple(
        PTMPartition(frozenset(e for e in p.enzymes - top.enzymes if lower.has_species(e)), p.substrates)
        for p in rest
    )
    return lower, CascadeSpec(new_layers)
