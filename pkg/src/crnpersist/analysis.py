"""Persistence verdicts from structural certificates.

``analyze`` gathers every certificate the package can compute for a
network (conservation law, positive flux, minimal siphons and their
classification, the primitive reduction) and runs a small rule engine over
them.  Each emitted verdict names the rule that produced it and the facts
it relied on.  When no rule applies the answer is ``INCONCLUSIVE``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

from .feasibility import Witness, positive_kernel, positive_left_kernel
from .network import (
    ReactionNetwork,
    components_strongly_connected,
    is_monomolecular,
    stoichiometric_matrix,
    strongly_connected_components,
)
from .reduction import ReductionTrace, primitive_reduction
from .siphons import (
    SiphonClassification,
    SiphonPropertyVerdict,
    classify_siphon,
    drainable_siphon,
    minimal_siphons,
    self_replicable_siphon,
    siphon_psemiflow_property,
)

logger = logging.getLogger(__name__)


class Verdict(enum.Enum):
    PERSISTENT = "persistent"
    BOUNDED_PERSISTENT = "bounded-persistent"
    NO_BOUNDARY_STEADY_STATES = "no-boundary-steady-states"
    NOT_PERSISTENT = "not-persistent"
    INCONCLUSIVE = "inconclusive"


class BoundaryVerdict(enum.Enum):
    PRECLUDED = "precluded"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class VerdictEntry:
    verdict: Verdict
    rule: str
    premises: tuple[str, ...]


@dataclass(frozen=True)
class AnalysisReport:
    network: ReactionNetwork
    conservation_law: Witness | None
    t_semiflow: Witness | None
    siphons: tuple[SiphonClassification, ...]
    siphon_property: SiphonPropertyVerdict
    drainable_free: bool
    self_replicable_free: bool
    reduction: ReductionTrace
    final_monomolecular: bool
    final_weakly_reversible: bool
    verdicts: tuple[VerdictEntry, ...]
    assumptions: tuple[str, ...] = ()

    @property
    def conservative(self) -> bool:
        return self.conservation_law is not None

    @property
    def consistent(self) -> bool:
        return self.t_semiflow is not None

    @property
    def siphon_psemiflow(self) -> bool:
        return self.siphon_property.holds

    @property
    def final_network(self) -> ReactionNetwork:
        return self.reduction.final

    @property
    def verdict_set(self) -> frozenset[Verdict]:
        return frozenset(e.verdict for e in self.verdicts)

    def __contains__(self, verdict: Verdict) -> bool:
        return verdict in self.verdict_set


def boundary_steady_state_verdict(net: ReactionNetwork) -> BoundaryVerdict:
    """Boundary steady states in positive compatibility classes are ruled
    out by the siphon/P-semiflow property; nothing weaker suffices."""
    if siphon_psemiflow_property(net).holds:
        return BoundaryVerdict.PRECLUDED
    return BoundaryVerdict.UNKNOWN


def analyze(net: ReactionNetwork, assume_dissipative: bool = False) -> AnalysisReport:
    N = stoichiometric_matrix(net)
    law = positive_left_kernel(N)
    flux = positive_kernel(N)
    siphons = minimal_siphons(net)
    classified = tuple(classify_siphon(net, s) for s in siphons)
    prop = siphon_psemiflow_property(net, siphons)
    drain = drainable_siphon(net, siphons)
    replicate = self_replicable_siphon(net, siphons)
    # both routes to the property must agree
    assert prop.holds == (drain is None and replicate is None), "siphon property routes disagree"
    final, trace = primitive_reduction(net)
    final_mono = is_monomolecular(final)
    final_wr = components_strongly_connected(final)

    entries: list[VerdictEntry] = []
    emitted: set[Verdict] = set()

    def emit(verdict, rule, *premises):
        entries.append(VerdictEntry(verdict, rule, premises))
        emitted.add(verdict)

    if prop.holds:
        emit(Verdict.NO_BOUNDARY_STEADY_STATES, "siphon-psemiflow-precludes-boundary-steady-states",
             "every minimal siphon carries a P-semiflow")
        emit(Verdict.BOUNDED_PERSISTENT, "siphon-psemiflow-implies-bounded-persistence",
             "every minimal siphon carries a P-semiflow")
    elif drain is None:
        emit(Verdict.BOUNDED_PERSISTENT, "no-drainable-siphon-implies-bounded-persistence",
             "no minimal siphon is drainable")
    if final_mono and final_wr:
        premise = f"primitive reduction after {len(trace)} steps is monomolecular and weakly reversible"
        emit(Verdict.NO_BOUNDARY_STEADY_STATES, "weakly-reversible-monomolecular-reduction", premise)
        emit(Verdict.BOUNDED_PERSISTENT, "weakly-reversible-monomolecular-reduction", premise)
    if law is not None and Verdict.BOUNDED_PERSISTENT in emitted:
        emit(Verdict.PERSISTENT, "conservative-and-bounded-persistent",
             "strictly positive conservation law", "bounded-persistent")
    if law is not None and flux is None:
        emit(Verdict.NOT_PERSISTENT, "conservative-but-not-consistent",
             "strictly positive conservation law", "no strictly positive flux")
    if law is not None and is_monomolecular(net):
        if components_strongly_connected(net):
            if Verdict.BOUNDED_PERSISTENT not in emitted:
                emit(Verdict.BOUNDED_PERSISTENT, "conservative-monomolecular-weakly-reversible",
                     "strictly positive conservation law", "monomolecular", "weakly reversible")
            emit(Verdict.PERSISTENT, "conservative-monomolecular-weakly-reversible",
                 "strictly positive conservation law", "monomolecular", "weakly reversible")
        else:
            emit(Verdict.NOT_PERSISTENT, "conservative-monomolecular-not-weakly-reversible",
                 "strictly positive conservation law", "monomolecular", "not weakly reversible")
    assumptions = ()
    if assume_dissipative:
        assumptions = ("dissipative",)
        if Verdict.BOUNDED_PERSISTENT in emitted and Verdict.PERSISTENT not in emitted:
            emit(Verdict.PERSISTENT, "dissipative-and-bounded-persistent",
                 "assumed dissipative", "bounded-persistent")
    if not entries:
        emit(Verdict.INCONCLUSIVE, "no-rule-applies")
    if Verdict.PERSISTENT in emitted and Verdict.NOT_PERSISTENT in emitted:
        raise AssertionError("contradictory persistence verdicts")

    logger.debug("verdicts: %s", sorted(v.value for v in emitted))
    return AnalysisReport(
        network=net,
        conservation_law=law,
        t_semiflow=flux,
        siphons=classified,
        siphon_property=prop,
        drainable_free=drain is None,
        self_replicable_free=replicate is None,
        reduction=trace,
        final_monomolecular=final_mono,
        final_weakly_reversible=final_wr,
        verdicts=tuple(entries),
        assumptions=assumptions,
    )


def scc_summary(net: ReactionNetwork) -> list[list[str]]:
    """Strongly connected components as lists of complex strings."""
    return [[str(c) for c in comp] for comp in strongly_connected_components(net)]
