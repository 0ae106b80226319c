"""JSON serialization of analysis reports, and replay of their witnesses.

Rationals are written as strings (``"3/2"``) so nothing is rounded.  Output
is deterministic: keys are sorted and every list follows the network's
species or reaction order.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .analysis import AnalysisReport
from .feasibility import Witness, WitnessKind
from .fileformat import parse_network
from .network import ReactionNetwork, stoichiometric_matrix, strongly_connected_components
from .siphons import is_siphon

SCHEMA_VERSION = 1


def _vec(v) -> list[str] | None:
    return None if v is None else [str(x) for x in v]


def _names(net: ReactionNetwork, names) -> list[str]:
    return sorted(names, key=net.index)


def _network_dict(net: ReactionNetwork, name: str | None) -> dict:
    return {
        "name": name,
        "species": list(net.species),
        "reactions": [str(r) for r in net.reactions],
        "complexes": [str(c) for c in net.complexes],
    }


def report_to_dict(report: AnalysisReport, name: str | None = None) -> dict:
    net = report.network
    final = report.final_network
    siphons = []
    for c in report.siphons:
        siphons.append({
            "species": _names(net, c.siphon),
            "critical": c.critical,
            "drainable": _vec(c.drainable.vector) if c.drainable else None,
            "self_replicable": _vec(c.self_replicable.vector) if c.self_replicable else None,
            "semiflow": _vec(c.semiflow.vector) if c.semiflow else None,
        })
    prop = report.siphon_property
    steps = []
    for step in report.reduction.steps:
        steps.append({
            "kind": step.kind.value,
            "removed": _names(step.before, step.removed),
            "reactions": [str(r) for r in step.after.reactions],
        })
    return {
        "schema": SCHEMA_VERSION,
        "network": _network_dict(net, name),
        "properties": {
            "conservative": report.conservative,
            "consistent": report.consistent,
            "siphon_psemiflow": report.siphon_psemiflow,
            "drainable_free": report.drainable_free,
            "self_replicable_free": report.self_replicable_free,
        },
        "witnesses": {
            "conservation_law": _vec(report.conservation_law.vector) if report.conservation_law else None,
            "t_semiflow": _vec(report.t_semiflow.vector) if report.t_semiflow else None,
            "minimal_siphons": siphons,
            "violating_siphon": _names(net, prop.violating_siphon) if prop.violating_siphon else None,
        },
        "reduction_trace": {
            "steps": steps,
            "final": {
                "reactions": [str(r) for r in final.reactions],
                "monomolecular": report.final_monomolecular,
                "weakly_reversible": report.final_weakly_reversible,
                "strongly_connected_components": [
                    [str(c) for c in comp] for comp in strongly_connected_components(final)
                ],
            },
        },
        "verdicts": [
            {"verdict": e.verdict.value, "rule": e.rule, "premises": list(e.premises)}
            for e in report.verdicts
        ],
        "assumptions": list(report.assumptions),
    }


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def report_to_json(report: AnalysisReport, name: str | None = None) -> str:
    return dumps(report_to_dict(report, name))


def network_from_dict(data: dict) -> ReactionNetwork:
    return parse_network("\n".join(data["network"]["reactions"]))


def replay_report(data: dict) -> list[str]:
    """Re-check every witness of a serialized report against the network
    rebuilt from its reaction list.  Returns a list of failures (empty when
    everything replays)."""
    net = network_from_dict(data)
    N = stoichiometric_matrix(net)
    failures = []

    def check(label, kind, vector, support=()):
        w = Witness(kind, tuple(Fraction(x) for x in vector), tuple(support))
        if not w.verify(N):
            failures.append(label)

    wit = data["witnesses"]
    props = data["properties"]
    if (wit["conservation_law"] is not None) != props["conservative"]:
        failures.append("conservative flag without matching witness")
    if (wit["t_semiflow"] is not None) != props["consistent"]:
        failures.append("consistent flag without matching witness")
    if wit["conservation_law"] is not None:
        check("conservation_law", WitnessKind.P_SEMIFLOW, wit["conservation_law"])
    if wit["t_semiflow"] is not None:
        check("t_semiflow", WitnessKind.T_SEMIFLOW, wit["t_semiflow"])
    for entry in wit["minimal_siphons"]:
        sigma = entry["species"]
        label = "{" + ", ".join(sigma) + "}"
        if not is_siphon(net, sigma):
            failures.append(f"{label} is not a siphon")
        for key, kind in (("drainable", WitnessKind.DRAIN), ("self_replicable", WitnessKind.REPLICATE),
                          ("semiflow", WitnessKind.SUPPORTED_SEMIFLOW)):
            if entry[key] is not None:
                check(f"{key} witness of {label}", kind, entry[key], sorted(net.index(x) for x in sigma))
    return failures

