import random
import warnings
from fractions import Fraction

import pytest

from crnpersist.errors import (
    CatalystSubnetworkNotConservativeError,
    InvalidCatalystsError,
    InvalidIntermediatesError,
    NotAConservationLawError,
    NotASiphonError,
    NotATSemiflowError,
    ZeroComplexObstruction,
)
from crnpersist.feasibility import positive_kernel, positive_left_kernel
from crnpersist.fileformat import load_example, parse_network
from crnpersist.network import stoichiometric_matrix
from crnpersist.reduction import (
    StepKind,
    conservation_dimension,
    detect_catalysts,
    detect_intermediates,
    intermediate_candidates,
    lift_conservation_law,
    lift_siphon,
    lift_t_semiflow,
    primitive_reduction,
    project_siphon,
    remove_catalysts,
    remove_intermediates,
    validate_catalysts,
    validate_intermediates,
)
from crnpersist.siphons import is_siphon, minimal_siphons
from oracles import enrich, random_network

UBI = load_example("ubiquitination").network
PHOS = load_example("phosphorylation").network
INFLOW = load_example("catalyst_inflow").network
UBI_REDUCED = parse_network("B + R <-> B + R_ub^a\nR_ub^a -> R")
MD_16 = parse_network("X1 -> X1 + P1\nX2 -> X2 + P2\nP1 -> 0\nP2 -> 0")
UBI_Y = {"B_ub^d", "H", "R_ub", "R_ub^d", "Z", "Z_ub"}


# ------------------------------------------------------------ intermediates


def test_ubiquitination_intermediate_sets_valid():
    assert validate_intermediates(UBI, UBI_Y) == []
    assert validate_intermediates(UBI, UBI_Y - {"H"} | {"H_ub"}) == []


def test_intermediate_inside_larger_complex_is_rejected():
    violations = validate_intermediates(PHOS, {"S0"})
    assert violations and violations[0].rule == "I1"
    with pytest.raises(InvalidIntermediatesError):
        remove_intermediates(PHOS, {"S0"})


def test_path_condition_violation():
    violations = validate_intermediates(parse_network("R <-> R_ub^a"), {"R", "R_ub^a"})
    assert {v.rule for v in violations} == {"I2"}


def test_detect_ubiquitination_keeps_larger_ordinal_of_pair():
    found = detect_intermediates(UBI)
    assert found == {"B_ub^d", "H_ub", "R_ub", "R_ub^d", "Z", "Z_ub"}
    assert validate_intermediates(UBI, found) == []


def test_detect_declines():
    assert detect_intermediates(parse_network("R <-> R_ub^a")) is None
    assert detect_intermediates(parse_network("A + B -> 2 C\n2 C -> A + B")) is None
    assert intermediate_candidates(parse_network("A + B -> 2 C")) == frozenset()


def test_detect_skips_species_only_exchanged_with_nothing():
    net = parse_network("0 -> P1\nP1 -> 0\nX + P1 <-> XP")
    assert detect_intermediates(net) == {"XP"}


def test_detect_keeps_member_that_fails_only_through_a_dead_end():
    # Y1 exits only into X0, which is a candidate with no way out
    net = parse_network("X1 + 2 X2 -> Y1\nY1 -> X0\n0 -> X2\nX2 + X1 -> 2 X1")
    assert detect_intermediates(net) == {"Y1"}


def test_remove_ubiquitination():
    after, step = remove_intermediates(UBI, UBI_Y)
    assert after == UBI_REDUCED
    assert step.kind is StepKind.INTERMEDIATES
    assert set(step.removed) == UBI_Y
    assert remove_intermediates(UBI, UBI_Y - {"H"} | {"H_ub"})[0] == UBI_REDUCED


def test_remove_phosphorylation_complexes():
    after, step = remove_intermediates(PHOS, {"ES0", "FS1"})
    assert after == parse_network("E + S0 -> E + S1\nF + S1 -> F + S0")
    assert step.vanished == ()


def test_remove_single_chain():
    after, _ = remove_intermediates(parse_network("A -> Y\nY -> B"), {"Y"})
    assert after == parse_network("A -> B")


def test_one_at_a_time_matches_whole_set():
    rng = random.Random(17)
    for net in (UBI, PHOS, load_example("wnt").network):
        found = detect_intermediates(net)
        whole = remove_intermediates(net, found)[0]
        for _ in range(5):
            order = sorted(found)
            rng.shuffle(order)
            current = net
            for y in order:
                current = remove_intermediates(current, {y})[0]
            assert current == whole


def test_intermediate_choice_is_not_unique():
    """Either member of a linked pair can serve; both reduce to the same network."""
    net = parse_network("A + B -> H\nH <-> H2\nH2 -> C")
    assert validate_intermediates(net, {"H"}) == []
    assert validate_intermediates(net, {"H2"}) == []
    one = remove_intermediates(net, {"H"})[0]
    two = remove_intermediates(net, {"H2"})[0]
    assert one != two
    assert remove_intermediates(one, {"H2"})[0] == remove_intermediates(two, {"H"})[0]


def test_stopping_rule_can_depend_on_order():
    # removing Y0 first leaves 0 -> X1; removing the catalysts first leaves a
    # monomolecular network, which the detector no longer touches
    net = parse_network("2 X0 + E0 -> 2 X0 + X3 + E0\n0 -> Y0\nY0 -> X1\n0 -> E0")
    assert detect_intermediates(net) == {"Y0"}
    assert primitive_reduction(net)[0] == parse_network("0 -> X3\n0 -> X1")
    without_catalysts = remove_catalysts(net, detect_catalysts(net))[0]
    assert primitive_reduction(without_catalysts)[0] == parse_network("0 -> X3\n0 -> Y0\nY0 -> X1")


def test_detect_catalysts_drops_self_replicating_part():
    net = parse_network("X1 -> X3 + 2 X1\nE0 <-> E1\n2 E0 -> X3 + 2 E0\nX1 + E1 -> 2 X3 + X1 + E1\nX2 -> 2 X2\n2 X3 + X2 -> X2")
    assert detect_catalysts(net) == {"E0", "E1"}
    assert validate_catalysts(net, {"E0", "E1"}) == []


# ---------------------------------------------------------------- catalysts


def test_validate_catalysts():
    assert validate_catalysts(UBI_REDUCED, {"B"}) == []
    violations = validate_catalysts(UBI, {"B"})
    assert violations and all(v.rule == "C1" for v in violations)
    assert validate_catalysts(INFLOW, {"E"}) == []
    with pytest.raises(InvalidCatalystsError):
        remove_catalysts(UBI, {"B"})


def test_catalyst_subnetwork_with_drainable_siphon_is_rejected():
    net = parse_network("A + E -> B + E\nE -> 0")
    assert [v.rule for v in validate_catalysts(net, {"E"})] == ["C2"]


def test_detect_catalysts():
    assert detect_catalysts(UBI_REDUCED) == {"B"}
    assert detect_catalysts(MD_16) == {"X1", "X2"}
    assert detect_catalysts(parse_network("A <-> B")) is None


def test_remove_catalysts():
    assert remove_catalysts(UBI_REDUCED, {"B"})[0] == parse_network("R <-> R_ub^a")
    assert remove_catalysts(MD_16, {"X1", "X2"})[0] == parse_network("P1 <-> 0 <-> P2")
    after, step = remove_catalysts(INFLOW, {"E"})
    assert after == parse_network("A <-> B")
    assert step.catalyst_species == ("E",)


def test_parallel_sources_recorded():
    net = parse_network("A + E -> B + E\nA + F -> B + F\nB -> A")
    after, step = remove_catalysts(net, {"E", "F"})
    assert after == parse_network("A <-> B")
    j = after.reactions.index(parse_network("A -> B").reactions[0])
    assert len(step.sources[j]) == 2


# ------------------------------------------------------------------- driver


@pytest.mark.parametrize("name,final", [
    ("ubiquitination", "R <-> R_ub^a"),
    ("wnt", "0 <-> X <-> X_n -> 0"),
    ("monomer_dimer", "P1 <-> 0 <-> P2"),
])
def test_primitive_reduction_fixtures(name, final):
    reduced, trace = primitive_reduction(load_example(name).network)
    assert reduced == parse_network(final)
    assert trace.final == reduced


def test_primitive_reduction_of_irreducible_network():
    net = parse_network("A <-> B")
    reduced, trace = primitive_reduction(net)
    assert reduced == net and len(trace) == 0


def test_intermediates_and_catalysts_commute():
    rng = random.Random(4)
    checked = 0
    for _ in range(300):
        net = enrich(rng, random_network(rng, 3, 4), 2, 2)
        ys, es = detect_intermediates(net), detect_catalysts(net)
        if not ys or not es or validate_catalysts(net, es):
            continue
        first_y = remove_intermediates(net, ys)[0]
        first_e = remove_catalysts(net, es)[0]
        es_after = [e for e in es if first_y.has_species(e)]
        ys_after = [y for y in ys if first_e.has_species(y)]
        if not es_after or not ys_after:
            continue
        if validate_catalysts(first_y, es_after) or validate_intermediates(first_e, ys_after):
            continue
        a = remove_catalysts(first_y, es_after)[0]
        b = remove_intermediates(first_e, ys_after)[0]
        assert a == b, net
        checked += 1
    assert checked >= 20


# ------------------------------------------------------------------ lifting


def test_lift_conservation_law_phosphorylation():
    _, step = remove_intermediates(PHOS, {"ES0", "FS1"})
    reduced_species = step.after.species
    assert reduced_species == ("E", "S0", "S1", "F")
    omega = lift_conservation_law(step, [1, 0, 0, 1])
    assert dict(zip(PHOS.species, omega)) == {"E": 1, "S0": 0, "ES0": 1, "S1": 0, "F": 1, "FS1": 1}
    assert not any(stoichiometric_matrix(PHOS).left_apply(omega))
    assert lift_conservation_law(step, [0, 0, 0, 0]) == (0,) * 6
    with pytest.raises(NotAConservationLawError):
        lift_conservation_law(step, [1, 0, 1, 0])
    with pytest.raises(ValueError):
        lift_conservation_law(step, [1, 1])


def test_lift_conservation_law_zero_complex_warns():
    net = parse_network("0 -> Y\nY -> 0\nA <-> B")
    after, step = remove_intermediates(net, {"Y"})
    assert after == parse_network("A <-> B")
    with pytest.warns(ZeroComplexObstruction):
        omega = lift_conservation_law(step, [1, 1])
    assert dict(zip(net.species, omega))["Y"] == 0


def test_lift_conservation_law_catalyst_step():
    _, step = remove_catalysts(MD_16, {"X1", "X2"})
    omega = lift_conservation_law(step, [0, 0], free=[3, 5])
    assert dict(zip(MD_16.species, omega))["X1"] == 3


def test_lift_t_semiflow_single_chain():
    net = parse_network("A -> Y\nY -> B\nB -> A")
    _, step = remove_intermediates(net, {"Y"})
    v = lift_t_semiflow(step, [1, 1])
    assert v == (1, 1, 1)


def test_lift_t_semiflow_parallel_sources():
    net = parse_network("A + E -> B + E\nA + F -> B + F\nB -> A")
    after, step = remove_catalysts(net, {"E", "F"})
    v_star = [Fraction(2)] * after.n_reactions
    v = lift_t_semiflow(step, v_star)
    flux = dict(zip(net.reactions, v))
    by_text = {str(r): x for r, x in flux.items()}
    assert by_text["A + E -> B + E"] == by_text["A + F -> B + F"] == 1
    assert by_text["B -> A"] == 2


def test_lift_t_semiflow_replays_on_fixtures():
    for net, ys in ((PHOS, {"ES0", "FS1"}), (UBI, UBI_Y)):
        _, step = remove_intermediates(net, ys)
        v_star = positive_kernel(stoichiometric_matrix(step.after))
        v = lift_t_semiflow(step, v_star.vector)
        assert all(x > 0 for x in v)
        assert not any(stoichiometric_matrix(net).apply(v))


def test_lift_t_semiflow_catalyst_inflow_raises():
    after, step = remove_catalysts(INFLOW, {"E"})
    v_star = positive_kernel(stoichiometric_matrix(after))
    assert v_star is not None
    assert positive_kernel(stoichiometric_matrix(INFLOW)) is None
    with pytest.raises(CatalystSubnetworkNotConservativeError):
        lift_t_semiflow(step, v_star.vector)


def test_lift_t_semiflow_rejects_bad_input():
    _, step = remove_intermediates(parse_network("A -> Y\nY -> B\nB -> A"), {"Y"})
    with pytest.raises(NotATSemiflowError):
        lift_t_semiflow(step, [1, 2])
    with pytest.raises(NotATSemiflowError):
        lift_t_semiflow(step, [0, 0])


def test_lift_and_project_siphons():
    _, step = remove_intermediates(PHOS, {"ES0", "FS1"})
    assert lift_siphon(step, {"S0", "S1"}) == {"S0", "S1", "ES0", "FS1"}
    assert lift_siphon(step, {"E"}) == {"E", "ES0"}
    assert project_siphon(step, {"E", "ES0"}) == {"E"}
    with pytest.raises(NotASiphonError):
        lift_siphon(step, {"S0"})
    with pytest.raises(NotASiphonError):
        project_siphon(step, {"S0"})


def test_lift_siphon_untouched_by_intermediates():
    net = parse_network("A -> Y\nY -> B\nC <-> D")
    _, step = remove_intermediates(net, {"Y"})
    assert lift_siphon(step, {"C", "D"}) == {"C", "D"}


def test_lifted_siphons_of_random_networks():
    rng = random.Random(9)
    for _ in range(150):
        net = enrich(rng, random_network(rng, 3, 4), 2, 1)
        ys = detect_intermediates(net)
        if not ys:
            continue
        after, step = remove_intermediates(net, ys)
        for sigma in minimal_siphons(after):
            lifted = lift_siphon(step, sigma)
            assert is_siphon(net, lifted)
            assert lifted & set(after.species) == sigma


def test_lifted_certificates_replay_on_random_networks():
    rng = random.Random(12)
    for _ in range(200):
        net = enrich(rng, random_network(rng, 3, 4), 2, 2)
        for detect, remove in ((detect_intermediates, remove_intermediates), (detect_catalysts, remove_catalysts)):
            found = detect(net)
            if not found:
                continue
            after, step = remove(net, found)
            N_star = stoichiometric_matrix(after)
            w = positive_left_kernel(N_star)
            if w is not None:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", ZeroComplexObstruction)
                    omega = lift_conservation_law(step, w.vector)
                assert not any(stoichiometric_matrix(net).left_apply(omega))
            v = positive_kernel(N_star)
            if v is not None and after.n_reactions:
                try:
                    lifted = lift_t_semiflow(step, v.vector)
                except CatalystSubnetworkNotConservativeError:
                    assert step.kind is StepKind.CATALYSTS
                    continue
                assert all(x > 0 for x in lifted)
                assert not any(stoichiometric_matrix(net).apply(lifted))


# ---------------------------------------------------------------- dimension


def test_dimension_identity_on_corpus_steps():
    for name in ("ubiquitination", "wnt", "monomer_dimer", "phosphorylation"):
        _, trace = primitive_reduction(load_example(name).network)
        for step in trace:
            if step.kind is StepKind.INTERMEDIATES:
                assert conservation_dimension(step.before) == (
                    conservation_dimension(step.after) + len(step.vanished)
                )


def test_dimension_identity_random():
    rng = random.Random(31)
    seen = 0
    for _ in range(200):
        net = enrich(rng, random_network(rng, 3, 4), 2, 0)
        ys = detect_intermediates(net)
        if ys:
            _, step = remove_intermediates(net, ys)
            assert conservation_dimension(net) == conservation_dimension(step.after) + len(step.vanished)
            seen += 1
    assert seen > 50
