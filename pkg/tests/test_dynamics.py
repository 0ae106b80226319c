import math
import random

import pytest

from crnpersist.dynamics import (
    MassActionSystem,
    integrate,
    steady_state_residual,
    zero_set_siphon_check,
)
from crnpersist.errors import NonFiniteStateError, StepUnderflowError
from crnpersist.feasibility import positive_left_kernel
from crnpersist.fileformat import load_example, parse_network
from crnpersist.network import stoichiometric_matrix

LV = load_example("lotka_volterra")
PHOS = load_example("phosphorylation")


def test_system_validation():
    net = parse_network("A -> B")
    with pytest.raises(ValueError):
        MassActionSystem(net, (1,), (1.0,))
    with pytest.raises(ValueError):
        MassActionSystem(net, (0,), (1.0, 0.0))
    with pytest.raises(ValueError):
        MassActionSystem(net, (1,), (-1.0, 0.0))
    with pytest.raises(ValueError):
        integrate(MassActionSystem.uniform(net, [1, 0]), 0)


def test_mass_action_rates():
    net = parse_network("2 A + B -> C")
    sys_ = MassActionSystem.uniform(net, [0, 0, 0], rate=3)
    assert sys_.reaction_rates([2.0, 5.0, 0.0]) == [60.0]
    assert sys_.vector_field([2.0, 5.0, 0.0]) == [-120.0, -60.0, 60.0]


def test_rates_vanish_exactly_on_reactant_zeros():
    sys_ = MassActionSystem.from_document(LV)
    rates = sys_.reaction_rates([0.0, 1.0])
    assert rates[0] == 0 and rates[1] == 0 and rates[2] == 0 and rates[3] > 0


def test_from_document_reads_annotations():
    sys_ = MassActionSystem.from_document(PHOS)
    assert dict(zip(PHOS.network.species, sys_.initial))["S1"] == 0.5


def test_lotka_volterra_cycles():
    record = integrate(MassActionSystem.from_document(LV), 50.0)
    assert min(record.minima) > 0.05
    start = record.states[0]
    later = [s for t, s in zip(record.times, record.states) if t > 1.0]
    assert min(math.dist(s, start) for s in later) < 1e-2


def test_zero_state_stays_zero_without_inflow():
    sys_ = MassActionSystem.uniform(PHOS.network, [0] * 6)
    record = integrate(sys_, 5.0, dt=0.1)
    assert record.final == (0.0,) * 6 and record.residual == 0


def test_zero_state_leaves_with_inflow():
    sys_ = MassActionSystem.uniform(parse_network("0 -> A"), [0])
    assert integrate(sys_, 1.0).final[0] == pytest.approx(1.0)


def test_phosphorylation_minima_stay_positive():
    rng = random.Random(0)
    rates = tuple(rng.randint(1, 5) for _ in range(PHOS.network.n_reactions))
    initial = tuple(rng.uniform(0.5, 2) for _ in range(PHOS.network.n_species))
    record = integrate(MassActionSystem(PHOS.network, rates, initial), 20.0, dt=0.01, record_every=10)
    assert min(record.minima) > 0


def test_conservation_drift():
    net = PHOS.network
    omega = [float(x) for x in positive_left_kernel(stoichiometric_matrix(net)).vector]
    record = integrate(MassActionSystem.from_document(PHOS), 100.0, record_every=50)
    totals = [sum(w * x for w, x in zip(omega, s)) for s in record.states]
    assert max(abs(t - totals[0]) for t in totals) / totals[0] < 1e-6


def test_nonnegativity_is_enforced():
    sys_ = MassActionSystem.uniform(parse_network("A -> 0"), [1.0], rate=500)
    record = integrate(sys_, 1.0, dt=0.1)
    assert all(x >= 0 for s in record.states for x in s)
    assert record.halvings > 0


def test_blow_up_reported():
    sys_ = MassActionSystem.uniform(parse_network("2 A -> 3 A"), [10.0])
    with pytest.raises(NonFiniteStateError):
        integrate(sys_, 10.0, dt=0.05)


def test_step_underflow():
    sys_ = MassActionSystem.uniform(parse_network("A -> 0"), [1.0], rate=10**9)
    with pytest.raises(StepUnderflowError):
        integrate(sys_, 1.0, dt=0.1, min_dt=1e-3)


def test_residuals():
    auto = MassActionSystem.uniform(parse_network("S -> 2 S"), [0])
    assert steady_state_residual(auto, [0.0]) == 0
    assert zero_set_siphon_check(auto, [0.0])
    lv = MassActionSystem.from_document(LV)
    assert steady_state_residual(lv, [1.0, 1.0]) == 0
    phos = MassActionSystem.uniform(PHOS.network, [1] * 6)
    assert steady_state_residual(phos, [0.3, 1.7, 0.2, 0.9, 1.1, 0.4]) > 0


def test_zero_set_check_flags_non_siphon():
    sys_ = MassActionSystem.uniform(parse_network("A -> B"), [0, 0])
    # {B} is not a siphon; the check only bites once the residual is within tolerance
    assert zero_set_siphon_check(sys_, [1.0, 0.0])
    assert not zero_set_siphon_check(sys_, [1.0, 0.0], tol=2.0)
    assert zero_set_siphon_check(sys_, [0.0, 1.0], tol=2.0)


def test_boundary_steady_states_found_numerically_have_siphon_zero_sets():
    for text, initial in (("A + B -> 2 B\nB -> 0", [1.0, 0.0]), ("S -> 2 S", [0.0]),
                          ("E + S0 <-> ES0 -> E + S1", [1.0, 1.0, 0.0, 0.0])):
        net = parse_network(text)
        sys_ = MassActionSystem.uniform(net, initial)
        record = integrate(sys_, 10.0)
        s = tuple(0.0 if x < 1e-12 else x for x in record.final)
        if steady_state_residual(sys_, s) < 1e-9:
            assert zero_set_siphon_check(sys_, s, tol=1e-9)
