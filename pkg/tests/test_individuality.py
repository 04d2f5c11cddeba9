"""Mixture-versus-component behaviour of the consistency properties."""

import numpy as np
import pytest

from qhistories.errors import (
    BadParameters,
    DimensionMismatch,
    LambdaOutOfRange,
    PreconditionFailed,
)
from qhistories.individuality import (
    DEFAULT_LAMBDA_GRID,
    IndividualityWitness,
    condition_C_probe,
    individuality_violation_search,
    linear_positivity_property,
    medium_decoherence_property,
    mirror_component_decomposition,
    mixture,
    self_decoherence_property,
    weak_decoherence_property,
)
from qhistories.matcore import (
    DEFAULT_TOL,
    identity_projection,
    max_norm,
    validate_density,
)
from qhistories.sampling import pointer_model
from qhistories.scenarios import build_example1, build_example2

TOL = DEFAULT_TOL


def test_mixture_is_the_affine_combination():
    rho1 = validate_density(np.diag([1.0, 0.0]))
    rho2 = validate_density(np.diag([0.0, 1.0]))
    rho = mixture(rho1, rho2, 0.3, TOL)
    assert max_norm(rho.matrix - np.diag([0.3, 0.7])) <= 1e-15


def test_mixture_guards():
    rho1 = validate_density(np.diag([1.0, 0.0]))
    rho2 = validate_density(np.diag([0.0, 1.0]))
    for lam in (0.0, 1.0, -0.2, 1.3):
        with pytest.raises(LambdaOutOfRange):
            mixture(rho1, rho2, lam, TOL)
    rho3 = validate_density(np.eye(3) / 3.0)
    with pytest.raises(DimensionMismatch):
        mixture(rho1, rho3, 0.5, TOL)


def test_default_grid_is_the_nine_tenths():
    assert DEFAULT_LAMBDA_GRID == (0.1, 0.2, 0.3, 0.4, 0.5,
                                   0.6, 0.7, 0.8, 0.9)


def test_violation_requires_both_components_to_fail():
    w = IndividualityWitness("weak", 0.5, True, True, False)
    assert not w.is_violation
    w = IndividualityWitness("weak", 0.5, True, False, False)
    assert w.is_violation
    w = IndividualityWitness("weak", 0.5, False, False, False)
    assert not w.is_violation


def test_weak_witness_sits_at_the_equal_mixture():
    inst = build_example1(np.pi / 3)
    prop = weak_decoherence_property(inst.family, TOL)
    witnesses = individuality_violation_search(prop, inst.rho1, inst.rho2,
                                               DEFAULT_LAMBDA_GRID, TOL)
    assert len(witnesses) == 1
    w = witnesses[0]
    assert w.lam == 0.5
    assert w.holds_on_mixture
    assert not w.holds_on_rho1 and not w.holds_on_rho2


def test_medium_witness_sits_at_the_equal_mixture():
    inst = build_example1(np.pi / 3)
    prop = medium_decoherence_property(inst.family, TOL)
    witnesses = individuality_violation_search(prop, inst.rho1, inst.rho2,
                                               DEFAULT_LAMBDA_GRID, TOL)
    assert [w.lam for w in witnesses] == [0.5]


def test_linear_positivity_witness_in_the_upper_theta_range():
    """Both branches fail through different channels, the mixture passes."""
    inst = build_example1(2.0, np.pi)
    prop = linear_positivity_property(inst.family, TOL)
    witnesses = individuality_violation_search(prop, inst.rho1, inst.rho2,
                                               DEFAULT_LAMBDA_GRID, TOL)
    lams = [w.lam for w in witnesses]
    assert 0.5 in lams
    for w in witnesses:
        assert not w.holds_on_rho1 and not w.holds_on_rho2


def test_self_decoherence_yields_no_witness_on_pointer_models():
    rng = np.random.default_rng(23)
    for trial in range(10):
        spatial = int(rng.integers(2, 4))
        m = pointer_model(spatial, rng, TOL)
        prop = self_decoherence_property(m.family, TOL,
                                         provided=m.provided_mirrors)
        witnesses = individuality_violation_search(prop, m.rho1, m.rho2,
                                                   (0.3, 0.5, 0.7), TOL)
        assert witnesses == [], trial


def test_self_decoherence_property_reuses_candidates_across_states():
    m = build_example2()
    prop = self_decoherence_property(m.family, TOL)
    assert prop.holds(m.rho)
    assert prop.holds(m.rho1)
    assert prop.holds(m.rho2)


def test_component_decomposition_vanishes_on_pointer_models():
    rng = np.random.default_rng(29)
    for trial in range(25):
        m = pointer_model(int(rng.integers(2, 5)), rng, TOL)
        lam = float(rng.uniform(0.05, 0.95))
        report = mirror_component_decomposition(m.t, m.e1, m.rho1, m.rho2,
                                                lam, TOL)
        assert report.passed, trial
        assert report.nonnegative
        assert report.max_abs <= 1e-10


def test_component_decomposition_requires_the_mixture_identities():
    inst = build_example1(1.0)
    eye = identity_projection(inst.rho1.dim)
    with pytest.raises(PreconditionFailed):
        mirror_component_decomposition(eye, inst.e1, inst.rho1, inst.rho2,
                                       0.5, TOL)
    with pytest.raises(PreconditionFailed):
        mirror_component_decomposition(inst.e2, inst.e1, inst.rho1,
                                       inst.rho2, 0.5, TOL)


def test_condition_probe_finds_all_three_on_the_pointer_model():
    m = build_example2()
    ket0 = np.array([1.0, 0.0])
    ket1 = np.array([0.0, 1.0])
    b1 = np.kron(m.psi1, ket1)
    b2 = np.kron(m.psi2, ket0)
    probe = condition_C_probe(m.h1, b1, b2, TOL)
    assert probe.found_1 is not None and probe.found_1.verified
    assert probe.found_2 is not None and probe.found_2.verified
    assert probe.found_sum is not None and probe.found_sum.verified
    assert not probe.flagged


def test_condition_probe_on_branches_without_mirrors():
    """Here the superposition has a mirror while the branches have none;
    the flag looks for the opposite pattern, so it stays down."""
    inst = build_example1(np.pi / 3)
    probe = condition_C_probe(inst.h1, inst.psi1, inst.psi2, TOL)
    assert probe.found_1 is None
    assert probe.found_2 is None
    assert probe.found_sum is not None
    assert not probe.flagged


def test_condition_probe_rejects_degenerate_vectors():
    inst = build_example1(1.0)
    with pytest.raises(BadParameters):
        condition_C_probe(inst.h1, np.zeros(3), inst.psi2, TOL)
    with pytest.raises(BadParameters):
        condition_C_probe(inst.h1, inst.psi1, 2.0 * inst.psi1, TOL)
    with pytest.raises(BadParameters):
        condition_C_probe(inst.h1, inst.psi1, -inst.psi1, TOL)
