"""Tests for classical Hamiltonian maps."""

import numpy as np
import pytest

from gruebleen_lab.hamiltonian_flows import (
    DrivingHamiltonian,
    IntegrationError,
    PhasePoint,
    catalog,
    compose_hamiltonians,
    flow,
    flow_jacobian_determinant,
    gradient_consistency,
    integrate,
    reverse_hamiltonian,
    steering_hamiltonian,
)


def point(q, p):
    return PhasePoint(np.atleast_1d(q), np.atleast_1d(p))


def test_phase_point_validation():
    """Phase points need matching finite q and p."""
    with pytest.raises(ValueError):
        PhasePoint(np.zeros(2), np.zeros(3))
    with pytest.raises(ValueError):
        PhasePoint([np.inf], [0.0])
    z = point([1.0, 2.0], [3.0, 4.0])
    assert z.n == 2
    assert PhasePoint.from_vector(z.as_vector()).distance(z) == 0.0


def test_simple_flows():
    """ZERO, FREE, KICK and DRIVEN have closed-form flows."""
    z0 = point(0.5, -0.25)
    assert integrate(catalog("ZERO"), z0, 1.0, 100).distance(z0) == 0.0
    assert integrate(catalog("FREE"), z0, 2.0, 100).distance(point(2.5, -0.25)) < 1e-12
    assert integrate(catalog("KICK"), z0, 2.0, 100).distance(point(0.5, 1.75)) < 1e-12
    assert integrate(catalog("DRIVEN"), z0, 2.0, 100).distance(point(2.5, -0.25)) < 1e-12


def test_harmonic_quarter_turn():
    """A quarter period of the oscillator rotates (1, 0) to (0, -1)."""
    z = integrate(catalog("harmonic"), point(1.0, 0.0), np.pi / 2, 1000)
    assert z.distance(point(0.0, -1.0)) < 1e-10


def test_flow_is_a_callable_map():
    """Test that flow() returns a named map on phase points."""
    f = flow(catalog("FREE", n=2), 1.0, 10)
    assert f.__name__ == "flow[FREE]"
    assert f(point([0.0, 1.0], [0.0, 0.0])).distance(point([1.0, 2.0], [0.0, 0.0])) < 1e-12


@pytest.mark.parametrize("first,second", [("FREE", "KICK"), ("HARMONIC", "DRIVEN"), ("DRIVEN", "HARMONIC")])
def test_composed_hamiltonian_matches_sequential_flows(first, second):
    """H1 then H2 on [0, 2 tau] equals flowing H1 for tau and then H2 for tau."""
    tau = 1.0
    H1, H2 = catalog(first), catalog(second)
    z0 = point(0.3, -0.7)
    sequential = integrate(H2, integrate(H1, z0, tau), tau)
    composed = integrate(compose_hamiltonians(H1, H2, tau), z0, tau)
    assert composed.distance(sequential) < 1e-8


def test_composed_hamiltonian_jump_is_not_straddled():
    """Test that RK4 stages never read across the switch at tau."""
    # constant vector fields on each half are integrated exactly by a single RK4 step
    H = compose_hamiltonians(catalog("FREE"), catalog("KICK"), 1.0)
    assert H.breakpoints == (0.5,)
    assert integrate(H, point(0.0, 0.0), 1.0, steps=2).distance(point(1.0, 1.0)) < 1e-12


def test_reverse_undoes_flow():
    """Flowing the reversed Hamiltonian brings the point back."""
    tau = 1.5
    H = compose_hamiltonians(catalog("HARMONIC"), catalog("DRIVEN"), tau)
    z0 = point(0.2, 0.9)
    there = integrate(H, z0, tau)
    back = integrate(reverse_hamiltonian(H, tau), there, tau)
    assert back.distance(z0) < 1e-8
    assert reverse_hamiltonian(H, tau).breakpoints == (0.75,)


def test_steering_reaches_target():
    """The steering Hamiltonian carries z0 exactly onto z1."""
    z0, z1 = point([0.0, 1.0], [2.0, -1.0]), point([3.0, -2.0], [0.5, 0.5])
    H = catalog("STEER", z0=z0, z1=z1, tau=2.0)
    assert integrate(H, z0, 2.0, 50).distance(z1) < 1e-12


def test_steering_errors():
    """Test steering argument validation."""
    with pytest.raises(ValueError):
        steering_hamiltonian(point(0.0, 0.0), point(1.0, 1.0), 0.0)
    with pytest.raises(ValueError):
        steering_hamiltonian(point(0.0, 0.0), point([1.0, 2.0], [0.0, 0.0]), 1.0)
    with pytest.raises(ValueError):
        catalog("STEER", z0=point(0.0, 0.0))


def test_integrate_errors():
    """Test integration argument validation."""
    with pytest.raises(ValueError):
        integrate(catalog("FREE"), point(0.0, 0.0), 1.0, steps=0)
    with pytest.raises(ValueError):
        integrate(catalog("FREE"), point(0.0, 0.0), 0.0)
    with pytest.raises(ValueError):
        catalog("SPRING")


def test_blow_up_is_reported():
    """A state that stops being finite raises IntegrationError."""
    H = DrivingHamiltonian(
        "runaway",
        lambda q, p, t: 1e200 * float(q @ p),
        lambda q, p, t: (1e200 * p, 1e200 * q),
    )
    with pytest.raises(IntegrationError):
        integrate(H, point(1.0, 1.0), 1.0, steps=10)


def test_finite_difference_gradient_fallback():
    """Without an analytic gradient, central differences drive the flow."""
    H = DrivingHamiltonian("kinetic", lambda q, p, t: 0.5 * float(p @ p))
    z = integrate(H, point(0.0, 2.0), 1.0, 100)
    assert z.distance(point(2.0, 2.0)) < 1e-6


def test_flows_preserve_phase_volume():
    """Hamiltonian flows have unit Jacobian determinant."""
    H = compose_hamiltonians(catalog("HARMONIC"), catalog("DRIVEN"), 1.0)
    assert flow_jacobian_determinant(H, point(0.4, -0.1), 1.0) == pytest.approx(1.0, abs=1e-6)


def test_catalog_gradients_are_consistent():
    """Analytic gradients agree with finite differences."""
    probes = [(point(0.3, -0.2), 0.1), (point(-1.0, 2.0), 0.8)]
    for key in ("ZERO", "FREE", "HARMONIC", "KICK", "DRIVEN"):
        assert gradient_consistency(catalog(key), probes) < 1e-6


def test_steering_translates_every_point_rigidly():
    """Two start points keep their difference under the steering flow."""
    rng = np.random.default_rng(5)
    z0 = PhasePoint(rng.normal(size=3), rng.normal(size=3))
    z1 = PhasePoint(rng.normal(size=3), rng.normal(size=3))
    H = steering_hamiltonian(z0, z1, 1.0)
    other = PhasePoint(rng.normal(size=3), rng.normal(size=3))
    before = other.as_vector() - z0.as_vector()
    after = integrate(H, other, 1.0).as_vector() - integrate(H, z0, 1.0).as_vector()
    assert np.max(np.abs(after - before)) < 1e-8


def test_oscillator_returns_after_one_period():
    """Test the oscillator's return after 2 pi at 10^4 steps."""
    z0 = point(0.3, -0.2)
    assert integrate(catalog("HARMONIC"), z0, 2 * np.pi, 10_000).distance(z0) < 1e-8


def test_rk4_error_shrinks_about_sixteenfold():
    """Halving the step of a fourth-order method divides the error by about 2^4."""
    z0 = point(0.3, -0.2)
    H = catalog("HARMONIC")
    coarse = integrate(H, z0, 2 * np.pi, 100).distance(z0)
    fine = integrate(H, z0, 2 * np.pi, 200).distance(z0)
    assert 8 <= coarse / fine <= 32
