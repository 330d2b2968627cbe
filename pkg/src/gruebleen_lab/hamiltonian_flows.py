"""
Classical Hamiltonian maps on phase space.

A (possibly time-dependent) Hamiltonian H(q, p, t) on [0, tau] induces the map
z(0) -> z(tau) through Hamilton's equations, integrated here with fixed-step RK4.
Two such maps compose into a third by running each at double speed (the
composed Hamiltonian), any map is undone by -H(q, p, tau - t), and any point can
be steered to any other, so these maps act transitively.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_STEPS = 10_000
GRADIENT_STEP = 1e-6

Gradient = Tuple[np.ndarray, np.ndarray]


class IntegrationError(RuntimeError):
    """Raised when the integrated state stops being finite."""


@dataclass(frozen=True, eq=False)
class PhasePoint:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape or q.ndim != 1:
            raise ValueError(f"q and p must be vectors of equal length, got {q.shape} and {p.shape}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValueError("Phase point has non-finite entries")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_vector(cls, z: np.ndarray) -> "PhasePoint":
        n = z.shape[0] // 2
        return cls(z[:n], z[n:])

    def distance(self, other: "PhasePoint") -> float:
        return float(np.max(np.abs(self.as_vector() - other.as_vector())))

    def to_dict(self) -> Dict[str, Any]:
        return {"q": self.q.tolist(), "p": self.p.tolist()}


@dataclass(frozen=True, eq=False)
class DrivingHamiltonian:
    """
    H(q, p, t) with its gradient.

    When ``gradient`` is omitted it is estimated by central differences with
    step ``h``.  ``breakpoints`` are times where H may jump; integration never
    lets a step straddle one.
    """

    name: str
    evaluator: Callable[[np.ndarray, np.ndarray, float], float]
    gradient: Optional[Callable[[np.ndarray, np.ndarray, float], Gradient]] = None
    breakpoints: Tuple[float, ...] = ()
    h: float = GRADIENT_STEP
    _analytic: bool = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_analytic", self.gradient is not None)
        object.__setattr__(self, "breakpoints", tuple(sorted(self.breakpoints)))

    def __call__(self, q: np.ndarray, p: np.ndarray, t: float) -> float:
        return float(self.evaluator(q, p, t))

    def grad(self, q: np.ndarray, p: np.ndarray, t: float) -> Gradient:
        if self._analytic:
            dq, dp = self.gradient(q, p, t)
            return np.asarray(dq, dtype=float), np.asarray(dp, dtype=float)
        return self.finite_difference_grad(q, p, t)

    def finite_difference_grad(self, q: np.ndarray, p: np.ndarray, t: float) -> Gradient:
        h = self.h
        dq = np.zeros_like(q)
        dp = np.zeros_like(p)
        for i in range(q.shape[0]):
            e = np.zeros_like(q)
            e[i] = h
            dq[i] = (self.evaluator(q + e, p, t) - self.evaluator(q - e, p, t)) / (2 * h)
            dp[i] = (self.evaluator(q, p + e, t) - self.evaluator(q, p - e, t)) / (2 * h)
        return dq, dp


def _vector_field(H: DrivingHamiltonian, z: np.ndarray, t: float) -> np.ndarray:
    n = z.shape[0] // 2
    dq, dp = H.grad(z[:n], z[n:], t)
    return np.concatenate([dp, -dq])


def _rk4(H: DrivingHamiltonian, z: np.ndarray, t0: float, t1: float, steps: int) -> np.ndarray:
    dt = (t1 - t0) / steps
    # Stage times are kept strictly inside the piece so a Hamiltonian that
    # jumps at a breakpoint is always read from the side being integrated.
    lo, hi = np.nextafter(t0, t1), np.nextafter(t1, t0)

    def inside(t: float) -> float:
        return min(max(t, lo), hi)

    for i in range(steps):
        t = t0 + i * dt
        k1 = _vector_field(H, z, inside(t))
        k2 = _vector_field(H, z + 0.5 * dt * k1, inside(t + 0.5 * dt))
        k3 = _vector_field(H, z + 0.5 * dt * k2, inside(t + 0.5 * dt))
        k4 = _vector_field(H, z + dt * k3, inside(t + dt))
        z = z + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(z)):
            raise IntegrationError(f"State blew up at t={t + dt:.6g} while integrating '{H.name}'")
    return z


def integrate(H: DrivingHamiltonian, z0: PhasePoint, tau: float, steps: int = DEFAULT_STEPS) -> PhasePoint:
    """
    Integrate Hamilton's equations from t=0 to t=tau with RK4.

    The interval is split at H's breakpoints and the step budget shared between
    the pieces in proportion to their length.

    Raises:
        ValueError: If steps < 1 or tau <= 0
        IntegrationError: If the state becomes non-finite
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    cuts = [0.0] + [b for b in H.breakpoints if 0.0 < b < tau] + [tau]
    z = z0.as_vector()
    for a, b in zip(cuts, cuts[1:]):
        piece_steps = max(1, round(steps * (b - a) / tau))
        z = _rk4(H, z, a, b, piece_steps)
    return PhasePoint.from_vector(z)


def flow(H: DrivingHamiltonian, tau: float, steps: int = DEFAULT_STEPS) -> Callable[[PhasePoint], PhasePoint]:
    """The kinematic map induced by H over [0, tau]."""

    def apply(z0: PhasePoint) -> PhasePoint:
        return integrate(H, z0, tau, steps)

    apply.__name__ = f"flow[{H.name}]"
    return apply


def compose_hamiltonians(H1: DrivingHamiltonian, H2: DrivingHamiltonian, tau: float) -> DrivingHamiltonian:
    """
    Run H1 then H2, each at double speed, within one interval [0, tau].

    H21 = 2 H1(q, p, 2t) on [0, tau/2] and 2 H2(q, p, 2t - tau) on (tau/2, tau].
    """
    half = tau / 2

    def evaluator(q, p, t):
        if t <= half:
            return 2 * H1(q, p, 2 * t)
        return 2 * H2(q, p, 2 * t - tau)

    def gradient(q, p, t):
        if t <= half:
            dq, dp = H1.grad(q, p, 2 * t)
        else:
            dq, dp = H2.grad(q, p, 2 * t - tau)
        return 2 * dq, 2 * dp

    breakpoints = (
        tuple(b / 2 for b in H1.breakpoints)
        + (half,)
        + tuple(half + b / 2 for b in H2.breakpoints)
    )
    return DrivingHamiltonian(f"{H2.name}*{H1.name}", evaluator, gradient, breakpoints)


def reverse_hamiltonian(H: DrivingHamiltonian, tau: float) -> DrivingHamiltonian:
    """-H(q, p, tau - t), whose flow undoes H's."""

    def evaluator(q, p, t):
        return -H(q, p, tau - t)

    def gradient(q, p, t):
        dq, dp = H.grad(q, p, tau - t)
        return -dq, -dp

    return DrivingHamiltonian(
        f"reverse[{H.name}]", evaluator, gradient, tuple(tau - b for b in H.breakpoints)
    )


def steering_hamiltonian(z0: PhasePoint, z1: PhasePoint, tau: float) -> DrivingHamiltonian:
    """
    H = p.v - q.f, which drags every phase point along the straight line from
    z0 to z1 with constant velocity v = (q1 - q0)/tau and force f = (p1 - p0)/tau.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if z0.n != z1.n:
        raise ValueError(f"Endpoints live in different dimensions: {z0.n} vs {z1.n}")
    v = (z1.q - z0.q) / tau
    f = (z1.p - z0.p) / tau

    def evaluator(q, p, t):
        return float(np.dot(p, v) - np.dot(q, f))

    def gradient(q, p, t):
        return -f, v

    return DrivingHamiltonian("STEER", evaluator, gradient)


def catalog(key: str, n: int = 1, **params: Any) -> DrivingHamiltonian:
    """
    Built-in Hamiltonians by name.

    ZERO: 0.  FREE: sum p (unit translation of q).  HARMONIC: (p^2 + q^2)/2.
    KICK: -sum q (unit push of p).  DRIVEN: t * sum p.
    STEER: needs ``z0``, ``z1`` and ``tau``.
    """
    key = key.upper()
    ones = np.ones(n)
    if key == "ZERO":
        return DrivingHamiltonian("ZERO", lambda q, p, t: 0.0, lambda q, p, t: (np.zeros(n), np.zeros(n)))
    if key == "FREE":
        return DrivingHamiltonian("FREE", lambda q, p, t: float(np.sum(p)), lambda q, p, t: (np.zeros(n), ones))
    if key == "HARMONIC":
        return DrivingHamiltonian(
            "HARMONIC",
            lambda q, p, t: float(0.5 * (np.dot(p, p) + np.dot(q, q))),
            lambda q, p, t: (q.copy(), p.copy()),
        )
    if key == "KICK":
        return DrivingHamiltonian("KICK", lambda q, p, t: -float(np.sum(q)), lambda q, p, t: (-ones, np.zeros(n)))
    if key == "DRIVEN":
        return DrivingHamiltonian("DRIVEN", lambda q, p, t: t * float(np.sum(p)), lambda q, p, t: (np.zeros(n), t * ones))
    if key == "STEER":
        missing = {"z0", "z1", "tau"} - params.keys()
        if missing:
            raise ValueError(f"STEER needs {sorted(missing)}")
        return steering_hamiltonian(params["z0"], params["z1"], params["tau"])
    raise ValueError(f"Unknown Hamiltonian: {key}")


def flow_jacobian_determinant(H: DrivingHamiltonian, z: PhasePoint, tau: float,
                              steps: int = 1000, eps: float = 1e-5) -> float:
    """Determinant of the flow map's Jacobian at z, by central differences."""
    base = z.as_vector()
    size = base.shape[0]
    J = np.zeros((size, size))
    for i in range(size):
        e = np.zeros(size)
        e[i] = eps
        plus = integrate(H, PhasePoint.from_vector(base + e), tau, steps).as_vector()
        minus = integrate(H, PhasePoint.from_vector(base - e), tau, steps).as_vector()
        J[:, i] = (plus - minus) / (2 * eps)
    return float(np.linalg.det(J))


def gradient_consistency(H: DrivingHamiltonian, probes: Sequence[Tuple[PhasePoint, float]],
                         h: float = GRADIENT_STEP) -> float:
    """Largest gap between H's gradient and a central-difference estimate on the probes."""
    estimate = DrivingHamiltonian(H.name, H.evaluator, None, H.breakpoints, h)
    worst = 0.0
    for z, t in probes:
        dq, dp = H.grad(z.q, z.p, t)
        eq, ep = estimate.finite_difference_grad(z.q, z.p, t)
        worst = max(worst, float(np.max(np.abs(dq - eq))), float(np.max(np.abs(dp - ep))))
    return worst
