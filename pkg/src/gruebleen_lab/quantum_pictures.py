"""
Unitary quantum mechanics at small dimension.

Covers evolution on a time grid, the Heisenberg and interaction pictures, the
picture-equivalence construction B~ = (U V^dag) B (V U^dag) that makes one
universe's observables mimic another's, the spin/apparatus/observer measurement
chain, state transport between unit vectors, and Schmidt analysis of subsystem
decompositions.

Similarities of the unitary schema are restricted to unitary operators; anti-unitary
and non-linear bijections of the unit sphere are not considered.
"""

import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm, svdvals
from scipy.stats import unitary_group

from .schema_core import MetricSchema, SizeGuardError

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-12
UNITARY_TOLERANCE = 1e-10
MAX_DIMENSION = 32

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# Annihilation operator of an oscillator truncated to its two lowest levels.
LOWERING = np.array([[0, 1], [0, 0]], dtype=complex)


def is_unitary(U: np.ndarray, tolerance: float = UNITARY_TOLERANCE) -> bool:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        return False
    return bool(np.allclose(U.conj().T @ U, np.eye(U.shape[0]), rtol=0, atol=tolerance))


def is_hermitian(A: np.ndarray, tolerance: float = UNITARY_TOLERANCE) -> bool:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    return bool(np.allclose(A, A.conj().T, rtol=0, atol=tolerance))


def is_unit_vector(psi: np.ndarray, tolerance: float = NORM_TOLERANCE) -> bool:
    psi = np.asarray(psi)
    return psi.ndim == 1 and abs(np.linalg.norm(psi) - 1.0) <= tolerance


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if not is_unit_vector(amplitudes):
            raise ValueError(
                f"State vector must have unit norm, got {np.linalg.norm(amplitudes)!r}"
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def to_dict(self) -> Dict[str, Any]:
        return {"amplitudes": complex_pairs(self.amplitudes)}


@dataclass(frozen=True, eq=False)
class Unitary:
    matrix: np.ndarray
    tolerance: float = UNITARY_TOLERANCE

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if not is_unitary(matrix, self.tolerance):
            raise ValueError("Matrix is not unitary within tolerance")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class Observable:
    matrix: np.ndarray
    tolerance: float = UNITARY_TOLERANCE

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if not is_hermitian(matrix, self.tolerance):
            raise ValueError("Observable matrix is not Hermitian within tolerance")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def expectation(self, psi: Any) -> float:
        psi = _vector(psi)
        return float(np.real(np.vdot(psi, self.matrix @ psi)))


def _vector(psi: Any) -> np.ndarray:
    if isinstance(psi, StateVector):
        return psi.amplitudes
    return np.asarray(psi, dtype=complex)


def _matrix(op: Any) -> np.ndarray:
    if isinstance(op, (Unitary, Observable)):
        return op.matrix
    return np.asarray(op, dtype=complex)


def complex_pairs(values: Any) -> Any:
    """Nested lists with every complex entry written as [re, im]."""
    values = np.asarray(values, dtype=complex)
    if values.ndim == 0:
        return [float(values.real), float(values.imag)]
    return [complex_pairs(v) for v in values]


@dataclass(frozen=True, eq=False)
class UnitarySchedule:
    """
    Per-interval unitaries over a time grid t_0, ..., t_N.

    ``cumulative(k)`` is U(t_k) = step_k ... step_1, with U(t_0) the identity.
    """

    steps: Tuple[np.ndarray, ...]
    tolerance: float = UNITARY_TOLERANCE
    _cumulative: Tuple[np.ndarray, ...] = field(init=False, repr=False)

    def __post_init__(self):
        steps = tuple(_matrix(s) for s in self.steps)
        if not steps:
            raise ValueError("A schedule needs at least one step")
        dim = steps[0].shape[0]
        for k, step in enumerate(steps):
            if step.shape != (dim, dim):
                raise ValueError(f"Step {k} has shape {step.shape}, expected {(dim, dim)}")
            try:
                Unitary(step, self.tolerance)
            except ValueError:
                raise ValueError(f"Step {k} is not unitary") from None
        cumulative = [np.eye(dim, dtype=complex)]
        for step in steps:
            cumulative.append(step @ cumulative[-1])
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "_cumulative", tuple(cumulative))

    @classmethod
    def from_hamiltonian(cls, H: Any, dt: float, n_steps: int) -> "UnitarySchedule":
        """Constant Hamiltonian: every step is exp(-i H dt)."""
        H = _matrix(H)
        if not is_hermitian(H):
            raise ValueError("Hamiltonian is not Hermitian")
        step = expm(-1j * H * dt)
        return cls(tuple(step for _ in range(n_steps)))

    @classmethod
    def identity(cls, dim: int, n_steps: int) -> "UnitarySchedule":
        return cls(tuple(np.eye(dim, dtype=complex) for _ in range(n_steps)))

    @classmethod
    def random(cls, dim: int, n_steps: int, rng: np.random.Generator) -> "UnitarySchedule":
        return cls(tuple(random_unitary(dim, rng) for _ in range(n_steps)))

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def dim(self) -> int:
        return self.steps[0].shape[0]

    def cumulative(self, k: int) -> np.ndarray:
        if not 0 <= k <= len(self.steps):
            raise ValueError(f"Grid index {k} out of range 0..{len(self.steps)}")
        return self._cumulative[k]


def _check_dim(op: np.ndarray, dim: int, what: str):
    if op.shape[-1] != dim:
        raise ValueError(f"{what} has dimension {op.shape[-1]}, schedule has {dim}")


def evolve(psi0: Any, schedule: UnitarySchedule) -> List[np.ndarray]:
    """The trajectory x_k = U(t_k) psi_0 for k = 0..N."""
    psi0 = _vector(psi0)
    _check_dim(psi0, schedule.dim, "Initial state")
    return [schedule.cumulative(k) @ psi0 for k in range(len(schedule) + 1)]


def heisenberg(A: Any, schedule: UnitarySchedule, k: int) -> np.ndarray:
    """A^(t_k) = U^dag(t_k) A U(t_k)."""
    A = _matrix(A)
    _check_dim(A, schedule.dim, "Observable")
    U = schedule.cumulative(k)
    return U.conj().T @ A @ U


def picture_observable(B: Any, Usched: UnitarySchedule, Vsched: UnitarySchedule, k: int) -> np.ndarray:
    """B~(t_k) = (U V^dag) B (V U^dag), all operators at t_k."""
    _check_grids(Usched, Vsched)
    B = _matrix(B)
    _check_dim(B, Usched.dim, "Observable")
    U = Usched.cumulative(k)
    V = Vsched.cumulative(k)
    W = U @ V.conj().T
    return W @ B @ W.conj().T


def _check_grids(Usched: UnitarySchedule, Vsched: UnitarySchedule):
    if len(Usched) != len(Vsched):
        raise ValueError(f"Schedules cover different grids: {len(Usched)} vs {len(Vsched)} steps")
    if Usched.dim != Vsched.dim:
        raise ValueError(f"Schedules act on different dimensions: {Usched.dim} vs {Vsched.dim}")


def verify_picture_equivalence(psi0: Any, Usched: UnitarySchedule, Vsched: UnitarySchedule,
                               observables: Sequence[Any]) -> float:
    """
    Largest gap between <B~> evolved by U and <B> evolved by V, over the grid
    and the observables.
    """
    _check_grids(Usched, Vsched)
    psi0 = _vector(psi0)
    _check_dim(psi0, Usched.dim, "Initial state")
    deviation = 0.0
    for k in range(len(Usched) + 1):
        U = Usched.cumulative(k)
        V = Vsched.cumulative(k)
        u_state = U @ psi0
        v_state = V @ psi0
        for B in observables:
            B_tilde = picture_observable(B, Usched, Vsched, k)
            q_side = np.vdot(u_state, B_tilde @ u_state)
            q_prime_side = np.vdot(v_state, _matrix(B) @ v_state)
            deviation = max(deviation, float(abs(q_side - q_prime_side)))
    logger.debug(f"Picture equivalence deviation over {len(Usched) + 1} grid points: {deviation:.3e}")
    return deviation


def interaction_observable(A: Any, H0: Any, t: float) -> np.ndarray:
    """A_I(t) = e^{i H0 t} A e^{-i H0 t}."""
    free = expm(-1j * _matrix(H0) * t)
    return free.conj().T @ _matrix(A) @ free


def interaction_state(psi_t: Any, H0: Any, t: float) -> np.ndarray:
    """psi_I(t) = e^{i H0 t} psi(t)."""
    return expm(1j * _matrix(H0) * t) @ _vector(psi_t)


def align_global_phase(vector: Any) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude component is positive real."""
    vector = _vector(vector)
    pivot = vector[int(np.argmax(np.abs(vector)))]
    if abs(pivot) == 0:
        return vector.copy()
    return vector * (abs(pivot) / pivot)


def phase_distance(a: Any, b: Any) -> float:
    return float(np.linalg.norm(align_global_phase(a) - align_global_phase(b)))


# Measurement chain: spin (up, down) x apparatus (ready, +hbar/2, -hbar/2)
# x observer (ready, "up", "down").
SPIN_DIM, APPARATUS_DIM, OBSERVER_DIM = 2, 3, 3
CHAIN_DIM = SPIN_DIM * APPARATUS_DIM * OBSERVER_DIM


def chain_index(spin: int, apparatus: int, observer: int) -> int:
    return (spin * APPARATUS_DIM + apparatus) * OBSERVER_DIM + observer


def _permutation_unitary(image: Sequence[int]) -> np.ndarray:
    M = np.zeros((len(image), len(image)), dtype=complex)
    for i, j in enumerate(image):
        M[j, i] = 1.0
    return M


def spin_apparatus_interaction() -> np.ndarray:
    """Apparatus ready <-> +hbar/2 if the spin is up, ready <-> -hbar/2 if down."""
    image = list(range(CHAIN_DIM))
    for spin, pointer in ((0, 1), (1, 2)):
        for observer in range(OBSERVER_DIM):
            a = chain_index(spin, 0, observer)
            b = chain_index(spin, pointer, observer)
            image[a], image[b] = b, a
    return _permutation_unitary(image)


def apparatus_observer_interaction() -> np.ndarray:
    """Observer ready <-> "up" if the apparatus reads +, ready <-> "down" if it reads -."""
    image = list(range(CHAIN_DIM))
    for pointer, record in ((1, 1), (2, 2)):
        for spin in range(SPIN_DIM):
            a = chain_index(spin, pointer, 0)
            b = chain_index(spin, pointer, record)
            image[a], image[b] = b, a
    return _permutation_unitary(image)


def correlation_operator() -> np.ndarray:
    """Projector onto the subspace where the observer's record agrees with the spin."""
    C = np.zeros((CHAIN_DIM, CHAIN_DIM), dtype=complex)
    for spin, record in ((0, 1), (1, 2)):
        for apparatus in range(APPARATUS_DIM):
            i = chain_index(spin, apparatus, record)
            C[i, i] = 1.0
    return C


@dataclass(frozen=True, eq=False)
class MeasurementReport:
    alpha: complex
    beta: complex
    correlation_stages: Tuple[float, ...]
    final_state: np.ndarray
    expected_state: np.ndarray
    deviation: float
    branch_amplitudes: Dict[str, complex]

    @property
    def correlation_before(self) -> float:
        return self.correlation_stages[0]

    @property
    def correlation_after(self) -> float:
        return self.correlation_stages[-1]

    def nonzero_branches(self, tolerance: float = NORM_TOLERANCE) -> int:
        return int(np.sum(np.abs(self.final_state) > tolerance))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": complex_pairs(self.alpha),
            "beta": complex_pairs(self.beta),
            "correlation_stages": list(self.correlation_stages),
            "deviation": self.deviation,
            "branch_amplitudes": {k: complex_pairs(v) for k, v in self.branch_amplitudes.items()},
        }


def measurement_chain(alpha: complex, beta: complex) -> MeasurementReport:
    """
    Run spin -> apparatus -> observer correlation and track <C> at each stage.

    Raises:
        ValueError: If |alpha|^2 + |beta|^2 differs from 1 by more than 1e-12
    """
    alpha, beta = complex(alpha), complex(beta)
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > NORM_TOLERANCE:
        raise ValueError(f"Amplitudes are not normalized: |a|^2+|b|^2 = {abs(alpha)**2 + abs(beta)**2}")
    psi = np.zeros(CHAIN_DIM, dtype=complex)
    psi[chain_index(0, 0, 0)] = alpha
    psi[chain_index(1, 0, 0)] = beta
    C = correlation_operator()
    stages = [float(np.real(np.vdot(psi, C @ psi)))]
    for interaction in (spin_apparatus_interaction(), apparatus_observer_interaction()):
        psi = interaction @ psi
        stages.append(float(np.real(np.vdot(psi, C @ psi))))
    expected = np.zeros(CHAIN_DIM, dtype=complex)
    expected[chain_index(0, 1, 1)] = alpha
    expected[chain_index(1, 2, 2)] = beta
    return MeasurementReport(
        alpha=alpha,
        beta=beta,
        correlation_stages=tuple(stages),
        final_state=psi,
        expected_state=expected,
        deviation=phase_distance(psi, expected),
        branch_amplitudes={
            "up,+,up": complex(psi[chain_index(0, 1, 1)]),
            "down,-,down": complex(psi[chain_index(1, 2, 2)]),
        },
    )


def state_transporter(psi: Any, phi: Any, tolerance: float = NORM_TOLERANCE) -> np.ndarray:
    """
    A unitary W with W psi = phi.

    W rotates within span{psi, phi} and is the identity on the orthogonal
    complement.  For phi = psi the identity is returned.
    """
    psi, phi = _vector(psi), _vector(phi)
    if psi.shape != phi.shape:
        raise ValueError(f"Dimension mismatch: {psi.shape[0]} vs {phi.shape[0]}")
    dim = psi.shape[0]
    identity = np.eye(dim, dtype=complex)
    c = np.vdot(psi, phi)
    residual = phi - c * psi
    s = float(np.linalg.norm(residual))
    if s <= tolerance:
        if abs(c - 1.0) <= tolerance:
            return identity
        return identity + (c / abs(c) - 1.0) * np.outer(psi, psi.conj())
    E = np.column_stack([psi, residual / s])
    M = np.array([[c, -s], [s, np.conj(c)]], dtype=complex)
    return identity - E @ E.conj().T + E @ M @ E.conj().T


@dataclass(frozen=True, eq=False)
class Decomposition:
    """
    A tensor-product split of C^d into factors of the given dimensions.

    ``basis`` maps a vector's components into the product basis of this split;
    the identity gives the computational split.
    """

    dims: Tuple[int, ...]
    basis: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"Invalid factor dimensions {dims}")
        total = int(np.prod(dims))
        basis = np.eye(total, dtype=complex) if self.basis is None else _matrix(self.basis)
        if basis.shape != (total, total):
            raise ValueError(f"Basis map has shape {basis.shape} but factors multiply to {total}")
        if not is_unitary(basis):
            raise ValueError("Basis map of a decomposition must be unitary")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @classmethod
    def standard(cls, dims: Sequence[int]) -> "Decomposition":
        return cls(tuple(dims), None, "computational")


def schmidt_coefficients(psi: Any, decomposition: Decomposition, cut: int = 1) -> np.ndarray:
    """Singular values of psi across factors [0, cut) | [cut, m)."""
    psi = _vector(psi)
    _check_dim(psi, decomposition.dim, "State")
    if not 1 <= cut < len(decomposition.dims):
        raise ValueError(f"Cut {cut} does not split {len(decomposition.dims)} factors")
    left = int(np.prod(decomposition.dims[:cut]))
    coordinates = decomposition.basis @ psi
    return svdvals(coordinates.reshape(left, -1))


def schmidt_rank(psi: Any, decomposition: Decomposition, cut: int = 1,
                 tolerance: float = UNITARY_TOLERANCE) -> int:
    return int(np.sum(schmidt_coefficients(psi, decomposition, cut) > tolerance))


def product_similarity(factors: Sequence[Any], decomposition: Decomposition) -> np.ndarray:
    """V = R^dag (V_1 x ... x V_m) R for the decomposition's basis map R."""
    factors = [_matrix(f) for f in factors]
    if len(factors) != len(decomposition.dims):
        raise ValueError(
            f"Got {len(factors)} factors for a decomposition into {len(decomposition.dims)}"
        )
    for i, (f, d) in enumerate(zip(factors, decomposition.dims)):
        if f.shape != (d, d):
            raise ValueError(f"Factor {i} has shape {f.shape}, expected {(d, d)}")
        if not is_unitary(f):
            raise ValueError(f"Factor {i} is not unitary")
    R = decomposition.basis
    return R.conj().T @ reduce(np.kron, factors) @ R


def bell_states() -> Dict[str, np.ndarray]:
    r = 1 / np.sqrt(2)
    return {
        "phi+": np.array([r, 0, 0, r], dtype=complex),
        "phi-": np.array([r, 0, 0, -r], dtype=complex),
        "psi+": np.array([0, r, r, 0], dtype=complex),
        "psi-": np.array([0, r, -r, 0], dtype=complex),
    }


@dataclass(frozen=True, eq=False)
class BellReport:
    decomposition: Decomposition
    original: Dict[str, Tuple[float, ...]]
    alternate: Dict[str, Tuple[float, ...]]

    @property
    def max_alternate_second_value(self) -> float:
        return max(values[1] for values in self.alternate.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "original_cut": {k: list(v) for k, v in self.original.items()},
            "alternate_cut": {k: list(v) for k, v in self.alternate.items()},
            "max_alternate_second_value": self.max_alternate_second_value,
        }


def bell_alternate_decomposition() -> BellReport:
    """
    Re-split two qubits into factors A|B in which every Bell state is a product.

    Factor A tells phi from psi and factor B tells + from -, so phi+ becomes
    |phi>_A|+>_B, phi- becomes |phi>_A|->_B and so on.
    """
    bells = bell_states()
    order = ("phi+", "phi-", "psi+", "psi-")
    R = np.array([bells[name].conj() for name in order])
    standard = Decomposition.standard((2, 2))
    alternate = Decomposition((2, 2), R, "bell")
    return BellReport(
        decomposition=alternate,
        original={k: tuple(float(s) for s in schmidt_coefficients(v, standard)) for k, v in bells.items()},
        alternate={k: tuple(float(s) for s in schmidt_coefficients(v, alternate)) for k, v in bells.items()},
    )


def embed(op: np.ndarray, site: int, n: int, local_dim: int = 2) -> np.ndarray:
    """op acting on one site of an n-site chain."""
    ops = [np.eye(local_dim, dtype=complex)] * n
    ops[site] = op
    return reduce(np.kron, ops)


def qubit_chain_hamiltonian(n: int = 3, coupling: float = 1.0, field: float = 0.5) -> np.ndarray:
    """Heisenberg nearest-neighbour chain of qubits in a transverse field."""
    dim = 2 ** n
    H = np.zeros((dim, dim), dtype=complex)
    for i in range(n - 1):
        for pauli in (PAULI_X, PAULI_Y, PAULI_Z):
            H += coupling * embed(pauli, i, n) @ embed(pauli, i + 1, n)
    for i in range(n):
        H += field * embed(PAULI_X, i, n)
    return H


def oscillator_chain_hamiltonian(n: int = 3, frequencies: Sequence[float] = (1.0, 1.3, 1.7),
                                 coupling: float = 0.4) -> np.ndarray:
    """Coupled oscillators truncated to two levels each, with hopping between neighbours."""
    if len(frequencies) != n:
        raise ValueError(f"Need {n} frequencies, got {len(frequencies)}")
    dim = 2 ** n
    H = np.zeros((dim, dim), dtype=complex)
    lowering = [embed(LOWERING, i, n) for i in range(n)]
    for omega, a in zip(frequencies, lowering):
        H += omega * a.conj().T @ a
    for i in range(n - 1):
        hop = lowering[i].conj().T @ lowering[i + 1]
        H += coupling * (hop + hop.conj().T)
    return H


def oscillator_observables(n: int = 3) -> List[np.ndarray]:
    """Position-like, momentum-like and number operators of each truncated oscillator."""
    observables = []
    for i in range(n):
        a = embed(LOWERING, i, n)
        observables.append((a + a.conj().T) / np.sqrt(2))
        observables.append(1j * (a.conj().T - a) / np.sqrt(2))
        observables.append(a.conj().T @ a)
    return observables


def picture_pair(n_steps: int, dt: float = 0.05) -> Tuple[UnitarySchedule, UnitarySchedule]:
    """Schedules for Q (qubit chain) and Q' (oscillator chain), both of dimension 8."""
    return (
        UnitarySchedule.from_hamiltonian(qubit_chain_hamiltonian(), dt, n_steps),
        UnitarySchedule.from_hamiltonian(oscillator_chain_hamiltonian(), dt, n_steps),
    )


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(dim, random_state=rng)


def random_observable(dim: int, rng: np.random.Generator) -> np.ndarray:
    M = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (M + M.conj().T) / 2


def build_unitary_schema(dim: int, n_steps: int = 1, probes: int = 8, seed: int = 0,
                         tolerance: float = UNITARY_TOLERANCE,
                         max_dimension: int = MAX_DIMENSION) -> MetricSchema:
    """
    Unit vectors of C^dim with every unitary kinematically possible.

    Membership in K is unitarity; checks quantifying over K visit ``probes``
    seeded Haar-random unitaries.
    """
    if dim < 1:
        raise ValueError(f"Dimension must be >= 1, got {dim}")
    if dim > min(max_dimension, MAX_DIMENSION):
        raise SizeGuardError(f"Dimension {dim} exceeds the guard {min(max_dimension, MAX_DIMENSION)}")
    rng = np.random.default_rng(seed)
    probe_set = tuple(random_unitary(dim, rng) for _ in range(probes))
    return MetricSchema(
        name=f"unitary-{dim}",
        apply_fn=lambda U, x: U @ x,
        compose_fn=lambda a, b: a @ b,
        invert_fn=lambda a: a.conj().T,
        identity_fn=lambda: np.eye(dim, dtype=complex),
        contains_fn=lambda U: np.shape(U) == (dim, dim) and is_unitary(U, tolerance),
        probes=probe_set,
        state_distance_fn=lambda x, y: np.linalg.norm(x - y),
        map_distance_fn=lambda a, b: np.max(np.abs(a - b)),
        transport_fn=state_transporter,
        state_check_fn=lambda x: np.shape(x) == (dim,) and is_unit_vector(x),
        state_sampler=lambda r: random_state(dim, r),
        map_sampler=lambda r: random_unitary(dim, r),
        reversible=True,
        n_steps=n_steps,
        tolerance=tolerance,
    )
