"""Small operator algebra for one- and two-qubit density matrices.

States are plain complex ``numpy`` arrays. Index 0 is spin-up (or H
polarization), index 1 is spin-down (or V); two-qubit arrays use the
ordering (up-up, up-down, down-up, down-down). Units have hbar = 1.
"""

from dataclasses import dataclass

import numpy as np

ATOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-10
BRANCH_CUTOFF = 1e-12

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# raising |up><down| and lowering |down><up|
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)

UP = np.array([1, 0], dtype=complex)
DOWN = np.array([0, 1], dtype=complex)


class InvalidDimensionError(ValueError):
    pass


class InvalidStateError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


def ket_to_dm(psi):
    """Return the projector |psi><psi| for a (not necessarily normalized) ket."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def maximally_mixed(dim=2):
    return np.eye(dim, dtype=complex) / dim


def is_hermitian(m, atol=ATOL):
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, m.conj().T, rtol=0, atol=atol)


def check_density(rho, dim=None, name="rho"):
    """Validate a density matrix and return it as a complex array.

    Raises
    ------
    InvalidDimensionError
        If ``rho`` is not square, or not of the requested dimension.
    InvalidStateError
        If ``rho`` is not Hermitian, not unit trace or has a negative
        eigenvalue below ``-PSD_TOL``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidDimensionError(f"{name} must be a square matrix, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise InvalidDimensionError(f"{name} must be {dim}x{dim}, got {rho.shape[0]}x{rho.shape[1]}")
    if not is_hermitian(rho):
        raise InvalidStateError(f"{name} is not Hermitian")
    if abs(np.trace(rho) - 1) > ATOL:
        raise InvalidStateError(f"{name} has trace {np.trace(rho).real:.3g}, expected 1")
    if np.linalg.eigvalsh(rho)[0] < -PSD_TOL:
        raise InvalidStateError(f"{name} is not positive semidefinite")
    return rho


def hermitize(m):
    m = np.asarray(m, dtype=complex)
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Two-outcome projective measurement with outcomes +1 and -1."""

    label: str
    plus: np.ndarray
    minus: np.ndarray

    def __post_init__(self):
        for name in ("plus", "minus"):
            p = np.asarray(getattr(self, name), dtype=complex)
            if p.shape != (2, 2):
                raise InvalidDimensionError(f"projector {name} must be 2x2")
            p.setflags(write=False)
            object.__setattr__(self, name, p)
        if not np.allclose(self.plus + self.minus, I2, rtol=0, atol=ATOL):
            raise InvalidStateError("projectors do not resolve the identity")
        if not np.allclose(self.plus @ self.minus, 0, rtol=0, atol=ATOL):
            raise InvalidStateError("projectors are not orthogonal")

    @property
    def observable(self):
        return self.plus - self.minus

    def projector(self, outcome):
        if outcome == 1:
            return self.plus
        if outcome == -1:
            return self.minus
        raise ValueError(f"outcome must be +1 or -1, got {outcome}")

    def eigenvectors(self):
        """Unit kets for the +1 and -1 outcomes (phase arbitrary)."""
        return [np.linalg.eigh(p)[1][:, -1] for p in (self.plus, self.minus)]

    def rotated(self, unitary, label=None):
        u = np.asarray(unitary, dtype=complex)
        return MeasurementBasis(
            label or self.label,
            u @ self.plus @ u.conj().T,
            u @ self.minus @ u.conj().T,
        )

    @classmethod
    def from_ket(cls, label, psi_plus):
        p = ket_to_dm(psi_plus)
        return cls(label, p, I2 - p)


_S = 1 / np.sqrt(2)
X = MeasurementBasis.from_ket("X", [_S, _S])
Y = MeasurementBasis.from_ket("Y", [_S, 1j * _S])
Z = MeasurementBasis.from_ket("Z", [1, 0])
BASES = {"X": X, "Y": Y, "Z": Z}


def mutually_unbiased(b1, b2, atol=1e-10):
    return all(
        abs(abs(np.vdot(e, f)) ** 2 - 0.5) <= atol
        for e in b1.eigenvectors()
        for f in b2.eigenvectors()
    )


def tensor(a, b):
    """Kronecker product of two single-qubit density matrices."""
    a = check_density(a, 2, "a")
    b = check_density(b, 2, "b")
    return np.kron(a, b)


def partial_trace_second(rho_ab):
    """Trace out the second qubit of a two-qubit state."""
    rho_ab = np.asarray(rho_ab, dtype=complex)
    if rho_ab.shape != (4, 4):
        raise InvalidDimensionError(f"expected a 4x4 matrix, got shape {rho_ab.shape}")
    return np.einsum("ijkj->ik", rho_ab.reshape(2, 2, 2, 2))


def measure(rho, basis):
    """Projective measurement of ``rho`` in ``basis``.

    Returns a list of ``(outcome, probability, post_state)`` tuples. Branches
    with probability below ``BRANCH_CUTOFF`` are dropped.
    """
    rho = check_density(rho, 2)
    branches = []
    for outcome in (1, -1):
        proj = basis.projector(outcome)
        p = float(np.real(np.trace(proj @ rho)))
        if p < BRANCH_CUTOFF:
            continue
        branches.append((outcome, p, proj @ rho @ proj / p))
    return branches


def expectation(rho, basis):
    """<Pi_+ - Pi_-> in state ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    val = float(np.real(np.trace(basis.observable @ rho)))
    return min(1.0, max(-1.0, val))


def exchange_hamiltonian(J):
    """J (s+ (x) s- + s- (x) s+), the flip-flop coupling between two spins."""
    return J * (np.kron(SIGMA_PLUS, SIGMA_MINUS) + np.kron(SIGMA_MINUS, SIGMA_PLUS))


def unitary_from_hamiltonian(H, t):
    """exp(-i H t) for Hermitian ``H`` via eigendecomposition."""
    H = np.asarray(H, dtype=complex)
    if not is_hermitian(H):
        raise NotHermitianError("Hamiltonian must be Hermitian")
    w, v = np.linalg.eigh(hermitize(H))
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def evolve_unitary(rho, U):
    rho = np.asarray(rho, dtype=complex)
    U = np.asarray(U, dtype=complex)
    if U.shape != rho.shape:
        raise InvalidDimensionError(f"unitary shape {U.shape} does not match state shape {rho.shape}")
    if not np.allclose(U.conj().T @ U, np.eye(U.shape[0]), rtol=0, atol=UNITARY_TOL):
        raise ValueError("U is not unitary")
    return U @ rho @ U.conj().T


def rotation_y(angle):
    """Bloch-sphere rotation by ``angle`` about the y axis."""
    return np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * SIGMA_Y


def random_density(rng, dim=2, rank=None):
    """Random density matrix from a Ginibre ensemble."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return hermitize(rho / np.trace(rho).real)


def random_unitary(rng, dim=2):
    """Haar-random unitary (QR of a complex Gaussian matrix)."""
    g = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


def near_identity_unitary(rng, dim=2, scale=None):
    """exp(-i eps K) for a random Hermitian K; eps log-uniform in [1e-6, 1] by default."""
    eps = 10 ** rng.uniform(-6, 0) if scale is None else scale
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return unitary_from_hamiltonian(hermitize(g), eps)
