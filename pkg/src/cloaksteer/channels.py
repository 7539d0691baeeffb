"""Qubit dynamics inside the cloaking shell.

Each channel has a closed-form solution (:func:`apply`) and an independent
fixed-step RK4 route (:func:`integrate_fixed_step`) that integrates the
equation of motion directly. The second route exists to cross-check the
first.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import qops
from .qops import SIGMA_Z, check_density, hermitize

MAX_RATE_STEP = 0.1


class StepSizeError(ValueError):
    pass


@dataclass(frozen=True)
class Identity:
    """Free flight: the qubit is untouched."""


@dataclass(frozen=True)
class Dephasing:
    """Pure dephasing at rate ``gamma`` (sigma_z Lindblad operator)."""

    gamma: float

    def __post_init__(self):
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")


def _default_ancilla():
    return qops.ket_to_dm(qops.DOWN)


@dataclass(frozen=True, eq=False)
class ExchangeCoupling:
    """Flip-flop coupling of strength ``J`` to a hidden ancilla spin.

    The joint state starts as ``rho (x) ancilla`` at the moment the qubit
    enters the shell; the ancilla defaults to spin-down.
    """

    J: float
    ancilla: np.ndarray = field(default_factory=_default_ancilla)

    def __post_init__(self):
        if not self.J >= 0:
            raise ValueError(f"J must be >= 0, got {self.J}")
        anc = check_density(self.ancilla, 2, "ancilla").copy()
        anc.setflags(write=False)
        object.__setattr__(self, "ancilla", anc)

    @property
    def hamiltonian(self):
        return qops.exchange_hamiltonian(self.J)


@dataclass(frozen=True, eq=False)
class Unitary:
    """Time-independent unitary kick, used to build test channels."""

    matrix: np.ndarray

    def __post_init__(self):
        u = np.array(self.matrix, dtype=complex)
        if u.shape != (2, 2) or not np.allclose(u.conj().T @ u, qops.I2, atol=qops.UNITARY_TOL):
            raise ValueError("matrix must be a 2x2 unitary")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)


@dataclass(frozen=True)
class Chain:
    """Apply ``stages`` in order, each for the same dwell time."""

    stages: tuple

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))


@dataclass(frozen=True)
class IntegratorConfig:
    steps: int = 10_000

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps}")


def _check_time(t):
    if not t >= 0:
        raise ValueError(f"time must be >= 0, got {t}")


def apply(spec, rho, t):
    """Closed-form state of the probe qubit after dwelling ``t`` in the channel."""
    _check_time(t)
    return _apply(spec, check_density(rho, 2), t)


def _apply(spec, rho, t):
    if isinstance(spec, Identity):
        return rho.copy()
    if isinstance(spec, Dephasing):
        out = rho.copy()
        decay = math.exp(-spec.gamma * t)
        out[0, 1] *= decay
        out[1, 0] *= decay
        return out
    if isinstance(spec, ExchangeCoupling):
        U = qops.unitary_from_hamiltonian(spec.hamiltonian, t)
        joint = qops.evolve_unitary(np.kron(rho, spec.ancilla), U)
        return hermitize(qops.partial_trace_second(joint))
    if isinstance(spec, Unitary):
        return qops.evolve_unitary(rho, spec.matrix)
    if isinstance(spec, Chain):
        for stage in spec.stages:
            rho = _apply(stage, hermitize(rho), t)
        return rho
    raise TypeError(f"unknown channel spec {spec!r}")


def lindblad_rhs(rho, gamma):
    """Right-hand side of the sigma_z dephasing master equation."""
    rho = np.asarray(rho, dtype=complex)
    sz2 = SIGMA_Z @ SIGMA_Z
    return (gamma / 4) * (2 * SIGMA_Z @ rho @ SIGMA_Z - sz2 @ rho - rho @ sz2)


def liouville_rhs(rho12, J):
    """-i [H, rho12] for the exchange Hamiltonian."""
    rho12 = np.asarray(rho12, dtype=complex)
    H = qops.exchange_hamiltonian(J)
    return -1j * (H @ rho12 - rho12 @ H)


def rk4(f, y0, t, steps):
    """Classic fixed-step 4th-order Runge-Kutta for an autonomous matrix ODE."""
    h = t / steps
    y = np.array(y0, dtype=complex)
    for _ in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def superoperator(f, dim):
    """Matrix of the linear map ``f`` acting on row-major vectorized dim x dim arrays."""
    cols = []
    for k in range(dim * dim):
        e = np.zeros(dim * dim, dtype=complex)
        e[k] = 1
        cols.append(np.asarray(f(e.reshape(dim, dim)), dtype=complex).ravel())
    return np.column_stack(cols)


def rk4_linear(f, y0, t, steps):
    """RK4 for a linear right-hand side, taking all steps at once.

    For y' = L y one RK4 step multiplies by the Taylor polynomial
    P = 1 + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24, so ``steps`` steps equal
    P**steps. Same discretization as :func:`rk4`, computed by repeated
    squaring.
    """
    y0 = np.asarray(y0, dtype=complex)
    dim = y0.shape[0]
    A = (t / steps) * superoperator(f, dim)
    A2 = A @ A
    P = np.eye(dim * dim) + A + A2 / 2 + A2 @ A / 6 + A2 @ A2 / 24
    return (np.linalg.matrix_power(P, steps) @ y0.ravel()).reshape(dim, dim)


def _rate(spec):
    if isinstance(spec, Dephasing):
        return spec.gamma
    if isinstance(spec, ExchangeCoupling):
        return spec.J
    return 0.0


def required_steps(spec, t):
    """Smallest step count keeping rate * step size below ``MAX_RATE_STEP``."""
    if isinstance(spec, Chain):
        return max((required_steps(s, t) for s in spec.stages), default=1)
    return max(1, math.floor(_rate(spec) * t / MAX_RATE_STEP) + 1)


def integrate_fixed_step(spec, rho, t, cfg=IntegratorConfig()):
    """Numerically integrate the channel's equation of motion.

    Dephasing integrates the 2x2 master equation; exchange coupling
    integrates the joint 4x4 Liouville equation and traces out the ancilla
    at the end. The result is re-Hermitized by averaging with its adjoint.

    Raises
    ------
    StepSizeError
        If ``rate * t / cfg.steps`` is not below 0.1.
    """
    _check_time(t)
    rho = check_density(rho, 2)
    if t == 0:
        return rho.copy()
    need = required_steps(spec, t)
    if cfg.steps < need:
        raise StepSizeError(f"step size too large: use at least {need} steps for t={t}")
    return _integrate(spec, rho, t, cfg.steps)


def _integrate(spec, rho, t, steps):
    if isinstance(spec, (Identity, Unitary)):
        return _apply(spec, rho, t)
    if isinstance(spec, Dephasing):
        out = rk4_linear(lambda r: lindblad_rhs(r, spec.gamma), rho, t, steps)
        return hermitize(out)
    if isinstance(spec, ExchangeCoupling):
        joint = rk4_linear(lambda r: liouville_rhs(r, spec.J), np.kron(rho, spec.ancilla), t, steps)
        return hermitize(qops.partial_trace_second(hermitize(joint)))
    if isinstance(spec, Chain):
        for stage in spec.stages:
            rho = _integrate(stage, rho, t, steps)
        return rho
    raise TypeError(f"unknown channel spec {spec!r}")
