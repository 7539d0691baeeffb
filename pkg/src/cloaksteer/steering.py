"""Temporal steering parameter: exact, finite-shot and hidden-state versions.

Alice measures the qubit in basis ``i`` as it enters the shell, the qubit
dwells in the channel, and Bob measures it in the same basis on exit. For
each basis the term ``sum_a P(a) <B_i>_a**2`` is accumulated; the sum over
``N`` bases is the steering parameter ``S``. Any local-hidden-state model
keeps ``S <= 1``, quantum mechanics allows up to ``N``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import channels, qops
from .qops import X, Y, Z

MODE_EXACT = "exact"
MODE_SAMPLED = "sampled"


def default_bases(n=2):
    """X and Z for two settings; X, Y, Z for three."""
    if n == 2:
        return (X, Z)
    if n == 3:
        return (X, Y, Z)
    raise ValueError(f"number of bases must be 2 or 3, got {n}")


@dataclass(frozen=True, eq=False)
class SteeringTask:
    channel: object
    dwell_time: float
    bases: tuple = field(default_factory=default_bases)
    initial_state: np.ndarray = field(default_factory=qops.maximally_mixed)
    # None selects the closed-form channel solution
    integrator: channels.IntegratorConfig = None

    def __post_init__(self):
        if not self.dwell_time >= 0:
            raise ValueError(f"dwell_time must be >= 0, got {self.dwell_time}")
        bases = tuple(self.bases)
        if len(bases) not in (2, 3):
            raise ValueError(f"need 2 or 3 bases, got {len(bases)}")
        for i in range(len(bases)):
            for j in range(i + 1, len(bases)):
                if not qops.mutually_unbiased(bases[i], bases[j]):
                    raise ValueError(f"bases {bases[i].label} and {bases[j].label} are not mutually unbiased")
        object.__setattr__(self, "bases", bases)
        rho = qops.check_density(self.initial_state, 2, "initial_state").copy()
        rho.setflags(write=False)
        object.__setattr__(self, "initial_state", rho)

    @property
    def n_bases(self):
        return len(self.bases)

    def propagate(self, rho):
        if self.integrator is None:
            return channels.apply(self.channel, rho, self.dwell_time)
        return channels.integrate_fixed_step(self.channel, rho, self.dwell_time, self.integrator)


@dataclass(frozen=True)
class SteeringEstimate:
    per_basis_terms: tuple
    S: float
    mode: str
    shots_per_basis: int = 0
    stderr: float = 0.0
    warnings: tuple = ()


def conditional_expectations(task, bob_bases=None):
    """Alice's outcome distribution and Bob's conditional expectations.

    Returns one list per basis of ``(a, P(a), <B_i>_a)`` for Alice's
    non-negligible outcomes. ``bob_bases`` overrides the bases Bob measures
    (defaults to Alice's).
    """
    bob_bases = task.bases if bob_bases is None else bob_bases
    out = []
    for alice, bob in zip(task.bases, bob_bases):
        cells = []
        for a, p, post in qops.measure(task.initial_state, alice):
            cells.append((a, p, qops.expectation(task.propagate(post), bob)))
        out.append(cells)
    return out


def _exact(task, bob_bases=None):
    terms = tuple(
        math.fsum(p * e * e for _, p, e in cells)
        for cells in conditional_expectations(task, bob_bases)
    )
    return SteeringEstimate(terms, math.fsum(terms), MODE_EXACT)


def steering_exact(task):
    """Steering parameter by exact density-matrix propagation."""
    return _exact(task)


def steering_exact_misaligned(task, rotation_angle):
    """As :func:`steering_exact`, with Bob's bases rotated about the Bloch y axis."""
    R = qops.rotation_y(rotation_angle)
    return _exact(task, [b.rotated(R) for b in task.bases])


def shot_uniforms(seed, basis_index, shots):
    """Uniform pairs for shots ``0..shots-1`` of one basis.

    Row ``k`` is a fixed function of ``(seed, basis_index, k)``: the stream
    is a Philox generator keyed by the pair, read two doubles per shot.
    """
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    key = np.random.SeedSequence([int(seed), int(basis_index)]).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key)).random((shots, 2))


def steering_sampled(task, shots_per_basis, seed):
    """Plug-in estimate of S from ``shots_per_basis`` simulated rounds per basis.

    Each round samples Alice's outcome, collapses, propagates and samples
    Bob's outcome. ``<B_i>_a`` is the conditional sample mean and ``P(a)``
    the empirical frequency. The estimator squares sample means, so it is
    biased upward by O(1/shots); ``stderr`` comes from first-order error
    propagation through the conditional means and Alice's frequencies.
    """
    if int(shots_per_basis) != shots_per_basis or shots_per_basis < 100:
        raise ValueError(f"shots_per_basis must be an integer >= 100, got {shots_per_basis}")
    shots = int(shots_per_basis)
    terms, variances, notes = [], [], []
    for i, cells in enumerate(conditional_expectations(task)):
        p_alice = {a: p for a, p, _ in cells}
        p_bob = {a: 0.5 * (1 + e) for a, _, e in cells}
        u = shot_uniforms(seed, i, shots)
        a_plus = u[:, 0] < p_alice.get(1, 0.0)
        b_plus = u[:, 1] < np.where(a_plus, p_bob.get(1, 0.0), p_bob.get(-1, 0.0))
        b = np.where(b_plus, 1.0, -1.0)

        term, var = 0.0, 0.0
        means = {}
        for a, mask in ((1, a_plus), (-1, ~a_plus)):
            n_a = int(mask.sum())
            if n_a == 0:
                notes.append(f"basis {task.bases[i].label}: no rounds with Alice outcome {a:+d}")
                continue
            m = float(b[mask].sum()) / n_a
            f = n_a / shots
            means[a] = m
            term += f * m * m
            var += (2 * f * m) ** 2 * (1 - m * m) / n_a
        if len(means) == 2:
            f_plus = float(a_plus.sum()) / shots
            var += (means[1] ** 2 - means[-1] ** 2) ** 2 * f_plus * (1 - f_plus) / shots
        terms.append(term)
        variances.append(var)
    return SteeringEstimate(
        tuple(terms),
        math.fsum(terms),
        MODE_SAMPLED,
        shots,
        math.sqrt(math.fsum(variances)),
        tuple(notes),
    )


def dephasing_S_closed_form(gamma, t, n_bases=2):
    """S for pure dephasing from I/2: ``1 + exp(-2 gamma t)`` with X and Z.

    Adding Y contributes another ``exp(-2 gamma t)``.
    """
    if gamma < 0 or t < 0:
        raise ValueError("gamma and t must be non-negative")
    default_bases(n_bases)
    return 1 + (n_bases - 1) * math.exp(-2 * gamma * t)


def coupling_S_closed_form(J, t, n_bases=2):
    """S for exchange coupling to a spin-down ancilla, starting from I/2.

    With X and Z this is ``(5 + 2 cos 2Jt + cos 4Jt) / 4``. The Y term equals
    the X term, ``cos(Jt)**2``, because the coupling conserves total S_z.
    """
    if J < 0 or t < 0:
        raise ValueError("J and t must be non-negative")
    default_bases(n_bases)
    s = 0.25 * (5 + 2 * math.cos(2 * J * t) + math.cos(4 * J * t))
    if n_bases == 3:
        s += math.cos(J * t) ** 2
    return s


@dataclass(frozen=True, eq=False)
class HiddenStateComponent:
    """One hidden variable value: its weight, Alice's P(+1) per basis, Bob's state."""

    weight: float
    alice_plus: tuple
    bob_state: np.ndarray

    def __post_init__(self):
        if not 0 <= self.weight <= 1:
            raise ValueError("weight must lie in [0, 1]")
        probs = tuple(float(p) for p in self.alice_plus)
        if any(not 0 <= p <= 1 for p in probs):
            raise ValueError("Alice's outcome probabilities must lie in [0, 1]")
        object.__setattr__(self, "alice_plus", probs)
        object.__setattr__(self, "bob_state", qops.check_density(self.bob_state, 2, "bob_state"))


@dataclass(frozen=True)
class HiddenStateEnsemble:
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("ensemble needs at least one component")
        if abs(math.fsum(c.weight for c in comps) - 1) > 1e-12:
            raise ValueError("component weights must sum to 1")
        object.__setattr__(self, "components", comps)


def hidden_state_S(ensemble, bases):
    """Steering parameter produced by a local-hidden-state model.

    Bob's state depends only on the hidden variable, never on Alice's
    setting, so ``<B_i>_a = sum_l q_l P_l(a) <B_i>_l / P(a)``. Cells with
    ``P(a) = 0`` contribute nothing.
    """
    total = []
    for i, basis in enumerate(bases):
        bob = [qops.expectation(c.bob_state, basis) for c in ensemble.components]
        for a in (1, -1):
            pa = [c.alice_plus[i] if a == 1 else 1 - c.alice_plus[i] for c in ensemble.components]
            p = math.fsum(c.weight * x for c, x in zip(ensemble.components, pa))
            if p <= 0:
                continue
            num = math.fsum(c.weight * x * e for c, x, e in zip(ensemble.components, pa, bob))
            total.append(num * num / p)
    return math.fsum(total)


def random_ensemble(rng, n_bases, max_components=8, maximally_mixed=False):
    """Random hidden-state ensemble with 1..max_components components.

    Bob's states are drawn uniformly from the Bloch ball, Alice's response
    probabilities uniformly from [0, 1] with occasional deterministic
    responses; ``maximally_mixed`` forces every Bob state to I/2.
    """
    k = int(rng.integers(1, max_components + 1))
    weights = rng.dirichlet(np.ones(k))
    weights[-1] = 1 - math.fsum(weights[:-1])
    comps = []
    for w in weights:
        probs = rng.random(n_bases)
        deterministic = rng.random(n_bases) < 0.25
        probs = np.where(deterministic, np.round(probs), probs)
        if maximally_mixed:
            bob = qops.maximally_mixed()
        else:
            v = rng.normal(size=3)
            v *= rng.random() ** (1 / 3) / np.linalg.norm(v)
            bob = 0.5 * (qops.I2 + v[0] * qops.SIGMA_X + v[1] * qops.SIGMA_Y + v[2] * qops.SIGMA_Z)
        comps.append(HiddenStateComponent(float(max(w, 0.0)), tuple(probs), bob))
    return HiddenStateEnsemble(tuple(comps))
