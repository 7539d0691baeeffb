"""Deciding whether a cloak is present, and fitting its channel parameters.

Free flight keeps the steering parameter at its maximum ``N`` for every
dwell time, so each record is z-tested against ``S = N``. Any significant
shortfall means the qubit interacted with something inside the shell.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy import optimize

FREE_SPACE = "FreeSpace"
DYNAMICS_DETECTED = "DynamicsDetected"


class UnfittableError(ValueError):
    pass


class NyquistError(ValueError):
    pass


@dataclass(frozen=True)
class Record:
    t_s: float
    S: float
    stderr: float = 0.0
    shots: int = 0

    def __post_init__(self):
        if not self.t_s >= 0:
            raise ValueError(f"dwell time must be >= 0, got {self.t_s}")
        if not self.stderr >= 0:
            raise ValueError(f"stderr must be >= 0, got {self.stderr}")


@dataclass(frozen=True)
class ObservationSet:
    records: tuple

    def __post_init__(self):
        recs = tuple(self.records)
        if not recs:
            raise ValueError("observation set is empty")
        object.__setattr__(self, "records", recs)

    @classmethod
    def from_arrays(cls, t_s, S, stderr=None, shots=None):
        n = len(t_s)
        stderr = [0.0] * n if stderr is None else stderr
        shots = [0] * n if shots is None else shots
        return cls(tuple(Record(float(t), float(s), float(e), int(k)) for t, s, e, k in zip(t_s, S, stderr, shots)))

    @property
    def t_s(self):
        return np.array([r.t_s for r in self.records])

    @property
    def S(self):
        return np.array([r.S for r in self.records])

    @property
    def stderr(self):
        return np.array([r.stderr for r in self.records])


@dataclass(frozen=True)
class RecordFlags:
    violates_classical_bound: bool
    consistent_with_max: bool
    deviation: float


@dataclass(frozen=True)
class Verdict:
    decision: str
    max_deviation: float
    per_record_flags: tuple

    @property
    def free_space(self):
        return self.decision == FREE_SPACE


def detect(obs, N=2, abs_tol=1e-6, z=3.0):
    """Per-record z-test of ``S = N``; free space only if every record passes."""
    if N not in (2, 3):
        raise ValueError(f"N must be 2 or 3, got {N}")
    if not abs_tol > 0 or not z > 0:
        raise ValueError("abs_tol and z must be positive")
    if not obs.records:
        raise ValueError("observation set is empty")
    flags = []
    for r in obs.records:
        dev = abs(r.S - N)
        flags.append(RecordFlags(
            violates_classical_bound=r.S > 1 + z * r.stderr,
            consistent_with_max=dev <= z * r.stderr + abs_tol,
            deviation=dev,
        ))
    decision = FREE_SPACE if all(f.consistent_with_max for f in flags) else DYNAMICS_DETECTED
    return Verdict(decision, max(f.deviation for f in flags), tuple(flags))


def _inverse_variance_weights(stderr, n):
    if len(stderr) and np.all(stderr > 0):
        return 1 / stderr**2
    return np.ones(n)


def fit_dephasing(obs):
    """Fit ``S = 1 + exp(-2 gamma t)`` by log-linear regression through the origin.

    ``ln(S - 1)`` is regressed on ``-2 t``; when every record has a positive
    stderr the regression is weighted by the inverse variance of the log.
    Records with ``S <= 1`` are dropped with a warning.

    Returns
    -------
    gamma_hat : float
        Non-negative decay rate.
    rss : float
        Residual sum of squares of ``S`` against the fitted curve.
    """
    t, S, err = obs.t_s, obs.S, obs.stderr
    keep = S > 1
    if not np.all(keep):
        warnings.warn(f"{int((~keep).sum())} record(s) with S <= 1 excluded from the dephasing fit")
    t, S, err = t[keep], S[keep], err[keep]
    x = -2 * t
    y = np.log(S - 1)
    w = _inverse_variance_weights(err / (S - 1), len(t))
    denom = float(np.sum(w * x * x))
    if len(t) == 0 or denom == 0:
        raise UnfittableError("no usable records with S > 1 and t_s > 0")
    gamma = max(0.0, float(np.sum(w * x * y)) / denom)
    rss = float(np.sum((obs.S - (1 + np.exp(-2 * gamma * obs.t_s))) ** 2))
    return gamma, rss


def coupling_model(J, t):
    Jt = J * np.asarray(t, dtype=float)
    return 0.25 * (5 + 2 * np.cos(2 * Jt) + np.cos(4 * Jt))


def max_resolvable_J(t_s):
    """Largest J for which the densest t_s spacing samples half a period."""
    ts = np.unique(np.asarray(t_s, dtype=float))
    if len(ts) < 2:
        return math.inf
    return math.pi / (2 * float(np.min(np.diff(ts))))


def fit_coupling(obs, J_max, grid_points=1000):
    """Fit the exchange-coupling curve by grid search plus bounded refinement.

    The grid covers ``[0, J_max]``; the best grid point (first one on ties,
    i.e. the smallest J) is refined with bounded Brent minimization on the
    neighbouring grid cells and kept only if the refinement improves it.

    Raises
    ------
    NyquistError
        If ``J_max`` exceeds ``pi / (2 * min spacing of t_s)``.
    """
    if len(obs.records) < 3:
        raise UnfittableError("coupling fit needs at least 3 records")
    if not J_max > 0:
        raise ValueError("J_max must be positive")
    limit = max_resolvable_J(obs.t_s)
    if J_max > limit:
        raise NyquistError(f"J_max = {J_max} is not resolvable by this sampling; use J_max <= {limit:.12g}")
    t, S = obs.t_s, obs.S
    w = _inverse_variance_weights(obs.stderr, len(t))

    def wrss(J):
        return float(np.sum(w * (S - coupling_model(J, t)) ** 2))

    grid = np.linspace(0.0, J_max, grid_points)
    vals = np.array([wrss(J) for J in grid])
    k = int(np.argmin(vals))
    best_J, best_val = float(grid[k]), float(vals[k])
    lo, hi = float(grid[max(k - 1, 0)]), float(grid[min(k + 1, grid_points - 1)])
    res = optimize.minimize_scalar(wrss, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    if res.fun < best_val:
        best_J = float(res.x)
    rss = float(np.sum((S - coupling_model(best_J, t)) ** 2))
    return best_J, rss
