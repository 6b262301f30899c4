"""Brute-force thermal quantities on a truncated photon-number ladder.

Used as an independent check of the closed forms in :mod:`boscap.thermal_core`:
partition functions are summed term by term, entropies are computed from
explicit probability vectors, and the maximum-entropy property of the
thermal state is probed by random sampling of constrained states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import entr

from .errors import DomainError, TruncationError

__all__ = [
    "TruncatedThermal",
    "TAIL_BOUND",
    "n_max_for",
    "truncated_ln_partition",
    "truncated_entropy",
    "entropy_bits",
    "variational_check",
    "constraint_directions",
    "perturbation_deltas",
]

TAIL_BOUND = 1e-12
LN2 = math.log(2.0)


def _tail_ok(x: float, n_max: int) -> bool:
    # geometric tail mass beyond n_max, relative to the normalisation
    return -x * (n_max + 1) < math.log(TAIL_BOUND) + math.log(-math.expm1(-x))


def n_max_for(nu: float, beta: float) -> int:
    """Smallest ladder length whose geometric tail stays below ``TAIL_BOUND``."""
    x = _ratio(nu, beta)
    n = math.ceil((math.log(1.0 / TAIL_BOUND) - math.log(-math.expm1(-x))) / x) - 1
    n = max(n, 0)
    while not _tail_ok(x, n):
        n += 1
    while n > 0 and _tail_ok(x, n - 1):
        n -= 1
    return n


def _ratio(nu: float, beta: float) -> float:
    if not (nu > 0 and beta > 0 and math.isfinite(nu) and math.isfinite(beta)):
        raise DomainError(f"need finite nu > 0 and beta > 0, got nu={nu}, beta={beta}")
    return beta * nu


@dataclass(frozen=True)
class TruncatedThermal:
    """Thermal photon-number distribution of one mode, cut at ``n_max``."""

    nu: float
    beta: float
    n_max: int | None = None
    probabilities: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        x = _ratio(self.nu, self.beta)
        n_max = n_max_for(self.nu, self.beta) if self.n_max is None else int(self.n_max)
        if n_max < 0 or not _tail_ok(x, n_max):
            raise TruncationError(f"n_max={n_max} leaves more than {TAIL_BOUND} tail mass")
        w = np.exp(-x * np.arange(n_max + 1))
        p = w / math.fsum(w)
        p.setflags(write=False)
        object.__setattr__(self, "n_max", n_max)
        object.__setattr__(self, "probabilities", p)

    @property
    def mean_occupancy(self) -> float:
        return float(math.fsum(np.arange(self.n_max + 1) * self.probabilities))


def truncated_ln_partition(nu: float, beta: float, n_max: int) -> float:
    """ln of sum_{n=0}^{n_max} exp(-beta nu n), summed term by term."""
    x = _ratio(nu, beta)
    if n_max < 0 or not _tail_ok(x, n_max):
        raise TruncationError(f"n_max={n_max} leaves more than {TAIL_BOUND} tail mass")
    return math.log(math.fsum(math.exp(-x * n) for n in range(n_max + 1)))


def entropy_bits(p) -> float:
    """Shannon entropy of a probability vector, in bits."""
    return float(math.fsum(entr(np.asarray(p, dtype=float)))) / LN2


def truncated_entropy(t: TruncatedThermal) -> float:
    return entropy_bits(t.probabilities)


def constraint_directions(p: np.ndarray) -> np.ndarray:
    """Orthonormal rows v with sum(p v) = 0 and sum(n p v) = 0.

    ``p * (1 + t v)`` then keeps normalisation and mean occupancy for any t,
    and stays non-negative for |t v| < 1.
    """
    p = np.asarray(p, dtype=float)
    n = np.arange(p.size, dtype=float)
    _, _, vt = np.linalg.svd(np.vstack([p, n * p]))
    return vt[2:]


def perturbation_deltas(
    nu: float, E: float, n_max: int, scale: float = 1e-3, n_dirs: int = 20, seed: int = 0
) -> np.ndarray:
    """Entropy change (bits) of the thermal state under +-``scale`` steps along
    random constraint-preserving directions; all entries should be negative."""
    thermal = _thermal_for(nu, E, n_max)
    p = np.array(thermal.probabilities)
    s0 = entropy_bits(p)
    basis = constraint_directions(p)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_dirs):
        v = rng.standard_normal(basis.shape[0]) @ basis
        v /= np.max(np.abs(v))
        for sign in (1.0, -1.0):
            out.append(entropy_bits(p * (1.0 + sign * scale * v)) - s0)
    return np.array(out)


def _thermal_for(nu: float, E: float, n_max: int) -> TruncatedThermal:
    if not (nu > 0 and math.isfinite(nu)):
        raise DomainError(f"nu must be finite and > 0, got {nu}")
    if not (E > 0 and math.isfinite(E)):
        raise DomainError(f"energy must be finite and > 0, got {E}")
    target = E / nu
    if target >= n_max:
        raise TruncationError(f"mean occupancy {target} does not fit below n_max={n_max}")
    return TruncatedThermal(nu, math.log1p(1.0 / target) / nu, n_max)


def _project_to_energy(p: np.ndarray, target: float) -> np.ndarray:
    # mix with the ground state or the top rung so that <n> hits target exactly
    n = np.arange(p.size, dtype=float)
    mean = float(n @ p)
    if mean > target:
        t = target / mean
        q = t * p
        q[0] += 1.0 - t
    elif mean < target:
        top = p.size - 1
        t = (top - target) / (top - mean)
        q = t * p
        q[top] += 1.0 - t
    else:
        q = p.copy()
    return q


def variational_check(
    nu: float,
    E: float,
    n_max: int,
    n_trials: int,
    seed: int = 0,
    local_scale: float = 1e-3,
) -> bool:
    """True if no sampled state with mean energy ``E`` beats the thermal entropy.

    Half the trials are Dirichlet draws over the whole ladder, the other half
    are small constraint-preserving perturbations of the thermal vector.
    Every sample is checked for feasibility to 1e-10 before use.
    """
    if not (nu > 0 and math.isfinite(nu)):
        raise DomainError(f"nu must be finite and > 0, got {nu}")
    if not (E >= 0 and math.isfinite(E)):
        raise DomainError(f"energy must be finite and >= 0, got {E}")
    if E == 0:
        # only the vacuum is feasible
        ground = np.zeros(n_max + 1)
        ground[0] = 1.0
        return entropy_bits(ground) == 0.0
    thermal = _thermal_for(nu, E, n_max)
    target = E / nu
    # the infinite-ladder optimum bounds every truncated state from above
    bound = (math.log1p(target) + target * math.log1p(1.0 / target)) / LN2
    rng = np.random.default_rng(seed)
    n = np.arange(n_max + 1, dtype=float)
    base = _project_to_energy(np.array(thermal.probabilities), target)
    basis = constraint_directions(base)
    for trial in range(n_trials):
        if trial % 2 == 0:
            alpha = rng.uniform(0.05, 2.0)
            q = _project_to_energy(rng.dirichlet(np.full(n_max + 1, alpha)), target)
        else:
            v = rng.standard_normal(basis.shape[0]) @ basis
            q = base * (1.0 + local_scale * rng.uniform(0.1, 1.0) * v / np.max(np.abs(v)))
        if abs(q.sum() - 1.0) > 1e-10 or abs(n @ q - target) > 1e-10 * max(1.0, target):
            raise RuntimeError("sampler produced an infeasible state")
        if entropy_bits(q) > bound + 1e-9:
            return False
    return True
