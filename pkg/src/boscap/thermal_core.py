"""Maximum-entropy capacity of a set of independent bosonic modes.

Units: hbar = 1 and every frequency is measured in a reference unit chosen
by the caller, so energies are in units of hbar * omega_ref and the
inverse temperature ``beta`` is dimensionless.

The capacity of a spectrum {nu_k} at mean energy E is the entropy of the
thermal state whose inverse temperature solves

    E = sum_k nu_k / (exp(beta * nu_k) - 1),

namely C = (beta * E + ln Z) / ln 2 with ln Z = -sum_k ln(1 - exp(-beta nu_k)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, IdentityViolation, NoConvergence
from .numerics import RootProblem, bose_log, expand_bracket, find_root

__all__ = [
    "ModeSpectrum",
    "ThermalSolution",
    "Allocation",
    "g",
    "ln_partition",
    "energy_at",
    "occupancies",
    "solve_thermal",
    "narrowband_capacity",
    "narrowband_solution",
    "wideband_capacity_closed",
    "wideband_capacity",
    "rate_from_power",
    "comb_spectrum",
    "solve_combs",
    "optimal_allocation",
    "verify_capacity_identity",
    "TAIL_TOL",
]

LN2 = math.log(2.0)
TAIL_TOL = 1e-12
MAX_COMB_MODES = 20_000_000


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be finite and > 0, got {value}")
    return value


def _nonnegative(name: str, value: float) -> float:
    value = float(value)
    if not (value >= 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be finite and >= 0, got {value}")
    return value


@dataclass(frozen=True)
class ModeSpectrum:
    """A finite, non-empty set of strictly positive mode frequencies."""

    frequencies: np.ndarray = field(repr=False)

    def __post_init__(self):
        nu = np.array(self.frequencies, dtype=float).ravel()
        if nu.size == 0:
            raise DomainError("a spectrum needs at least one mode")
        if not np.all(np.isfinite(nu)):
            raise DomainError("mode frequencies must be finite")
        if not np.all(nu > 0):
            raise DomainError(
                f"mode frequencies must be strictly positive, min is {nu.min()!r}"
            )
        nu.setflags(write=False)
        object.__setattr__(self, "frequencies", nu)

    def __len__(self) -> int:
        return self.frequencies.size

    def __repr__(self) -> str:
        nu = self.frequencies
        return f"ModeSpectrum(n={nu.size}, min={nu.min():.6g}, max={nu.max():.6g})"

    def union(self, other: "ModeSpectrum") -> "ModeSpectrum":
        return ModeSpectrum(np.concatenate([self.frequencies, other.frequencies]))


@dataclass(frozen=True)
class ThermalSolution:
    """Solved Lagrange multiplier together with ln Z, E and the capacity.

    ``occupancies`` is empty when the solution comes from a continuum
    (integral) partition function rather than an explicit spectrum.
    """

    beta: float
    energy: float
    ln_z: float
    capacity_bits: float
    occupancies: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))


@dataclass(frozen=True)
class Allocation:
    """Per-mode energy split."""

    energies: np.ndarray

    @property
    def total(self) -> float:
        return float(math.fsum(self.energies))


def g(x):
    """Entropy in bits of one thermal mode with mean occupancy ``x``.

    ``g(x) = (1+x) log2(1+x) - x log2 x`` with ``g(0) = 0``. Accepts a
    scalar or an array.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError(f"g is defined for finite x >= 0, got {x!r}")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # ln(1+x) + x ln(1+1/x) avoids cancelling two large terms; below 1
        # the 1/x form overflows for subnormal x, so split the log instead
        l1 = np.log1p(arr)
        tail = np.where(arr < 1.0, arr * (l1 - np.log(arr)), arr * np.log1p(1.0 / arr))
        val = np.where(arr > 0, l1 + tail, 0.0) / LN2
    return val if val.ndim else float(val)


def _beta_check(beta: float) -> float:
    beta = float(beta)
    if not beta > 0 or math.isnan(beta):
        raise DomainError(f"beta must be > 0, got {beta}")
    return beta


def ln_partition(s: ModeSpectrum, beta: float) -> float:
    """ln Z = sum_k ln[1/(1 - exp(-beta nu_k))]."""
    beta = _beta_check(beta)
    if math.isinf(beta):
        return 0.0
    return float(math.fsum(np.atleast_1d(bose_log(beta * s.frequencies))))


def occupancies(s: ModeSpectrum, beta: float) -> np.ndarray:
    """Bose-Einstein mean occupancy of every mode at inverse temperature ``beta``."""
    beta = _beta_check(beta)
    if math.isinf(beta):
        return np.zeros_like(s.frequencies)
    with np.errstate(over="ignore"):
        return 1.0 / np.expm1(beta * s.frequencies)


def energy_at(s: ModeSpectrum, beta: float) -> float:
    """Mean energy sum_k nu_k / (exp(beta nu_k) - 1)."""
    return float(math.fsum(s.frequencies * occupancies(s, beta)))


def solve_thermal(s: ModeSpectrum, E: float) -> ThermalSolution:
    """Find the thermal state of ``s`` with mean energy ``E`` and its entropy.

    For ``E == 0`` the state is the vacuum: ``beta`` is ``inf`` and the
    capacity is zero.
    """
    E = _nonnegative("energy", E)
    if E == 0.0:
        return ThermalSolution(
            beta=math.inf, energy=0.0, ln_z=0.0, capacity_bits=0.0,
            occupancies=np.zeros_like(s.frequencies),
        )
    nu = s.frequencies
    if nu.min() == nu.max():
        # degenerate spectrum: every mode carries E/N, no root solve needed
        one = narrowband_solution(float(nu[0]), E / nu.size)
        return ThermalSolution(
            beta=one.beta, energy=E, ln_z=nu.size * one.ln_z,
            capacity_bits=nu.size * one.capacity_bits,
            occupancies=np.full(nu.size, one.occupancies[0]),
        )

    def residual(beta: float) -> float:
        with np.errstate(over="ignore"):
            return math.fsum(nu / np.expm1(beta * nu)) / E - 1.0

    # classical equipartition guess E ~ N / beta; deep in the quantum regime
    # the lowest mode dominates, so use its exact single-mode beta, ln(1 + nu/E)/nu
    nu_min = float(nu.min())
    if E < nu_min:
        guess = (math.log(nu_min) - math.log(E) + math.log1p(E / nu_min)) / nu_min
    else:
        guess = nu.size / E
    lo, hi = expand_bracket(residual, guess, decreasing=True)
    beta = find_root(RootProblem(residual, lo, hi, tol_abs=1e-14 * lo))
    ln_z = ln_partition(s, beta)
    return ThermalSolution(
        beta=beta,
        energy=E,
        ln_z=ln_z,
        capacity_bits=(beta * E + ln_z) / LN2,
        occupancies=occupancies(s, beta),
    )


def verify_capacity_identity(
    sol: ThermalSolution, s: ModeSpectrum | None = None, tol: float = 1e-10
) -> None:
    """Re-check C ln 2 = beta E + ln Z, recomputing ln Z and E from ``s`` if given.

    Raises ``IdentityViolation`` on failure.
    """
    if sol.energy == 0.0:
        if sol.capacity_bits != 0.0:
            raise IdentityViolation("zero energy must give zero capacity")
        return
    ln_z, energy = sol.ln_z, sol.energy
    if s is not None:
        ln_z = ln_partition(s, sol.beta)
        got = energy_at(s, sol.beta)
        if abs(got - energy) > tol * max(1.0, energy):
            raise IdentityViolation(f"energy constraint off: {got!r} vs {energy!r}")
    lhs = sol.capacity_bits * LN2
    rhs = sol.beta * energy + ln_z
    if abs(lhs - rhs) > tol * (1.0 + abs(ln_z) + abs(lhs)):
        raise IdentityViolation(f"C ln2 = {lhs!r} but beta E + ln Z = {rhs!r}")


def narrowband_solution(omega: float, E: float) -> ThermalSolution:
    """Closed-form thermal solution for a single mode of frequency ``omega``."""
    omega = _positive("omega", omega)
    E = _nonnegative("energy", E)
    if E == 0.0:
        return solve_thermal(ModeSpectrum([omega]), 0.0)
    n = E / omega
    if n < 1.0:
        # ln n taken as a difference so an underflowed n stays usable
        beta = (math.log1p(n) - (math.log(E) - math.log(omega))) / omega
    else:
        beta = math.log1p(1.0 / n) / omega
    return ThermalSolution(
        beta=beta, energy=E, ln_z=math.log1p(n), capacity_bits=g(n),
        occupancies=np.array([n]),
    )


def narrowband_capacity(omega: float, E: float) -> float:
    """Capacity in bits of a single mode: g(E / omega)."""
    omega = _positive("omega", omega)
    return g(_nonnegative("energy", E) / omega)


def wideband_capacity_closed(E: float, delta_omega: float) -> float:
    """Continuum limit (pi / ln 2) sqrt(2 E / (3 delta_omega)) of an equispaced comb.

    Only meaningful for ``E >> delta_omega``.
    """
    E = _positive("energy", E)
    delta_omega = _positive("delta_omega", delta_omega)
    return math.pi / LN2 * math.sqrt(2.0 * E / (3.0 * delta_omega))


def rate_from_power(P: float) -> float:
    """Bits per unit time (1/ln 2) sqrt(pi P / 3) of a wideband channel at power P."""
    P = _positive("power", P)
    return math.sqrt(math.pi * P / 3.0) / LN2


def comb_spectrum(spacings: Sequence[float], k_max: Sequence[int] | int) -> ModeSpectrum:
    """Union of combs {k * s_j : k = 1..k_max_j}."""
    spacings = [_positive("spacing", s) for s in spacings]
    if isinstance(k_max, (int, np.integer)):
        k_max = [int(k_max)] * len(spacings)
    if len(k_max) != len(spacings) or not spacings:
        raise DomainError("need one k_max per comb and at least one comb")
    parts = []
    for s, k in zip(spacings, k_max):
        if k < 1:
            raise DomainError(f"k_max must be >= 1, got {k}")
        parts.append(s * np.arange(1, k + 1, dtype=float))
    return ModeSpectrum(np.concatenate(parts))


def _modes_needed(spacing: float, beta: float, threshold: float) -> int:
    """Smallest K whose next mode contributes less than ``threshold`` energy."""
    # solve nu/(e^{beta nu} - 1) = threshold for nu by fixed point on x = beta nu
    c = threshold * beta
    x = 1.0
    if c < 1:
        x = math.log(1.0 / c)
        for _ in range(50):
            x = math.log1p(x / c)
    k = max(1, int(x / (beta * spacing)))
    while True:
        nu = (k + 1) * spacing
        if nu / math.expm1(min(beta * nu, 700.0)) < threshold:
            return k
        k = int(k * 1.1) + 1
        if k > MAX_COMB_MODES:
            raise NoConvergence("comb truncation needs too many modes")


def solve_combs(
    spacings: Sequence[float], E: float, tail_tol: float = TAIL_TOL
) -> tuple[ThermalSolution, ModeSpectrum]:
    """Thermal solution on a union of infinite equispaced combs.

    Each comb ``{k * s}`` is truncated where the next mode would carry less
    than ``tail_tol * E`` of energy at the solved temperature; the cut is
    re-derived after each solve until it stops growing.
    """
    E = _positive("energy", E)
    spacings = [_positive("spacing", s) for s in spacings]
    inv = sum(1.0 / s for s in spacings)
    beta = math.pi * math.sqrt(inv / (6.0 * E))
    k_max = [0] * len(spacings)
    for _ in range(20):
        wanted = [_modes_needed(s, beta, tail_tol * E) for s in spacings]
        if all(w <= k for w, k in zip(wanted, k_max)):
            return sol, spectrum
        k_max = [max(w, k) for w, k in zip(wanted, k_max)]
        spectrum = comb_spectrum(spacings, k_max)
        sol = solve_thermal(spectrum, E)
        beta = sol.beta
    raise NoConvergence("comb truncation did not settle")


def wideband_capacity(E: float, delta_omega: float) -> float:
    """Capacity of the discrete comb {k delta_omega}, truncated certifiably."""
    return solve_combs([delta_omega], E)[0].capacity_bits


def optimal_allocation(s: ModeSpectrum, E: float) -> tuple[Allocation, ThermalSolution]:
    """Energy split maximising sum_j g(e_j / nu_j) subject to sum_j e_j = E.

    The maximiser puts every mode at a common temperature, so it is read
    off the thermal solution.
    """
    E = _positive("energy", E)
    sol = solve_thermal(s, E)
    return Allocation(s.frequencies * sol.occupancies), sol
