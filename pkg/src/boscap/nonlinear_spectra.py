"""Effective spectra of quadratic nonlinear Hamiltonians and their capacities.

Each Hamiltonian here is brought to free-field form by a canonical
transformation, so the nonlinearity only enters through the new mode
frequencies:

* single-mode squeezing and two-mode down-conversion: omega -> sqrt(omega^2 - xi^2)
* swapping between N equal-frequency modes: omega -> omega + lambda_j, with
  lambda_j the eigenvalues of the zero-diagonal coupling matrix
* broadband swapping with the contract/stretch coupling choice: N - 1 combs
  contracted by (1 - r) and one stretched by 1 + (N - 1) r.

The ground-state shifts that make the vacuum energy zero are exposed for
bookkeeping and never enter a capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PositivityError
from .numerics import SymmetricMatrix, symmetric_eigenvalues
from .thermal_core import (
    ModeSpectrum,
    ThermalSolution,
    comb_spectrum,
    g,
    narrowband_capacity,
    optimal_allocation,
    solve_combs,
    wideband_capacity_closed,
)

__all__ = [
    "SqueezeChannel",
    "PdcPair",
    "SwapNetwork",
    "BroadbandSwapConfig",
    "squeeze_capacity",
    "squeeze_gain",
    "squeeze_gain_asymptote",
    "pdc2_capacity",
    "pdc2_gain",
    "swap_spectrum",
    "swap_solution",
    "swap_capacity",
    "swap_gain",
    "broadband_swap_spectrum",
    "broadband_swap_solution",
    "broadband_swap_capacity",
    "broadband_swap_references",
]


def _check_coupling(omega: float, xi: float) -> tuple[float, float]:
    omega, xi = float(omega), float(xi)
    if not (omega > 0 and math.isfinite(omega)):
        raise DomainError(f"omega must be finite and > 0, got {omega}")
    if not math.isfinite(xi) or abs(xi) >= omega:
        raise DomainError(f"need |xi| < omega (bounded Hamiltonian), got xi={xi}, omega={omega}")
    return omega, xi


@dataclass(frozen=True)
class SqueezeChannel:
    """Single mode with a squeezing term of strength ``xi``."""

    omega: float
    xi: float

    def __post_init__(self):
        _check_coupling(self.omega, self.xi)

    @property
    def theta(self) -> float:
        """Bogoliubov angle of the diagonalising transformation."""
        return 0.25 * math.log((self.omega + self.xi) / (self.omega - self.xi))

    @property
    def nu_eff(self) -> float:
        return math.sqrt((self.omega - self.xi) * (self.omega + self.xi))

    @property
    def ground_shift(self) -> float:
        return 0.5 * (self.omega - self.nu_eff)


@dataclass(frozen=True)
class PdcPair:
    """Two degenerate modes coupled by a down-conversion term of strength ``xi``."""

    omega: float
    xi: float

    def __post_init__(self):
        _check_coupling(self.omega, self.xi)

    @property
    def theta(self) -> float:
        return 0.25 * math.log((self.omega + self.xi) / (self.omega - self.xi))

    @property
    def nu_eff(self) -> float:
        return math.sqrt((self.omega - self.xi) * (self.omega + self.xi))

    @property
    def ground_shift(self) -> float:
        return self.omega - self.nu_eff


def squeeze_capacity(ch: SqueezeChannel, E: float) -> float:
    """g(E / sqrt(omega^2 - xi^2))."""
    return narrowband_capacity(ch.nu_eff, E)


def squeeze_gain(ch: SqueezeChannel, E: float) -> float:
    return squeeze_capacity(ch, E) - narrowband_capacity(ch.omega, E)


def squeeze_gain_asymptote(xi_ratio: float) -> float:
    """High-energy limit -log2(1 - (xi/omega)^2) / 2 of the squeezing gain."""
    if not 0 <= abs(xi_ratio) < 1:
        raise DomainError(f"need |xi/omega| < 1, got {xi_ratio}")
    return -0.5 * math.log2(1.0 - xi_ratio * xi_ratio)


def pdc2_capacity(ch: PdcPair, E: float) -> float:
    """2 g(E / (2 sqrt(omega^2 - xi^2)))."""
    return 2.0 * narrowband_capacity(ch.nu_eff, 0.5 * E)


def pdc2_gain(ch: PdcPair, E: float) -> float:
    return pdc2_capacity(ch, E) - 2.0 * narrowband_capacity(ch.omega, 0.5 * E)


@dataclass(frozen=True)
class SwapNetwork:
    """N equal-frequency modes with a symmetric, zero-diagonal hopping matrix."""

    omega: float
    coupling: SymmetricMatrix
    eigenvalues: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        omega = float(self.omega)
        if not (omega > 0 and math.isfinite(omega)):
            raise DomainError(f"omega must be finite and > 0, got {omega}")
        coupling = self.coupling
        if not isinstance(coupling, SymmetricMatrix):
            coupling = SymmetricMatrix(coupling)
            object.__setattr__(self, "coupling", coupling)
        if coupling.n < 2:
            raise DomainError("a swapping network needs at least two modes")
        if np.any(np.diag(coupling.entries) != 0.0):
            raise DomainError("coupling matrix must have an exactly zero diagonal")
        lam = symmetric_eigenvalues(coupling)
        if not np.all(omega + lam > 0):
            raise PositivityError(
                f"omega + lambda_j must be > 0; smallest eigenvalue {lam.min()!r} with omega={omega}"
            )
        lam.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)

    @property
    def n_modes(self) -> int:
        return self.coupling.n

    @classmethod
    def pair(cls, omega: float, xi: float) -> "SwapNetwork":
        """Two modes coupled by ``xi``; eigenvalues are -xi and +xi."""
        return cls(omega, SymmetricMatrix([[0.0, xi], [xi, 0.0]]))


def swap_spectrum(net: SwapNetwork) -> ModeSpectrum:
    """Normal-mode frequencies omega + lambda_j, ascending."""
    nu = net.omega + net.eigenvalues
    if not np.all(nu > 0):
        raise PositivityError("a normal mode has non-positive frequency")
    return ModeSpectrum(np.sort(nu))


def swap_solution(net: SwapNetwork, E: float):
    """Optimal energy split over the normal modes and its thermal solution."""
    return optimal_allocation(swap_spectrum(net), E)


def swap_capacity(net: SwapNetwork, E: float) -> float:
    if E == 0:
        return 0.0
    return swap_solution(net, E)[1].capacity_bits


def swap_gain(net: SwapNetwork, E: float) -> float:
    """Capacity over the uncoupled reference N g(E / (N omega))."""
    n = net.n_modes
    return swap_capacity(net, E) - n * g(E / (n * net.omega))


@dataclass(frozen=True)
class BroadbandSwapConfig:
    """N parallel combs of spacing ``delta_omega`` under the contract/stretch coupling.

    ``n_modes == 1`` is accepted as the uncoupled single comb.
    """

    n_modes: int
    r: float
    delta_omega: float = 1.0

    def __post_init__(self):
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise DomainError(f"n_modes must be a positive integer, got {self.n_modes}")
        if not 0.0 <= self.r < 1.0:
            raise DomainError(f"r must lie in [0, 1), got {self.r}")
        if not (self.delta_omega > 0 and math.isfinite(self.delta_omega)):
            raise DomainError(f"delta_omega must be > 0, got {self.delta_omega}")

    @property
    def contraction(self) -> float:
        return 1.0 - self.r

    @property
    def stretch(self) -> float:
        return 1.0 + (self.n_modes - 1) * self.r

    def branch_spacings(self) -> list[float]:
        """Spacing of each normal-mode comb, contracted branches first."""
        d = self.delta_omega
        return [self.contraction * d] * (self.n_modes - 1) + [self.stretch * d]


def broadband_swap_spectrum(cfg: BroadbandSwapConfig, k_max: int) -> ModeSpectrum:
    """Normal-mode frequencies for k = 1..k_max on every branch."""
    if int(k_max) != k_max or k_max < 1:
        raise DomainError(f"k_max must be a positive integer, got {k_max}")
    return comb_spectrum(cfg.branch_spacings(), int(k_max))


def broadband_swap_solution(cfg: BroadbandSwapConfig, E: float) -> tuple[ThermalSolution, ModeSpectrum]:
    """Thermal solution with every branch truncated by the occupancy-tail rule."""
    return solve_combs(cfg.branch_spacings(), E)


def broadband_swap_capacity(cfg: BroadbandSwapConfig, E: float) -> float:
    return broadband_swap_solution(cfg, E)[0].capacity_bits


def broadband_swap_references(cfg: BroadbandSwapConfig, E: float) -> dict[str, float]:
    """Reference curves built from the continuum wideband capacity C_wb(E, delta_omega).

    ``sqrt_n``: N independent combs sharing E. ``contracted_sqrt``: the N-1
    contracted branches alone, sqrt((N-1)/(1-r)) C_wb. ``contracted_linear``:
    the linear-in-(N-1)/(1-r) variant, kept for side-by-side inspection.
    """
    c_wb = wideband_capacity_closed(E, cfg.delta_omega)
    ratio = (cfg.n_modes - 1) / (1.0 - cfg.r)
    return {
        "c_wb": c_wb,
        "sqrt_n": math.sqrt(cfg.n_modes) * c_wb,
        "contracted_sqrt": math.sqrt(ratio) * c_wb,
        "contracted_linear": ratio * c_wb,
    }
