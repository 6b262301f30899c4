"""Broadband parametric down-conversion with a top-hat coupling band.

Signal modes k*delta_omega and idler modes omega_p - k*delta_omega are
coupled pairwise with constant strength ``xi`` inside the band
|omega - omega_p/2| < zeta*omega_p/2 and not at all outside. After
diagonalisation every in-band normal mode is lowered by

    Omega = [omega_p - sqrt(omega_p^2 - 4 xi^2)] / 2.

Three routes to the capacity are provided:

* :func:`discrete_capacity` solves the explicit finite spectrum;
* :func:`exact_capacity` replaces the mode sums by frequency integrals;
* :func:`perturbative_capacity` expands the integral form to first order in
  epsilon = 4 xi^2 / omega_p^2, giving (2 omega_p/delta_omega) [c0 + eps c1].

The integral route is written in the scaled variable beta = lambda*omega_p,
in which ln Z = (2 omega_p/delta_omega) F(beta) and the energy constraint
reads F'(beta) = -gamma with gamma = E delta_omega / (2 omega_p^2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PositivityError
from .numerics import RootProblem, bose_log, bose_log_integral, expand_bracket, find_root
from .thermal_core import LN2, ModeSpectrum, ThermalSolution, solve_thermal

__all__ = [
    "PdcBroadband",
    "PerturbativeSolution",
    "PerturbativeWarning",
    "f0",
    "df0",
    "d2f0",
    "f1",
    "df1",
    "solve_beta0",
    "beta1_correction",
    "perturbative_coefficients",
    "perturbative_capacity",
    "scaled_ln_partition",
    "solve_exact",
    "exact_capacity",
    "discrete_spectrum",
    "discrete_capacity",
    "asymptotic_capacity",
    "EPSILON_WARN",
    "EPSILON_MAX",
]

EPSILON_WARN = 0.1
EPSILON_MAX = 0.5


class PerturbativeWarning(UserWarning):
    """The coupling is large enough that O(epsilon^2) terms are not negligible."""


@dataclass(frozen=True)
class PdcBroadband:
    """Pump frequency, mode spacing, fractional band ``zeta`` and in-band coupling ``xi``."""

    omega_p: float
    delta_omega: float
    zeta: float
    xi: float

    def __post_init__(self):
        for name in ("omega_p", "delta_omega"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and > 0, got {v}")
        if not 0.0 < self.zeta < 1.0:
            raise DomainError(f"zeta must lie in (0, 1), got {self.zeta}")
        if not (self.xi >= 0 and math.isfinite(self.xi)):
            raise DomainError(f"xi must be finite and >= 0, got {self.xi}")
        if self.epsilon >= 1.0 - self.zeta**2:
            raise PositivityError(
                f"epsilon={self.epsilon:.6g} must stay below 1 - zeta^2 = {1 - self.zeta**2:.6g}, "
                "otherwise the lowest in-band mode has non-positive frequency"
            )

    @property
    def epsilon(self) -> float:
        return 4.0 * self.xi**2 / self.omega_p**2

    @property
    def Omega(self) -> float:
        """In-band frequency shift, in the cancellation-free form 2 xi^2 / (omega_p + sqrt(...))."""
        root = math.sqrt(self.omega_p**2 - 4.0 * self.xi**2)
        return 2.0 * self.xi**2 / (self.omega_p + root)

    @property
    def pump_ratio(self) -> float:
        return self.omega_p / self.delta_omega

    def gamma(self, E: float) -> float:
        return E * self.delta_omega / (2.0 * self.omega_p**2)

    def energy_for_gamma(self, gamma: float) -> float:
        return 2.0 * gamma * self.omega_p**2 / self.delta_omega


@dataclass(frozen=True)
class PerturbativeSolution:
    beta0: float
    beta1: float
    c0_bits: float
    c1_bits: float
    gamma: float
    zeta: float


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not (beta > 0 and math.isfinite(beta)):
        raise DomainError(f"beta must be finite and > 0, got {beta}")
    return beta


def _check_zeta(zeta: float) -> float:
    zeta = float(zeta)
    if not 0.0 <= zeta < 1.0:
        raise DomainError(f"zeta must lie in [0, 1), got {zeta}")
    return zeta


def f0(beta: float) -> float:
    """(1/beta) * integral_0^beta ln[1/(1 - e^{-x})] dx."""
    beta = _check_beta(beta)
    return bose_log_integral(0.0, beta) / beta


def df0(beta: float) -> float:
    # d/dbeta of I(beta)/beta with I' = bose_log
    beta = _check_beta(beta)
    return (bose_log(beta) - f0(beta)) / beta


def _bose(x: float) -> float:
    # 1/(e^x - 1) without overflow
    return math.exp(-x) / -math.expm1(-x)


def d2f0(beta: float) -> float:
    beta = _check_beta(beta)
    return (-_bose(beta) - 2.0 * df0(beta)) / beta


def _log1m_exp(x: float) -> float:
    # ln(1 - e^{-x}), x > 0; the two branches keep full relative precision
    if x > LN2:
        return math.log1p(-math.exp(-x))
    return math.log(-math.expm1(-x))


def f1(beta: float, zeta: float) -> float:
    """(1/4) ln[(1 - e^{-beta(1+zeta)/2}) / (1 - e^{-beta(1-zeta)/2})]."""
    beta, zeta = _check_beta(beta), _check_zeta(zeta)
    if zeta == 0.0:
        return 0.0
    hi, lo = 0.5 * (1.0 + zeta), 0.5 * (1.0 - zeta)
    return 0.25 * (_log1m_exp(beta * hi) - _log1m_exp(beta * lo))


def df1(beta: float, zeta: float) -> float:
    beta, zeta = _check_beta(beta), _check_zeta(zeta)
    if zeta == 0.0:
        return 0.0
    hi, lo = 0.5 * (1.0 + zeta), 0.5 * (1.0 - zeta)
    return 0.25 * (hi * _bose(beta * hi) - lo * _bose(beta * lo))


def solve_beta0(gamma: float) -> float:
    """Root of f0'(beta) = -gamma (zeroth-order energy constraint)."""
    gamma = float(gamma)
    if not (gamma > 0 and math.isfinite(gamma)):
        raise DomainError(f"gamma must be finite and > 0, got {gamma}")

    def residual(beta: float) -> float:
        return df0(beta) + gamma

    # f0' rises monotonically from -inf to 0; pi/sqrt(6 gamma) is the small-gamma root
    guess = min(math.pi / math.sqrt(6.0 * gamma), 1.0 / gamma)
    lo, hi = expand_bracket(residual, guess, decreasing=False)
    return find_root(RootProblem(residual, lo, hi, tol_abs=1e-15 * lo))


def beta1_correction(beta0: float, zeta: float) -> float:
    """First-order shift of beta: -f1'(beta0) / f0''(beta0)."""
    beta0 = _check_beta(beta0)
    return -df1(beta0, zeta) / d2f0(beta0)


def perturbative_coefficients(gamma: float, zeta: float) -> PerturbativeSolution:
    """c0(gamma) and c1(gamma, zeta) in bits, with the beta expansion behind them."""
    zeta = _check_zeta(zeta)
    beta0 = solve_beta0(gamma)
    return PerturbativeSolution(
        beta0=beta0,
        beta1=beta1_correction(beta0, zeta),
        c0_bits=(beta0 * gamma + f0(beta0)) / LN2,
        c1_bits=f1(beta0, zeta) / LN2,
        gamma=float(gamma),
        zeta=zeta,
    )


def _check_energy(E: float) -> float:
    E = float(E)
    if not (E > 0 and math.isfinite(E)):
        raise DomainError(f"energy must be finite and > 0, got {E}")
    return E


def perturbative_capacity(p: PdcBroadband, E: float) -> tuple[float, PerturbativeSolution]:
    """(2 omega_p/delta_omega) [c0(gamma) + epsilon c1(gamma, zeta)] in bits.

    Warns with :class:`PerturbativeWarning` for epsilon >= 0.1 and refuses
    epsilon >= 0.5.
    """
    E = _check_energy(E)
    eps = p.epsilon
    if eps >= EPSILON_MAX:
        raise DomainError(f"epsilon={eps:.4g} is outside the perturbative range (< {EPSILON_MAX})")
    if eps >= EPSILON_WARN:
        warnings.warn(
            f"epsilon={eps:.4g}: second-order corrections are no longer negligible",
            PerturbativeWarning,
            stacklevel=2,
        )
    sol = perturbative_coefficients(p.gamma(E), p.zeta)
    return 2.0 * p.pump_ratio * (sol.c0_bits + eps * sol.c1_bits), sol


def _segments(p: PdcBroadband) -> list[tuple[float, float]]:
    # integration limits in units of omega_p; the in-band one is shifted by Omega
    w = p.Omega / p.omega_p
    a0, b0 = 0.5 * (1.0 - p.zeta), 0.5 * (1.0 + p.zeta)
    return [(0.0, a0), (a0 - w, b0 - w), (b0, 1.0)]


def scaled_ln_partition(p: PdcBroadband, beta: float) -> tuple[float, float]:
    """F(beta) and F'(beta), where ln Z = (2 omega_p/delta_omega) F(beta).

    Each segment is integrated directly; the derivative uses
    d/dbeta int_{beta u0}^{beta u1} L = u1 L(beta u1) - u0 L(beta u0).
    """
    beta = _check_beta(beta)
    J = 0.0
    dJ = 0.0
    for u0, u1 in _segments(p):
        J += bose_log_integral(beta * u0, beta * u1)
        dJ += u1 * bose_log(beta * u1)
        if u0 > 0.0:
            dJ -= u0 * bose_log(beta * u0)
    F = J / beta
    return F, (dJ - F) / beta


def solve_exact(p: PdcBroadband, E: float) -> ThermalSolution:
    """Lagrange multiplier, ln Z and capacity from the integral partition function.

    ``beta`` in the result is the unscaled multiplier lambda (energy units
    of the inputs); ``occupancies`` is empty.
    """
    E = _check_energy(E)
    gamma = p.gamma(E)

    def residual(beta: float) -> float:
        return scaled_ln_partition(p, beta)[1] + gamma

    guess = min(math.pi / math.sqrt(6.0 * gamma), 1.0 / gamma)
    lo, hi = expand_bracket(residual, guess, decreasing=False)
    beta = find_root(RootProblem(residual, lo, hi, tol_abs=1e-15 * lo))
    F, _ = scaled_ln_partition(p, beta)
    ln_z = 2.0 * p.pump_ratio * F
    lam = beta / p.omega_p
    return ThermalSolution(beta=lam, energy=E, ln_z=ln_z, capacity_bits=(lam * E + ln_z) / LN2)


def exact_capacity(p: PdcBroadband, E: float) -> float:
    return solve_exact(p, E).capacity_bits


def discrete_spectrum(p: PdcBroadband) -> ModeSpectrum:
    """Signal and idler normal-mode frequencies for every k with 0 < k delta_omega < omega_p."""
    n = int(math.floor(p.pump_ratio))
    k = np.arange(1, n + 1, dtype=float)
    wk = k * p.delta_omega
    wk = wk[wk < p.omega_p * (1.0 - 1e-12)]
    if wk.size == 0:
        raise DomainError("delta_omega must be smaller than omega_p")
    in_band = np.abs(wk - 0.5 * p.omega_p) < 0.5 * p.zeta * p.omega_p
    shift = np.where(in_band, p.Omega, 0.0)
    return ModeSpectrum(np.concatenate([wk - shift, p.omega_p - wk - shift]))


def discrete_capacity(p: PdcBroadband, E: float) -> float:
    return solve_thermal(discrete_spectrum(p), _check_energy(E)).capacity_bits


def asymptotic_capacity(p: PdcBroadband, E: float) -> float:
    """Two uncoupled infinite combs sharing E: (2 pi/ln 2)(omega_p/delta_omega) sqrt(2 gamma/3)."""
    E = _check_energy(E)
    return 2.0 * math.pi / LN2 * p.pump_ratio * math.sqrt(2.0 * p.gamma(E) / 3.0)
