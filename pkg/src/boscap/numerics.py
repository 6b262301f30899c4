"""Shared numerical kernels: bracketed root finding, quadrature for
integrands with a logarithmic endpoint singularity, and a cyclic Jacobi
eigensolver for small dense symmetric matrices.

Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, NoConvergence, NonFinite, NoSignChange

__all__ = [
    "RootProblem",
    "SymmetricMatrix",
    "find_root",
    "expand_bracket",
    "integrate_log_singular",
    "bose_log",
    "bose_log_integral",
    "symmetric_eigenvalues",
    "ROOT_TOL_ABS",
    "ROOT_MAX_ITER",
    "SERIES_CROSSOVER",
    "JACOBI_MAX_SWEEPS",
    "JACOBI_REL_TOL",
]

ROOT_TOL_ABS = 1e-12
ROOT_TOL_REL = 4 * np.finfo(float).eps
ROOT_MAX_ITER = 200
QUAD_TOL_REL = 1e-12
QUAD_LIMIT = 500
SERIES_CROSSOVER = 1e-3
TAIL_START = 2.0
JACOBI_MAX_SWEEPS = 30
JACOBI_REL_TOL = 1e-12
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class RootProblem:
    """A scalar root-finding problem on a bracket of positive reals.

    The objective must change sign between ``bracket_lo`` and
    ``bracket_hi``. ``tol_rel`` tightens the termination test for roots
    far from unity (Brent stops once the bracket is narrower than
    ``tol_abs + tol_rel * |x|``).
    """

    objective: Callable[[float], float]
    bracket_lo: float
    bracket_hi: float
    tol_abs: float = ROOT_TOL_ABS
    max_iter: int = ROOT_MAX_ITER
    tol_rel: float = ROOT_TOL_REL


def find_root(problem: RootProblem) -> float:
    """Solve ``problem`` with Brent's method.

    Returns the root ``r`` with ``bracket_lo <= r <= bracket_hi``.

    Raises
    ------
    DomainError
        If the bracket is not made of strictly positive, ordered endpoints.
    NoSignChange
        If the objective has the same sign at both endpoints.
    NoConvergence
        If ``max_iter`` iterations do not suffice.
    """
    lo, hi = float(problem.bracket_lo), float(problem.bracket_hi)
    if not (lo > 0 and hi > 0 and math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError(f"bracket endpoints must be finite and positive, got [{lo}, {hi}]")
    if lo > hi:
        lo, hi = hi, lo
    f_lo = problem.objective(lo)
    f_hi = problem.objective(hi)
    if not (math.isfinite(f_lo) and math.isfinite(f_hi)):
        raise NonFinite(f"objective is not finite at the bracket ends ({f_lo}, {f_hi})")
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise NoSignChange(
            f"objective does not change sign on [{lo}, {hi}]: f={f_lo:.3g}, {f_hi:.3g}"
        )
    root, info = optimize.brentq(
        problem.objective,
        lo,
        hi,
        xtol=problem.tol_abs,
        rtol=max(problem.tol_rel, ROOT_TOL_REL),
        maxiter=problem.max_iter,
        full_output=True,
        disp=False,
    )
    if not info.converged:
        raise NoConvergence(
            f"Brent iteration did not converge in {problem.max_iter} steps ({info.flag})"
        )
    return float(root)


def expand_bracket(
    objective: Callable[[float], float],
    guess: float,
    decreasing: bool = True,
    max_steps: int = 2000,
) -> tuple[float, float]:
    """Grow a bracket around ``guess`` by halving/doubling until the sign flips.

    ``decreasing`` states the monotone direction of ``objective``: for a
    decreasing function the lower end must be positive and the upper end
    negative.
    """
    if not (guess > 0 and math.isfinite(guess)):
        raise DomainError(f"initial guess must be finite and positive, got {guess}")
    sign = 1.0 if decreasing else -1.0
    lo = hi = float(guess)
    # each failed probe becomes the opposite end, so the bracket stays one step wide
    for _ in range(max_steps):
        if sign * objective(lo) > 0:
            break
        hi, lo = lo, lo * 0.5
    else:
        raise NoConvergence("could not extend the bracket downwards")
    for _ in range(max_steps):
        if sign * objective(hi) < 0:
            break
        lo, hi = hi, hi * 2.0
    else:
        raise NoConvergence("could not extend the bracket upwards")
    return lo, hi


def integrate_log_singular(
    f: Callable[[float], float], a: float, b: float, tol_rel: float = QUAD_TOL_REL
) -> float:
    """Adaptive Gauss-Kronrod estimate of the integral of ``f`` over [a, b].

    Integrable logarithmic singularities at either endpoint are absorbed
    by QUADPACK's extrapolation (the rules never sample the endpoints);
    ``b`` may be ``inf``.
    """
    if not a < b:
        raise DomainError(f"need a < b, got a={a}, b={b}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, abserr, _info, *msg = integrate.quad(
            f, a, b, epsabs=0.0, epsrel=tol_rel, limit=QUAD_LIMIT, full_output=True
        )
    ier = _quad_ier(msg)
    if not math.isfinite(value) or not math.isfinite(abserr):
        raise NonFinite(f"quadrature produced a non-finite value on [{a}, {b}]")
    # roundoff-limited (ier 2) is accepted when the error estimate still meets a
    # slightly relaxed tolerance
    if ier not in (0, 2) or abserr > max(100 * tol_rel * abs(value), 1e-300):
        raise NonFinite(
            f"quadrature on [{a}, {b}] failed: value={value!r}, abserr={abserr:.3g}, ier={ier}"
        )
    return float(value)


def _quad_ier(msg) -> int:
    # quad(full_output=True) returns (y, abserr, infodict) on success and
    # (y, abserr, infodict, message[, explain]) otherwise
    if not msg:
        return 0
    text = str(msg[0]).lower()
    if "roundoff" in text:
        return 2
    return 1


def bose_log(x):
    """ln[1/(1 - e^{-x})] for x > 0, vectorised and accurate at both ends."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(x > _LN2, -np.log1p(-np.exp(-x)), -np.log(-np.expm1(-x)))
    return out if out.ndim else float(out)


def _bose_log_series(h: float) -> float:
    # integral over [0, h] of -ln x + x/2 - x^2/24 + x^4/2880
    if h == 0.0:
        return 0.0
    return h - h * math.log(h) + h * h / 4.0 - h**3 / 72.0 + h**5 / 14400.0


def bose_log_integral(t0: float, t1: float, tol_rel: float = QUAD_TOL_REL) -> float:
    """Integral of ln[1/(1 - e^{-x})] over [t0, t1], 0 <= t0 <= t1.

    Below ``SERIES_CROSSOVER`` the integrand is replaced by its small-x
    expansion and integrated analytically, and above ``TAIL_START`` the
    exponential series is integrated term by term; the rest goes to the
    adaptive rule.
    """
    if not (0.0 <= t0 <= t1) or not math.isfinite(t0):
        raise DomainError(f"need 0 <= t0 <= t1, got t0={t0}, t1={t1}")
    total = 0.0
    if t0 < SERIES_CROSSOVER:
        h = min(t1, SERIES_CROSSOVER)
        total += _bose_log_series(h) - _bose_log_series(t0)
        t0 = h
    mid = min(t1, TAIL_START)
    if mid > t0:
        total += integrate_log_singular(bose_log, t0, mid, tol_rel)
        t0 = mid
    if t1 > t0:
        # ln[1/(1-e^{-x})] = sum_n e^{-nx}/n, truncated once e^{-n t0} < e^{-40}
        terms = range(int(40.0 / t0) + 2, 0, -1)
        total += math.fsum(
            (math.exp(-n * t0) - math.exp(-n * t1)) / (n * n) for n in terms
        )
    return total


@dataclass(frozen=True)
class SymmetricMatrix:
    """Dense real symmetric matrix; symmetry is checked exactly."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DomainError(f"expected a non-empty square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("matrix entries must be finite")
        if not np.array_equal(m, m.T):
            raise DomainError("matrix is not exactly symmetric")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_upper(cls, values) -> "SymmetricMatrix":
        """Build by mirroring the upper triangle of ``values``."""
        m = np.triu(np.asarray(values, dtype=float))
        return cls(m + np.triu(m, 1).T)


def symmetric_eigenvalues(m: SymmetricMatrix, max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues of ``m`` in ascending order, by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``JACOBI_REL_TOL`` times the Frobenius norm of the input.
    """
    a = np.array(m.entries, dtype=float)
    n = a.shape[0]
    scale = np.linalg.norm(a)
    target = JACOBI_REL_TOL * scale
    if n == 1 or scale == 0.0:
        return np.sort(np.diag(a))

    off_mask = ~np.eye(n, dtype=bool)

    def off_norm() -> float:
        return float(np.linalg.norm(a[off_mask]))

    for _ in range(max_sweeps):
        if off_norm() <= target:
            return np.sort(np.diag(a))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(diff) > 1e150 * abs(apq):
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # the short form of the diagonal update loses less than the full rotation
                new_pp = a[p, p] - t * apq
                new_qq = a[q, q] + t * apq
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                a[p, p], a[q, q] = new_pp, new_qq
    if off_norm() <= target:
        return np.sort(np.diag(a))
    raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
