"""Information capacity of linear and nonlinear bosonic systems.

The capacity of a noiseless bosonic channel at fixed mean energy is the
entropy of the thermal state of its free-field normal modes. Quadratic
nonlinearities change those normal-mode frequencies, and with them the
capacity; this package computes both.
"""

from .errors import (
    BoscapError,
    DomainError,
    IdentityViolation,
    NoConvergence,
    NoSignChange,
    NonFinite,
    NumericError,
    PositivityError,
    TruncationError,
)
from .thermal_core import (
    Allocation,
    ModeSpectrum,
    ThermalSolution,
    energy_at,
    g,
    ln_partition,
    narrowband_capacity,
    optimal_allocation,
    rate_from_power,
    solve_thermal,
    wideband_capacity,
    wideband_capacity_closed,
)
from .nonlinear_spectra import (
    BroadbandSwapConfig,
    PdcPair,
    SqueezeChannel,
    SwapNetwork,
    broadband_swap_capacity,
    pdc2_capacity,
    squeeze_capacity,
    squeeze_gain,
    swap_capacity,
    swap_gain,
)
from .broadband_pdc import (
    PdcBroadband,
    asymptotic_capacity,
    discrete_capacity,
    exact_capacity,
    perturbative_capacity,
)

__version__ = "0.1.0"
