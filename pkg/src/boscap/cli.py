"""Command-line front end: single capacity queries and CSV sweeps.

Every command builds a :class:`CsvTable`; ``main`` only parses flags,
writes the table and maps failures to exit codes (1 usage, 2 domain or
numerical failure). Output bytes depend on the arguments alone.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import broadband_pdc as pdc
from .errors import BoscapError, DomainError, IdentityViolation
from .nonlinear_spectra import (
    BroadbandSwapConfig,
    PdcPair,
    SqueezeChannel,
    SwapNetwork,
    broadband_swap_references,
    broadband_swap_solution,
    pdc2_capacity,
    swap_solution,
    swap_spectrum,
)
from .thermal_core import (
    LN2,
    ModeSpectrum,
    g,
    narrowband_solution,
    solve_thermal,
    verify_capacity_identity,
)

__all__ = [
    "SweepGrid",
    "CsvTable",
    "parse_grid",
    "cmd_narrowband",
    "cmd_squeeze",
    "cmd_pdc2",
    "cmd_swap",
    "cmd_fig1",
    "cmd_fig2",
    "cmd_fig3",
    "cmd_pdc_exact",
    "cmd_pdc_discrete",
    "cmd_swapband",
    "main",
]


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class SweepGrid:
    name: str
    start: float
    stop: float
    points: int
    log: bool = False

    def __post_init__(self):
        if self.points < 2:
            raise DomainError(f"grid {self.name}: need at least 2 points, got {self.points}")
        if not self.start < self.stop:
            raise DomainError(f"grid {self.name}: need start < stop, got {self.start}:{self.stop}")
        if self.log and self.start <= 0:
            raise DomainError(f"grid {self.name}: log spacing needs positive endpoints")

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


def parse_grid(name: str, text: str) -> SweepGrid:
    """Parse ``start:stop:points[:log]``."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
        raise UsageError(f"--{name}: expected start:stop:points[:log], got {text!r}")
    try:
        start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"--{name}: {exc}") from None
    return SweepGrid(name, start, stop, points, log=len(parts) == 4 and parts[3] == "log")


def _fmt(value: float) -> str:
    return f"{float(value):#.12g}"


@dataclass
class CsvTable:
    header: tuple[str, ...]
    rows: list[tuple[float, ...]] = field(default_factory=list)

    def add(self, *values: float) -> None:
        if len(values) != len(self.header):
            raise ValueError(f"row has {len(values)} values, header has {len(self.header)}")
        self.rows.append(tuple(float(v) for v in values))

    def column(self, name: str) -> list[float]:
        i = self.header.index(name)
        return [row[i] for row in self.rows]

    def to_csv(self) -> str:
        lines = [",".join(self.header)]
        lines.extend(",".join(_fmt(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"


def _check_narrowband(omega: float, energy: float) -> float:
    sol = narrowband_solution(omega, energy)
    verify_capacity_identity(sol, ModeSpectrum([omega]) if energy > 0 else None)
    return sol.capacity_bits


def cmd_narrowband(omega: float, energy: float) -> CsvTable:
    table = CsvTable(("omega", "energy", "capacity_bits"))
    table.add(omega, energy, _check_narrowband(omega, energy))
    return table


def cmd_squeeze(omega: float, xi: float, energy: float) -> CsvTable:
    ch = SqueezeChannel(omega, xi)
    c = _check_narrowband(ch.nu_eff, energy)
    c_nb = _check_narrowband(omega, energy)
    table = CsvTable(("omega", "xi", "energy", "nu_eff", "capacity_bits", "gain_bits"))
    table.add(omega, xi, energy, ch.nu_eff, c, c - c_nb)
    return table


def cmd_pdc2(omega: float, xi: float, energy: float) -> CsvTable:
    ch = PdcPair(omega, xi)
    c = pdc2_capacity(ch, energy)
    # each of the two degenerate modes carries half the energy
    if abs(c - 2.0 * _check_narrowband(ch.nu_eff, 0.5 * energy)) > 1e-10 * (1 + c):
        raise IdentityViolation("two-mode capacity disagrees with its thermal solution")
    table = CsvTable(("omega", "xi", "energy", "nu_eff", "capacity_bits", "gain_bits"))
    table.add(omega, xi, energy, ch.nu_eff, c, c - 2.0 * g(0.5 * energy / omega))
    return table


def _swap_point(omega: float, xi: float, energy: float) -> tuple[float, float, float]:
    net = SwapNetwork.pair(omega, xi)
    if energy == 0:
        return 0.0, 0.0, 0.0
    alloc, sol = swap_solution(net, energy)
    verify_capacity_identity(sol, swap_spectrum(net))
    e = alloc.energies
    return sol.capacity_bits, float(e[0]), float(e[1])


def cmd_swap(omega: float, xi: float, energy: float) -> CsvTable:
    c, e_low, e_high = _swap_point(omega, xi, energy)
    table = CsvTable(("omega", "xi", "energy", "capacity_bits", "e_low", "e_high", "delta_c_bits"))
    table.add(omega, xi, energy, c, e_low, e_high, c - 2.0 * g(0.5 * energy / omega))
    return table


def cmd_fig1(energy_grid: SweepGrid, xi_grid: SweepGrid) -> CsvTable:
    """Squeezing gain C - C_nb on an (E/omega, xi/omega) grid, omega = 1."""
    table = CsvTable(("energy_ratio", "xi_ratio", "gain_bits"))
    for e in energy_grid.values():
        for x in xi_grid.values():
            ch = SqueezeChannel(1.0, x)
            gain = _check_narrowband(ch.nu_eff, e) - _check_narrowband(1.0, e)
            table.add(e, x, gain)
    return table


def _pdc_from_ratio(zeta: float, epsilon: float, pump_ratio: float) -> pdc.PdcBroadband:
    if not epsilon >= 0:
        raise DomainError(f"epsilon must be >= 0, got {epsilon}")
    if not pump_ratio > 0:
        raise DomainError(f"pump ratio must be > 0, got {pump_ratio}")
    return pdc.PdcBroadband(1.0, 1.0 / pump_ratio, zeta, 0.5 * math.sqrt(epsilon))


def cmd_fig2(
    gamma_grid: SweepGrid, zeta: float = 0.5, epsilon: float = 0.1, pump_ratio: float = 100.0
) -> CsvTable:
    """c0, c1 and the first-order capacity against gamma (omega_p = 1)."""
    p = _pdc_from_ratio(zeta, epsilon, pump_ratio)
    table = CsvTable(("gamma", "c0_bits", "c1_bits", "capacity_bits", "c_asym_bits"))
    for gamma in gamma_grid.values():
        energy = p.energy_for_gamma(gamma)
        cap, sol = pdc.perturbative_capacity(p, energy)
        lhs = (sol.c0_bits + epsilon * sol.c1_bits) * LN2
        rhs = sol.beta0 * gamma + pdc.f0(sol.beta0) + epsilon * pdc.f1(sol.beta0, zeta)
        if abs(lhs - rhs) > 1e-10 * (1.0 + abs(rhs)):
            raise IdentityViolation(f"perturbative capacity identity fails at gamma={gamma}")
        table.add(gamma, sol.c0_bits, sol.c1_bits, cap, pdc.asymptotic_capacity(p, energy))
    return table


def cmd_fig3(energy_grid: SweepGrid, xi_grid: SweepGrid) -> CsvTable:
    """Two-mode swapping gain C - 2 g(E/2) on an (E/omega, xi/omega) grid, omega = 1."""
    table = CsvTable(("energy_ratio", "xi_ratio", "delta_c_bits"))
    for e in energy_grid.values():
        for x in xi_grid.values():
            c, _, _ = _swap_point(1.0, x, e)
            table.add(e, x, c - 2.0 * g(0.5 * e))
    return table


def cmd_pdc_exact(omega_p: float, delta_omega: float, zeta: float, xi: float, energy: float) -> CsvTable:
    p = pdc.PdcBroadband(omega_p, delta_omega, zeta, xi)
    sol = pdc.solve_exact(p, energy)
    F, _ = pdc.scaled_ln_partition(p, sol.beta * omega_p)
    rhs = sol.beta * energy + 2.0 * p.pump_ratio * F
    if abs(sol.capacity_bits * LN2 - rhs) > 1e-10 * (1.0 + abs(rhs)):
        raise IdentityViolation("integral capacity identity fails")
    table = CsvTable(
        ("omega_p", "delta_omega", "zeta", "xi", "energy", "gamma", "epsilon",
         "capacity_bits", "c_asym_bits")
    )
    table.add(omega_p, delta_omega, zeta, xi, energy, p.gamma(energy), p.epsilon,
              sol.capacity_bits, pdc.asymptotic_capacity(p, energy))
    return table


def cmd_pdc_discrete(omega_p: float, delta_omega: float, zeta: float, xi: float, energy: float) -> CsvTable:
    p = pdc.PdcBroadband(omega_p, delta_omega, zeta, xi)
    spectrum = pdc.discrete_spectrum(p)
    sol = solve_thermal(spectrum, energy)
    verify_capacity_identity(sol, spectrum)
    table = CsvTable(
        ("omega_p", "delta_omega", "zeta", "xi", "energy", "gamma", "epsilon", "modes",
         "capacity_bits")
    )
    table.add(omega_p, delta_omega, zeta, xi, energy, p.gamma(energy), p.epsilon,
              len(spectrum), sol.capacity_bits)
    return table


def cmd_swapband(n_modes: int, r_values: Iterable[float], energy: float, delta_omega: float = 1.0) -> CsvTable:
    """Broadband swapping capacity with the sqrt(N) and contracted-branch reference curves."""
    table = CsvTable(
        ("n_modes", "r", "energy", "delta_omega", "capacity_bits", "sqrt_n_cwb_bits",
         "sqrt_contracted_cwb_bits", "linear_contracted_cwb_bits")
    )
    for r in r_values:
        cfg = BroadbandSwapConfig(n_modes, float(r), delta_omega)
        sol, spectrum = broadband_swap_solution(cfg, energy)
        verify_capacity_identity(sol, spectrum)
        ref = broadband_swap_references(cfg, energy)
        table.add(n_modes, r, energy, delta_omega, sol.capacity_bits, ref["sqrt_n"],
                  ref["contracted_sqrt"], ref["contracted_linear"])
    return table


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="boscap", description="Capacity of linear and nonlinear bosonic systems.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--output", default=None, help="CSV destination (default: stdout)")
        return sp

    sp = add("narrowband", "single free mode")
    sp.add_argument("--omega", type=float, required=True)
    sp.add_argument("--energy", type=float, required=True)

    for name, help_ in (("squeeze", "squeezing Hamiltonian"), ("pdc2", "two-mode down-conversion"),
                        ("swap", "two-mode swapping Hamiltonian")):
        sp = add(name, help_)
        sp.add_argument("--omega", type=float, default=1.0)
        sp.add_argument("--xi", type=float, required=True)
        sp.add_argument("--energy", type=float, required=True)

    sp = add("fig1", "squeezing gain sweep")
    sp.add_argument("--energy-grid", default="1e-2:1e6:33:log")
    sp.add_argument("--xi-grid", default="0:0.9:10")

    sp = add("fig2", "broadband down-conversion c0/c1 sweep")
    sp.add_argument("--gamma-grid", default="1e-4:10:41:log")
    sp.add_argument("--zeta", type=float, default=0.5)
    sp.add_argument("--epsilon", type=float, default=0.1)
    sp.add_argument("--pump-ratio", type=float, default=100.0, help="omega_p / delta_omega")

    sp = add("fig3", "swapping gain sweep")
    sp.add_argument("--energy-grid", default="1e-2:1e3:26:log")
    sp.add_argument("--xi-grid", default="0:0.99:12")

    for name in ("pdc-exact", "pdc-discrete"):
        sp = add(name, "broadband down-conversion, integral or discrete spectrum")
        sp.add_argument("--omega-p", type=float, default=1.0)
        sp.add_argument("--delta-omega", type=float, required=True)
        sp.add_argument("--zeta", type=float, default=0.5)
        sp.add_argument("--xi", type=float, default=0.0)
        sp.add_argument("--energy", type=float, required=True)

    sp = add("swapband", "broadband swapping with contraction factor r")
    sp.add_argument("--n-modes", type=int, required=True)
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--r", type=float)
    group.add_argument("--r-grid")
    sp.add_argument("--energy", type=float, required=True)
    sp.add_argument("--delta-omega", type=float, default=1.0)
    return parser


def _run(args: argparse.Namespace) -> CsvTable:
    c = args.command
    if c == "narrowband":
        return cmd_narrowband(args.omega, args.energy)
    if c == "squeeze":
        return cmd_squeeze(args.omega, args.xi, args.energy)
    if c == "pdc2":
        return cmd_pdc2(args.omega, args.xi, args.energy)
    if c == "swap":
        return cmd_swap(args.omega, args.xi, args.energy)
    if c == "fig1":
        return cmd_fig1(parse_grid("energy-grid", args.energy_grid), parse_grid("xi-grid", args.xi_grid))
    if c == "fig2":
        return cmd_fig2(parse_grid("gamma-grid", args.gamma_grid), args.zeta, args.epsilon, args.pump_ratio)
    if c == "fig3":
        return cmd_fig3(parse_grid("energy-grid", args.energy_grid), parse_grid("xi-grid", args.xi_grid))
    if c == "pdc-exact":
        return cmd_pdc_exact(args.omega_p, args.delta_omega, args.zeta, args.xi, args.energy)
    if c == "pdc-discrete":
        return cmd_pdc_discrete(args.omega_p, args.delta_omega, args.zeta, args.xi, args.energy)
    if c == "swapband":
        rs = [args.r] if args.r is not None else parse_grid("r-grid", args.r_grid).values()
        return cmd_swapband(args.n_modes, rs, args.energy, args.delta_omega)
    raise UsageError(f"unknown command {c!r}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", pdc.PerturbativeWarning)
            table = _run(args)
    except UsageError as exc:
        print(f"boscap: usage error: {exc}", file=sys.stderr)
        return 1
    except (BoscapError, OverflowError, ZeroDivisionError) as exc:
        print(f"boscap: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    seen = set()
    for w in caught:
        msg = str(w.message)
        if msg not in seen:
            seen.add(msg)
            print(f"boscap: warning: {msg}", file=sys.stderr)
    text = table.to_csv()
    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
