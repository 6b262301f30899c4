import math

import numpy as np
import pytest

from boscap.errors import DomainError, TruncationError
from boscap.fock_oracle import (
    TAIL_BOUND,
    TruncatedThermal,
    constraint_directions,
    entropy_bits,
    n_max_for,
    perturbation_deltas,
    truncated_entropy,
    truncated_ln_partition,
    variational_check,
)
from boscap.thermal_core import ModeSpectrum, g, ln_partition
from oracles import thermal_entropy_sum


def thermal_n_max(nu, E):
    return n_max_for(nu, math.log1p(nu / E) / nu)


class TestTruncatedPartition:
    def test_geometric_two(self):
        x = math.log(2)
        assert truncated_ln_partition(1.0, x, n_max_for(1.0, x)) == pytest.approx(math.log(2), abs=1e-10)

    def test_beta_five(self):
        val = truncated_ln_partition(1.0, 5.0, n_max_for(1.0, 5.0))
        assert val == pytest.approx(-math.log(-math.expm1(-5.0)), abs=1e-12)
        assert val == pytest.approx(0.0067607, abs=1e-7)

    def test_too_short(self):
        with pytest.raises(TruncationError):
            truncated_ln_partition(1.0, 0.1, 10)

    def test_rule_is_minimal(self):
        for nu, beta in [(1.0, 0.1), (0.3, 2.0), (2.0, 7.0)]:
            n = n_max_for(nu, beta)
            x = nu * beta
            assert math.exp(-x * (n + 1)) < TAIL_BOUND * -math.expm1(-x)
            if n > 0:
                assert math.exp(-x * n) >= TAIL_BOUND * -math.expm1(-x)
                with pytest.raises(TruncationError):
                    truncated_ln_partition(nu, beta, n - 1)

    def test_domain(self):
        with pytest.raises(DomainError):
            truncated_ln_partition(-1.0, 1.0, 10)


class TestTruncatedThermal:
    def test_probabilities(self):
        t = TruncatedThermal(1.0, math.log(2))
        assert math.fsum(t.probabilities) == pytest.approx(1.0, abs=1e-15)
        np.testing.assert_allclose(t.probabilities[1:] / t.probabilities[:-1], 0.5, rtol=1e-14)
        assert t.mean_occupancy == pytest.approx(1.0, abs=1e-10)

    def test_explicit_short_ladder_rejected(self):
        with pytest.raises(TruncationError):
            TruncatedThermal(1.0, 0.5, n_max=3)

    def test_entropy_examples(self):
        assert truncated_entropy(TruncatedThermal(1.0, math.log(2))) == pytest.approx(2.0, abs=1e-9)
        assert truncated_entropy(TruncatedThermal(1.0, 60.0)) == pytest.approx(0.0, abs=1e-20)
        t = TruncatedThermal(1.0, math.log(2.25 / 1.25))
        assert truncated_entropy(t) == pytest.approx(2.2299211346, abs=1e-9)
        assert truncated_entropy(t) == pytest.approx(thermal_entropy_sum(math.log(2.25 / 1.25)), abs=1e-10)

    def test_entropy_bits(self):
        assert entropy_bits([0.5, 0.5]) == pytest.approx(1.0, rel=1e-15)
        assert entropy_bits([1.0, 0.0, 0.0]) == 0.0


def test_random_pairs_against_closed_forms():
    rng = np.random.default_rng(7)
    for _ in range(100):
        nu = 10 ** rng.uniform(-1, 1)
        beta = 10 ** rng.uniform(-1, 1)
        t = TruncatedThermal(nu, beta)
        assert truncated_ln_partition(nu, beta, t.n_max) == pytest.approx(
            ln_partition(ModeSpectrum([nu]), beta), abs=1e-9
        )
        assert truncated_entropy(t) == pytest.approx(g(t.mean_occupancy), abs=1e-9)
        assert t.mean_occupancy == pytest.approx(1 / math.expm1(beta * nu), rel=1e-9, abs=1e-12)


class TestVariational:
    def test_unit_mode_many_trials(self):
        assert variational_check(1.0, 1.0, thermal_n_max(1.0, 1.0), 10_000)

    @pytest.mark.parametrize("nu", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("E", [0.5, 1.0, 5.0])
    def test_grid(self, nu, E):
        assert variational_check(nu, E, thermal_n_max(nu, E), 2_000, seed=3)

    def test_zero_energy(self):
        assert variational_check(1.0, 0.0, 10, 100)

    def test_energy_beyond_ladder(self):
        with pytest.raises(TruncationError):
            variational_check(1.0, 20.0, 10, 10)

    def test_non_thermal_state_is_below_bound(self):
        # uniform on 5 rungs has mean 2; the thermal state with that mean holds more entropy
        p = np.full(5, 0.2)
        assert entropy_bits(p) == pytest.approx(math.log2(5))
        assert entropy_bits(p) < g(2.0) - 0.1

    def test_local_perturbations_lower_entropy(self):
        nu, E = 1.0, 1.0
        deltas = perturbation_deltas(nu, E, thermal_n_max(nu, E), scale=1e-3, n_dirs=30)
        assert np.all(deltas < 0)

    def test_constraint_directions(self):
        p = TruncatedThermal(1.0, 0.8).probabilities
        v = constraint_directions(p)
        n = np.arange(p.size)
        np.testing.assert_allclose(v @ p, 0, atol=1e-14)
        np.testing.assert_allclose(v @ (n * p), 0, atol=1e-12)
        np.testing.assert_allclose(v @ v.T, np.eye(v.shape[0]), atol=1e-12)
