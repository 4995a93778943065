import numpy as np
import pytest

from twotime.correlators import (
    CorrelationSeries,
    InitialState,
    SystemSpec,
    g1_regression,
    g2_regression,
    unnormalized_g,
    unnormalized_g2,
)
from twotime.dynamics import DampingChannel, QuadraticHamiltonian
from twotime.errors import ZeroDenominatorError
from twotime.hilbert import FockCutoff


def closed_coherent(alpha0=1.0, n_max=30, omega=1.0, t_prepare=0.0):
    return SystemSpec(
        QuadraticHamiltonian(omega=omega),
        DampingChannel(),
        InitialState.coherent(alpha0),
        FockCutoff(n_max),
        t_prepare=t_prepare,
    )


def damped_thermal(kappa=1.0, nbar=0.5, n_max=25, t_prepare=20.0):
    return SystemSpec(
        QuadraticHamiltonian(omega=1.0),
        DampingChannel(kappa=kappa, n_thermal=nbar),
        InitialState.thermal(nbar),
        FockCutoff(n_max),
        t_prepare=t_prepare,
    )


class TestG1:
    def test_coherent_free_phase(self):
        taus = np.linspace(0, 2 * np.pi, 9)
        s = g1_regression(closed_coherent(), taus)
        assert np.max(np.abs(s.g1 - np.exp(1j * taus))) < 1e-10
        assert np.max(np.abs(np.abs(s.g1) - 1)) < 1e-10

    def test_zero_delay_normalized(self):
        s = g1_regression(closed_coherent(), np.array([0.0, 0.5]))
        assert abs(s.g1[0] - 1.0) < 1e-12

    def test_damped_magnitude_decay(self):
        taus = np.linspace(0, 4, 9)
        s = g1_regression(damped_thermal(), taus)
        assert np.max(np.abs(np.abs(s.g1) - np.exp(-taus / 2))) < 1e-6

    def test_vacuum_rejected(self):
        sys = SystemSpec(QuadraticHamiltonian(omega=1.0), DampingChannel(),
                         InitialState.vacuum(), FockCutoff(10))
        with pytest.raises(ZeroDenominatorError):
            g1_regression(sys, np.array([0.0, 0.1]))


class TestG2:
    def test_coherent_poissonian(self):
        s = g2_regression(closed_coherent(), np.linspace(0, 2 * np.pi, 12))
        assert np.max(np.abs(s.g2 - 1)) < 1e-8

    def test_fock_one_zero_delay(self):
        sys = SystemSpec(QuadraticHamiltonian(omega=1.0), DampingChannel(kappa=1.0),
                         InitialState.fock(1), FockCutoff(8))
        s = g2_regression(sys, np.array([0.0, 0.5]))
        assert abs(s.g2[0]) < 1e-12

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_fock_n_zero_delay(self, n):
        sys = SystemSpec(QuadraticHamiltonian(omega=1.0), DampingChannel(kappa=0.5),
                         InitialState.fock(n), FockCutoff(12))
        s = g2_regression(sys, np.array([0.0, 0.1]))
        assert abs(s.g2[0] - (1 - 1 / n)) < 1e-10
        assert s.g2[0] < 1  # classical bound violated: sub-Poissonian

    def test_thermal_bunching_curve(self):
        taus = np.linspace(0, 5, 11)
        s = g2_regression(damped_thermal(), taus)
        assert np.max(np.abs(s.g2 - (1 + np.exp(-taus)))) < 1e-4

    def test_nonnegative(self):
        for sys in (closed_coherent(0.6), damped_thermal(),
                    SystemSpec(QuadraticHamiltonian(omega=1.0), DampingChannel(kappa=0.5),
                               InitialState.superposition([(0.8, 0), (0.6, 2)]),
                               FockCutoff(15))):
            s = g2_regression(sys, np.linspace(0, 3, 7))
            assert np.all(s.g2 >= -1e-12)


class TestUnnormalized:
    def test_coherent_half_period(self):
        assert abs(unnormalized_g(closed_coherent(), np.pi) - (-1.0)) < 1e-10

    def test_vacuum_is_zero(self):
        sys = SystemSpec(QuadraticHamiltonian(omega=1.0), DampingChannel(),
                         InitialState.vacuum(), FockCutoff(10))
        assert abs(unnormalized_g(sys, 0.7)) < 1e-14

    def test_zero_delay_is_mean_photon_number(self):
        sys = closed_coherent(alpha0=1.2)
        assert abs(unnormalized_g(sys, 0.0) - 1.44) < 1e-10

    def test_g2_zero_delay_moment(self):
        # <adag adag a a> = |alpha|^4 for a coherent state
        sys = closed_coherent(alpha0=1.1)
        assert abs(unnormalized_g2(sys, 0.0) - 1.1**4) < 1e-9


class TestStationarity:
    def test_two_preparation_times_agree(self):
        taus = np.linspace(0, 3, 7)
        a = g2_regression(damped_thermal(t_prepare=20.0), taus)
        b = g2_regression(damped_thermal(t_prepare=25.0), taus)
        assert np.max(np.abs(a.g2 - b.g2)) < 1e-6
        ga = g1_regression(damped_thermal(t_prepare=20.0), taus)
        gb = g1_regression(damped_thermal(t_prepare=25.0), taus)
        assert np.max(np.abs(ga.g1 - gb.g1)) < 1e-6


class TestTruncationStability:
    def test_cutoff_bump_invariance(self):
        taus = np.linspace(0, 2, 5)
        a = g2_regression(closed_coherent(n_max=30), taus)
        b = g2_regression(closed_coherent(n_max=40), taus)
        assert np.max(np.abs(a.g2 - b.g2)) < 1e-10
        assert np.max(np.abs(a.g1 - b.g1)) < 1e-10


class TestSeriesContract:
    def test_grid_must_ascend(self):
        with pytest.raises(ValueError):
            g1_regression(closed_coherent(), np.array([0.0, 0.5, 0.3]))

    def test_negative_tau_rejected(self):
        with pytest.raises(ValueError):
            g1_regression(closed_coherent(), np.array([-0.1, 0.2]))

    def test_method_tag_guard(self):
        with pytest.raises(ValueError):
            CorrelationSeries(np.array([0.0]), np.array([1 + 0j]), np.array([1.0]),
                              1.0, "fancy_method")

    def test_nonuniform_grid_supported(self):
        taus = np.array([0.0, 0.1, 0.4, 1.0, 2.5])
        s = g2_regression(damped_thermal(), taus)
        assert np.max(np.abs(s.g2 - (1 + np.exp(-taus)))) < 1e-4
