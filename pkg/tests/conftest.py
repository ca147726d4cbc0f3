import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dqdcqed.model import DqdParams, HilbertLayout, ProbeParams, ResonatorParams, SystemConfig

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def make_config(omega_r=5170.0, kappa_int=18.0, kappa_ext=6.5, dqds=(), couplings=(),
                omega_p=None, alpha=0.1, fock=5, rwa=True):
    dqds = tuple(dqds)
    return SystemConfig(
        ResonatorParams(omega_r, kappa_int, kappa_ext),
        dqds,
        tuple(couplings),
        ProbeParams(omega_r if omega_p is None else omega_p, alpha),
        HilbertLayout(fock, len(dqds)),
        rwa,
    )


def sweet_spot(freq, gamma2=0.0, delta=0.0):
    """DQD with 2t = freq and linewidth gamma2 carried entirely by relaxation."""
    return DqdParams(delta, freq / 2.0, gamma1=2.0 * gamma2)


@pytest.fixture
def fig2b_config():
    return make_config(5170.0, 18.0, 6.5, [sweet_spot(5166.0, 5.3)], [53.4])


@pytest.fixture
def two_qubit_config():
    # resonator and DQD1 from the single-qubit column, DQD2 from the two-qubit one
    return make_config(5170.0, 18.0, 6.5, [sweet_spot(5166.0, 5.3), sweet_spot(5156.2, 6.0)],
                       [53.4, 56.7], fock=4)


def analytic_s11(nu_p, omega_r, kappa_int, kappa_ext):
    """Single-port reflection in this package's sign convention (see README)."""
    d = nu_p - omega_r
    return (0.5 * (kappa_int - kappa_ext) - 1j * d) / (0.5 * (kappa_int + kappa_ext) - 1j * d)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
