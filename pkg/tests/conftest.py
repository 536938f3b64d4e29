import numpy as np
import pytest

from awisim.scheme import SchemeParams, scan_preset


def random_params(rng, omega_max=20.0, delta_max=10.0, rate_max=8.0,
                  min_pump=0.0) -> SchemeParams:
    """A physically sensible random parameter set in gamma_21 units."""
    return SchemeParams(
        omega_p=rng.uniform(0.0, omega_max),
        omega_s=rng.uniform(0.0, omega_max),
        omega_w=rng.uniform(0.0, omega_max),
        delta_p=rng.uniform(-delta_max, delta_max),
        delta_s=rng.uniform(-delta_max, delta_max),
        delta_w=rng.uniform(-delta_max, delta_max),
        gamma_21=1.0,
        gamma_32=rng.uniform(0.1, rate_max),
        gamma_34=rng.uniform(0.1, rate_max),
        lambda_pump=rng.uniform(min_pump, 3.0),
    )


def random_density_matrix(rng) -> np.ndarray:
    """Random positive hermitian unit-trace 4x4 matrix."""
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


@pytest.fixture
def scan_params() -> SchemeParams:
    """Round-number scan configuration (gamma_21 units)."""
    return scan_preset()
