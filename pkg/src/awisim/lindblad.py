"""Density-matrix evolution, steady state and probe-response observables.

The master equation is

    drho/dt = -i [H0, rho] + sum_k (rate_k/2) (2 C_k rho C_k+ - C_k+C_k rho - rho C_k+C_k)

over the four jump channels of :func:`awisim.hamiltonian.jump_channels`.

Density matrices are plain 4x4 complex arrays.  Validity means hermitian to
1e-10, trace within 1e-9 of 1, and populations >= -1e-10; helpers below
enforce and check these.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError, InvariantViolationError, MultipleSteadyStatesError
from .hamiltonian import _cached_operators
from .scheme import SchemeParams

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
POPULATION_TOL = 1e-10
STEADY_RESIDUAL_TOL = 1e-10
_TRACE_ERROR_TOL = 1e-6


def basis_state(level: int) -> np.ndarray:
    """Density matrix |level><level| (level in 1..4)."""
    rho = np.zeros((4, 4), dtype=np.complex128)
    rho[level - 1, level - 1] = 1.0
    return rho


def check_density_matrix(rho: np.ndarray, where: str = "density matrix") -> None:
    """Raise InvariantViolationError if rho breaks the validity tolerances."""
    if rho.shape != (4, 4):
        raise InvariantViolationError(f"{where}: expected shape (4, 4), got {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERMITICITY_TOL:
        raise InvariantViolationError(f"{where}: hermiticity drift {herm:.3e} > {HERMITICITY_TOL}")
    tr_err = abs(np.trace(rho) - 1.0)
    if tr_err > TRACE_TOL:
        raise InvariantViolationError(f"{where}: trace drift {tr_err:.3e} > {TRACE_TOL}")
    min_pop = float(np.min(np.real(np.diag(rho))))
    if min_pop < -POPULATION_TOL:
        raise InvariantViolationError(f"{where}: negative population {min_pop:.3e}")


def lindblad_rhs(rho: np.ndarray, p: SchemeParams) -> np.ndarray:
    """Time derivative of rho under the master equation."""
    h0, _, _, ops = _cached_operators(p)
    out = -1j * (h0 @ rho - rho @ h0)
    for rate, c, cdc in ops:
        if rate == 0.0:
            continue
        out += (rate / 2.0) * (2.0 * (c @ rho @ c.conj().T) - cdc @ rho - rho @ cdc)
    return out


def liouvillian_matrix(p: SchemeParams) -> np.ndarray:
    """16x16 matrix L with vec(drho/dt) = L vec(rho), column-stacked (Fortran) vec."""
    h0, _, _, ops = _cached_operators(p)
    eye = np.eye(4, dtype=np.complex128)
    lv = -1j * (np.kron(eye, h0) - np.kron(h0.T, eye))
    for rate, c, cdc in ops:
        if rate == 0.0:
            continue
        lv += (rate / 2.0) * (2.0 * np.kron(c.conj(), c)
                              - np.kron(eye, cdc) - np.kron(cdc.T, eye))
    return lv


# ---------------------------------------------------------------------------
# Adaptive evolution (embedded Dormand-Prince 5(4) with hermitian projection)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepControl:
    """Tolerances and step bounds for :func:`evolve`."""

    rtol: float = 1e-10
    atol: float = 1e-12
    h_initial: float = 1e-3
    h_max: float = 0.5
    # below this fraction of the horizon the integration is declared failed
    h_min_fraction: float = 1e-14


_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_DP_ERR = tuple(b5 - b4 for b5, b4 in zip(_DP_B5, _DP_B4))


def _dp_step(rho, p, h):
    """One Dormand-Prince trial step; returns (rho_new, error_estimate)."""
    k = [lindblad_rhs(rho, p)]
    for row in _DP_A[1:]:
        y = rho
        for a, ki in zip(row, k):
            if a != 0.0:
                y = y + (h * a) * ki
        k.append(lindblad_rhs(y, p))
    rho_new = rho
    for b, ki in zip(_DP_B5, k):
        if b != 0.0:
            rho_new = rho_new + (h * b) * ki
    err = np.zeros_like(rho)
    for e, ki in zip(_DP_ERR, k):
        if e != 0.0:
            err = err + (h * e) * ki
    return rho_new, err


def evolve(rho0: np.ndarray, p: SchemeParams, t_final: float,
           control: StepControl = StepControl()) -> np.ndarray:
    """Evolve rho0 to t_final with adaptive stepping; hermitian part enforced each step."""
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    check_density_matrix(rho0, "evolve initial state")
    if t_final == 0.0:
        return rho0.copy()

    rho = rho0.astype(np.complex128, copy=True)
    t = 0.0
    h = min(control.h_initial, control.h_max, t_final)
    h_min = control.h_min_fraction * max(t_final, 1.0)
    while t < t_final:
        h = min(h, t_final - t)
        rho_new, err = _dp_step(rho, p, h)
        scale = control.atol + control.rtol * np.maximum(np.abs(rho), np.abs(rho_new))
        err_norm = float(np.max(np.abs(err) / scale))
        if err_norm <= 1.0:
            t += h
            rho = 0.5 * (rho_new + rho_new.conj().T)
        if err_norm == 0.0:
            factor = 5.0
        else:
            factor = min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
        h *= factor
        if h > control.h_max:
            h = control.h_max
        if h < h_min:
            raise IntegrationError(
                f"step size underflow ({h:.3e}) at t = {t:.6g}", t_reached=t)
    return rho


def evolve_sampled(rho0: np.ndarray, p: SchemeParams, times: np.ndarray,
                   control: StepControl = StepControl()) -> np.ndarray:
    """States at the given increasing times (t=0 allowed); shape (len(times), 4, 4)."""
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0) or np.any(times < 0):
        raise ValueError("times must be strictly increasing and non-negative")
    out = np.empty((len(times), 4, 4), dtype=np.complex128)
    rho = rho0
    t_prev = 0.0
    for i, t in enumerate(times):
        rho = evolve(rho, p, t - t_prev, control)
        out[i] = rho
        t_prev = t
    return out


# ---------------------------------------------------------------------------
# Steady state
# ---------------------------------------------------------------------------

def steady_state(p: SchemeParams) -> np.ndarray:
    """Unique stationary density matrix of the Liouvillian.

    Solves the vectorized 16x16 linear system with the unit-trace constraint
    replacing one redundant row.  The system is rescaled internally so the
    largest rate/frequency is O(1); residuals are reported in those units.

    Raises MultipleSteadyStatesError when the stationary manifold is
    degenerate (null space dimension > 1), e.g. disconnected dark states.
    """
    if p.gamma_21 == 0.0 and p.gamma_32 == 0.0 and p.gamma_34 == 0.0 and p.lambda_pump == 0.0:
        raise ValueError("steady_state requires at least one dissipative rate > 0")

    scale = max(p.omega_p, p.omega_s, p.omega_w, abs(p.delta_p), abs(p.delta_s),
                abs(p.delta_w), p.gamma_21, p.gamma_32, p.gamma_34, p.lambda_pump)
    lv = liouvillian_matrix(p.scaled(1.0 / scale))

    svals = np.linalg.svd(lv, compute_uv=False)
    null_dim = int(np.sum(svals < 1e-10 * svals[0]))
    if null_dim > 1:
        raise MultipleSteadyStatesError(
            f"stationary manifold is {null_dim}-dimensional for these parameters")

    a = lv.copy()
    b = np.zeros(16, dtype=np.complex128)
    # trace functional: diagonal entries of rho sit at vec indices 0, 5, 10, 15
    a[0, :] = 0.0
    a[0, 0::5] = 1.0
    b[0] = 1.0
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError:
        x, *_ = np.linalg.lstsq(np.vstack([lv, a[0:1, :]]),
                                np.concatenate([np.zeros(16, dtype=np.complex128), b[0:1]]),
                                rcond=None)
    rho = x.reshape((4, 4), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real

    residual = float(np.linalg.norm(lv @ rho.flatten(order="F")))
    if residual > STEADY_RESIDUAL_TOL:
        raise MultipleSteadyStatesError(
            f"steady-state residual {residual:.3e} exceeds {STEADY_RESIDUAL_TOL}")
    return rho


def steady_state_residual(rho: np.ndarray, p: SchemeParams) -> float:
    """Norm of L vec(rho) in internally rescaled units (diagnostic)."""
    scale = max(p.omega_p, p.omega_s, p.omega_w, abs(p.delta_p), abs(p.delta_s),
                abs(p.delta_w), p.gamma_21, p.gamma_32, p.gamma_34, p.lambda_pump)
    lv = liouvillian_matrix(p.scaled(1.0 / scale))
    return float(np.linalg.norm(lv @ rho.flatten(order="F")))


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------

def probe_response(rho: np.ndarray, p: SchemeParams) -> float:
    """Im(rho_12)/omega_p; negative means probe absorption, positive gain.

    rho_12 is the (level-1, level-2) coherence <1|rho|2>; with real, positive
    Rabi frequencies and the sign conventions of :mod:`awisim.hamiltonian`
    this is negative for a weak undriven absorber.
    """
    if p.omega_p == 0.0:
        raise ValueError("probe response undefined: omega_p is zero")
    return float(rho[0, 1].imag / p.omega_p)


def populations(rho: np.ndarray) -> tuple[float, float, float, float]:
    """Level populations (p1, p2, p3, p4): real diagonal, clipped at 0, renormalized."""
    diag = np.real(np.diag(rho)).copy()
    drift = abs(diag.sum() - 1.0)
    if drift > _TRACE_ERROR_TOL:
        raise InvariantViolationError(f"populations: trace drift {drift:.3e} > {_TRACE_ERROR_TOL}")
    diag = np.clip(diag, 0.0, None)
    diag /= diag.sum()
    return tuple(float(v) for v in diag)
