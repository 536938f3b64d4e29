"""Closed-form statistics of the jump chain in the weak-probe limit.

Between two jumps the system evolves coherently; the chain of period start
levels is Markov with conditional matrix Q(i/j) (probability the next period
starts in level i given the previous one started in j).  In the limit where
the probe is much weaker than pump and probe-transition decay, and the
driving fields exceed every incoherent rate:

* a period started in level 1 always ends with the pump jump to level 2,
  so column 1 of Q is the unit vector on row 2;
* periods started in 2, 3 or 4 spread over levels 2-4 and end through each
  dissipative channel in proportion to its rate, so columns 2-4 are all
  ((gamma_21 + pump)/D, gamma_32/D, 0, gamma_34/D) with
  D = gamma_34 + gamma_32 + gamma_21 + pump.

The stationary start probabilities have the closed form
P = ((gamma_21+pump), (gamma_21+gamma_32+pump), 0, gamma_34) / D'
with D' = gamma_34 + gamma_32 + 2 (gamma_21 + pump), and the probability of
observing a given period type is

    P(i, j) = P(i) * G_j * integral_0^inf |<j| exp(-i H_nh t) |i>|^2 dt.

The four probe-photon-changing period types combine into the mean probe
photon change per period, P(2,1) + P(4,1) - P(1,2) - P(1,3).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DegenerateChainError, DivergentIntegralError, RegimeWarning
from .hamiltonian import build_h_nh
from .scheme import SchemeParams, departure_rates, validity_check

#: Eigenvector condition number beyond which the quadrature fallback is used.
EIGENBASIS_COND_LIMIT = 1e8

#: Period types that change the probe photon number (gain first, then loss).
PROBE_PERIOD_TYPES = ((2, 1), (4, 1), (1, 2), (1, 3))


@dataclass(frozen=True)
class ConditionalMatrix:
    """Column-stochastic matrix q[i-1, j-1] = Q(i/j) plus the rate sums D, D'."""

    q: np.ndarray
    d: float
    d_prime: float

    def __post_init__(self):
        if self.q.shape != (4, 4):
            raise ValueError("Q must be 4x4")
        col_sums = self.q.sum(axis=0)
        if np.max(np.abs(col_sums - 1.0)) > 1e-12:
            raise ValueError(f"Q columns must sum to 1, got {col_sums}")
        if np.any(self.q[2, :] != 0.0):
            raise ValueError("row 3 of Q must be identically zero")
        if not (self.q[1, 0] == 1.0 and np.all(self.q[[0, 2, 3], 0] == 0.0)):
            raise ValueError("column 1 of Q must be the unit vector on row 2")


def _warn_if_outside_regime(p: SchemeParams) -> None:
    report = validity_check(p)
    if not report.holds:
        warnings.warn(
            "closed-form jump statistics evaluated outside their validity regime: "
            + "; ".join(report.messages),
            RegimeWarning,
            stacklevel=3,
        )


def q_matrix(p: SchemeParams) -> ConditionalMatrix:
    """Conditional start-level matrix Q(i/j) in the weak-probe limit."""
    d = p.gamma_34 + p.gamma_32 + p.gamma_21 + p.lambda_pump
    if d == 0.0:
        raise ValueError("all incoherent rates are zero; the jump chain is empty")
    _warn_if_outside_regime(p)
    col = np.array([(p.gamma_21 + p.lambda_pump) / d, p.gamma_32 / d, 0.0, p.gamma_34 / d])
    q = np.zeros((4, 4))
    q[1, 0] = 1.0
    q[:, 1] = q[:, 2] = q[:, 3] = col
    d_prime = p.gamma_34 + p.gamma_32 + 2.0 * (p.gamma_21 + p.lambda_pump)
    return ConditionalMatrix(q=q, d=d, d_prime=d_prime)


def start_probabilities(q: ConditionalMatrix) -> tuple[float, float, float, float]:
    """Stationary distribution of the start-level chain, summing to 1.

    Solved numerically from the eigenproblem of Q; raises DegenerateChainError
    if the unit eigenvalue is not simple.  Equals the closed-form prefactors
    ((g21+pump), (g21+g32+pump), 0, g34)/D' to solver precision.
    """
    vals, vecs = np.linalg.eig(q.q)
    at_one = np.where(np.abs(vals - 1.0) < 1e-9)[0]
    if len(at_one) == 0:
        raise DegenerateChainError("no unit eigenvalue found in the jump chain")
    if len(at_one) > 1:
        raise DegenerateChainError("stationary distribution of the jump chain is not unique")
    v = np.real(vecs[:, at_one[0]])
    v = np.abs(v)
    v /= v.sum()
    return tuple(float(x) for x in v)


def closed_form_start_probabilities(p: SchemeParams) -> tuple[float, float, float, float]:
    """Closed-form stationary start probabilities (same limit as q_matrix)."""
    d_prime = p.gamma_34 + p.gamma_32 + 2.0 * (p.gamma_21 + p.lambda_pump)
    if d_prime == 0.0:
        raise ValueError("all incoherent rates are zero; the jump chain is empty")
    g21p = p.gamma_21 + p.lambda_pump
    return (g21p / d_prime, (g21p + p.gamma_32) / d_prime, 0.0, p.gamma_34 / d_prime)


# ---------------------------------------------------------------------------
# Amplitude integrals
# ---------------------------------------------------------------------------

def _coupling_reachable(p: SchemeParams, i: int, j: int) -> bool:
    """Whether level j is reachable from level i through nonzero couplings."""
    if i == j:
        return True
    h = build_h_nh(p)
    adj = np.abs(h) > 0.0
    np.fill_diagonal(adj, False)
    seen = {i - 1}
    frontier = [i - 1]
    while frontier:
        k = frontier.pop()
        for m in np.where(adj[k])[0]:
            if m not in seen:
                seen.add(int(m))
                frontier.append(int(m))
    return (j - 1) in seen


def _eigen_integral(hnh: np.ndarray, i: int, j: int) -> tuple[float, float]:
    """(integral, eigenbasis condition number) via spectral decomposition.

    c_ij(t) = sum_k a_k exp(-i lam_k t) with a_k = V[j,k] (V^-1)[k,i], so
    the time integral of |c_ij|^2 is sum_{k,l} a_k conj(a_l) / (i (lam_k - conj(lam_l))).
    """
    vals, vecs = np.linalg.eig(hnh)
    cond = float(np.linalg.cond(vecs))
    vinv = np.linalg.inv(vecs)
    a = vecs[j - 1, :] * vinv[:, i - 1]

    amax = float(np.max(np.abs(a)))
    if amax == 0.0:
        return 0.0, cond
    active = np.abs(a) > 1e-14 * amax
    if np.any(vals[active].imag > -1e-12 * max(1.0, float(np.max(np.abs(vals))))):
        raise DivergentIntegralError(
            f"amplitude {i}->{j} has a non-decaying eigenmode contribution")

    ak = a[active]
    lk = vals[active]
    denom = 1j * (lk[:, None] - lk[None, :].conj())
    total = np.sum(ak[:, None] * ak[None, :].conj() / denom)
    return float(total.real), cond


def _quadrature_integral(hnh: np.ndarray, i: int, j: int) -> float:
    """Integral of |c_ij(t)|^2 by propagating the Schroedinger equation.

    Augments the state with the running integral and integrates to a horizon
    where the exponential tail bound is negligible, then adds the bound.
    """
    vals = np.linalg.eigvals(hnh)
    decay = -vals.imag
    slowest = float(np.min(decay[decay > 1e-12 * max(1.0, float(np.max(np.abs(vals))))],
                           initial=np.inf))
    if not np.isfinite(slowest):
        raise DivergentIntegralError(
            f"amplitude {i}->{j}: no decaying eigenmode to bound the tail")
    horizon = 40.0 / slowest

    def rhs(_t, y):
        psi = y[:4] + 1j * y[4:8]
        dpsi = -1j * (hnh @ psi)
        return np.concatenate([dpsi.real, dpsi.imag, [abs(psi[j - 1]) ** 2]])

    y0 = np.zeros(9)
    y0[i - 1] = 1.0
    # two passes: a rough one fixes the magnitude of the integral (which can
    # be tiny, weak-probe amplitudes scale like omega_p^2), the second uses
    # an absolute tolerance tied to that magnitude so control is effectively
    # relative throughout
    rough = solve_ivp(rhs, (0.0, horizon), y0, method="DOP853", rtol=1e-6, atol=1e-12)
    if not rough.success:
        raise DivergentIntegralError(f"amplitude {i}->{j}: quadrature integration failed")
    scale = max(float(rough.y[8, -1]), 1e-280)
    atol = np.array([1e-14] * 8 + [1e-13 * scale])
    sol = solve_ivp(rhs, (0.0, horizon), y0, method="DOP853", rtol=1e-12, atol=atol)
    if not sol.success:
        raise DivergentIntegralError(f"amplitude {i}->{j}: quadrature integration failed")
    psi_end = sol.y[:4, -1] + 1j * sol.y[4:8, -1]
    tail_amp2 = abs(psi_end[j - 1]) ** 2
    return float(sol.y[8, -1] + tail_amp2 / (2.0 * slowest))


def amplitude_integral(p: SchemeParams, i: int, j: int, method: str = "auto") -> float:
    """Integral over time of |<j| exp(-i H_nh t) |i>|^2 (time units of 1/rates).

    ``method`` is "auto" (eigendecomposition, falling back to quadrature when
    the eigenbasis condition number exceeds 1e8), "eigen" or "quadrature".
    Structurally decoupled (i, j) pairs return exactly 0.  Raises
    DivergentIntegralError when the amplitude does not decay.
    """
    for lvl in (i, j):
        if lvl not in (1, 2, 3, 4):
            raise ValueError(f"level must be in 1..4, got {lvl}")
    if not _coupling_reachable(p, i, j):
        return 0.0
    hnh = build_h_nh(p)
    if method == "quadrature":
        return _quadrature_integral(hnh, i, j)
    value, cond = _eigen_integral(hnh, i, j)
    if method == "eigen":
        return value
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if cond > EIGENBASIS_COND_LIMIT:
        return _quadrature_integral(hnh, i, j)
    return value


# ---------------------------------------------------------------------------
# Period probabilities
# ---------------------------------------------------------------------------

def period_probability(p: SchemeParams, i: int, j: int) -> float:
    """Probability that a random coherent period is period(i, j).

    The four probe-changing pairs use the closed-form prefactors verbatim:

        P(2,1) = (g21 + g32 + pump)/D' * pump        * I(1,2)
        P(1,2) = (g21 + pump)/D'       * (g21 + pump) * I(1,2)
        P(4,1) = g34/D'                * pump        * I(4,1)
        P(1,3) = (g21 + pump)/D'       * (g32 + g34) * I(1,3)

    (I(1,2) = I(2,1) by symmetry of the propagator.)  Any other pair is
    computed as P(i) * G_j * I(i,j) from the stationary chain.
    """
    g = departure_rates(p)
    d_prime = p.gamma_34 + p.gamma_32 + 2.0 * (p.gamma_21 + p.lambda_pump)
    if d_prime == 0.0:
        raise ValueError("all incoherent rates are zero; the jump chain is empty")
    g21p = p.gamma_21 + p.lambda_pump

    if (i, j) == (2, 1):
        prefactor = (g21p + p.gamma_32) / d_prime * p.lambda_pump
        if prefactor == 0.0:
            return 0.0
        return prefactor * amplitude_integral(p, 1, 2)
    if (i, j) == (1, 2):
        prefactor = g21p / d_prime * g21p
        if prefactor == 0.0:
            return 0.0
        return prefactor * amplitude_integral(p, 1, 2)
    if (i, j) == (4, 1):
        prefactor = p.gamma_34 / d_prime * p.lambda_pump
        if prefactor == 0.0:
            return 0.0
        return prefactor * amplitude_integral(p, 4, 1)
    if (i, j) == (1, 3):
        prefactor = g21p / d_prime * (p.gamma_32 + p.gamma_34)
        if prefactor == 0.0:
            return 0.0
        return prefactor * amplitude_integral(p, 1, 3)

    start = start_probabilities(q_matrix(p))
    g_j = g.as_tuple()[j - 1]
    if start[i - 1] == 0.0 or g_j == 0.0:
        return 0.0
    return start[i - 1] * g_j * amplitude_integral(p, i, j)


# ---------------------------------------------------------------------------
# Exact jump-chain statistics
# ---------------------------------------------------------------------------
#
# The closed forms above approximate the branching of each period by raw rate
# ratios, which assumes the driving fields spread the state evenly over
# levels 2-4 before a jump happens.  The chain itself is exact once the
# branching probabilities are evaluated from the amplitude integrals:
# a period starting in level j ends through channel k (origin m_k, rate r_k)
# with probability r_k * I(j, m_k), and these probabilities sum to 1.
# Everything below uses those exact branchings; no Monte Carlo is involved.

def exact_q_matrix(p: SchemeParams) -> np.ndarray:
    """Conditional start-level matrix with exact branching probabilities.

    Entry [i-1, j-1] is the probability that the next period starts in level
    i given the current one started in level j (for j in {1, 2, 4}; column 3
    is padded with the closed-form column since no period starts there).
    """
    from .hamiltonian import jump_channels

    q = np.zeros((4, 4))
    for j in (1, 2, 4):
        for ch in jump_channels(p):
            if ch.rate == 0.0:
                continue
            q[ch.to_level - 1, j - 1] += ch.rate * amplitude_integral(p, j, ch.from_level)
    # column 3 is never entered; pad with a valid distribution so the matrix
    # stays column-stochastic
    q[:, 2] = q[:, 1]
    return q


def exact_start_probabilities(p: SchemeParams) -> tuple[float, float, float, float]:
    """Stationary start-level distribution of the exact jump chain."""
    q = exact_q_matrix(p)
    vals, vecs = np.linalg.eig(q)
    k = int(np.argmin(np.abs(vals - 1.0)))
    if abs(vals[k] - 1.0) > 1e-9:
        raise DegenerateChainError("exact jump chain has no stationary distribution")
    v = np.abs(np.real(vecs[:, k]))
    v[2] = 0.0
    v /= v.sum()
    return tuple(float(x) for x in v)


def exact_period_probability(p: SchemeParams, i: int, j: int) -> float:
    """Period probability P(i) * G_j * I(i, j) with the exact start distribution."""
    g_j = departure_rates(p).as_tuple()[j - 1]
    if g_j == 0.0:
        return 0.0
    start = exact_start_probabilities(p)
    if start[i - 1] == 0.0:
        return 0.0
    return start[i - 1] * g_j * amplitude_integral(p, i, j)


def mean_duration_from(p: SchemeParams, i: int) -> float:
    """Mean duration of a coherent period starting in level i.

    Equals the time integral of the survival probability |psi(t)|^2 under the
    no-jump propagator, evaluated spectrally.
    """
    hnh = build_h_nh(p)
    vals, vecs = np.linalg.eig(hnh)
    b = np.linalg.inv(vecs)[:, i - 1]
    gram = vecs.conj().T @ vecs
    if np.any(vals.imag > -1e-12 * max(1.0, float(np.max(np.abs(vals))))):
        # a non-decaying mode may carry no weight; fall back to the filtered sum
        active = np.abs(b) > 1e-14 * max(float(np.max(np.abs(b))), 1e-300)
        if np.any(vals[active].imag > -1e-12 * max(1.0, float(np.max(np.abs(vals))))):
            raise DivergentIntegralError(
                f"period starting in level {i} has infinite mean duration")
    denom = 1j * (vals[:, None] - vals[None, :].conj())
    total = np.sum((b[:, None] * b[None, :].conj()) * gram.T / denom)
    return float(total.real)


def mean_period_duration(p: SchemeParams) -> float:
    """Mean coherent-period duration under the exact start distribution."""
    start = exact_start_probabilities(p)
    return sum(start[i - 1] * mean_duration_from(p, i) for i in (1, 2, 4))


def exact_mean_probe_change(p: SchemeParams) -> float:
    """Mean probe photon change per period with exact start probabilities."""
    return (exact_period_probability(p, 2, 1) + exact_period_probability(p, 4, 1)
            - exact_period_probability(p, 1, 2) - exact_period_probability(p, 1, 3))


def probe_response_from_periods(p: SchemeParams) -> float:
    """Probe response Im(rho_12)/omega_p predicted from period statistics.

    In the ergodic steady state the probe photon flux is the mean per-period
    change divided by the mean period duration, and the density-matrix
    observable is that flux divided by omega_p^2.  This reproduces the
    steady-state Lindblad value through an entirely independent route.
    """
    if p.omega_p == 0.0:
        raise ValueError("probe response undefined: omega_p is zero")
    return exact_mean_probe_change(p) / (p.omega_p ** 2 * mean_period_duration(p))


def one_photon_gain_threshold(p: SchemeParams) -> float | None:
    """Pump rate above which one-photon gain beats one-photon loss.

    Equals gamma_21^2 / (gamma_32 - gamma_21) when gamma_32 > gamma_21;
    returns None when gamma_32 <= gamma_21 (one-photon gain alone is then
    impossible at any pump rate).
    """
    if p.gamma_32 > p.gamma_21:
        return p.gamma_21 ** 2 / (p.gamma_32 - p.gamma_21)
    return None


def mean_probe_change_semianalytic(p: SchemeParams) -> float:
    """Mean probe photon change per period: P(2,1) + P(4,1) - P(1,2) - P(1,3)."""
    return (period_probability(p, 2, 1) + period_probability(p, 4, 1)
            - period_probability(p, 1, 2) - period_probability(p, 1, 3))
