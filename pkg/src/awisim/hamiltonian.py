"""Interaction-picture Hamiltonians and the dissipative jump channels.

Level indexing is 1..4 in all public contracts (matching the scheme
description); matrices are stored 0-based, entry ``[i-1, j-1]`` for levels
``(i, j)``.

The rotating frame follows the coupling chain 1 -(probe)- 2 -(strong)- 3
-(weak)- 4, so each level's frame energy is the cumulative detuning of the
fields connecting it to level 1.  With hbar = 1 the non-hermitian no-jump
generator is

    H_nh = -(1/2) * [[ i*G1,  Op,                 0,                    0                   ],
                     [ Op,   -2*Dp + i*G2,        Os,                   0                   ],
                     [ 0,     Os,                -2*(Dp+Ds) + i*G3,     Ow                  ],
                     [ 0,     0,                  Ow,                  -2*(Dp+Ds-Dw)        ]]

where G1..G3 are the per-level departure rates and G4 = 0.  Its hermitian
part is the coherent interaction Hamiltonian H0 with diagonal
(0, Dp, Dp+Ds, Dp+Ds-Dw) and couplings -Omega/2 on the three driven
transitions.  At probe resonance (Dp = 0) the diagonal reduces to
(0, 0, Ds, Ds-Dw).  Level 4 is frame-degenerate with level 1 exactly at
three-photon resonance Dp + Ds - Dw = 0, which is what maximizes the
three-photon gain channel; the strong field dresses levels 2-3, placing
probe absorption near Dp = +-Os/2 when Ds = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .scheme import SchemeParams, departure_rates


@dataclass(frozen=True)
class JumpChannel:
    """One dissipative channel: a quantum jump from ``from_level`` to ``to_level``.

    The collapse map sends any amplitude on ``from_level`` to ``to_level``,
    i.e. the operator |to><from| with the given rate.
    """

    label: str
    from_level: int
    to_level: int
    rate: float

    def operator(self) -> np.ndarray:
        """Collapse operator |to><from| as a 4x4 array."""
        c = np.zeros((4, 4), dtype=np.complex128)
        c[self.to_level - 1, self.from_level - 1] = 1.0
        return c


def build_h0(p: SchemeParams) -> np.ndarray:
    """Hermitian interaction-picture Hamiltonian (4x4 complex)."""
    op, os_, ow = p.omega_p, p.omega_s, p.omega_w
    e3 = p.delta_p + p.delta_s
    e4 = p.delta_p + p.delta_s - p.delta_w
    return np.array([
        [0.0,       -op / 2.0,  0.0,        0.0],
        [-op / 2.0,  p.delta_p, -os_ / 2.0, 0.0],
        [0.0,       -os_ / 2.0, e3,         -ow / 2.0],
        [0.0,        0.0,       -ow / 2.0,  e4],
    ], dtype=np.complex128)


def build_h_nh(p: SchemeParams) -> np.ndarray:
    """Non-hermitian no-jump Hamiltonian (4x4 complex).

    Written as -(1/2) times the coupling/rate matrix quoted in the module
    docstring; equals ``build_h0(p) - (i/2) diag(G1, G2, G3, 0)``.
    """
    g = departure_rates(p)
    op, os_, ow = p.omega_p, p.omega_s, p.omega_w
    dp = p.delta_p
    d3 = p.delta_p + p.delta_s
    d4 = p.delta_p + p.delta_s - p.delta_w
    m = np.array([
        [1j * g.g1, op,                  0.0,                 0.0],
        [op,        -2 * dp + 1j * g.g2, os_,                 0.0],
        [0.0,       os_,                 -2 * d3 + 1j * g.g3, ow],
        [0.0,       0.0,                 ow,                  -2 * d4],
    ], dtype=np.complex128)
    return -0.5 * m


def jump_channels(p: SchemeParams) -> tuple[JumpChannel, ...]:
    """The four dissipative channels, in fixed order (J12, J21, J32, J34).

    Zero-rate channels are kept (with rate 0) so downstream bookkeeping never
    branches on channel existence.  No channel ends in level 3 or starts from
    level 4.
    """
    return (
        JumpChannel("J12", 1, 2, p.lambda_pump),
        JumpChannel("J21", 2, 1, p.gamma_21 + p.lambda_pump),
        JumpChannel("J32", 3, 2, p.gamma_32),
        JumpChannel("J34", 3, 4, p.gamma_34),
    )


#: Origin level of each jump channel, by label (used to classify period ends).
CHANNEL_FROM_LEVEL = {"J12": 1, "J21": 2, "J32": 3, "J34": 3}

#: Destination level of each jump channel, by label.
CHANNEL_TO_LEVEL = {"J12": 2, "J21": 1, "J32": 2, "J34": 4}

CHANNEL_LABELS = ("J12", "J21", "J32", "J34")


@lru_cache(maxsize=256)
def _cached_operators(p: SchemeParams):
    """Per-parameter-set matrices shared by the solvers (read-only)."""
    h0 = build_h0(p)
    hnh = build_h_nh(p)
    chans = jump_channels(p)
    ops = []
    for ch in chans:
        c = ch.operator()
        ops.append((ch.rate, c, c.conj().T @ c))
    for arr in (h0, hnh):
        arr.setflags(write=False)
    return h0, hnh, chans, tuple(ops)
