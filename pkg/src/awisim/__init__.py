"""Simulation toolkit for a four-level amplification-without-inversion scheme.

The scheme couples a weak probe to the 1-2 transition, a strong field to the
2-3 transition and a weak field to the 3-4 transition of a four-level atom
(neutral-Hg preset included), with spontaneous decay 3->2, 3->4, 2->1 and a
bidirectional incoherent pump between levels 1 and 2.

The probe response is computed three independent ways:

* density-matrix evolution and steady state (:mod:`awisim.lindblad`),
* Monte Carlo wave-function trajectories with coherent-period statistics
  (:mod:`awisim.mcwf`, :mod:`awisim.periods`),
* closed-form period probabilities in the weak-probe limit
  (:mod:`awisim.semianalytic`),

and the three routes are cross-validated by the sweep engine
(:mod:`awisim.sweep`) and its CLI (``awisim``).
"""

__version__ = "0.1.0"

from .scheme import SchemeParams, DepartureRates, departure_rates, hg_preset

__all__ = [
    "SchemeParams",
    "DepartureRates",
    "departure_rates",
    "hg_preset",
    "__version__",
]
