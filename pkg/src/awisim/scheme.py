"""Physical parameter record, presets, unit conventions and regime diagnostics.

Conventions
-----------
* hbar = 1; every field of :class:`SchemeParams` is an angular frequency.
* Levels are numbered 1..4: probe couples 1-2, strong field couples 2-3,
  weak field couples 3-4.  Spontaneous decay runs 2->1 (gamma_21),
  3->2 (gamma_32), 3->4 (gamma_34); the incoherent pump transfers
  population both ways between 1 and 2 at rate lambda_pump.
* Rabi frequencies are real and non-negative (field phases are out of scope).
* The default working unit is gamma_21 (so gamma_21 == 1.0); helpers convert
  from "angular per microsecond" (``us_inv``) and "2*pi x MHz" (``two_pi_MHz``)
  configs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

TWO_PI = 2.0 * math.pi

#: Recognized unit systems for parameter files.
UNIT_SYSTEMS = ("gamma21", "us_inv", "two_pi_MHz")

#: Threshold used to interpret "much less than" in the regime diagnostic.
MUCH_LESS_RATIO = 0.1


@dataclass(frozen=True)
class SchemeParams:
    """All Rabi frequencies, detunings, decay and pump rates of the scheme.

    Every value is an angular frequency in one common unit system; the record
    itself is unit-agnostic.  Rates and Rabi frequencies must be finite and
    non-negative; detunings are signed.
    """

    omega_p: float = 0.0
    omega_s: float = 0.0
    omega_w: float = 0.0
    delta_p: float = 0.0
    delta_s: float = 0.0
    delta_w: float = 0.0
    gamma_21: float = 0.0
    gamma_32: float = 0.0
    gamma_34: float = 0.0
    lambda_pump: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ValueError(f"{f.name} must be finite, got {v!r}")
        for name in ("omega_p", "omega_s", "omega_w",
                     "gamma_21", "gamma_32", "gamma_34", "lambda_pump"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)!r}")

    def scaled(self, factor: float) -> "SchemeParams":
        """Return a copy with every angular frequency multiplied by ``factor``."""
        return SchemeParams(**{f.name: getattr(self, f.name) * factor for f in fields(self)})

    def replace(self, **changes) -> "SchemeParams":
        """Return a copy with the given fields overridden."""
        return replace(self, **changes)


#: Field names of SchemeParams, in declaration order (used by configs and sweeps).
PARAM_FIELDS = tuple(f.name for f in fields(SchemeParams))


@dataclass(frozen=True)
class DepartureRates:
    """Total incoherent departure rate from each atomic level."""

    g1: float
    g2: float
    g3: float
    g4: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.g1, self.g2, self.g3, self.g4)


def departure_rates(p: SchemeParams) -> DepartureRates:
    """Departure rates per level: (pump, decay+pump, both level-3 decays, nothing).

    Level 4 has no dissipative departure channel, so g4 == 0 always.
    """
    return DepartureRates(
        g1=p.lambda_pump,
        g2=p.gamma_21 + p.lambda_pump,
        g3=p.gamma_32 + p.gamma_34,
        g4=0.0,
    )


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def hg_preset() -> SchemeParams:
    """Neutral-Hg decay rates (NIST values), in angular us^-1; fields zero.

    gamma_21 = 2*pi x 1.27 us^-1, gamma_32 = 2*pi x 8.86 us^-1,
    gamma_34 = 2*pi x 7.75 us^-1.  Callers override fields as needed.
    """
    return SchemeParams(
        gamma_21=TWO_PI * 1.27,
        gamma_32=TWO_PI * 8.86,
        gamma_34=TWO_PI * 7.75,
    )


def hg_gain_preset(pumped: bool = True) -> SchemeParams:
    """Hg rates plus the demonstrated UV-gain operating fields, in angular us^-1.

    Strong field 2*pi x 88.9 MHz, weak field 2*pi x 25.4 MHz, probe
    2*pi x 0.0013 MHz, all detunings zero (one-, two- and three-photon
    resonance).  With ``pumped`` the incoherent pump is 2*pi x 0.38 us^-1,
    which turns the probe response from absorption into gain.
    """
    return hg_preset().replace(
        omega_s=TWO_PI * 88.9,
        omega_w=TWO_PI * 25.4,
        omega_p=TWO_PI * 0.0013,
        delta_p=0.0,
        delta_s=0.0,
        delta_w=0.0,
        lambda_pump=TWO_PI * 0.38 if pumped else 0.0,
    )


def scan_preset() -> SchemeParams:
    """Round-number configuration used by the parameter scans, in gamma_21 units.

    gamma_32 = 5, gamma_34 = 10, pump 0.3, probe 0.001, weak 20, strong 70,
    all detunings zero.  Close to the Hg ratios but with idealized decay rates.
    """
    return SchemeParams(
        omega_p=0.001,
        omega_s=70.0,
        omega_w=20.0,
        gamma_21=1.0,
        gamma_32=5.0,
        gamma_34=10.0,
        lambda_pump=0.3,
    )


PRESETS = {
    "hg": hg_preset,
    "hg-gain": hg_gain_preset,
    "scan": scan_preset,
}

#: Unit system each preset is expressed in.
PRESET_UNITS = {"hg": "us_inv", "hg-gain": "us_inv", "scan": "gamma21"}


# ---------------------------------------------------------------------------
# Units
# ---------------------------------------------------------------------------

def to_gamma21_units(p: SchemeParams) -> SchemeParams:
    """Rescale so that gamma_21 == 1 exactly.

    All observables of the toolkit depend only on frequency ratios, so this
    is a pure relabeling.  Requires gamma_21 > 0.
    """
    if p.gamma_21 <= 0.0:
        raise ValueError("cannot rescale to gamma_21 units: gamma_21 is zero")
    q = p.scaled(1.0 / p.gamma_21)
    # guard against round-off on the defining field
    return q.replace(gamma_21=1.0)


def convert_params(p: SchemeParams, src: str, dst: str,
                   gamma21_us_inv: float | None = None) -> SchemeParams:
    """Convert a parameter record between unit systems.

    ``us_inv`` is angular frequency per microsecond; ``two_pi_MHz`` expresses
    the same quantity as nu where omega = 2*pi*nu with nu in MHz; ``gamma21``
    is units of the (absolute) gamma_21.  Converting *out of* gamma21 units
    needs ``gamma21_us_inv``, the absolute gamma_21 in angular us^-1;
    converting *into* them uses the record's own gamma_21.
    """
    for u in (src, dst):
        if u not in UNIT_SYSTEMS:
            raise ValueError(f"unknown unit system {u!r}; expected one of {UNIT_SYSTEMS}")
    if src == dst:
        return p

    # first express in angular us^-1
    if src == "us_inv":
        q = p
    elif src == "two_pi_MHz":
        q = p.scaled(TWO_PI)
    else:  # gamma21
        if gamma21_us_inv is None:
            raise ValueError("converting from gamma21 units requires gamma21_us_inv")
        q = p.scaled(gamma21_us_inv)

    if dst == "us_inv":
        return q
    if dst == "two_pi_MHz":
        return q.scaled(1.0 / TWO_PI)
    return to_gamma21_units(q)


# ---------------------------------------------------------------------------
# Validity-regime diagnostic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeReport:
    """Outcome of the weak-probe / strong-driving regime check.

    The closed-form period statistics assume the probe is much weaker than
    both the pump and the probe-transition decay, and that the strong and
    weak driving fields exceed every incoherent rate.  "Much less" is taken
    as a ratio of at most 0.1; "exceeds" is strict.  The report only warns;
    it never blocks computation.
    """

    probe_below_pump: bool
    probe_below_decay: bool
    strong_exceeds_rates: bool
    weak_exceeds_rates: bool
    messages: tuple[str, ...]

    @property
    def holds(self) -> bool:
        return (self.probe_below_pump and self.probe_below_decay
                and self.strong_exceeds_rates and self.weak_exceeds_rates)


def validity_check(p: SchemeParams) -> RegimeReport:
    """Check whether the closed-form period-statistics regime holds for ``p``."""
    msgs: list[str] = []

    probe_below_pump = p.omega_p <= MUCH_LESS_RATIO * p.lambda_pump
    if not probe_below_pump:
        msgs.append(f"omega_p={p.omega_p:g} is not << lambda_pump={p.lambda_pump:g}")
    probe_below_decay = p.omega_p <= MUCH_LESS_RATIO * p.gamma_21
    if not probe_below_decay:
        msgs.append(f"omega_p={p.omega_p:g} is not << gamma_21={p.gamma_21:g}")

    rates = (p.gamma_34, p.gamma_32, p.lambda_pump)
    strong_ok = all(p.omega_s > r for r in rates)
    if not strong_ok:
        msgs.append(f"omega_s={p.omega_s:g} does not exceed all of "
                    f"(gamma_34, gamma_32, lambda_pump)={rates}")
    weak_ok = all(p.omega_w > r for r in rates)
    if not weak_ok:
        msgs.append(f"omega_w={p.omega_w:g} does not exceed all of "
                    f"(gamma_34, gamma_32, lambda_pump)={rates}")

    return RegimeReport(
        probe_below_pump=probe_below_pump,
        probe_below_decay=probe_below_decay,
        strong_exceeds_rates=strong_ok,
        weak_exceeds_rates=weak_ok,
        messages=tuple(msgs),
    )


# ---------------------------------------------------------------------------
# Parameter files
# ---------------------------------------------------------------------------
#
# Flat key-value text format, one "key = value" per line, '#' comments.
# Keys are exactly the SchemeParams field names plus "units", e.g.
#
#     units = gamma21
#     omega_p = 0.001
#     ...

def save_params(p: SchemeParams, path: str | Path, units: str = "gamma21") -> None:
    """Write a parameter file in the flat key-value format."""
    if units not in UNIT_SYSTEMS:
        raise ValueError(f"unknown unit system {units!r}")
    lines = [f"units = {units}"]
    lines += [f"{name} = {getattr(p, name)!r}" for name in PARAM_FIELDS]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_params(path: str | Path) -> tuple[SchemeParams, str]:
    """Read a parameter file; returns the record and its declared unit system.

    All ten field keys and ``units`` must be present; unknown keys are errors.
    """
    values: dict[str, float] = {}
    units: str | None = None
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key == "units":
            if val not in UNIT_SYSTEMS:
                raise ValueError(f"{path}:{lineno}: unknown unit system {val!r}")
            units = val
        elif key in PARAM_FIELDS:
            values[key] = float(val)
        else:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    if units is None:
        raise ValueError(f"{path}: missing 'units' key")
    missing = [k for k in PARAM_FIELDS if k not in values]
    if missing:
        raise ValueError(f"{path}: missing keys {missing}")
    return SchemeParams(**values), units
