"""Closed-form sizing of the boost converter, LCL filter, and capacitor bank.

All calculators are pure arithmetic.  Outputs are reported at full
precision; rounding to catalog component values is left to the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateInput

# Current-rating derate in the LCL peak-current expression (fixed design
# constant, not exposed: the ripple/capacitance/attenuation fractions are
# the tunable knobs).
_PF_DERATE = 0.9


def _require_positive(obj: object, names: tuple[str, ...]) -> None:
    for name in names:
        value = getattr(obj, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise DegenerateInput(f"{name} must be a positive finite number, got {value!r}")


def _require_fraction(obj: object, names: tuple[str, ...]) -> None:
    for name in names:
        value = getattr(obj, name)
        if not 0.0 < value < 1.0:
            raise DegenerateInput(f"{name} must lie in (0, 1), got {value!r}")


# ============================================================================
# Boost converter
# ============================================================================


@dataclass(frozen=True)
class BoostDesignInput:
    """Ratings and ripple targets for the dc-dc step-up stage."""

    p: float  # W, PV array power at STC
    v_in: float  # V, PV array voltage at STC
    v_out: float  # V, dc-link voltage
    f_s: float  # Hz, switching frequency
    ripple_i_frac: float = 0.07  # inductor current ripple fraction
    ripple_v_frac: float = 0.007  # output voltage ripple fraction

    def __post_init__(self) -> None:
        _require_positive(self, ("p", "v_in", "v_out", "f_s"))
        _require_fraction(self, ("ripple_i_frac", "ripple_v_frac"))
        if self.v_in >= self.v_out:
            raise DegenerateInput(
                f"step-up requires v_in < v_out, got {self.v_in} >= {self.v_out}"
            )


@dataclass(frozen=True)
class BoostDesign:
    """Computed boost-converter component values."""

    i_out_max: float  # A, maximum output current
    delta_i_l: float  # A, inductor current ripple
    delta_v_out: float  # V, output voltage ripple
    l: float  # H, filter inductor
    c: float  # F, filter capacitor

    def __post_init__(self) -> None:
        for name in ("i_out_max", "delta_i_l", "delta_v_out", "l", "c"):
            if getattr(self, name) <= 0.0:
                raise DegenerateInput(f"{name} must be positive")


def boost_design(inp: BoostDesignInput) -> BoostDesign:
    """Size the boost inductor and capacitor from ratings and ripple targets.

    i_out_max = p / v_out
    delta_i_l = ripple_i_frac * i_out_max * v_out / v_in
    delta_v_out = ripple_v_frac * v_out
    l = v_in * (v_out - v_in) / (delta_i_l * f_s * v_out)
    c = i_out_max * (1 - v_in/v_out) / (delta_v_out * f_s)
    """
    i_out_max = inp.p / inp.v_out
    delta_i_l = inp.ripple_i_frac * i_out_max * inp.v_out / inp.v_in
    delta_v_out = inp.ripple_v_frac * inp.v_out
    l = inp.v_in * (inp.v_out - inp.v_in) / (delta_i_l * inp.f_s * inp.v_out)
    c = i_out_max * (1.0 - inp.v_in / inp.v_out) / (delta_v_out * inp.f_s)
    return BoostDesign(
        i_out_max=i_out_max, delta_i_l=delta_i_l, delta_v_out=delta_v_out, l=l, c=c
    )


# ============================================================================
# LCL harmonic filter
# ============================================================================


@dataclass(frozen=True)
class LCLDesignInput:
    """Ratings and design fractions for the grid-side LCL filter."""

    p: float  # W, converter power rating
    v_g: float  # V, grid phase voltage (RMS)
    f_g: float  # Hz, grid frequency
    v_dc: float  # V, dc-link voltage
    f_sw: float  # Hz, inverter switching frequency
    cap_frac: float = 0.05  # filter capacitance as fraction of base
    ripple_frac: float = 0.10  # inductor current ripple fraction
    atten_factor: float = 0.2  # switching-harmonic attenuation constant

    def __post_init__(self) -> None:
        _require_positive(self, ("p", "v_g", "f_g", "v_dc", "f_sw"))
        _require_fraction(self, ("cap_frac", "ripple_frac", "atten_factor"))


@dataclass(frozen=True)
class LCLDesign:
    """Computed LCL filter values with their base quantities."""

    omega_g: float  # rad/s, grid angular frequency
    z_b: float  # ohm, per-phase base impedance
    c_b: float  # F, base capacitance
    i_max: float  # A, peak current rating
    delta_i_max: float  # A, inverter-side current ripple
    l_1: float  # H, inverter-side inductor
    c_g: float  # F, filter capacitor
    l_2: float  # H, grid-side inductor

    def __post_init__(self) -> None:
        for name in (
            "omega_g", "z_b", "c_b", "i_max", "delta_i_max", "l_1", "c_g", "l_2",
        ):
            if getattr(self, name) <= 0.0:
                raise DegenerateInput(f"{name} must be positive")
        if self.l_2 >= self.l_1:
            raise DegenerateInput(
                f"grid-side inductor l_2 {self.l_2:.4g} must be smaller "
                f"than inverter-side l_1 {self.l_1:.4g}"
            )


def lcl_design(inp: LCLDesignInput) -> LCLDesign:
    """Size the LCL filter from converter ratings.

    omega_g = 2*pi*f_g
    z_b = v_g^2 / (p/3)
    c_b = 1 / (omega_g * z_b)
    i_max = p * sqrt(2) / (3 * v_g * 0.9)
    delta_i_max = ripple_frac * i_max
    l_1 = v_dc / (6 * f_sw * delta_i_max)
    c_g = cap_frac * c_b
    l_2 = sqrt(1/atten_factor^2 + 1) / (c_g * (2*pi*f_sw)^2)
    """
    omega_g = 2.0 * math.pi * inp.f_g
    z_b = inp.v_g**2 / (inp.p / 3.0)
    c_b = 1.0 / (omega_g * z_b)
    i_max = inp.p * math.sqrt(2.0) / (3.0 * inp.v_g * _PF_DERATE)
    delta_i_max = inp.ripple_frac * i_max
    l_1 = inp.v_dc / (6.0 * inp.f_sw * delta_i_max)
    c_g = inp.cap_frac * c_b
    omega_sw = 2.0 * math.pi * inp.f_sw
    l_2 = math.sqrt(1.0 / inp.atten_factor**2 + 1.0) / (c_g * omega_sw**2)
    return LCLDesign(
        omega_g=omega_g,
        z_b=z_b,
        c_b=c_b,
        i_max=i_max,
        delta_i_max=delta_i_max,
        l_1=l_1,
        c_g=c_g,
        l_2=l_2,
    )


# ============================================================================
# Resonance placement
# ============================================================================


@dataclass(frozen=True)
class ResonanceReport:
    """LCL resonance frequency against its placement bounds.

    Bounds are compared in hertz: a valid design places the resonance
    above ten times the grid frequency and below half the switching
    frequency.
    """

    omega_res: float  # rad/s
    f_res: float  # Hz
    f_min: float  # Hz, lower placement bound (10 * f_g)
    f_max: float  # Hz, upper placement bound (0.5 * f_sw)
    passed: bool

    def __post_init__(self) -> None:
        if abs(self.f_res - self.omega_res / (2.0 * math.pi)) > 1e-9 * self.f_res:
            raise DegenerateInput("f_res must equal omega_res / 2*pi")
        if self.passed != (self.f_min < self.f_res < self.f_max):
            raise DegenerateInput("passed flag inconsistent with bounds")


def resonance_check(
    l_1: float, l_2: float, c_g: float, f_g: float, f_sw: float
) -> ResonanceReport:
    """Place the LCL resonance and verify it sits inside the valid band.

    omega_res = sqrt((l_1 + l_2) / (l_1 * l_2 * c_g)); the band is
    (10 * f_g, 0.5 * f_sw), compared in hertz.
    """
    for name, value in (
        ("l_1", l_1), ("l_2", l_2), ("c_g", c_g), ("f_g", f_g), ("f_sw", f_sw),
    ):
        if value <= 0.0:
            raise DegenerateInput(f"{name} must be positive, got {value!r}")
    omega_res = math.sqrt((l_1 + l_2) / (l_1 * l_2 * c_g))
    f_res = omega_res / (2.0 * math.pi)
    f_min = 10.0 * f_g
    f_max = 0.5 * f_sw
    return ResonanceReport(
        omega_res=omega_res,
        f_res=f_res,
        f_min=f_min,
        f_max=f_max,
        passed=f_min < f_res < f_max,
    )


# ============================================================================
# Capacitor bank
# ============================================================================


def capbank_size(q_rated: float, v_phase: float, f_g: float) -> float:
    """Per-phase capacitance of a wye bank delivering ``q_rated`` vars.

    C = Q / (3 * omega * V_phase^2); zero demand sizes a zero bank.
    """
    if q_rated < 0.0:
        raise DegenerateInput(f"q_rated must be non-negative, got {q_rated!r}")
    for name, value in (("v_phase", v_phase), ("f_g", f_g)):
        if value <= 0.0:
            raise DegenerateInput(f"{name} must be positive, got {value!r}")
    omega = 2.0 * math.pi * f_g
    return q_rated / (3.0 * omega * v_phase**2)
