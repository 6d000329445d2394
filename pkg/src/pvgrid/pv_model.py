"""Single-diode PV model: calibration, evaluation, and maximum power.

The module current obeys the implicit five-parameter diode equation

    I = i_ph - i_0*(exp((V + I*r_s)/a) - 1) - (V + I*r_s)/r_sh

with a = n_ideality * n_cells * k*T/q the modified diode voltage.
Calibration recovers (i_ph, i_0, r_s, r_sh) from four datasheet ratings
at a fixed ideality: the three boundary conditions I(0) = i_sc,
I(v_oc) = 0, I(v_mp) = i_mp are linear in (i_ph, i_0, 1/r_sh) once r_s
is fixed, and r_s itself is pinned by requiring dP/dV = 0 at the rated
maximum-power point.  The datasheet points are therefore reproduced
exactly by construction, not fitted.

Translation to other operating points keeps r_s and the diode voltage
fixed at their calibration values: temperature enters only through the
datasheet current/voltage coefficients, irradiance scales the
short-circuit current linearly and the shunt resistance inversely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.constants import Boltzmann, elementary_charge
from scipy.optimize import brentq

from .errors import DarkArray, InfeasibleSpec, NonConvergence
from .numerics import golden_max, newton_bisect

# Ideality values tried when calibration at the requested guess admits no
# physical shunt resistance.  Ordered preference: unity (canonical
# crystalline silicon) outward.
_IDEALITY_FALLBACKS = (
    1.0, 1.05, 0.95, 1.1, 0.9, 1.15, 0.85, 1.2, 0.8, 1.25, 0.75, 1.3, 1.35, 1.4,
)

# Exponent cap: beyond this exp() overflows a double; treat as saturation.
_EXP_CAP = 690.0


def thermal_voltage(t_c: float) -> float:
    """Diode thermal voltage kT/q in volts at cell temperature ``t_c`` °C."""
    return Boltzmann * (t_c + 273.15) / elementary_charge


# ============================================================================
# Domain types
# ============================================================================


@dataclass(frozen=True)
class PVModuleSpec:
    """Datasheet ratings of one PV module at standard test conditions."""

    p_mp: float  # W, rated maximum power
    v_mp: float  # V, voltage at maximum power
    i_mp: float  # A, current at maximum power
    v_oc: float  # V, open-circuit voltage
    i_sc: float  # A, short-circuit current
    n_cells: int = 60  # series cells per module
    alpha_isc: float = 0.00102  # 1/°C, short-circuit current coefficient
    beta_voc: float = -0.0036  # 1/°C, open-circuit voltage coefficient
    g_stc: float = 1000.0  # W/m²
    t_stc: float = 25.0  # °C

    def __post_init__(self) -> None:
        if not 0.0 < self.v_mp < self.v_oc:
            raise ValueError(f"require 0 < v_mp < v_oc, got {self.v_mp}, {self.v_oc}")
        if not 0.0 < self.i_mp < self.i_sc:
            raise ValueError(f"require 0 < i_mp < i_sc, got {self.i_mp}, {self.i_sc}")
        if abs(self.p_mp - self.v_mp * self.i_mp) > 0.01 * self.p_mp:
            raise ValueError(
                f"p_mp {self.p_mp} differs from v_mp*i_mp "
                f"{self.v_mp * self.i_mp} by more than 1%"
            )
        if self.alpha_isc <= 0.0:
            raise ValueError("alpha_isc must be positive")
        if self.beta_voc >= 0.0:
            raise ValueError("beta_voc must be negative")
        if self.n_cells < 1:
            raise ValueError("n_cells must be at least 1")
        if self.g_stc <= 0.0:
            raise ValueError("g_stc must be positive")


@dataclass(frozen=True)
class PVArraySpec:
    """Series/parallel composition of identical modules."""

    module: PVModuleSpec
    n_series: int
    n_parallel: int

    def __post_init__(self) -> None:
        if self.n_series < 1 or self.n_parallel < 1:
            raise ValueError(
                f"array needs n_series >= 1 and n_parallel >= 1, "
                f"got {self.n_series} x {self.n_parallel}"
            )

    @property
    def v_oc(self) -> float:
        """Array open-circuit voltage at STC, volts."""
        return self.n_series * self.module.v_oc

    @property
    def i_sc(self) -> float:
        """Array short-circuit current at STC, amperes."""
        return self.n_parallel * self.module.i_sc


@dataclass(frozen=True)
class SingleDiodeParams:
    """Five-parameter electrical model of one module.

    ``a`` is the modified diode voltage n_ideality*n_cells*kT/q evaluated
    at the calibration reference temperature; it is carried explicitly so
    the model is self-contained for evaluation and stays frozen under
    operating-point translation.
    """

    i_ph: float  # A, photocurrent (0 for a dark curve)
    i_0: float  # A, diode saturation current
    n_ideality: float  # per-cell diode ideality factor
    r_s: float  # ohm, series resistance
    r_sh: float  # ohm, shunt resistance
    a: float  # V, modified diode voltage n*Ns*kT/q

    def __post_init__(self) -> None:
        if self.i_ph < 0.0:
            raise ValueError(f"i_ph must be non-negative, got {self.i_ph}")
        for name in ("i_0", "n_ideality", "r_s", "r_sh", "a"):
            if getattr(self, name) <= 0.0 or not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite and positive")
        if self.r_sh < 10.0 * self.r_s:
            raise ValueError(
                f"shunt resistance {self.r_sh:.4g} is not at least "
                f"10x series resistance {self.r_s:.4g}"
            )


@dataclass(frozen=True)
class EnvCondition:
    """Operating environment: irradiance and cell temperature."""

    g: float  # W/m²
    t: float  # °C, cell temperature

    def __post_init__(self) -> None:
        if self.g < 0.0:
            raise ValueError(f"irradiance must be non-negative, got {self.g}")
        if not -40.0 <= self.t <= 90.0:
            raise ValueError(f"cell temperature {self.t} outside [-40, 90] °C")


class IVPoint(NamedTuple):
    v: float  # V
    i: float  # A
    p: float  # W


@dataclass(frozen=True)
class IVCurve:
    """Sampled I-V / P-V characteristic, voltage ascending from zero."""

    points: tuple[IVPoint, ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("curve needs at least one point")
        if self.points[0].v != 0.0:
            raise ValueError("curve must start at v = 0")
        # Slack covers implicit-solver residual noise between samples.
        slack = 1e-9 * max(1.0, abs(self.points[0].i))
        prev = self.points[0]
        for pt in self.points[1:]:
            if pt.v <= prev.v:
                raise ValueError("curve voltages must be strictly increasing")
            if pt.i > prev.i + slack:
                raise ValueError("curve current must be non-increasing")
            prev = pt
        for pt in self.points:
            if pt.p != pt.v * pt.i:
                raise ValueError("curve power must equal v*i at every point")

    def to_csv(self) -> str:
        """Render the curve as CSV with header ``v,i,p``, 6 significant digits."""
        lines = ["v,i,p"]
        lines.extend(
            f"{pt.v:.6g},{pt.i:.6g},{pt.p:.6g}" for pt in self.points
        )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MPPResult:
    """Located maximum power point."""

    v_mp: float  # V
    i_mp: float  # A
    p_mp: float  # W

    def __post_init__(self) -> None:
        if self.p_mp != self.v_mp * self.i_mp:
            raise ValueError("p_mp must equal v_mp * i_mp")
        if self.p_mp <= 0.0:
            raise ValueError("maximum power must be positive")


# ============================================================================
# Model evaluation
# ============================================================================


def _diode_exp(z: float) -> float:
    """exp(z) - 1 with a saturation cap instead of overflow."""
    if z > _EXP_CAP:
        return math.inf
    return math.expm1(z)


def module_current(params: SingleDiodeParams, v: float) -> float:
    """Solve the implicit diode equation for module current at voltage ``v``.

    A safeguarded Newton iteration on the residual keeps a sign-changing
    bracket at all times, so the result is deterministic and the residual
    is below 1e-9 of the photocurrent scale.

    Args:
        params: Module parameters, already translated to the operating point.
        v: Terminal voltage, >= 0.

    Returns:
        Module current in amperes.

    Raises:
        NonConvergence: if the iteration budget is exhausted.
    """
    if v < 0.0:
        raise ValueError(f"voltage must be non-negative, got {v}")
    i_ph, i_0, r_s, r_sh, a = params.i_ph, params.i_0, params.r_s, params.r_sh, params.a

    def residual(i: float) -> float:
        x = v + i * r_s
        e = _diode_exp(x / a)
        if math.isinf(e):
            return -math.inf
        return i_ph - i_0 * e - x / r_sh - i

    def derivative(i: float) -> float:
        z = (v + i * r_s) / a
        if z > _EXP_CAP:
            return -math.inf
        return -(i_0 * r_s / a) * math.exp(z) - r_s / r_sh - 1.0

    f_tol = 1e-9 * max(i_ph, 1.0)
    hi = i_ph + 1.0
    lo = -0.02 * i_ph - 1.0
    while residual(lo) <= 0.0:
        lo *= 4.0
        if lo < -1e12:
            raise NonConvergence("module_current: could not bracket the root")
    # Shunt-free explicit evaluation is an excellent starting iterate.
    guess = i_ph - i_0 * _diode_exp(min(v / a, _EXP_CAP)) - v / r_sh
    if not lo < guess < hi:
        guess = None
    return newton_bisect(residual, derivative, lo, hi, f_tol=f_tol, x0=guess)


def module_voc(params: SingleDiodeParams) -> float:
    """Open-circuit voltage of a module, volts (0 for a dark curve).

    At I = 0 the diode equation is explicit in voltage, so the root is
    located directly instead of nesting current solves.
    """
    if params.i_ph <= 0.0:
        return 0.0
    i_ph, i_0, r_sh, a = params.i_ph, params.i_0, params.r_sh, params.a

    def residual(v: float) -> float:
        return i_ph - i_0 * _diode_exp(v / a) - v / r_sh

    v_hi = a * math.log1p(i_ph / i_0)  # diode-only voc, upper bound with shunt
    return float(brentq(residual, 0.0, v_hi, xtol=1e-12, rtol=8.9e-16))


# ============================================================================
# Calibration
# ============================================================================


def _fit_at_ideality(spec: PVModuleSpec, n_ideality: float) -> SingleDiodeParams:
    """Exact four-condition calibration at a fixed ideality factor.

    For fixed r_s the conditions I(0) = i_sc, I(v_oc) = 0 and
    I(v_mp) = i_mp are linear in (i_ph, i_0, 1/r_sh); r_s is then the
    root of the maximum-power slope condition i_mp + v_mp*dI/dV = 0.

    Raises:
        InfeasibleSpec: if no r_s in (0, (v_oc - v_mp)/i_mp) gives a
            positive shunt resistance satisfying the slope condition.
    """
    a = n_ideality * spec.n_cells * thermal_voltage(spec.t_stc)
    anchors = (
        (0.0, spec.i_sc, spec.i_sc),
        (spec.v_oc, 0.0, 0.0),
        (spec.v_mp, spec.i_mp, spec.i_mp),
    )

    def linear_fit(r_s: float) -> tuple[float, float, float]:
        rows, rhs = [], []
        for v, i, target in anchors:
            x = v + i * r_s
            rows.append([1.0, -math.expm1(x / a), -x])
            rhs.append(target)
        i_ph, i_0, g_sh = np.linalg.solve(np.array(rows), np.array(rhs))
        return float(i_ph), float(i_0), float(g_sh)

    def mpp_slope(r_s: float) -> float:
        # dP/dV at the rated MPP; zero when (v_mp, i_mp) is the maximum.
        _, i_0, g_sh = linear_fit(r_s)
        u = (i_0 / a) * math.exp((spec.v_mp + spec.i_mp * r_s) / a)
        di_dv = -(u + g_sh) / (1.0 + r_s * (u + g_sh))
        return spec.i_mp + spec.v_mp * di_dv

    def shunt_conductance(r_s: float) -> float:
        return linear_fit(r_s)[2]

    r_s_lo = 1e-9
    r_s_cap = (spec.v_oc - spec.v_mp) / spec.i_mp * (1.0 - 1e-9)
    if shunt_conductance(r_s_lo) <= 0.0:
        raise InfeasibleSpec(
            f"ideality {n_ideality:g}: shunt resistance negative for every r_s"
        )
    if mpp_slope(r_s_lo) <= 0.0:
        raise InfeasibleSpec("fill factor implies r_s < 0")
    # Restrict the search to the physical branch g_sh > 0.
    r_s_hi = r_s_cap
    if shunt_conductance(r_s_cap) <= 0.0:
        r_s_hi = float(brentq(shunt_conductance, r_s_lo, r_s_cap)) * (1.0 - 1e-9)
    if mpp_slope(r_s_hi) >= 0.0:
        raise InfeasibleSpec(
            f"ideality {n_ideality:g}: no physical shunt resistance "
            f"satisfies the maximum-power condition"
        )
    r_s = float(brentq(mpp_slope, r_s_lo, r_s_hi, xtol=1e-14))
    i_ph, i_0, g_sh = linear_fit(r_s)
    if i_0 <= 0.0 or g_sh <= 0.0:
        raise InfeasibleSpec(
            f"ideality {n_ideality:g}: calibration gave unphysical parameters"
        )
    r_sh = 1.0 / g_sh
    if r_sh < 10.0 * r_s:
        raise InfeasibleSpec(
            f"ideality {n_ideality:g}: shunt resistance {r_sh:.3g} below "
            f"10x series resistance {r_s:.3g}"
        )
    return SingleDiodeParams(
        i_ph=i_ph, i_0=i_0, n_ideality=n_ideality, r_s=r_s, r_sh=r_sh, a=a
    )


def _verify_calibration(spec: PVModuleSpec, params: SingleDiodeParams) -> bool:
    """Check the three STC conditions to 0.5% relative error."""
    tol = 0.005
    if abs(module_current(params, 0.0) - spec.i_sc) > tol * spec.i_sc:
        return False
    if abs(module_current(params, spec.v_oc)) > tol * spec.i_sc:
        return False
    v_mp, p_mp = golden_max(
        lambda v: v * module_current(params, v),
        0.0,
        module_voc(params),
        x_tol=1e-6 * spec.v_oc,
    )
    return (
        abs(p_mp - spec.p_mp) <= tol * spec.p_mp
        and abs(v_mp - spec.v_mp) <= tol * spec.v_mp
    )


def extract_single_diode_params(
    spec: PVModuleSpec, *, n_ideality_guess: float = 1.3
) -> SingleDiodeParams:
    """Calibrate the five-parameter model from datasheet ratings.

    The requested ideality is tried first.  Many datasheets admit no
    physical parameter set at an arbitrary ideality (the implied shunt
    resistance turns negative), so canonical fallback values are tried
    in order of preference until one verifies; the chosen value is
    recorded in the returned parameters.

    Args:
        spec: Datasheet ratings.
        n_ideality_guess: Per-cell diode ideality tried first.

    Returns:
        Calibrated parameters whose STC curve reproduces i_sc, v_oc and
        the rated maximum power point within 0.5%.

    Raises:
        InfeasibleSpec: if no candidate ideality yields a physical model.
        NonConvergence: if the underlying solves exhaust their budgets.
    """
    if n_ideality_guess <= 0.0:
        raise ValueError("ideality guess must be positive")
    candidates = [n_ideality_guess]
    candidates.extend(n for n in _IDEALITY_FALLBACKS if n != n_ideality_guess)
    last_error: InfeasibleSpec | None = None
    for n in candidates:
        try:
            params = _fit_at_ideality(spec, n)
        except InfeasibleSpec as exc:
            if last_error is None:
                last_error = exc
            continue
        if _verify_calibration(spec, params):
            return params
    if last_error is not None:
        raise last_error
    raise InfeasibleSpec("no candidate ideality produced a verifiable calibration")


def adjust_params(
    params: SingleDiodeParams, spec: PVModuleSpec, env: EnvCondition
) -> SingleDiodeParams:
    """Translate STC-calibrated parameters to another operating point.

    Temperature acts through the datasheet coefficients: the photocurrent
    and saturation current are re-anchored so that at STC irradiance the
    short-circuit current shifts by alpha_isc and the open-circuit
    voltage by beta_voc.  Irradiance then scales the short-circuit
    current linearly and the shunt resistance inversely (partial
    shunt currents shrink with light), while r_s and the diode voltage
    stay at their calibration values.

    At env exactly equal to STC the input is returned unchanged.
    """
    if env.g == spec.g_stc and env.t == spec.t_stc:
        return params
    d_t = env.t - spec.t_stc
    i_sc_t = spec.i_sc * (1.0 + spec.alpha_isc * d_t)
    v_oc_t = spec.v_oc * (1.0 + spec.beta_voc * d_t)
    if i_sc_t <= 0.0 or v_oc_t <= 0.0:
        raise ValueError(f"temperature {env.t} °C drives datasheet ratings negative")
    r_s, r_sh_ref, a = params.r_s, params.r_sh, params.a

    # Stage 1: at STC irradiance, solve the 2x2 linear system for
    # (i_ph, i_0) that pins I(0) = i_sc_t and I(v_oc_t) = 0.
    e_sc = math.expm1(i_sc_t * r_s / a)
    e_oc = math.expm1(v_oc_t / a)
    k = e_sc / e_oc
    i_ph_t = (i_sc_t * (1.0 + r_s / r_sh_ref) - k * v_oc_t / r_sh_ref) / (1.0 - k)
    i_0_t = (i_ph_t - v_oc_t / r_sh_ref) / e_oc

    # Stage 2: irradiance scaling; the dark curve keeps the reference shunt.
    if env.g > 0.0:
        r_sh = r_sh_ref * spec.g_stc / env.g
    else:
        r_sh = r_sh_ref
    i_sc_gt = i_sc_t * env.g / spec.g_stc
    i_ph = i_sc_gt * (1.0 + r_s / r_sh) + i_0_t * math.expm1(i_sc_gt * r_s / a)
    return SingleDiodeParams(
        i_ph=i_ph, i_0=i_0_t, n_ideality=params.n_ideality, r_s=r_s, r_sh=r_sh, a=a
    )


# ============================================================================
# Array-level evaluation
# ============================================================================


def array_iv_sweep(
    array: PVArraySpec,
    params: SingleDiodeParams,
    env: EnvCondition,
    n_points: int,
) -> IVCurve:
    """Sample the array I-V / P-V characteristic at an operating point.

    The module curve is evaluated on an even voltage grid spanning
    [0, v_oc] and scaled exactly by the series/parallel counts.  A dark
    array (zero irradiance) collapses to the single point (0, 0, 0).

    Args:
        array: Series/parallel composition.
        params: STC-calibrated module parameters.
        env: Operating environment.
        n_points: Number of samples, >= 3.
    """
    if n_points < 3:
        raise ValueError(f"n_points must be at least 3, got {n_points}")
    params_e = adjust_params(params, array.module, env)
    v_oc_m = module_voc(params_e)
    if v_oc_m <= 0.0:
        return IVCurve(points=(IVPoint(0.0, 0.0, 0.0),))
    points = []
    for v_m in np.linspace(0.0, v_oc_m, n_points):
        i_m = module_current(params_e, float(v_m))
        v = float(v_m) * array.n_series
        i = i_m * array.n_parallel
        points.append(IVPoint(v, i, v * i))
    return IVCurve(points=tuple(points))


def mpp(
    array: PVArraySpec, params: SingleDiodeParams, env: EnvCondition
) -> MPPResult:
    """Locate the array maximum power point at an operating point.

    Golden-section search over the unimodal module P(V) curve, then a
    bracketing refinement until the central-difference power gradient,
    normalized by p_mp/v_mp, falls below 1e-4.  Module results scale
    exactly by the series/parallel counts.

    Raises:
        DarkArray: at zero irradiance, where no maximum above 0 W exists.
    """
    if env.g <= 0.0:
        raise DarkArray("no maximum power point at zero irradiance")
    params_e = adjust_params(params, array.module, env)
    if params_e.i_ph <= 0.0:
        raise DarkArray("no maximum power point for a dark curve")
    v_oc_m = module_voc(params_e)

    def power(v: float) -> float:
        return v * module_current(params_e, v)

    x_tol = 1e-6 * v_oc_m
    v_m, p_m = golden_max(power, 0.0, v_oc_m, x_tol=x_tol)
    h = 1e-6 * v_oc_m
    for _ in range(4):
        slope = (power(v_m + h) - power(v_m - h)) / (2.0 * h)
        if abs(slope) * v_m / p_m < 1e-4:
            break
        lo = max(0.0, v_m - 20.0 * x_tol)
        hi = min(v_oc_m, v_m + 20.0 * x_tol)
        x_tol /= 10.0
        v_m, p_m = golden_max(power, lo, hi, x_tol=x_tol)
    else:
        raise NonConvergence("mpp: gradient criterion not met after refinement")
    i_m = module_current(params_e, v_m)
    v_mp = v_m * array.n_series
    i_mp = i_m * array.n_parallel
    return MPPResult(v_mp=v_mp, i_mp=i_mp, p_mp=v_mp * i_mp)
