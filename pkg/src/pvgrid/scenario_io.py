"""Scenario document parsing, result serialization, and report rendering.

Scenario files are JSON with fixed sections (grid, pv_module, pv_array,
inverter, compensator, profiles, sim).  Unknown keys are hard errors so
typos in scientific configurations surface immediately.  The parser
applies documented defaults for omitted optional fields and materializes
all of them on emit, making parse-emit round trips exact.
"""

from __future__ import annotations

import json
from importlib import resources

from .compensation import CompensatorConfig, FixedCapacitor, NoCompensator, Statcom
from .errors import EmptySeries, InvalidScenario, ParseError, ValidationError
from .pv_model import PVArraySpec, PVModuleSpec
from .simulator import (
    ComparisonReport,
    GridSpec,
    IrradianceStep,
    LoadStep,
    Scenario,
    TimeSeries,
)

_CSV_HEADER = (
    "t,p_pv,p_inv,q_inv,p_load,q_load,q_comp,p_comp_loss,p_grid,q_grid,pf_grid,v_dc"
)

_SI_PREFIXES = (
    (1e9, "G"),
    (1e6, "M"),
    (1e3, "k"),
    (1.0, ""),
    (1e-3, "m"),
    (1e-6, "µ"),
    (1e-9, "n"),
)


def format_si(value: float, unit: str) -> str:
    """Format a value with an engineering prefix, 5 significant digits."""
    if value == 0.0:
        return f"0 {unit}" if unit else "0"
    mag = abs(value)
    for scale, prefix in _SI_PREFIXES:
        if mag >= scale:
            return f"{value / scale:.5g} {prefix}{unit}"
    scale, prefix = _SI_PREFIXES[-1]
    return f"{value / scale:.5g} {prefix}{unit}"


# ============================================================================
# Parsing
# ============================================================================


def _require_table(doc: dict, key: str, where: str) -> dict:
    if key not in doc:
        raise ValidationError(f"{where}: missing required section '{key}'")
    value = doc[key]
    if not isinstance(value, dict):
        raise ValidationError(f"{where}: section '{key}' must be an object")
    return value


def _reject_unknown(section: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ValidationError(f"{where}: unknown keys {', '.join(unknown)}")


def _number(section: dict, key: str, where: str, default: float | None = None) -> float:
    if key not in section:
        if default is None:
            raise ValidationError(f"{where}: missing required key '{key}'")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: key '{key}' must be a number")
    return float(value)


def _integer(section: dict, key: str, where: str, default: int | None = None) -> int:
    if key not in section:
        if default is None:
            raise ValidationError(f"{where}: missing required key '{key}'")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: key '{key}' must be an integer")
    return value


def _parse_compensator(section: dict) -> CompensatorConfig:
    where = "compensator"
    if "mode" not in section:
        raise ValidationError(f"{where}: missing required key 'mode'")
    mode = section["mode"]
    if mode == "none":
        _reject_unknown(section, {"mode"}, where)
        return NoCompensator()
    if mode == "fixed_capacitor":
        _reject_unknown(section, {"mode", "q_rated", "v_rated", "loss_w"}, where)
        return FixedCapacitor(
            q_rated=_number(section, "q_rated", where),
            v_rated=_number(section, "v_rated", where),
            loss_w=_number(section, "loss_w", where, default=1300.0),
        )
    if mode == "statcom":
        _reject_unknown(section, {"mode", "q_max", "loss_floor_w", "loss_frac"}, where)
        return Statcom(
            q_max=_number(section, "q_max", where),
            loss_floor_w=_number(section, "loss_floor_w", where, default=800.0),
            loss_frac=_number(section, "loss_frac", where, default=0.0),
        )
    raise ValidationError(
        f"{where}: mode must be one of none, fixed_capacitor, statcom; got {mode!r}"
    )


def _parse_profiles(section: dict) -> tuple[tuple[IrradianceStep, ...], tuple[LoadStep, ...]]:
    _reject_unknown(section, {"irradiance", "load"}, "profiles")
    for key in ("irradiance", "load"):
        if key not in section:
            raise ValidationError(f"profiles: missing required key '{key}'")
        if not isinstance(section[key], list) or not section[key]:
            raise ValidationError(f"profiles.{key} must be a non-empty list")
    irr = []
    for idx, entry in enumerate(section["irradiance"]):
        where = f"profiles.irradiance[{idx}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where} must be an object")
        _reject_unknown(entry, {"t_start", "g", "t_cell"}, where)
        irr.append(
            IrradianceStep(
                t_start=_number(entry, "t_start", where),
                g=_number(entry, "g", where),
                t_cell=_number(entry, "t_cell", where),
            )
        )
    load = []
    for idx, entry in enumerate(section["load"]):
        where = f"profiles.load[{idx}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where} must be an object")
        _reject_unknown(entry, {"t_start", "p", "q"}, where)
        load.append(
            LoadStep(
                t_start=_number(entry, "t_start", where),
                p=_number(entry, "p", where),
                q=_number(entry, "q", where),
            )
        )
    return tuple(irr), tuple(load)


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document.

    Raises:
        ParseError: for malformed JSON or a non-object document.
        ValidationError: for missing/unknown keys, wrong types, or any
            violated scenario invariant.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"scenario is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("scenario document must be a JSON object")
    _reject_unknown(
        doc,
        {"id", "grid", "pv_module", "pv_array", "inverter", "compensator",
         "profiles", "sim"},
        "document",
    )

    scenario_id = doc.get("id", "scenario")
    if not isinstance(scenario_id, str) or not scenario_id:
        raise ValidationError("document: key 'id' must be a non-empty string")

    grid_s = _require_table(doc, "grid", "document")
    _reject_unknown(grid_s, {"v_phase", "f", "v_dc"}, "grid")
    module_s = _require_table(doc, "pv_module", "document")
    _reject_unknown(
        module_s,
        {"p_mp", "v_mp", "i_mp", "v_oc", "i_sc", "n_cells", "alpha_isc",
         "beta_voc", "g_stc", "t_stc"},
        "pv_module",
    )
    array_s = _require_table(doc, "pv_array", "document")
    _reject_unknown(array_s, {"n_series", "n_parallel"}, "pv_array")
    profiles_s = _require_table(doc, "profiles", "document")

    inverter_s = doc.get("inverter", {})
    if not isinstance(inverter_s, dict):
        raise ValidationError("document: section 'inverter' must be an object")
    _reject_unknown(inverter_s, {"efficiency"}, "inverter")
    comp_s = doc.get("compensator", {"mode": "none"})
    if not isinstance(comp_s, dict):
        raise ValidationError("document: section 'compensator' must be an object")
    sim_s = doc.get("sim", {})
    if not isinstance(sim_s, dict):
        raise ValidationError("document: section 'sim' must be an object")
    _reject_unknown(sim_s, {"t_end", "dt"}, "sim")

    irr, load = _parse_profiles(profiles_s)
    try:
        module = PVModuleSpec(
            p_mp=_number(module_s, "p_mp", "pv_module"),
            v_mp=_number(module_s, "v_mp", "pv_module"),
            i_mp=_number(module_s, "i_mp", "pv_module"),
            v_oc=_number(module_s, "v_oc", "pv_module"),
            i_sc=_number(module_s, "i_sc", "pv_module"),
            n_cells=_integer(module_s, "n_cells", "pv_module", default=60),
            alpha_isc=_number(module_s, "alpha_isc", "pv_module", default=0.00102),
            beta_voc=_number(module_s, "beta_voc", "pv_module", default=-0.0036),
            g_stc=_number(module_s, "g_stc", "pv_module", default=1000.0),
            t_stc=_number(module_s, "t_stc", "pv_module", default=25.0),
        )
        return Scenario(
            grid=GridSpec(
                v_phase=_number(grid_s, "v_phase", "grid"),
                f=_number(grid_s, "f", "grid"),
                v_dc=_number(grid_s, "v_dc", "grid"),
            ),
            array=PVArraySpec(
                module=module,
                n_series=_integer(array_s, "n_series", "pv_array"),
                n_parallel=_integer(array_s, "n_parallel", "pv_array"),
            ),
            inverter_efficiency=_number(
                inverter_s, "efficiency", "inverter", default=0.997
            ),
            irradiance_profile=irr,
            load_profile=load,
            compensator=_parse_compensator(comp_s),
            t_end=_number(sim_s, "t_end", "sim", default=0.2),
            dt=_number(sim_s, "dt", "sim", default=0.01),
            scenario_id=scenario_id,
        )
    except (ValueError, InvalidScenario) as exc:
        raise ValidationError(str(exc)) from exc


# ============================================================================
# Emission
# ============================================================================


def _compensator_doc(config: CompensatorConfig) -> dict:
    if isinstance(config, NoCompensator):
        return {"mode": "none"}
    if isinstance(config, FixedCapacitor):
        return {
            "mode": "fixed_capacitor",
            "q_rated": config.q_rated,
            "v_rated": config.v_rated,
            "loss_w": config.loss_w,
        }
    if isinstance(config, Statcom):
        return {
            "mode": "statcom",
            "q_max": config.q_max,
            "loss_floor_w": config.loss_floor_w,
            "loss_frac": config.loss_frac,
        }
    raise TypeError(f"unknown compensator configuration: {config!r}")


def emit_scenario(scenario: Scenario) -> str:
    """Serialize a scenario to canonical JSON with all defaults materialized.

    ``parse_scenario(emit_scenario(s))`` reproduces ``s`` field for field.
    """
    module = scenario.array.module
    doc = {
        "id": scenario.scenario_id,
        "grid": {
            "v_phase": scenario.grid.v_phase,
            "f": scenario.grid.f,
            "v_dc": scenario.grid.v_dc,
        },
        "pv_module": {
            "p_mp": module.p_mp,
            "v_mp": module.v_mp,
            "i_mp": module.i_mp,
            "v_oc": module.v_oc,
            "i_sc": module.i_sc,
            "n_cells": module.n_cells,
            "alpha_isc": module.alpha_isc,
            "beta_voc": module.beta_voc,
            "g_stc": module.g_stc,
            "t_stc": module.t_stc,
        },
        "pv_array": {
            "n_series": scenario.array.n_series,
            "n_parallel": scenario.array.n_parallel,
        },
        "inverter": {"efficiency": scenario.inverter_efficiency},
        "compensator": _compensator_doc(scenario.compensator),
        "profiles": {
            "irradiance": [
                {"t_start": s.t_start, "g": s.g, "t_cell": s.t_cell}
                for s in scenario.irradiance_profile
            ],
            "load": [
                {"t_start": s.t_start, "p": s.p, "q": s.q}
                for s in scenario.load_profile
            ],
        },
        "sim": {"t_end": scenario.t_end, "dt": scenario.dt},
    }
    return json.dumps(doc, indent=2) + "\n"


def emit_csv(series: TimeSeries) -> str:
    """Render a run as CSV: fixed column set, 6 significant digits, LF endings."""
    lines = [_CSV_HEADER]
    for r in series.records:
        lines.append(
            ",".join(
                format(value, ".6g")
                for value in (
                    r.t, r.p_pv, r.p_inv, r.q_inv, r.p_load, r.q_load,
                    r.q_comp, r.p_comp_loss, r.p_grid, r.q_grid,
                    r.pf_grid, r.v_dc,
                )
            )
        )
    return "\n".join(lines) + "\n"


# ============================================================================
# Report rendering
# ============================================================================


def _segment_blocks(series: TimeSeries) -> list[tuple[float, float, object]]:
    """Group consecutive records with identical steady-state values."""
    blocks = []
    start = series.records[0]
    last_t = start.t
    key = lambda r: (
        r.p_pv, r.p_inv, r.p_load, r.q_load, r.q_comp, r.p_comp_loss,
        r.p_grid, r.q_grid,
    )
    for r in series.records[1:]:
        if key(r) != key(start):
            blocks.append((start.t, last_t, start))
            start = r
        last_t = r.t
    blocks.append((start.t, last_t, start))
    return blocks


def _compensator_label(scenario: Scenario | None) -> str:
    if scenario is None:
        return "compensator"
    if isinstance(scenario.compensator, Statcom):
        return "STATCOM"
    if isinstance(scenario.compensator, FixedCapacitor):
        return "capacitor bank"
    return "compensator"


def render_report(
    series: TimeSeries,
    comparison: ComparisonReport | None = None,
    *,
    scenario: Scenario | None = None,
) -> str:
    """Human-readable per-segment summary of a run.

    When the originating scenario is supplied, the compensator row is
    labeled by its mode; when a comparison is supplied, a verdict line
    names the run that kept grid reactive power smaller.

    Raises:
        EmptySeries: if the series contains no records.
    """
    if not series.records:
        raise EmptySeries("cannot render a report for an empty series")
    label = _compensator_label(scenario)
    lines = [f"scenario: {series.scenario_id}"]
    span = f"{series.records[0].t:g} s .. {series.records[-1].t:g} s"
    lines.append(f"records: {len(series.records)}   span: {span}")
    for idx, (t0, t1, r) in enumerate(_segment_blocks(series), start=1):
        lines.append(f"segment {idx}: t = {t0:g} s .. {t1:g} s")
        lines.append(
            f"  PV P: {format_si(r.p_pv, 'W')}   "
            f"inverter P: {format_si(r.p_inv, 'W')}   "
            f"inverter Q: {format_si(r.q_inv, 'VAr')}"
        )
        lines.append(
            f"  load P: {format_si(r.p_load, 'W')}   "
            f"load Q: {format_si(r.q_load, 'VAr')}"
        )
        lines.append(
            f"  {label} Q: {format_si(r.q_comp, 'VAr')}   "
            f"loss: {format_si(r.p_comp_loss, 'W')}"
        )
        lines.append(
            f"  grid P: {format_si(r.p_grid, 'W')}   "
            f"grid Q: {format_si(r.q_grid, 'VAr')}   "
            f"pf: {r.pf_grid:.4f}"
        )
    pfs = [r.pf_grid for r in series.records]
    lines.append(f"pf_grid: min {min(pfs):.4f}, max {max(pfs):.4f}")
    if comparison is not None:
        if comparison.winner is None:
            lines.append("verdict: neither run keeps |q_grid| smaller at every step")
        else:
            lines.append(
                f"verdict: {comparison.winner} keeps |q_grid| smaller at every step "
                f"(max |q_grid|: {comparison.scenario_a} "
                f"{format_si(comparison.max_abs_q_grid_a, 'VAr')}, "
                f"{comparison.scenario_b} "
                f"{format_si(comparison.max_abs_q_grid_b, 'VAr')})"
            )
    return "\n".join(lines) + "\n"


# ============================================================================
# Bundled resources
# ============================================================================


def bundled_scenario_text(name: str) -> str:
    """Text of a bundled reference scenario, e.g. ``case1``."""
    fname = name if name.endswith(".json") else f"{name}.json"
    return (resources.files("pvgrid") / "scenarios" / fname).read_text("utf-8")


def schema_text() -> str:
    """Text of the scenario JSON schema shipped with the package."""
    return (resources.files("pvgrid") / "schemas" / "scenario.schema.json").read_text(
        "utf-8"
    )
