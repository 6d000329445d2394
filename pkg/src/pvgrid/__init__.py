"""Design toolkit and quasi-steady-state simulator for a grid-connected
solar PV array with reactive-power compensation.
"""

from __future__ import annotations

from .compensation import (
    CompensatorConfig,
    CompensatorOutput,
    FixedCapacitor,
    NoCompensator,
    PFSense,
    Statcom,
    capbank_q,
    dispatch,
    power_factor,
    statcom_dispatch,
)
from .component_design import (
    BoostDesign,
    BoostDesignInput,
    LCLDesign,
    LCLDesignInput,
    ResonanceReport,
    boost_design,
    capbank_size,
    lcl_design,
    resonance_check,
)
from .errors import (
    CalibrationFailure,
    DarkArray,
    DegenerateInput,
    EmptySeries,
    GridMismatch,
    InfeasibleSpec,
    InvalidScenario,
    NonConvergence,
    ParseError,
    PVGridError,
    UndefinedPF,
    ValidationError,
)
from .pv_model import (
    EnvCondition,
    IVCurve,
    IVPoint,
    MPPResult,
    PVArraySpec,
    PVModuleSpec,
    SingleDiodeParams,
    adjust_params,
    array_iv_sweep,
    extract_single_diode_params,
    module_current,
    module_voc,
    mpp,
)
from .scenario_io import (
    bundled_scenario_text,
    emit_csv,
    emit_scenario,
    parse_scenario,
    render_report,
    schema_text,
)
from .simulator import (
    ComparisonReport,
    GridSpec,
    IrradianceStep,
    LoadStep,
    PowerFlowRecord,
    Scenario,
    TimeSeries,
    compare_runs,
    run,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "BoostDesign",
    "BoostDesignInput",
    "CalibrationFailure",
    "ComparisonReport",
    "CompensatorConfig",
    "CompensatorOutput",
    "DarkArray",
    "DegenerateInput",
    "EmptySeries",
    "EnvCondition",
    "FixedCapacitor",
    "GridMismatch",
    "GridSpec",
    "IVCurve",
    "IVPoint",
    "InfeasibleSpec",
    "InvalidScenario",
    "IrradianceStep",
    "LCLDesign",
    "LCLDesignInput",
    "LoadStep",
    "MPPResult",
    "NoCompensator",
    "NonConvergence",
    "PFSense",
    "PVArraySpec",
    "PVGridError",
    "PVModuleSpec",
    "ParseError",
    "PowerFlowRecord",
    "ResonanceReport",
    "Scenario",
    "SingleDiodeParams",
    "Statcom",
    "TimeSeries",
    "UndefinedPF",
    "ValidationError",
    "adjust_params",
    "array_iv_sweep",
    "boost_design",
    "bundled_scenario_text",
    "capbank_q",
    "capbank_size",
    "compare_runs",
    "dispatch",
    "emit_csv",
    "emit_scenario",
    "extract_single_diode_params",
    "lcl_design",
    "module_current",
    "module_voc",
    "mpp",
    "parse_scenario",
    "power_factor",
    "render_report",
    "resonance_check",
    "run",
    "schema_text",
    "statcom_dispatch",
    "step",
]
