"""Scenario-generation (D) and risk-measure (M) circuit builders."""

from .credit import (
    DefaultRegion,
    HazardParams,
    build_counter,
    build_d_surv,
    build_m_def,
    build_m_surv,
    calibrate_hazard,
    count_qubits,
    m_def_ancillas,
)
from .equity import BinomialParams, CalibrationError, build_d_eq, build_m_max, build_m_min, calibrate_binomial
from .rates import (
    LEVELS,
    TrinomialParams,
    build_d_ir,
    build_d_migr,
    build_m_level,
    build_m_mid,
    calibrate_trinomial,
    migration_params,
)

__all__ = [
    "BinomialParams",
    "CalibrationError",
    "DefaultRegion",
    "HazardParams",
    "LEVELS",
    "TrinomialParams",
    "build_counter",
    "build_d_eq",
    "build_d_ir",
    "build_d_migr",
    "build_d_surv",
    "build_m_def",
    "build_m_level",
    "build_m_max",
    "build_m_mid",
    "build_m_min",
    "build_m_surv",
    "calibrate_binomial",
    "calibrate_hazard",
    "calibrate_trinomial",
    "count_qubits",
    "m_def_ancillas",
    "migration_params",
]
