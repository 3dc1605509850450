"""Decomposed depth versus model size (m) or output precision (n).

No simulation happens here; circuits are only built and lowered. The
extrapolated figures are labelled as such and are fits, not measurements.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..decompose import decomposed_depth
from ..gates import RegisterLayout
from ..models import (
    DefaultRegion,
    build_d_eq,
    build_d_ir,
    build_d_surv,
    build_m_def,
    build_m_max,
    build_m_min,
    calibrate_binomial,
    calibrate_hazard,
    calibrate_trinomial,
    count_qubits,
    m_def_ancillas,
)
from ..qae import full_circuit_decomposed_depth
from ..scenarios import equity_problem

FAMILIES = ("d_eq", "m_max", "m_min", "m_def", "d_ir", "d_surv", "full-eq-max")
LINEAR_TARGET_M = 1000
EXPONENTIAL_TARGET_N = 14


@dataclass(frozen=True)
class DepthRow:
    size: int
    depth: int
    qubits: int


@dataclass
class DepthScan:
    family: str
    axis: str
    rows: list[DepthRow]
    fit: dict = field(default_factory=dict)
    extrapolation: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = [f"{self.axis},depth,qubits"]
        lines += [f"{r.size},{r.depth},{r.qubits}" for r in self.rows]
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        out = [f"family {self.family} ({self.axis} = {self.rows[0].size}..{self.rows[-1].size})"]
        for key, val in self.fit.items():
            out.append(f"  fit {key}: {val:.6g}" if isinstance(val, float) else f"  fit {key}: {val}")
        for key, val in self.extrapolation.items():
            out.append(f"  {key}: {val}")
        return "\n".join(out)


def linear_fit(sizes, depths) -> dict:
    x = np.asarray(sizes, dtype=float)
    y = np.asarray(depths, dtype=float)
    if len(x) < 2:
        return {"slope": 0.0, "intercept": float(y[0]) if len(y) else 0.0, "r2": 1.0}
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1 - float(np.sum(resid ** 2)) / ss_tot
    return {"slope": float(slope), "intercept": float(intercept), "r2": r2}


def _circuit_for(family: str, m: int):
    if family in ("d_eq", "m_max", "m_min"):
        lay = RegisterLayout.build(rf=m, rm=1, anc=max(m - 2, 0))
        params = calibrate_binomial(0.08, 0.2, 1.0, m)
        if family == "d_eq":
            return build_d_eq(params, lay), lay
        if family == "m_max":
            return build_m_max(m, lay), lay
        return build_m_min(m, lay), lay
    if family == "m_def":
        params = calibrate_binomial(0.08, 0.2, 1.0, m)
        js = (0, 1) if m >= 1 else (0,)
        lay = RegisterLayout.build(rf=m, c=count_qubits(m), st=len(js), rm=1, anc=m_def_ancillas(m, js))
        return build_m_def(params, DefaultRegion(frozenset(js)), lay), lay
    if family == "d_ir":
        lay = RegisterLayout.build(rf=2 * m, st=3, rm=1, anc=1)
        return build_d_ir(calibrate_trinomial(m=m), lay), lay
    if family == "d_surv":
        lay = RegisterLayout.build(rf=m, rm=1)
        return build_d_surv(calibrate_hazard(0.02, m), lay), lay
    raise ValueError(f"unknown family {family!r}")


def depth_scan(family: str, sizes) -> DepthScan:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose one of {FAMILIES}")
    sizes = list(sizes)
    if not sizes:
        raise ValueError("empty size range")
    if family == "full-eq-max":
        params = calibrate_binomial(0.08, 0.2, 1.0, 6)
        rows = []
        for n in sizes:
            problem = equity_problem(params, n, "max").problem
            rows.append(DepthRow(n, full_circuit_decomposed_depth(problem), problem.num_qubits))
        ratios = [b.depth / a.depth for a, b in zip(rows, rows[1:])]
        fit = {"ratios": [round(r, 6) for r in ratios]}
        if ratios:
            fit["mean_ratio"] = float(np.mean(ratios))
        scan = DepthScan(family, "n", rows, fit)
        last = rows[-1]
        if last.size < EXPONENTIAL_TARGET_N and ratios:
            steps = EXPONENTIAL_TARGET_N - last.size
            scan.extrapolation[f"extrapolated depth at n={EXPONENTIAL_TARGET_N} (geometric, ratio {ratios[-1]:.4f})"] = (
                f"{last.depth * ratios[-1] ** steps:.4g}"
            )
            target = equity_problem(params, EXPONENTIAL_TARGET_N, "max").problem
            scan.extrapolation[f"computed depth at n={EXPONENTIAL_TARGET_N} (built, not simulated)"] = (
                f"{full_circuit_decomposed_depth(target)} on {target.num_qubits} qubits"
            )
        return scan
    rows = []
    for m in sizes:
        circ, lay = _circuit_for(family, m)
        rows.append(DepthRow(m, decomposed_depth(circ), lay.num_qubits))
    fit = linear_fit([r.size for r in rows], [r.depth for r in rows])
    scan = DepthScan(family, "m", rows, fit)
    pred = fit["slope"] * LINEAR_TARGET_M + fit["intercept"]
    scan.extrapolation[f"extrapolated depth at m={LINEAR_TARGET_M} (linear fit)"] = f"{pred:.4g}"
    return scan
