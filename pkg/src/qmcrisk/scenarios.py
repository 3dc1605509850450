"""Ready-made QAE problems for each risk scenario, with their oracle values.

Register layouts pool scratch qubits: the M-gate ancillas and the Q00
cascade ancillas come from one shared set sized to the larger demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import oracles
from .gates import RegisterLayout
from .models import (
    BinomialParams,
    DefaultRegion,
    HazardParams,
    TrinomialParams,
    build_d_eq,
    build_d_ir,
    build_d_migr,
    build_d_surv,
    build_m_def,
    build_m_level,
    build_m_max,
    build_m_min,
    build_m_surv,
    count_qubits,
    m_def_ancillas,
)
from .models.rates import LEVELS
from .qae import QaeProblem, q00_ancillas

SCENARIOS = ("eq-max", "eq-min", "ir-mid", "credit-default", "credit-survival", "migration", "worked-example")


@dataclass(frozen=True)
class Scenario:
    name: str
    problem: QaeProblem
    p_oracle: float
    oracle: oracles.OracleReport


def equity_layout(m: int, n: int) -> RegisterLayout:
    anc = max(m - 2, q00_ancillas(m + 1), 0)
    return RegisterLayout.build(rf=m, rm=1, anc=anc, out=n)


def equity_problem(params: BinomialParams, n: int, measure: str = "max") -> Scenario:
    lay = equity_layout(params.m, n)
    d = build_d_eq(params, lay)
    if measure == "max":
        mm = build_m_max(params.m, lay)
    elif measure == "min":
        mm = build_m_min(params.m, lay)
    else:
        raise ValueError(f"unknown measure {measure!r}")
    report = oracles.report_equity(params.q, params.m, measure)
    prob = QaeProblem(d, mm, lay, n, lay["rf"] + lay["rm"])
    return Scenario(f"eq-{measure}", prob, float(report.value), report)


def lattice_layout(m: int, n: int) -> RegisterLayout:
    # Q00 reflects rf + st + rm; the read gates need one ancilla of their own
    anc = max(1, q00_ancillas(2 * m + 3 + 1))
    return RegisterLayout.build(rf=2 * m, st=3, rm=1, anc=anc, out=n)


def lattice_problem(params: TrinomialParams, n: int, level: str = "m", migration: bool = False) -> Scenario:
    lay = lattice_layout(params.m, n)
    d = build_d_migr(params, lay) if migration else build_d_ir(params, lay)
    mm = build_m_level(lay, level)
    start = LEVELS.index(params.initial_level)
    dist = oracles.trinomial_distribution(params.transition, start, params.m, exact=True)
    value = dist[LEVELS.index(level)]
    report = oracles.OracleReport(f"P(level {level} after {params.m} steps)", value, "matrix-power")
    name = "migration" if migration else {"h": "ir-high", "m": "ir-mid", "l": "ir-low"}[level]
    prob = QaeProblem(d, mm, lay, n, lay["rf"] + lay["st"] + lay["rm"])
    return Scenario(name, prob, float(value), report)


def credit_default_layout(m: int, n_marks: int, n: int) -> RegisterLayout:
    s = count_qubits(m)
    scratch = s + n_marks
    anc = max(m_def_ancillas(m, range(n_marks)), q00_ancillas(m + 1) - scratch, 0)
    return RegisterLayout.build(rf=m, c=s, st=n_marks, rm=1, anc=anc, out=n)


def credit_default_problem(params: BinomialParams, region: DefaultRegion, n: int) -> Scenario:
    region.validate(params.m)
    lay = credit_default_layout(params.m, len(region.j_set), n)
    d = build_d_eq(params, lay)
    mm = build_m_def(params, region, lay)
    value = oracles.default_region_prob(params.q, params.m, region.j_set)
    report = oracles.OracleReport(f"P(j in {sorted(region.j_set)})", value, "closed-form")
    prob = QaeProblem(d, mm, lay, n, lay["rf"] + lay["rm"])
    return Scenario("credit-default", prob, float(value), report)


def survival_problem(params: HazardParams, n: int) -> Scenario:
    lay = equity_layout(params.m, n)
    d = build_d_surv(params, lay)
    mm = build_m_surv(params.m, lay)
    value = oracles.survival_prob(params.q_def, params.m)
    report = oracles.OracleReport(f"P(survive {params.m} steps)", value, "closed-form")
    prob = QaeProblem(d, mm, lay, n, lay["rf"] + lay["rm"])
    return Scenario("credit-survival", prob, float(value), report)


def worked_example_problem(q: float = math.sin(math.pi / 8), n: int = 3, m: int = 2) -> Scenario:
    """Two-step equity tree with measure max; q = sin(pi/8) puts theta on the n=3 grid."""
    sc = equity_problem(BinomialParams.from_q(q, m), n, "max")
    return Scenario("worked-example", sc.problem, sc.p_oracle, sc.oracle)


DEFAULT_MIGRATION = (
    (Fraction(90, 100), Fraction(8, 100), Fraction(2, 100)),
    (Fraction(10, 100), Fraction(80, 100), Fraction(10, 100)),
    (Fraction(0), Fraction(0), Fraction(1)),
)


def qubits_required(name: str, n: int, m: int | None = None, region_size: int = 2) -> int:
    """Register width of a scenario without building any circuit."""
    if name in ("eq-max", "eq-min", "credit-survival"):
        return equity_layout(6 if m is None else m, n).num_qubits
    if name == "worked-example":
        return equity_layout(2 if m is None else m, n).num_qubits
    if name in ("ir-mid", "migration"):
        return lattice_layout(3 if m is None else m, n).num_qubits
    if name == "credit-default":
        return credit_default_layout(6 if m is None else m, region_size, n).num_qubits
    raise ValueError(f"unknown scenario {name!r}")

