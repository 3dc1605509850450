"""Three-level trinomial short-rate lattice and rating migration.

Levels are ordered (h, m, l). Each timestep t owns an rf pair
(rf[2t], rf[2t+1]) = (b0, b1) decoded as

    b0=0, b1=0 -> mid     b0=1, b1=1 -> high     b0=1, b1=0 -> low

and b0=0, b1=1 is never produced. The st register is one-hot with
st[0]=h, st[1]=m, st[2]=l and always holds the level of the latest step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..gates import Circuit, CircuitError, RegisterLayout, circuit, concat, inverse, ry, toffoli, x
from .equity import CalibrationError

LEVELS = ("h", "m", "l")
_LOW_BOUND = Fraction(1, 6)
_HIGH_BOUND = Fraction(2, 6)
_TOL = 1e-12


def _as_fraction(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class TrinomialParams:
    """Row-stochastic 3x3 transition matrix over (h, m, l) plus run settings.

    ``a_dt`` is the dimensionless mean-reversion product a*dt; it is None for
    matrices supplied directly (rating migration). ``dr`` is informational.
    """

    transition: tuple[tuple[Fraction, Fraction, Fraction], ...]
    initial_level: str = "m"
    m: int = 3
    a_dt: Fraction | None = None
    dr: float | None = None

    def __post_init__(self):
        rows = tuple(tuple(_as_fraction(v) for v in row) for row in self.transition)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise CalibrationError("transition matrix must be 3x3")
        for name, row in zip(LEVELS, rows):
            if any(v < 0 or v > 1 for v in row):
                raise CalibrationError(f"row {name} has entries outside [0, 1]: {row}")
            if abs(float(sum(row)) - 1.0) > _TOL:
                raise CalibrationError(f"row {name} sums to {float(sum(row))}, not 1")
        if self.initial_level not in LEVELS:
            raise CalibrationError(f"initial level must be one of {LEVELS}")
        if self.m < 0:
            raise CalibrationError(f"m must be >= 0, got {self.m}")
        object.__setattr__(self, "transition", rows)

    def row(self, level: str) -> tuple[Fraction, Fraction, Fraction]:
        return self.transition[LEVELS.index(level)]

    def matrix(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.transition])

    def read_angles(self, level: str) -> tuple[float, float]:
        """(theta0, theta1) for the read block conditioned on ``level``.

        sin^2(theta0/2) = q_xm and sin^2(theta1/2) = q_xh / (1 - q_xm).
        """
        q_h, q_m, _ = (float(v) for v in self.row(level))
        theta0 = 2 * math.asin(math.sqrt(q_m))
        if 1 - q_m <= _TOL:
            return theta0, 0.0
        cond = q_h / (1 - q_m)
        if not -_TOL <= cond <= 1 + _TOL:
            raise CircuitError(f"conditional probability {cond} outside [0, 1] for level {level}")
        return theta0, 2 * math.asin(math.sqrt(min(max(cond, 0.0), 1.0)))


def calibrate_trinomial(
    a_dt=Fraction(1, 4), m: int = 3, initial_level: str = "m", variance: float | None = None
) -> TrinomialParams:
    """Transition rows for a bounded three-level mean-reverting tree.

    Requires 1/6 < a_dt < 2/6 so every probability is positive.
    """
    a = _as_fraction(a_dt)
    if not _LOW_BOUND < a < _HIGH_BOUND:
        raise CalibrationError(f"a_dt={float(a):.12g} outside the open interval (1/6, 1/3)")
    edge_far = Fraction(1, 6) - a / 2
    edge_mid = Fraction(-1, 3) + 2 * a
    edge_stay = Fraction(7, 6) - Fraction(3, 2) * a
    rows = (
        (edge_stay, edge_mid, edge_far),
        (Fraction(1, 6), Fraction(2, 3), Fraction(1, 6)),
        (edge_far, edge_mid, edge_stay),
    )
    dr = None if variance is None else math.sqrt(3 * variance)
    return TrinomialParams(rows, initial_level, m, a, dr)


def migration_params(matrix: Sequence[Sequence], m: int, initial_level: str = "h") -> TrinomialParams:
    """Rating matrix over (A, B, D) mapped onto slots (h, m, l); D must absorb."""
    params = TrinomialParams(tuple(tuple(r) for r in matrix), initial_level, m)
    if params.transition[2] != (0, 0, 1):
        raise CalibrationError(f"default row must be (0, 0, 1), got {params.transition[2]}")
    return params


def _check_layout(layout: RegisterLayout, m: int) -> None:
    if layout.size("rf") != 2 * m:
        raise CircuitError(f"layout has {layout.size('rf')} rf qubits, need {2 * m}")
    if layout.size("st") != 3:
        raise CircuitError(f"layout has {layout.size('st')} st qubits, need 3")
    if m > 0 and layout.size("anc") < 1:
        raise CircuitError("read gates need one ancilla")


def _write(layout: RegisterLayout, t: int) -> Circuit:
    """Copy the level decoded from rf pair t into the (cleared) st register."""
    b0, b1 = layout["rf"][2 * t], layout["rf"][2 * t + 1]
    st_h, st_m, st_l = layout["st"]
    gates = [toffoli(b0, b1, st_h)]
    gates += [x(b0), x(b1), toffoli(b0, b1, st_m), x(b0), x(b1)]
    gates += [x(b1), toffoli(b0, b1, st_l), x(b1)]
    return circuit(gates)


def _read(params: TrinomialParams, layout: RegisterLayout, t: int) -> Circuit:
    """Sample rf pair t from the row of the level held in st."""
    b0, b1 = layout["rf"][2 * t], layout["rf"][2 * t + 1]
    anc = layout["anc"][0]
    gates = []
    for level, st in zip(LEVELS, layout["st"]):
        theta0, theta1 = params.read_angles(level)
        # b0 = 1 (leave mid) with probability 1 - q_xm
        gates.append(ry(math.pi - theta0, b0, (st,)))
        gates.append(toffoli(st, b0, anc))
        gates.append(ry(theta1, b1, (anc,)))
        gates.append(toffoli(st, b0, anc))
    return circuit(gates)


def build_d_ir(params: TrinomialParams, layout: RegisterLayout) -> Circuit:
    """W0, then per step: read R_t, unwrite W_{t-1}, write W_t."""
    _check_layout(layout, params.m)
    w0 = circuit([x(layout["st"][LEVELS.index(params.initial_level)])])
    parts = [w0]
    prev = w0
    for t in range(params.m):
        w_t = _write(layout, t)
        parts += [_read(params, layout, t), inverse(prev), w_t]
        prev = w_t
    return concat(*parts).with_layout(layout)


def build_m_level(layout: RegisterLayout, level: str = "m") -> Circuit:
    """CNOT from the st qubit of ``level`` onto rm."""
    if level not in LEVELS:
        raise CircuitError(f"level must be one of {LEVELS}")
    if layout.size("st") != 3:
        raise CircuitError(f"layout has {layout.size('st')} st qubits, need 3")
    st = layout["st"][LEVELS.index(level)]
    return circuit([x(layout.single("rm"), (st,))], layout)


def build_m_mid(layout: RegisterLayout) -> Circuit:
    return build_m_level(layout, "m")


def build_d_migr(params: TrinomialParams, layout: RegisterLayout) -> Circuit:
    """Rating migration reuses the trinomial machinery; default sits in the low slot."""
    if params.transition[2] != (0, 0, 1):
        raise CalibrationError(f"default row must be (0, 0, 1), got {params.transition[2]}")
    return build_d_ir(params, layout)
