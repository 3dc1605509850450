"""Binomial equity lattice: calibration, D_eq, M_max and M_min."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..gates import Circuit, CircuitError, RegisterLayout, and_cascade, circuit, ry, x


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class BinomialParams:
    """Binomial tree for geometric Brownian motion.

    ``mu`` and ``sigma`` are per year, ``T`` in years. Records built from a raw
    up-probability (:meth:`from_q`) carry NaN for the unknown market fields.
    """

    mu: float
    sigma: float
    T: float
    m: int
    dt: float
    u: float
    d: float
    q: float
    theta_u: float

    @classmethod
    def from_q(cls, q: float, m: int, T: float = 1.0) -> BinomialParams:
        if not 0.0 <= q <= 1.0:
            raise CalibrationError(f"q={q} outside [0, 1]")
        if m < 1:
            raise CalibrationError(f"m must be >= 1, got {m}")
        nan = float("nan")
        return cls(nan, nan, T, m, T / m, nan, nan, q, 2 * math.asin(math.sqrt(q)))

    @property
    def theta_u_degrees(self) -> float:
        return math.degrees(self.theta_u)


def calibrate_binomial(mu: float, sigma: float, T: float, m: int) -> BinomialParams:
    """Match mean and variance of GBM: u = exp(sigma sqrt(dt)), d = 1/u."""
    if not sigma > 0:
        raise CalibrationError(f"sigma must be > 0, got {sigma}")
    if not T > 0:
        raise CalibrationError(f"T must be > 0, got {T}")
    if m < 1:
        raise CalibrationError(f"m must be >= 1, got {m}")
    dt = T / m
    u = math.exp(sigma * math.sqrt(dt))
    q = (u * math.exp(mu * dt) - 1) / (u * u - 1)
    if not 0.0 <= q <= 1.0:
        raise CalibrationError(
            f"up probability q={q:.6g} outside [0, 1]; drift too large for dt={dt:g}"
        )
    return BinomialParams(mu, sigma, T, m, dt, u, 1 / u, q, 2 * math.asin(math.sqrt(q)))


def _rf(layout: RegisterLayout, m: int) -> tuple[int, ...]:
    rf = layout["rf"]
    if len(rf) != m:
        raise CircuitError(f"layout has {len(rf)} rf qubits, model needs {m}")
    return rf


def _anc(layout: RegisterLayout, need: int) -> tuple[int, ...]:
    anc = layout["anc"]
    if len(anc) < need:
        raise CircuitError(f"need {need} ancillas, layout has {len(anc)}")
    return anc


def build_d_eq(params: BinomialParams, layout: RegisterLayout) -> Circuit:
    """One Ry(theta_u) per timestep qubit; |1> is an up move."""
    rf = _rf(layout, params.m)
    return circuit([ry(params.theta_u, q) for q in rf], layout)


def build_m_max(m: int, layout: RegisterLayout) -> Circuit:
    """Flip rm iff every rf qubit is |1> (all up moves)."""
    rf = _rf(layout, m)
    anc = _anc(layout, max(0, m - 2))
    return and_cascade(rf, anc, layout.single("rm")).with_layout(layout)


def build_m_min(m: int, layout: RegisterLayout) -> Circuit:
    """Flip rm iff every rf qubit is |0> (all down moves)."""
    rf = _rf(layout, m)
    anc = _anc(layout, max(0, m - 2))
    flips = circuit([x(q) for q in rf])
    return (flips + and_cascade(rf, anc, layout.single("rm")) + flips).with_layout(layout)
