"""Classical reference values: closed forms, path enumeration, matrix powers, Monte Carlo."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

PATH_ENUM_MAX_STEPS = 6  # 3^6 trinomial paths; binomial enumeration capped at 2^20
BINOMIAL_ENUM_MAX_STEPS = 20
METHODS = ("closed-form", "path-enumeration", "matrix-power", "monte-carlo")


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class OracleReport:
    quantity: str
    value: float | Fraction
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise OracleError(f"unknown method {self.method!r}")

    def __float__(self) -> float:
        return float(self.value)


def _check_prob(q, name="q"):
    if not 0 <= q <= 1:
        raise OracleError(f"{name}={q} outside [0, 1]")


def binomial_pmf(j: int, m: int, q):
    """C(m, j) q^j (1-q)^(m-j); exact when q is a Fraction."""
    if m < 0 or not 0 <= j <= m:
        raise OracleError(f"need 0 <= j <= m, got j={j}, m={m}")
    _check_prob(q)
    return math.comb(m, j) * q ** j * (1 - q) ** (m - j)


def binomial_by_paths(m: int, q: float) -> np.ndarray:
    """Up-count distribution from all 2^m up/down paths."""
    if m > BINOMIAL_ENUM_MAX_STEPS:
        raise OracleError(f"enumeration capped at {BINOMIAL_ENUM_MAX_STEPS} steps")
    out = np.zeros(m + 1)
    for path in itertools.product((0, 1), repeat=m):
        ups = sum(path)
        out[ups] += q ** ups * (1 - q) ** (m - ups)
    return out


def _check_stochastic(matrix) -> None:
    for row in matrix:
        if any(v < 0 or v > 1 for v in row):
            raise OracleError(f"row {row} has entries outside [0, 1]")
        if abs(float(sum(row)) - 1) > 1e-12:
            raise OracleError(f"row {row} does not sum to 1")


def _initial_vector(initial, size: int):
    if isinstance(initial, (int, np.integer)):
        vec = [0] * size
        vec[int(initial)] = 1
        return vec
    return list(initial)


def trinomial_distribution(transition: Sequence[Sequence], initial, steps: int, exact: bool = False):
    """initial^T P^steps. ``initial`` is a level index or a probability vector.

    With ``exact=True`` the arithmetic is carried in Fractions.
    """
    _check_stochastic(transition)
    if steps < 0:
        raise OracleError("steps must be >= 0")
    size = len(transition)
    vec = _initial_vector(initial, size)
    if exact:
        mat = [[Fraction(v) for v in row] for row in transition]
        cur = [Fraction(v) for v in vec]
        for _ in range(steps):
            cur = [sum(cur[i] * mat[i][j] for i in range(size)) for j in range(size)]
        return tuple(cur)
    mat = np.array([[float(v) for v in row] for row in transition])
    return np.asarray(vec, dtype=float) @ np.linalg.matrix_power(mat, steps)


def trinomial_by_paths(transition: Sequence[Sequence], initial: int, steps: int):
    """Sum the probability of every level path of length ``steps``."""
    _check_stochastic(transition)
    if steps > PATH_ENUM_MAX_STEPS:
        raise OracleError(f"path enumeration capped at {PATH_ENUM_MAX_STEPS} steps")
    size = len(transition)
    mat = [[Fraction(v) for v in row] for row in transition]
    out = [Fraction(0)] * size
    for path in itertools.product(range(size), repeat=steps):
        p, cur = Fraction(1), initial
        for nxt in path:
            p *= mat[cur][nxt]
            cur = nxt
        out[cur] += p
    return tuple(out)


def survival_prob(q_def: float, m: int) -> float:
    _check_prob(q_def, "q_def")
    if m < 0:
        raise OracleError("m must be >= 0")
    return (1 - q_def) ** m


def survival_by_paths(q_def: float, m: int) -> dict[int, float]:
    """Probability of each rf pattern (bit l = defaulted by step l) under absorption."""
    out = {}
    for first in range(m + 1):
        # first = index of the first default step; m means never
        pattern = sum(1 << l for l in range(first, m))
        out[pattern] = (1 - q_def) ** first * (q_def if first < m else 1.0)
    return out


def default_region_prob(q, m: int, j_set: Iterable[int]):
    js = set(j_set)
    for j in js:
        if not 0 <= j <= m:
            raise OracleError(f"j={j} outside 0..{m}")
    return sum(binomial_pmf(j, m, q) for j in sorted(js))


def classical_mc(p_true: float, shots: int, seed: int) -> tuple[float, float]:
    """Bernoulli estimate and its standard error sqrt(p(1-p)/N)."""
    _check_prob(p_true, "p_true")
    if shots < 2:
        raise OracleError("shots must be >= 2")
    rng = np.random.default_rng(seed)
    hits = int(rng.binomial(shots, p_true))
    p_hat = hits / shots
    return p_hat, math.sqrt(p_hat * (1 - p_hat) / shots)


def report_equity(q: float, m: int, measure: str = "max") -> OracleReport:
    if measure == "max":
        return OracleReport(f"P(all {m} up)", q ** m, "closed-form")
    if measure == "min":
        return OracleReport(f"P(all {m} down)", (1 - q) ** m, "closed-form")
    raise OracleError(f"unknown measure {measure!r}")
