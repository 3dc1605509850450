"""Experiment configuration.

A config is one flat JSON object. Recognised keys (all optional except
``scenario``)::

    scenario        eq-max | eq-min | ir-mid | credit-default | credit-survival
                    | migration | worked-example
    n               int, [a, b] or "a..b"         output-qubit sweep
    mode            "exact" | "shots"
    shots, seed     shot count and RNG seed for shots mode
    engine          "statevector" | "branch"
    out             output directory
    deterministic   write 0 in the seconds column so reruns are byte-identical
    high_memory     allow the full ir/migration n range
    mu, sigma, T, m                 binomial tree (equity, credit-default)
    q                               up probability override (worked-example)
    a_dt, initial_level, variance   trinomial tree (ir-mid)
    q_def, hazard_rate              reduced-form credit
    j_set, barrier_down_steps       structural default region
    transition                      3x3 rating matrix (migration)
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path

from ..models import (
    CalibrationError,
    calibrate_binomial,
    calibrate_hazard,
    calibrate_trinomial,
    migration_params,
)
from ..scenarios import DEFAULT_MIGRATION, SCENARIOS

DEFAULT_N = {
    "eq-max": (1, 9),
    "eq-min": (1, 9),
    "credit-default": (1, 9),
    "credit-survival": (1, 9),
    "ir-mid": (1, 5),
    "migration": (1, 5),
    "worked-example": (3, 3),
}
HIGH_MEMORY_N = {"ir-mid": (1, 9), "migration": (1, 9)}


class ConfigError(ValueError):
    pass


def parse_range(text) -> tuple[int, ...]:
    """Accept 5, "5", "1..9", [1, 9] or a list of values."""
    if isinstance(text, int):
        return (text,)
    if isinstance(text, (list, tuple)):
        if len(text) == 2 and all(isinstance(v, int) for v in text) and text[0] <= text[1]:
            return tuple(range(text[0], text[1] + 1))
        return tuple(int(v) for v in text)
    text = str(text).strip()
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if lo > hi:
            raise ConfigError(f"empty range {text!r}")
        return tuple(range(lo, hi + 1))
    return (int(text),)


@dataclass
class ExperimentConfig:
    scenario: str
    n: tuple[int, ...] = ()
    mode: str = "exact"
    shots: int = 10_000
    seed: int = 0
    engine: str = "statevector"
    out: str | None = None
    deterministic: bool = False
    high_memory: bool = False
    mu: float = 0.08
    sigma: float = 0.20
    T: float = 1.0
    m: int | None = None
    q: float | None = None
    a_dt: str = "1/4"
    initial_level: str | None = None
    variance: float | None = None
    q_def: float | None = None
    hazard_rate: float | None = None
    j_set: tuple[int, ...] | None = None
    barrier_down_steps: int = 4
    transition: tuple | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose one of {SCENARIOS}")
        if not self.n:
            table = HIGH_MEMORY_N if self.high_memory and self.scenario in HIGH_MEMORY_N else DEFAULT_N
            lo, hi = table[self.scenario]
            self.n = tuple(range(lo, hi + 1))
        else:
            self.n = parse_range(self.n)
        if any(v < 1 for v in self.n):
            raise ConfigError(f"n values must be >= 1, got {self.n}")
        if self.mode not in ("exact", "shots"):
            raise ConfigError(f"mode must be exact or shots, got {self.mode!r}")
        if self.engine not in ("statevector", "branch"):
            raise ConfigError(f"engine must be statevector or branch, got {self.engine!r}")
        if self.shots < 1:
            raise ConfigError("shots must be >= 1")
        if self.m is None:
            self.m = {"ir-mid": 3, "migration": 3, "worked-example": 2}.get(self.scenario, 6)
        if self.q_def is None and self.hazard_rate is None:
            self.q_def = 0.02
        if self.j_set is not None:
            self.j_set = tuple(sorted(int(j) for j in self.j_set))
        self.validate()

    def a_dt_fraction(self) -> Fraction:
        return Fraction(str(self.a_dt))

    def validate(self) -> None:
        """Run the calibration preconditions for the chosen scenario."""
        try:
            if self.scenario in ("eq-max", "eq-min", "credit-default"):
                calibrate_binomial(self.mu, self.sigma, self.T, self.m)
            elif self.scenario == "worked-example":
                q = math.sin(math.pi / 8) if self.q is None else self.q
                if not 0 <= q <= 1:
                    raise CalibrationError(f"q={q} outside [0, 1]")
            elif self.scenario == "ir-mid":
                calibrate_trinomial(self.a_dt_fraction(), self.m, self.initial_level or "m")
            elif self.scenario == "credit-survival":
                calibrate_hazard(self.q_def, self.m, self.T, self.hazard_rate)
            elif self.scenario == "migration":
                migration_params(self.transition or DEFAULT_MIGRATION, self.m, self.initial_level or "h")
        except (CalibrationError, ValueError) as exc:
            raise ConfigError(f"{self.scenario}: {exc}") from exc

    def with_overrides(self, **kw) -> ExperimentConfig:
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        return d


def from_dict(data: dict) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)} - {"extra"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    if "scenario" not in data:
        raise ConfigError("config needs a 'scenario' key")
    return ExperimentConfig(**data)


def read_json(path: str | Path) -> dict:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def load(path: str | Path) -> ExperimentConfig:
    return from_dict(read_json(path))
