"""Three-dimensional resource vectors and weighted scoring.

Every quantity in the placement and migration pipeline is a
(cpu, mem, bw) triple expressed in percent of a server's capacity, so
vectors from different servers compare directly.  Weighted scores are
plain dot products against a priority vector whose components sum to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParseError

WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ResourceVector:
    """A (cpu, mem, bw) triple in percent-of-capacity units.

    Stored states keep every component finite, non-negative and at most
    100; transient values (feasibility sums, demand estimates) may
    exceed 100.
    """

    cpu: float
    mem: float
    bw: float

    def __add__(self, other: "ResourceVector") -> "ResourceVector":
        return ResourceVector(self.cpu + other.cpu, self.mem + other.mem, self.bw + other.bw)

    def __sub__(self, other: "ResourceVector") -> "ResourceVector":
        return ResourceVector(self.cpu - other.cpu, self.mem - other.mem, self.bw - other.bw)

    def scaled(self, factor: float) -> "ResourceVector":
        return ResourceVector(self.cpu * factor, self.mem * factor, self.bw * factor)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.cpu, self.mem, self.bw)

    def to_json(self) -> dict:
        return {"cpu": self.cpu, "mem": self.mem, "bw": self.bw}

    @classmethod
    def from_json(cls, obj: dict) -> "ResourceVector":
        try:
            v = cls(float(obj["cpu"]), float(obj["mem"]), float(obj["bw"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"resource vector needs numeric cpu/mem/bw fields: {obj!r}") from exc
        for name, c in zip(("cpu", "mem", "bw"), v.as_tuple()):
            if not math.isfinite(c) or c < 0:
                raise ParseError(f"resource component {name}={c} must be finite and >= 0")
        return v


ZERO = ResourceVector(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class WeightVector:
    """Priority weights for (cpu, mem, bw); components in [0, 1] summing to 1."""

    w_cpu: float
    w_mem: float
    w_bw: float

    def __post_init__(self):
        comps = (self.w_cpu, self.w_mem, self.w_bw)
        if any(not math.isfinite(w) or w < 0.0 or w > 1.0 for w in comps):
            raise ValueError(f"weights must lie in [0, 1]: {comps}")
        if abs(sum(comps) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1 within {WEIGHT_SUM_TOL}: {comps}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.w_cpu, self.w_mem, self.w_bw)

    def to_json(self) -> dict:
        return {"w_cpu": self.w_cpu, "w_mem": self.w_mem, "w_bw": self.w_bw}

    @classmethod
    def from_json(cls, obj: dict) -> "WeightVector":
        try:
            return cls(float(obj["w_cpu"]), float(obj["w_mem"]), float(obj["w_bw"]))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"weight vector needs numeric w_cpu/w_mem/w_bw fields: {obj!r}") from exc
        except ValueError as exc:
            raise ParseError(str(exc)) from exc


UNIFORM_WEIGHTS = WeightVector(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


def rv_add(a: ResourceVector, b: ResourceVector) -> ResourceVector:
    """Componentwise sum."""
    return a + b


def rv_sub(a: ResourceVector, b: ResourceVector) -> ResourceVector:
    """Componentwise difference (intermediate values only; may go negative)."""
    return a - b


def rv_strictly_less(a: ResourceVector, b: ResourceVector) -> bool:
    """True iff every component of a is strictly below b's; equality fails."""
    return a.cpu < b.cpu and a.mem < b.mem and a.bw < b.bw


def weighted_score(w: WeightVector, m: ResourceVector) -> float:
    """Dot product of priority weights and a utilization vector."""
    return w.w_cpu * m.cpu + w.w_mem * m.mem + w.w_bw * m.bw


def fmt_score(x: float) -> float:
    """Rounding used for report output; internal math never rounds."""
    return round(x, 3)
