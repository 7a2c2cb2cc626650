"""Hyperspherical angles for sampling unit octonions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import CdElement

HALF_PI = 0.5 * math.pi

# (low, high) for psi1..psi7; every interval is half-open on the right.
ANGLE_RANGES: tuple[tuple[float, float], ...] = ((-HALF_PI, HALF_PI),) * 6 + ((-math.pi, math.pi),)


@dataclass(frozen=True)
class SphereAngles:
    psi1: float
    psi2: float
    psi3: float
    psi4: float
    psi5: float
    psi6: float
    psi7: float

    def __post_init__(self) -> None:
        for k, (value, (lo, hi)) in enumerate(zip(self.as_tuple(), ANGLE_RANGES), start=1):
            if not lo <= value < hi:
                raise ValueError(f"psi{k}={value} outside [{lo}, {hi})")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.psi1, self.psi2, self.psi3, self.psi4, self.psi5, self.psi6, self.psi7)

    @classmethod
    def from_sequence(cls, values) -> SphereAngles:
        return cls(*(float(v) for v in values))


def cascade(angles) -> np.ndarray:
    """Raw 8-vector ``x0 = cos a1, x1 = sin a1 cos a2, ..., x7 = sin a1 ... sin a7``."""
    out = np.empty(8)
    carry = 1.0
    for k, a in enumerate(angles):
        out[k] = carry * math.cos(a)
        carry *= math.sin(a)
    out[7] = carry
    return out


def angles_to_unit8(a: SphereAngles) -> CdElement:
    return CdElement(cascade(a.as_tuple()))


def random_angles(rng: np.random.Generator) -> SphereAngles:
    return SphereAngles(*(rng.uniform(lo, hi) for lo, hi in ANGLE_RANGES))


def gaussian_unit(rng: np.random.Generator, dim: int = 8) -> np.ndarray:
    """Uniform point on the unit sphere by normalizing a Gaussian vector."""
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)
