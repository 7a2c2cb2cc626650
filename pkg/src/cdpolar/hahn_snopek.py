"""The seven-angle Hahn-Snopek octonion polar form and its reconstruction error.

The hypothesis reads

    o = |o| e^{e1 psi1} e^{e3 psi3} e^{e2 psi2} e^{e7 psi7} e^{e4 psi4} e^{e6 psi6} e^{e5 psi5}

with the angles computed from four complex numbers ``u0..u3`` built out of
signed sums of the coefficients. It is implemented as stated so the size of
its reconstruction error can be measured; it is exact only in special cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import CdElement, axis_exp, mul_arrays

# Rows give (real part of u_k, imaginary part of u_k) as signed sums of x0..x7.
COMPONENT_MATRIX = np.array(
    [
        # x0  x1  x2  x3  x4  x5  x6  x7
        [1, 0, 0, -1, 0, -1, -1, 0],  # Re u0
        [0, 1, 1, 0, 1, 0, 0, -1],  # Im u0
        [1, 0, 0, 1, 0, -1, 1, 0],  # Re u1
        [0, 1, -1, 0, 1, 0, 0, 1],  # Im u1
        [1, 0, 0, -1, 0, 1, 1, 0],  # Re u2
        [0, 1, 1, 0, -1, 0, 0, 1],  # Im u2
        [1, 0, 0, 1, 0, 1, -1, 0],  # Re u3
        [0, 1, -1, 0, -1, 0, 0, -1],  # Im u3
    ],
    dtype=float,
)

# Imaginary unit of each factor, in product order.
FACTOR_UNITS = (1, 3, 2, 7, 4, 6, 5)


class DegenerateComponents(ValueError):
    """A modulus quotient in the angle formulas has a vanishing denominator."""


@dataclass(frozen=True)
class HsComponents:
    u0: complex
    u1: complex
    u2: complex
    u3: complex

    @property
    def us(self) -> tuple[complex, complex, complex, complex]:
        return (self.u0, self.u1, self.u2, self.u3)

    @property
    def phases(self) -> tuple[float, float, float, float]:
        """Arguments of ``u0..u3`` in [-pi, pi)."""
        return tuple(_arg(u) for u in self.us)  # type: ignore[return-value]


@dataclass(frozen=True)
class HsAngles:
    psi1: float
    psi2: float
    psi3: float
    psi4: float
    psi5: float
    psi6: float
    psi7: float

    def by_unit(self) -> dict[int, float]:
        """Map imaginary unit index -> angle of its exponential factor."""
        return {
            1: self.psi1,
            2: self.psi2,
            3: self.psi3,
            4: self.psi4,
            5: self.psi5,
            6: self.psi6,
            7: self.psi7,
        }


def _arg(u: complex) -> float:
    a = math.atan2(u.imag, u.real)
    return -math.pi if a >= math.pi else a


def hs_components(o: CdElement) -> HsComponents:
    if o.dim != 8:
        raise ValueError(f"expected an octonion, got dimension {o.dim}")
    v = COMPONENT_MATRIX @ o.coeffs
    return HsComponents(*(complex(v[2 * k], v[2 * k + 1]) for k in range(4)))


def _ratio(num: float, den: float, label: str) -> float:
    if den == 0.0:
        raise DegenerateComponents(f"vanishing denominator in the {label} formula")
    return min(1.0, max(-1.0, num / den))


def hs_angles(c: HsComponents) -> HsAngles:
    """Angles from the quarter-sum and modulus-ratio formulas (principal arcsin)."""
    p0, p1, p2, p3 = c.phases
    m0, m1, m2, m3 = (abs(u) ** 2 for u in c.us)
    return HsAngles(
        psi1=(p0 + p1 + p2 + p3) / 4.0,
        psi2=(p0 + p1 - p2 - p3) / 4.0,
        psi3=math.asin(_ratio(m0 - m1, m0 + m1, "psi3")) / 4.0,
        psi4=(p0 - p1 + p2 - p3) / 4.0,
        psi5=(p0 - p1 - p2 + p3) / 4.0,
        psi6=math.asin(_ratio(m2 - m3, m2 + m3, "psi6")) / 4.0,
        psi7=math.asin(_ratio(m0 + m1 - m2 - m3, m0 + m1 + m2 + m3, "psi7")) / 4.0,
    )


def hs_reconstruct(modulus: float, a: HsAngles, grouping: str = "left") -> CdElement:
    """Multiply the seven exponential factors and scale by ``modulus``.

    ``grouping="left"`` evaluates ``((f1 f3) f2) ...``; ``"right"`` evaluates
    ``f1 (f3 (f2 ...))`` and exists to check that parenthesization is not
    what breaks the formulas.
    """
    if modulus < 0:
        raise ValueError("modulus must be non-negative")
    angles = a.by_unit()
    factors = [axis_exp(k, angles[k]) for k in FACTOR_UNITS]
    if grouping == "left":
        acc = factors[0]
        for f in factors[1:]:
            acc = mul_arrays(acc, f)
    elif grouping == "right":
        acc = factors[-1]
        for f in reversed(factors[:-1]):
            acc = mul_arrays(f, acc)
    else:
        raise ValueError(f"unknown grouping {grouping!r}")
    return CdElement(modulus * acc)


def hs_error(o: CdElement, grouping: str = "left") -> float:
    """Euclidean distance between ``o`` and its seven-angle reconstruction."""
    modulus = math.sqrt(float(np.dot(o.coeffs, o.coeffs)))
    if modulus == 0.0:
        raise ValueError("reconstruction error undefined for zero")
    rec = hs_reconstruct(modulus, hs_angles(hs_components(o)), grouping)
    return float(np.linalg.norm(rec.coeffs - o.coeffs))
