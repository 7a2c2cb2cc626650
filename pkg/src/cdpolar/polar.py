"""Basic trigonometric / exponential form ``o = |o| exp(theta mu)``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import CdElement, exp_closed, imag_part, norm, real_part

_AXIS_TOL = 1e-12


@dataclass(frozen=True)
class BasicPolar:
    """Modulus, unit pure-imaginary axis and principal angle in [0, pi]."""

    modulus: float
    axis: CdElement
    theta: float

    def __post_init__(self) -> None:
        if self.modulus < 0:
            raise ValueError("modulus must be non-negative")
        _check_axis(self.axis)
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")


def _check_axis(axis: CdElement) -> None:
    if abs(real_part(axis)) > _AXIS_TOL or abs(norm(axis) - 1.0) > _AXIS_TOL:
        raise ValueError("axis must be a unit pure-imaginary element")


def to_basic_polar(o: CdElement) -> BasicPolar:
    """Split ``o`` into modulus, axis and angle.

    For real ``o`` any axis works; ``e1`` is returned and theta is 0 or pi by
    the sign of the real part.
    """
    modulus = norm(o)
    if modulus == 0.0:
        raise ValueError("polar form of zero is undefined")
    im = imag_part(o)
    im_norm = norm(im)
    theta = math.atan2(im_norm, real_part(o))
    if im_norm == 0.0:
        axis = CdElement.basis(1, o.dim)
    else:
        axis = CdElement(im.coeffs / im_norm)
    return BasicPolar(modulus, axis, theta)


def from_basic_polar(p: BasicPolar) -> CdElement:
    _check_axis(p.axis)
    c = p.axis.coeffs * (p.modulus * math.sin(p.theta))
    c[0] = p.modulus * math.cos(p.theta)
    return CdElement(c)


def basic_polar_via_exp(p: BasicPolar) -> CdElement:
    """Same element as :func:`from_basic_polar`, built as ``|o| * exp(theta mu)``."""
    return CdElement(np.asarray(exp_closed(p.axis * p.theta).coeffs) * p.modulus)
