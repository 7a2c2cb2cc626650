"""Three-factor polar form of quaternions, ``q = |q| e^{e1 phi} e^{e3 psi} e^{e2 theta}``.

Angle ranges are ``phi in [-pi, pi)``, ``psi in [-pi/2, pi/2)`` and
``theta in [-pi/4, pi/4]``.

Expanding the product with ``i, j, k = e1, e2, e3`` gives, as complex pairs,

    q0 + i q1 = e^{i phi} (cos psi cos theta - i sin psi sin theta)
    q2 + i q3 = e^{i phi} (cos psi sin theta + i sin psi cos theta)

from which

    sin 2psi           = 2 (q0 q3 - q1 q2)
    cos 2psi sin 2theta = 2 (q0 q2 + q1 q3)
    cos 2psi cos 2theta = q0^2 + q1^2 - q2^2 - q3^2

``phi`` drops out of the invariants and is recovered last from either pair.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .algebra import CdElement, axis_exp, mul_arrays

HALF_PI = 0.5 * math.pi
QUARTER_PI = 0.25 * math.pi
# |cos 2psi| below this is treated as gimbal lock: theta is folded into phi.
GIMBAL_TOL = 1e-9


@dataclass(frozen=True)
class EulerTriple:
    phi: float
    psi: float
    theta: float

    def __post_init__(self) -> None:
        if not -math.pi <= self.phi < math.pi:
            raise ValueError(f"phi={self.phi} outside [-pi, pi)")
        if not -HALF_PI <= self.psi < HALF_PI:
            raise ValueError(f"psi={self.psi} outside [-pi/2, pi/2)")
        if not -QUARTER_PI <= self.theta <= QUARTER_PI:
            raise ValueError(f"theta={self.theta} outside [-pi/4, pi/4]")


def compose_arrays(phi: float, psi: float, theta: float) -> np.ndarray:
    """Unit quaternion coefficients of the three-factor product (no range check)."""
    q = mul_arrays(axis_exp(1, phi, 4), axis_exp(3, psi, 4))
    return mul_arrays(q, axis_exp(2, theta, 4))


def euler_compose(t: EulerTriple, modulus: float = 1.0) -> CdElement:
    if modulus <= 0:
        raise ValueError("modulus must be positive")
    # re-validate: a caller may bypass __post_init__ via object.__setattr__
    EulerTriple(t.phi, t.psi, t.theta)
    return CdElement(modulus * compose_arrays(t.phi, t.psi, t.theta))


def _wrap_pi(angle: float) -> float:
    out = (angle + math.pi) % (2.0 * math.pi) - math.pi
    return -math.pi if out >= math.pi else out


def euler_decompose(q: CdElement) -> EulerTriple:
    """Recover ``(phi, psi, theta)`` so that ``euler_compose`` gives back ``q``."""
    if q.dim != 4:
        raise ValueError(f"expected a quaternion, got dimension {q.dim}")
    n = math.sqrt(float(np.dot(q.coeffs, q.coeffs)))
    if n == 0.0:
        raise ValueError("zero quaternion has no polar form")
    q0, q1, q2, q3 = (float(v) for v in q.coeffs / n)

    s = 2.0 * (q0 * q3 - q1 * q2)
    x = q0 * q0 + q1 * q1 - q2 * q2 - q3 * q3
    y = 2.0 * (q0 * q2 + q1 * q3)

    c = math.hypot(x, y)
    # |cos 2psi| = hypot(x, y) on the first branch; atan2 stays accurate near gimbal
    psi = 0.5 * math.atan2(s, c)
    if c < GIMBAL_TOL:
        theta = 0.0
    else:
        theta = 0.5 * math.atan2(y, x)
        if abs(theta) > QUARTER_PI:
            # second branch: cos 2psi changes sign, theta shifts by pi/2
            psi = HALF_PI - psi
            theta = 0.5 * math.atan2(-y, -x)
        theta = min(QUARTER_PI, max(-QUARTER_PI, theta))
    if psi >= HALF_PI:
        psi -= math.pi

    cp, sp = math.cos(psi), math.sin(psi)
    ct, st = math.cos(theta), math.sin(theta)
    w1 = complex(cp * ct, -sp * st)
    w2 = complex(cp * st, sp * ct)
    if abs(w1) >= abs(w2):
        phi = cmath.phase(complex(q0, q1) / w1)
    else:
        phi = cmath.phase(complex(q2, q3) / w2)
    return EulerTriple(_wrap_pi(phi), psi, theta)
