"""Cayley-Dickson arithmetic over the reals for dimensions 2**n.

Elements are stored as flat coefficient vectors; coefficient ``k`` belongs to
the basis unit ``e_k`` with ``e_0 = 1``. The product follows the doubling rule

    (a, b)(c, d) = (a c - conj(d) b, d a + b conj(c))

where ``a`` is the first half of the vector and ``b`` the second half. With
this rule ``e1 e2 = e3`` and ``e4 e5 = e1``.

Array-level helpers (``mul_arrays``, ``exp_arrays``) broadcast over leading
axes and are what the solvers use internally; :class:`CdElement` is the thin
immutable value type of the public API.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable

import numpy as np

# Past this dimension the dense structure tensor gets large; fall back to recursion.
_TABLE_MAX_DIM = 64
# Below this imaginary norm, sin(r)/r is evaluated from its Taylor series.
_SINC_SERIES_CUTOFF = 1e-6


class DimensionError(ValueError):
    """Raised when operands live in different algebras or have a bad length."""


def _check_dim(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise DimensionError(f"coefficient count must be a power of two, got {n}")
    return n.bit_length() - 1


def _conj_arrays(x: np.ndarray) -> np.ndarray:
    out = -x
    out[..., 0] = x[..., 0]
    return out


def doubling_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Multiply by direct recursion on the doubling rule.

    Slow, but the literal definition; the table used by :func:`mul_arrays` is
    generated from it.
    """
    n = x.shape[-1]
    if n == 1:
        return x * y
    h = n // 2
    a, b = x[..., :h], x[..., h:]
    c, d = y[..., :h], y[..., h:]
    first = doubling_mul(a, c) - doubling_mul(_conj_arrays(d), b)
    second = doubling_mul(d, a) + doubling_mul(b, _conj_arrays(c))
    return np.concatenate([first, second], axis=-1)


@lru_cache(maxsize=None)
def structure_tensor(dim: int) -> np.ndarray:
    """Return ``T`` with ``e_i e_j = sum_k T[i, j, k] e_k``, shape (dim, dim, dim)."""
    _check_dim(dim)
    eye = np.eye(dim)
    table = doubling_mul(
        np.broadcast_to(eye[:, None, :], (dim, dim, dim)).copy(),
        np.broadcast_to(eye[None, :, :], (dim, dim, dim)).copy(),
    )
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def _flat_table(dim: int) -> np.ndarray:
    return structure_tensor(dim).reshape(dim * dim, dim)


def basis_product(i: int, j: int, dim: int = 8) -> tuple[int, int]:
    """Return ``(k, sign)`` such that ``e_i e_j = sign * e_k``."""
    row = structure_tensor(dim)[i, j]
    k = int(np.flatnonzero(row)[0])
    return k, int(row[k])


def mul_arrays(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Cayley-Dickson product of coefficient arrays, broadcasting leading axes."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dim = x.shape[-1]
    if y.shape[-1] != dim:
        raise DimensionError(f"dimension mismatch: {dim} vs {y.shape[-1]}")
    if dim > _TABLE_MAX_DIM:
        _check_dim(dim)
        x, y = np.broadcast_arrays(x, y)
        return doubling_mul(x, y)
    outer = x[..., :, None] * y[..., None, :]
    return outer.reshape(outer.shape[:-2] + (dim * dim,)) @ _flat_table(dim)


def exp_arrays(x: np.ndarray) -> np.ndarray:
    """Closed-form exponential of coefficient arrays (leading axes broadcast)."""
    x = np.asarray(x, dtype=float)
    re = x[..., :1]
    im = x[..., 1:]
    r = np.sqrt(np.sum(im * im, axis=-1, keepdims=True))
    small = r < _SINC_SERIES_CUTOFF
    safe_r = np.where(small, 1.0, r)
    r2 = r * r
    sinc = np.where(small, 1.0 - r2 / 6.0 + r2 * r2 / 120.0, np.sin(r) / safe_r)
    scale = np.exp(re)
    return np.concatenate([scale * np.cos(r), scale * sinc * im], axis=-1)


def axis_exp(k: int, angle: float, dim: int = 8) -> np.ndarray:
    """Coefficients of ``exp(angle * e_k)`` = cos(angle) + e_k sin(angle)."""
    out = np.zeros(dim)
    out[0] = math.cos(angle)
    out[k] = math.sin(angle)
    return out


class CdElement:
    """Immutable element of the ``n``-th Cayley-Dickson algebra.

    Supports ``+``, ``-``, unary minus, ``*`` (algebra product or real
    scaling) and ``/`` by a real scalar.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[float] | np.ndarray) -> None:
        arr = np.array(coeffs, dtype=float).reshape(-1)
        _check_dim(arr.size)
        arr.setflags(write=False)
        self._coeffs = arr

    @classmethod
    def zero(cls, dim: int = 8) -> CdElement:
        return cls(np.zeros(dim))

    @classmethod
    def one(cls, dim: int = 8) -> CdElement:
        return cls.real(1.0, dim)

    @classmethod
    def real(cls, value: float, dim: int = 8) -> CdElement:
        c = np.zeros(dim)
        c[0] = value
        return cls(c)

    @classmethod
    def basis(cls, k: int, dim: int = 8) -> CdElement:
        if not 0 <= k < dim:
            raise IndexError(f"basis index {k} out of range for dimension {dim}")
        c = np.zeros(dim)
        c[k] = 1.0
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def dim(self) -> int:
        return self._coeffs.size

    @property
    def dim_log(self) -> int:
        return self._coeffs.size.bit_length() - 1

    def __len__(self) -> int:
        return self.dim

    def __getitem__(self, k: int) -> float:
        return float(self._coeffs[k])

    def __iter__(self):
        return iter(self._coeffs.tolist())

    def __repr__(self) -> str:
        return f"CdElement({self._coeffs.tolist()!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CdElement):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self._coeffs, other._coeffs))

    def __hash__(self) -> int:
        return hash(self._coeffs.tobytes())

    def __neg__(self) -> CdElement:
        return CdElement(-self._coeffs)

    def __add__(self, other: CdElement) -> CdElement:
        if not isinstance(other, CdElement):
            return NotImplemented
        return add(self, other)

    def __sub__(self, other: CdElement) -> CdElement:
        if not isinstance(other, CdElement):
            return NotImplemented
        return add(self, -other)

    def __mul__(self, other: CdElement | float) -> CdElement:
        if isinstance(other, CdElement):
            return cd_mul(self, other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return CdElement(self._coeffs * float(other))
        return NotImplemented

    def __rmul__(self, other: float) -> CdElement:
        if isinstance(other, (int, float, np.floating, np.integer)):
            return CdElement(self._coeffs * float(other))
        return NotImplemented

    def __truediv__(self, other: float) -> CdElement:
        if isinstance(other, (int, float, np.floating, np.integer)):
            return CdElement(self._coeffs / float(other))
        return NotImplemented


def _same_dim(x: CdElement, y: CdElement) -> None:
    if x.dim != y.dim:
        raise DimensionError(f"dimension mismatch: {x.dim} vs {y.dim}")


def add(x: CdElement, y: CdElement) -> CdElement:
    _same_dim(x, y)
    return CdElement(x.coeffs + y.coeffs)


def cd_mul(x: CdElement, y: CdElement) -> CdElement:
    """Product ``x y`` under the doubling rule."""
    _same_dim(x, y)
    return CdElement(mul_arrays(x.coeffs, y.coeffs))


def conjugate(x: CdElement) -> CdElement:
    return CdElement(_conj_arrays(x.coeffs))


def norm(x: CdElement) -> float:
    # hypot scales internally: no underflow for subnormal coefficients
    return math.hypot(*x.coeffs.tolist())


def real_part(x: CdElement) -> float:
    return float(x.coeffs[0])


def imag_part(x: CdElement) -> CdElement:
    c = x.coeffs.copy()
    c[0] = 0.0
    return CdElement(c)


def inverse(x: CdElement) -> CdElement:
    n2 = float(np.dot(x.coeffs, x.coeffs))
    if n2 == 0.0:
        raise ZeroDivisionError("zero element has no inverse")
    return CdElement(_conj_arrays(x.coeffs) / n2)


def exp_closed(x: CdElement) -> CdElement:
    """``e^x = e^{Re x} (cos|v| + v/|v| sin|v|)`` with ``v = Im x``."""
    return CdElement(exp_arrays(x.coeffs))


def exp_series(x: CdElement, tol: float = 1e-12, max_terms: int = 500) -> CdElement:
    """Exponential by summing the power series until a term drops below ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    total = np.zeros(x.dim)
    total[0] = 1.0
    term = total.copy()
    for k in range(1, max_terms):
        # powers of one element associate, so term_k = term_{k-1} x / k is exact
        term = mul_arrays(term, x.coeffs) / k
        total = total + term
        if math.sqrt(float(np.dot(term, term))) < tol:
            break
    return CdElement(total)


def trig_from_exp(mu: CdElement, alpha: float) -> tuple[float, float]:
    """Return ``(cos alpha, sin alpha)`` computed from ``exp(+-mu alpha)``.

    ``mu`` must be a unit pure-imaginary element, so that ``mu^-1 = -mu``.
    """
    if abs(real_part(mu)) > 1e-12 or abs(norm(mu) - 1.0) > 1e-12:
        raise ValueError("mu must be a unit pure-imaginary element")
    plus = exp_closed(mu * alpha)
    minus = exp_closed(mu * -alpha)
    cos_part = (plus + minus) * 0.5
    sin_part = cd_mul(inverse(mu), plus - minus) * 0.5
    return real_part(cos_part), real_part(sin_part)
