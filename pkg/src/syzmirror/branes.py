"""Point branes and the Floer-theoretic side of the mirror dictionary.

An A-brane is a torus fiber ``L_x`` with a flat connection of holonomy
``y``; the mirror B-brane is the skyscraper at ``z = exp(-x - i y)``.
Floer cohomology enters only through ``m1`` on H^1, its vanishing, and
the Clifford form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mirror import DEFAULT_TOL, Superpotential, _numeric_coefficients, gradient_at, hessian_log

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class ABranePoint:
    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have the same length")


def brane_correspondence(a: ABranePoint) -> np.ndarray:
    """``z_j = exp(-x_j - i y_j)``."""
    x = np.asarray(a.x, dtype=float)
    y = np.asarray(a.y, dtype=float)
    return np.exp(-x - 1j * y)


def brane_correspondence_inv(z) -> ABranePoint:
    """Inverse map; angles are normalized to ``[0, 2 pi)``."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    if np.any(z == 0):
        raise ZeroDivisionError("B-brane point has a zero coordinate")
    x = -np.log(np.abs(z))
    y = np.mod(-np.angle(z), TWO_PI)
    # mod can return 2*pi itself after rounding
    y = np.where(y >= TWO_PI, 0.0, y)
    return ABranePoint(tuple(float(t) for t in x), tuple(float(t) for t in y))


def floer_m1(W: Superpotential, z, q=None) -> np.ndarray:
    """``m1(C_j) = sum_i v_i^j q^{m_i} z^{v_i}`` evaluated term by term."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    if np.any(z == 0):
        raise ZeroDivisionError("all coordinates must be nonzero")
    if len(z) != W.dim:
        raise ValueError("point has wrong dimension")
    V, c = _numeric_coefficients(W, q)
    vals = c * np.prod(z[None, :] ** V, axis=1)
    return vals @ V


def floer_nontrivial(W: Superpotential, z, q=None, tol: float = DEFAULT_TOL) -> bool:
    if not tol > 0:
        raise ValueError("tol must be positive")
    return bool(np.max(np.abs(gradient_at(W, z, q))) <= tol)


def endomorphism_dim(W: Superpotential, z, q=None, tol: float = DEFAULT_TOL) -> int:
    """``2^n`` (the dimension of the exterior algebra on T_zY) at a critical point, else 0."""
    return 2 ** W.dim if floer_nontrivial(W, z, q, tol) else 0


def clifford_form(W: Superpotential, z, q=None) -> np.ndarray:
    """``Q(C_j, C_k) = d_j d_k W(z)``."""
    return hessian_log(W, z, q)


@dataclass
class BraneReport:
    z: list[complex]
    residual: float
    nontrivial: bool
    endomorphism_dim: int
    clifford: list[list[complex]]
    clifford_det: complex

    def to_json(self, digits: int = 12) -> dict:
        return {
            "z": [_cplx(v, digits) for v in self.z],
            "residual": float(f"{self.residual:.{digits}g}"),
            "nontrivial": self.nontrivial,
            "endomorphism_dim": self.endomorphism_dim,
            "clifford": [[_cplx(v, digits) for v in row] for row in self.clifford],
            "clifford_det": _cplx(self.clifford_det, digits),
        }


def _round(x: float, digits: int) -> float:
    x = float(f"{x:.{digits}g}")
    return 0.0 if x == 0 else x


def _cplx(v: complex, digits: int) -> list[float]:
    return [_round(v.real, digits), _round(v.imag, digits)]


def brane_report(W: Superpotential, z, q=None, tol: float = DEFAULT_TOL) -> BraneReport:
    z = np.asarray(z, dtype=complex).reshape(-1)
    res = float(np.max(np.abs(gradient_at(W, z, q))))
    H = clifford_form(W, z, q)
    return BraneReport(list(z), res, res <= tol, 2 ** W.dim if res <= tol else 0,
                       H.tolist(), complex(np.linalg.det(H)))
