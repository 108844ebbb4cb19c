"""The mirror Landau-Ginzburg model of a toric Fano manifold."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .lattice import FanPolytope, is_normalized
from .laurent import LaurentPoly, sum_polys
from .quotient import QuotientPresentation, laurent_quotient
from .scalars import GaussScalar, param_field

logger = logging.getLogger(__name__)

DEDUP_RADIUS = 1e-6
DEFAULT_TOL = 1e-10


class NotNormalizedError(ValueError):
    pass


def kahler_coefficient(fp: FanPolytope, i: int) -> GaussScalar:
    """``q^{m_i}`` for facet ``i`` (0-based)."""
    K = param_field(fp.kahler_params)
    c = K(1)
    for g, e in zip(K.gens, fp.facets[i].q_exponent):
        c = c * g**e
    return GaussScalar(c)


@dataclass(frozen=True, eq=False)
class Superpotential:
    """``W = sum_i q^{m_i} z^{v_i}`` together with its facet monomials."""

    poly: LaurentPoly
    facet_terms: tuple[LaurentPoly, ...]
    normals: tuple[tuple[int, ...], ...]
    kahler_params: int

    @property
    def dim(self) -> int:
        return self.poly.nvars

    @property
    def field(self):
        return self.poly.field

    def log_derivative(self, j: int) -> LaurentPoly:
        return self.poly.log_derivative(j)

    @cached_property
    def gradient(self) -> tuple[LaurentPoly, ...]:
        return tuple(self.poly.log_derivative(j) for j in range(1, self.dim + 1))

    @cached_property
    def hessian(self) -> tuple[tuple[LaurentPoly, ...], ...]:
        g = self.gradient
        return tuple(tuple(g[j].log_derivative(k + 1) for k in range(self.dim)) for j in range(self.dim))

    def render(self) -> str:
        return self.poly.render()


def build_superpotential(fp: FanPolytope) -> Superpotential:
    if not is_normalized(fp):
        raise NotNormalizedError("fan must be normalized first (see normalize_basis)")
    K = param_field(fp.kahler_params)
    terms = tuple(LaurentPoly.monomial(f.normal, kahler_coefficient(fp, i), K)
                  for i, f in enumerate(fp.facets))
    return Superpotential(sum_polys(terms, fp.dim, K), terms, tuple(fp.normals), fp.kahler_params)


@dataclass(frozen=True)
class JacobianRing:
    presentation: QuotientPresentation
    generator_images: tuple[LaurentPoly, ...]

    @property
    def dimension(self) -> int | None:
        return self.presentation.dimension

    @property
    def is_finite(self) -> bool:
        return self.presentation.is_finite


def jacobian_ring(W: Superpotential) -> JacobianRing:
    """``QQ(q)[z^{+-1}] / <d_1 W, ..., d_n W>`` with the facet generators ``Z_i``."""
    pres = laurent_quotient(W.gradient)
    if not pres.is_finite:
        logger.warning("Jacobian ring is infinite-dimensional; the input is probably not Fano")
    return JacobianRing(pres, W.facet_terms)


# numeric evaluation

def q_values(l: int, q) -> dict[str, complex]:
    """Normalize numeric Kähler parameters to ``{"q1": ..., ...}``."""
    if l == 0:
        return {}
    if q is None:
        raise ValueError(f"{l} numeric Kähler parameter(s) required")
    if isinstance(q, Mapping):
        out = {}
        for k, v in q.items():
            key = k if isinstance(k, str) and k.startswith("q") else f"q{int(k)}"
            out[key] = complex(v)
    elif isinstance(q, (int, float, complex)) or hasattr(q, "__float__"):
        out = {f"q{a + 1}": complex(q) for a in range(l)}
    else:
        q = list(q)
        if len(q) != l:
            raise ValueError(f"expected {l} Kähler parameters, got {len(q)}")
        out = {f"q{a + 1}": complex(v) for a, v in enumerate(q)}
    missing = [f"q{a + 1}" for a in range(l) if f"q{a + 1}" not in out]
    if missing:
        raise ValueError(f"missing Kähler parameter(s): {missing}")
    return out


def _numeric_coefficients(W: Superpotential, q) -> tuple[np.ndarray, np.ndarray]:
    qv = q_values(W.kahler_params, q)
    V = np.array(W.normals, dtype=float).reshape(len(W.normals), W.dim)
    c = np.array([t.terms[tuple(v)].evaluate(qv) for t, v in zip(W.facet_terms, W.normals)], dtype=complex)
    return V, c


def _check_point(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex).reshape(-1)
    if np.any(z == 0):
        raise ZeroDivisionError("all coordinates must be nonzero")
    return z


def mirror_domain_contains(fp: FanPolytope, z: Sequence[complex], q) -> bool:
    """Whether ``|q^{m_i} z^{v_i}| < 1`` for every facet."""
    z = _check_point(z)
    if len(z) != fp.dim:
        raise ValueError("point has wrong dimension")
    qv = q_values(fp.kahler_params, q)
    if any(v.real <= 0 or v.imag for v in qv.values()):
        raise ValueError("Kähler parameters must be positive reals")
    for i, f in enumerate(fp.facets):
        val = kahler_coefficient(fp, i).evaluate(qv) * np.prod(z ** np.array(f.normal, dtype=float))
        if not abs(val) < 1:
            return False
    return True


def gradient_at(W: Superpotential, z, q=None) -> np.ndarray:
    """``(d_1 W(z), ..., d_n W(z))`` by direct evaluation of the exact derivatives."""
    z = _check_point(z)
    qv = q_values(W.kahler_params, q)
    return np.array([g.evaluate(z, qv) for g in W.gradient], dtype=complex)


def hessian_log(W: Superpotential, z, q=None) -> np.ndarray:
    """Matrix of iterated logarithmic derivatives ``d_j d_k W`` at ``z``."""
    z = _check_point(z)
    qv = q_values(W.kahler_params, q)
    n = W.dim
    H = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(j, n):
            H[j, k] = H[k, j] = W.hessian[j][k].evaluate(z, qv)
    return H


# critical points

@dataclass
class CriticalSearch:
    points: list[np.ndarray]
    residuals: list[float]
    expected: int | None
    starts: int
    warnings: list[str] = field(default_factory=list)

    @property
    def count_matches(self) -> bool:
        return self.expected is not None and len(self.points) == self.expected


def _newton(V: np.ndarray, c: np.ndarray, U: np.ndarray, iters: int = 80) -> np.ndarray:
    """Damped Newton on ``sum_i v_i c_i exp(<v_i, u>) = 0`` in log coordinates."""
    for _ in range(iters):
        E = np.exp(np.clip((U @ V.T).real, -700, 700) + 1j * (U @ V.T).imag) * c
        F = E @ V
        J = np.einsum("sd,dj,dk->sjk", E, V, V)
        try:
            step = np.linalg.solve(J, -F[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = np.stack([np.linalg.lstsq(Ji, -Fi, rcond=None)[0] for Ji, Fi in zip(J, F)])
        norm = np.linalg.norm(step, axis=1, keepdims=True)
        scale = np.where(norm > 1.0, 1.0 / np.maximum(norm, 1e-300), 1.0)
        step = np.where(np.isfinite(step), step, 0)
        U = U + step * scale
    return U


def seed_grid(dim: int, count: int, radius: float) -> np.ndarray:
    """Tensor grid of scaled roots of unity, as log coordinates."""
    angles = 2j * np.pi * np.arange(count) / count
    grid = np.stack(np.meshgrid(*([angles] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    return grid + np.log(radius)


def find_critical_points(W: Superpotential, q=None, tol: float = DEFAULT_TOL,
                         expected: int | None = None) -> CriticalSearch:
    """Multistart Newton search for zeros of the logarithmic gradient of ``W``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    qv = q_values(W.kahler_params, q)
    if any(v.real <= 0 or v.imag for v in qv.values()):
        raise ValueError("Kähler parameters must be positive reals")
    if expected is None:
        expected = jacobian_ring(W).dimension
    n = W.dim
    K = (expected or 0) + 2
    mags = [abs(v) for v in qv.values()]
    radius = float(np.exp(np.mean([np.log(m) / n for m in mags]))) if mags else 1.0
    V, c = _numeric_coefficients(W, qv)
    U = _newton(V, c, seed_grid(n, K, radius))
    Z = np.exp(U)
    found = []
    for z in Z:
        if not np.all(np.isfinite(z)) or np.any(z == 0):
            continue
        res = float(np.max(np.abs(gradient_at(W, z, qv))))
        if res <= tol:
            found.append((z, res))
    # deterministic merge: sort, then greedy clustering
    found.sort(key=lambda t: tuple(np.round(np.concatenate([t[0].real, t[0].imag]), 8)))
    points: list[np.ndarray] = []
    residuals: list[float] = []
    for z, res in found:
        if any(np.linalg.norm(z - p) <= DEDUP_RADIUS * max(1.0, np.linalg.norm(p)) for p in points):
            continue
        points.append(z)
        residuals.append(res)
    search = CriticalSearch(points, residuals, expected, len(U))
    if not points:
        search.warnings.append("no Newton start converged")
    elif expected is not None and len(points) != expected:
        search.warnings.append(f"found {len(points)} critical points, Jacobian dimension is {expected}")
    for msg in search.warnings:
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return search


def critical_points(W: Superpotential, q=None, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Deduplicated numerical critical points of ``W`` with residual at most ``tol``."""
    return find_critical_points(W, q, tol).points
