"""Semi-flat SYZ transform on constant-coefficient forms, and its toric
correction acting on lattice-graded forms.

Orientation convention.  Fiber integrals over T_N (the ``u`` torus) use
the orientation ``du_n ^ ... ^ du_1``, which is the one induced on the
fiber by the symplectic orientation ``dx_1^du_1^...^dx_n^du_n`` of X.
Fiber integrals over T_M (the ``y`` torus) use ``dy_1 ^ ... ^ dy_n``.
With these choices ``exp(i omega_X) <-> Omega_Y`` holds exactly for every
``n`` and the two transforms are mutually inverse.  The pair
``Omega_X <-> exp(i omega_Y)`` then comes out with the sign
``(-1)^(n(n-1)/2)``.  No orientation removes it: both integrands share the
monomial ``dx_1^du_1^dy_2^du_2`` (n = 2) and need opposite values for it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Mapping, Sequence

import numpy as np
import sympy
from sympy.polys.fields import FracField

from .forms import (DifferentialForm, Monomial, basis_monomials, block_indices, fiber_integrate,
                    form_exp, tau_scalar, wedge, wedge_all)
from .lattice import FanPolytope
from .laurent import LaurentPoly
from .loops import LoopFunction, build_psi, conv_exp, fourier
from .mirror import build_superpotential
from .scalars import GaussScalar, I, param_field, to_field, with_tau

FWD_REVERSED = True
INV_REVERSED = False


class FormDomainError(ValueError):
    """A form was passed to a transform defined on the other side."""


def _field(K: FracField | None) -> FracField:
    return with_tau(K if K is not None else param_field(0))


# standard forms

def omega_X(n: int, K: FracField | None = None) -> DifferentialForm:
    """``sum_j dx_j ^ du_j``."""
    K = _field(K)
    acc = DifferentialForm.zero(n, K)
    for j in range(1, n + 1):
        acc = acc + (DifferentialForm.generator(n, "x", j, K) ^ DifferentialForm.generator(n, "u", j, K))
    return acc


def Omega_Y(n: int, K: FracField | None = None) -> DifferentialForm:
    """``(dx_1 + i dy_1) ^ ... ^ (dx_n + i dy_n)``."""
    K = _field(K)
    i = I(K)
    return wedge_all((DifferentialForm.generator(n, "x", j, K) + DifferentialForm.generator(n, "y", j, K).scale(i)
                      for j in range(1, n + 1)), n, K)


def toric_Omega_Y(n: int, K: FracField | None = None) -> DifferentialForm:
    """``dz_1/z_1 ^ ... ^ dz_n/z_n`` for ``z_j = exp(-x_j - i y_j)``."""
    return Omega_Y(n, K).scale((-1) ** n)


def exp_i_omega_X(n: int, K: FracField | None = None) -> DifferentialForm:
    K = _field(K)
    return form_exp(omega_X(n, K).scale(I(K)))


def curvature(n: int, K: FracField | None = None) -> DifferentialForm:
    """Curvature ``F = i sum_j dy_j ^ du_j`` of the Poincaré connection."""
    K = _field(K)
    acc = DifferentialForm.zero(n, K)
    for j in range(1, n + 1):
        acc = acc + (DifferentialForm.generator(n, "y", j, K) ^ DifferentialForm.generator(n, "u", j, K))
    return acc.scale(I(K))


# symmetric positive-definite data

@dataclass(frozen=True)
class SPDMatrix:
    """Exact rational symmetric positive-definite matrix and its inverse."""

    entries: tuple[tuple[Fraction, ...], ...]
    inverse: tuple[tuple[Fraction, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> SPDMatrix:
        A = [[Fraction(x) if not isinstance(x, Fraction) else x for x in r] for r in rows]
        n = len(A)
        if any(len(r) != n for r in A):
            raise ValueError("matrix must be square")
        if any(A[j][k] != A[k][j] for j in range(n) for k in range(n)):
            raise ValueError("matrix must be symmetric")
        M = sympy.Matrix(n, n, lambda j, k: sympy.Rational(A[j][k].numerator, A[j][k].denominator))
        for k in range(1, n + 1):
            if M[:k, :k].det() <= 0:
                raise ValueError(f"leading principal minor of order {k} is not positive")
        Minv = M.inv()
        inv = tuple(tuple(Fraction(int(Minv[j, k].p), int(Minv[j, k].q)) for k in range(n)) for j in range(n))
        return cls(tuple(tuple(r) for r in A), inv)

    def inverse_relation_holds(self) -> bool:
        """``sum_k phi_jk phi^km == delta_jm`` exactly."""
        n = self.n
        return all(sum(self.entries[j][k] * self.inverse[k][m] for k in range(n)) == int(j == m)
                   for j in range(n) for m in range(n))

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.entries]


def random_spd(n: int, rng: random.Random, bound: int = 5) -> SPDMatrix:
    """``L L^T + D`` with small random rational ``L`` and positive diagonal ``D``."""
    L = [[Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) if k <= j else Fraction(0)
          for k in range(n)] for j in range(n)]
    D = [Fraction(rng.randint(1, bound), rng.randint(1, bound)) for _ in range(n)]
    rows = [[sum(L[j][m] * L[k][m] for m in range(n)) + (D[j] if j == k else 0) for k in range(n)]
            for j in range(n)]
    return SPDMatrix.from_rows(rows)


def omega_Y(phi: SPDMatrix, K: FracField | None = None) -> DifferentialForm:
    """``sum_{j,k} phi_jk dx_j ^ dy_k``."""
    n, K = phi.n, _field(K)
    acc = DifferentialForm.zero(n, K)
    for j in range(n):
        for k in range(n):
            if phi.entries[j][k]:
                acc = acc + (DifferentialForm.generator(n, "x", j + 1, K)
                             ^ DifferentialForm.generator(n, "y", k + 1, K)).scale(phi.entries[j][k])
    return acc


def exp_i_omega_Y(phi: SPDMatrix, K: FracField | None = None) -> DifferentialForm:
    K = _field(K)
    return form_exp(omega_Y(phi, K).scale(I(K)))


def Omega_X(phi: SPDMatrix, K: FracField | None = None) -> DifferentialForm:
    """``wedge_j (sum_k phi_jk dx_k + i du_j)``."""
    n, K = phi.n, _field(K)
    i = I(K)
    factors = []
    for j in range(n):
        f = DifferentialForm.generator(n, "u", j + 1, K).scale(i)
        for k in range(n):
            if phi.entries[j][k]:
                f = f + DifferentialForm.generator(n, "x", k + 1, K).scale(phi.entries[j][k])
        factors.append(f)
    return wedge_all(factors, n, K)


def action_differentials(phi: SPDMatrix, K: FracField | None = None) -> list[DifferentialForm]:
    """``dx^j = sum_k phi_jk dx_k``, the differentials of the Legendre dual coordinates."""
    n, K = phi.n, _field(K)
    out = []
    for j in range(n):
        f = DifferentialForm.zero(n, K)
        for k in range(n):
            if phi.entries[j][k]:
                f = f + DifferentialForm.generator(n, "x", k + 1, K).scale(phi.entries[j][k])
        out.append(f)
    return out


def action_coordinate_check(phi: SPDMatrix, K: FracField | None = None) -> bool:
    """Rewrite ``Omega_Y`` and ``omega_Y`` in Legendre dual coordinates.

    ``wedge_j (sum_k phi^jk dx^k + i dy_j)`` must equal ``Omega_Y`` and
    ``sum_j dx^j ^ dy_j`` must equal ``omega_Y``; both use the exact inverse.
    """
    n, K = phi.n, _field(K)
    i = I(K)
    dX = action_differentials(phi, K)
    factors = []
    for j in range(n):
        f = DifferentialForm.generator(n, "y", j + 1, K).scale(i)
        for k in range(n):
            if phi.inverse[j][k]:
                f = f + dX[k].scale(phi.inverse[j][k])
        factors.append(f)
    vol_ok = wedge_all(factors, n, K) == Omega_Y(n, K)
    sym = DifferentialForm.zero(n, K)
    for j in range(n):
        sym = sym + (dX[j] ^ DifferentialForm.generator(n, "y", j + 1, K))
    return vol_ok and sym == omega_Y(phi, K) and phi.inverse_relation_holds()


# the transforms

def _kernel_transform(a: DifferentialForm, sign: int, block: str, reversed_: bool,
                      prefactor: GaussScalar) -> DifferentialForm:
    K = with_tau(a.field)
    a = a.promote(K)
    kernel = form_exp(curvature(a.n, K).scale(I(K) * sign))
    return fiber_integrate(wedge(a, kernel), block, reverse=reversed_).scale(prefactor)


def _semiflat_prefactor(n: int, K: FracField) -> GaussScalar:
    return (tau_scalar(K) * I(with_tau(K))).inverse() ** n


def semiflat_fwd(a: DifferentialForm) -> DifferentialForm:
    """``(2 pi i)^-n  int_{T_N} a ^ exp(i F)`` for a form on X."""
    if a.uses("y"):
        raise FormDomainError("semiflat_fwd expects a form on X (no dy generators)")
    return _kernel_transform(a, 1, "u", FWD_REVERSED, _semiflat_prefactor(a.n, a.field))


def semiflat_inv(a: DifferentialForm) -> DifferentialForm:
    """``(2 pi i)^-n  int_{T_M} a ^ exp(-i F)`` for a form on Y."""
    if a.uses("u"):
        raise FormDomainError("semiflat_inv expects a form on Y (no du generators)")
    return _kernel_transform(a, -1, "y", INV_REVERSED, _semiflat_prefactor(a.n, a.field))


def holonomy(v: Sequence[int], y: Sequence[float]) -> complex:
    """``exp(-i <y, v>)``."""
    if len(v) != len(y):
        raise ValueError("lattice vector and angle vector have different lengths")
    return complex(np.exp(-1j * sum(float(a) * float(b) for a, b in zip(v, y))))


# exhaustive basis check

SparseMatrix = dict[Monomial, dict[Monomial, GaussScalar]]


def transform_matrix(n: int, transform: Callable[[DifferentialForm], DifferentialForm],
                     domain: Sequence[str], K: FracField | None = None) -> SparseMatrix:
    """Columns ``transform(e_I)`` for every monomial ``e_I`` over the ``domain`` blocks."""
    K = _field(K)
    return {m: dict(transform(DifferentialForm(n, K, {m: 1})).terms) for m in basis_monomials(n, domain)}


def compose(A: SparseMatrix, B: SparseMatrix) -> SparseMatrix:
    """Column-sparse product ``A B``."""
    out: SparseMatrix = {}
    for col, entries in B.items():
        acc: dict[Monomial, GaussScalar] = {}
        for mid, c in entries.items():
            for row, a in A.get(mid, {}).items():
                acc[row] = acc[row] + a * c if row in acc else a * c
        out[col] = {r: c for r, c in acc.items() if c}
    return out


def is_identity(M: SparseMatrix) -> bool:
    return all(entries.keys() == {col} and entries[col] == 1 for col, entries in M.items())


@dataclass
class RoundTripReport:
    n: int
    size: int
    inv_after_fwd: bool
    fwd_after_inv: bool

    @property
    def ok(self) -> bool:
        return self.inv_after_fwd and self.fwd_after_inv


def round_trip_check(n: int) -> RoundTripReport:
    fwd = transform_matrix(n, semiflat_fwd, ("x", "u"))
    inv = transform_matrix(n, semiflat_inv, ("x", "y"))
    return RoundTripReport(n, len(fwd), is_identity(compose(inv, fwd)), is_identity(compose(fwd, inv)))


@dataclass
class SemiflatReport:
    n: int
    checks: dict[str, bool]
    phi: list[list[str]] | None = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        out = {"n": self.n, "ok": self.ok, "checks": dict(self.checks)}
        if self.phi is not None:
            out["phi"] = self.phi
        return out


def semiflat_identities(n: int, phi: SPDMatrix | None = None, round_trip: bool = False) -> SemiflatReport:
    """The four transform identities (the ``phi`` pair only when ``phi`` is given)."""
    checks = {
        "fwd(exp(i omega_X)) = Omega_Y": semiflat_fwd(exp_i_omega_X(n)) == Omega_Y(n),
        "inv(Omega_Y) = exp(i omega_X)": semiflat_inv(Omega_Y(n)) == exp_i_omega_X(n),
    }
    if phi is not None:
        if phi.n != n:
            raise ValueError("phi has the wrong size")
        checks["phi inverse relation"] = phi.inverse_relation_holds()
        checks["fwd(Omega_X) = exp(i omega_Y)"] = semiflat_fwd(Omega_X(phi)) == exp_i_omega_Y(phi)
        checks["inv(exp(i omega_Y)) = Omega_X"] = semiflat_inv(exp_i_omega_Y(phi)) == Omega_X(phi)
        checks["Legendre dual coordinates"] = action_coordinate_check(phi)
    if round_trip:
        checks["exhaustive round trip"] = round_trip_check(n).ok
    return SemiflatReport(n, checks, phi.to_json() if phi is not None else None)


# lattice-graded forms and the toric transform

class GradedForm:
    """Finitely supported ``v -> alpha_v``.

    On X this stands for ``sum_v exp(-<x, v>) alpha_v delta_v``; on Y the key
    ``v`` labels the monomial ``z^v``.
    """

    __slots__ = ("n", "field", "strata")

    def __init__(self, n: int, K: FracField, strata: Mapping[tuple[int, ...], DifferentialForm] | None = None):
        self.n = n
        self.field = with_tau(K)
        clean = {}
        for v, a in (strata or {}).items():
            v = tuple(int(e) for e in v)
            if len(v) != n or a.n != n:
                raise ValueError("stratum has the wrong rank")
            a = a.promote(self.field)
            if a:
                clean[v] = a
        self.strata = clean

    @classmethod
    def from_loop(cls, f: LoopFunction, form: DifferentialForm | None = None) -> GradedForm:
        """``f`` times a fixed form in every stratum (0-forms if ``form`` is None)."""
        K = with_tau(f.field)
        base = DifferentialForm.scalar(f.nvars, 1, K) if form is None else form.promote(K)
        return cls(f.nvars, K, {v: base.scale(c.promote(K)) for v, c in f.terms.items()})

    @classmethod
    def from_laurent(cls, p: LaurentPoly, form: DifferentialForm | None = None) -> GradedForm:
        K = with_tau(p.field)
        base = DifferentialForm.scalar(p.nvars, 1, K) if form is None else form.promote(K)
        return cls(p.nvars, K, {v: base.scale(c.promote(K)) for v, c in p.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedForm):
            return NotImplemented
        return self.n == other.n and self.strata == other.strata

    def is_function(self) -> bool:
        return all(a.is_function() for a in self.strata.values())

    def to_laurent(self) -> LaurentPoly:
        if not self.is_function():
            raise ValueError("graded form has positive-degree strata")
        return LaurentPoly(self.n, self.field, {v: a.constant_term() for v, a in self.strata.items()})

    def to_loop(self) -> LoopFunction:
        return LoopFunction(self.n, self.field, dict(self.to_laurent().terms))

    def mismatches(self, other: GradedForm) -> list[tuple[int, ...]]:
        keys = set(self.strata) | set(other.strata)
        zero = DifferentialForm.zero(self.n, self.field)
        return sorted(v for v in keys if self.strata.get(v, zero) != other.strata.get(v, zero))

    def render(self) -> str:
        return "{" + ", ".join(f"{v}: {a.render()}" for v, a in sorted(self.strata.items())) + "}"


def _toric_prefactor(n: int, K: FracField) -> GaussScalar:
    return (-(tau_scalar(K) * I(with_tau(K)))).inverse() ** n


def toric_kernel(a: DifferentialForm) -> DifferentialForm:
    """``(-2 pi i)^-n  int_{T_N} a ^ exp(i F)`` on one stratum."""
    return _kernel_transform(a, 1, "u", FWD_REVERSED, _toric_prefactor(a.n, a.field))


def toric_kernel_inv(a: DifferentialForm) -> DifferentialForm:
    return _kernel_transform(a, -1, "y", INV_REVERSED, _toric_prefactor(a.n, a.field))


def toric_syz_fwd(g: GradedForm) -> GradedForm:
    """Toric SYZ transform, stratum by stratum.

    The factor ``exp(-<x, v>) hol`` is pulled out as ``z^v`` before the fiber
    integral.  A stratum that is a function passes through unchanged (its
    Fourier coefficient), any other stratum goes through the kernel.
    """
    out = {}
    for v, a in g.strata.items():
        if a.uses("y"):
            raise FormDomainError(f"stratum {v} has dy generators")
        out[v] = a if a.is_function() else toric_kernel(a)
    return GradedForm(g.n, g.field, out)


def toric_syz_inv(g: GradedForm) -> GradedForm:
    out = {}
    for v, a in g.strata.items():
        if a.uses("u"):
            raise FormDomainError(f"stratum {v} has du generators")
        out[v] = a if a.is_function() else toric_kernel_inv(a)
    return GradedForm(g.n, g.field, out)


@dataclass
class TheoremCheck:
    name: str
    cutoff: int
    strata: int
    checks: dict[str, bool]
    failing_degrees: dict[str, list[tuple[int, ...]]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "cutoff": self.cutoff,
            "ok": self.ok,
            "strata": self.strata,
            "checks": dict(self.checks),
            "failing_degrees": {k: [list(v) for v in vs] for k, vs in self.failing_degrees.items()},
        }


def truncated_exp(W: LaurentPoly, cutoff: int) -> LaurentPoly:
    """``sum_{k <= cutoff} W^k / k!`` by Laurent multiplication."""
    total = LaurentPoly.constant(W.nvars, GaussScalar(W.field(1)), W.field)
    power = total
    for k in range(1, cutoff + 1):
        power = power * W
        total = total + power.scale(Fraction(1, factorial(k)))
    return total


def check_theorem_3_1(fp: FanPolytope, cutoff: int) -> TheoremCheck:
    """Truncated check of ``F(exp(i omega_X + Psi)) = exp(W) Omega_Y`` and its inverse."""
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    n = fp.dim
    W = build_superpotential(fp).poly
    psis = build_psi(fp)
    psi = psis[0]
    for p in psis[1:]:
        psi = psi + p
    K = with_tau(psi.field)
    lhs = GradedForm.from_loop(conv_exp(psi, cutoff), exp_i_omega_X(n, K))
    rhs = GradedForm.from_laurent(truncated_exp(W, cutoff), toric_Omega_Y(n, K))
    fwd = toric_syz_fwd(lhs)
    inv = toric_syz_inv(rhs)
    psi_g = GradedForm.from_loop(psi)
    W_g = GradedForm.from_laurent(W)
    failing = {"forward": fwd.mismatches(rhs), "inverse": inv.mismatches(lhs)}
    checks = {
        "forward": not failing["forward"],
        "inverse": not failing["inverse"],
        "F(Psi) = W": toric_syz_fwd(psi_g) == W_g,
        "F^-1(W) = Psi": toric_syz_inv(W_g) == psi_g,
    }
    return TheoremCheck(fp.name, cutoff, len(lhs.strata), checks, {k: v for k, v in failing.items() if v})
