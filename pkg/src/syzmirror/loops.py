"""Lattice-graded functions on the loop space LX = X x N.

A :class:`LoopFunction` stores coefficients ``c_v`` and stands for
``sum_v c_v exp(-<x, v>) delta_v``; the exponential weight is implied by
the grading and never stored.  Convolution over N makes these an algebra,
and the fiberwise Fourier series sends it to Laurent polynomials.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from sympy.polys.fields import FracField

from .lattice import (FanPolytope, _solve, euler_characteristic, is_normalized,
                      is_product_of_projective_spaces)
from .laurent import Exponent, LaurentPoly, gauss_q_derivative
from .mirror import build_superpotential, jacobian_ring, kahler_coefficient
from .quotient import QuotientPresentation, ideal_membership, laurent_quotient
from .scalars import GaussScalar, param_field, to_field

# exactly one Maslov index two disc per facet class through each point
DISC_COUNT = 1


class LoopFunction:
    """Finitely supported function ``v -> c_v`` on the lattice N."""

    __slots__ = ("nvars", "field", "terms")

    def __init__(self, nvars: int, K: FracField, terms: Mapping[Exponent, GaussScalar] | None = None):
        self.nvars = nvars
        self.field = K
        clean = {}
        for v, c in (terms or {}).items():
            v = tuple(int(e) for e in v)
            if len(v) != nvars:
                raise ValueError(f"lattice vector {v} has wrong rank")
            if not isinstance(c, GaussScalar):
                c = GaussScalar(to_field(K, c))
            elif c.field != K:
                c = c.promote(K)
            if c:
                clean[v] = c
        self.terms = clean

    @classmethod
    def delta(cls, nvars: int, K: FracField, v: Sequence[int] | None = None, c=1) -> LoopFunction:
        v = tuple(v) if v is not None else (0,) * nvars
        return cls(nvars, K, {v: c})

    def support(self) -> set[Exponent]:
        return set(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LoopFunction):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other: LoopFunction) -> LoopFunction:
        _check(self, other)
        out = dict(self.terms)
        for v, c in other.terms.items():
            out[v] = out[v] + c if v in out else c
        return LoopFunction(self.nvars, self.field, out)

    def __neg__(self) -> LoopFunction:
        return LoopFunction(self.nvars, self.field, {v: -c for v, c in self.terms.items()})

    def __sub__(self, other: LoopFunction) -> LoopFunction:
        return self + (-other)

    def scale(self, c) -> LoopFunction:
        if not isinstance(c, GaussScalar):
            c = GaussScalar(to_field(self.field, c))
        return LoopFunction(self.nvars, self.field, {v: a * c for v, a in self.terms.items()})

    def q_derivative(self, a: int) -> LoopFunction:
        return LoopFunction(self.nvars, self.field,
                            {v: gauss_q_derivative(c, a) for v, c in self.terms.items()})

    def promote(self, K: FracField) -> LoopFunction:
        return LoopFunction(self.nvars, K, {v: c.promote(K) for v, c in self.terms.items()})

    def render(self) -> str:
        items = sorted(self.terms.items())
        return "{" + ", ".join(f"{_vec(v)}: {c.render()}" for v, c in items) + "}"

    __str__ = render

    def __repr__(self) -> str:
        return f"LoopFunction({self.render()})"


def _vec(v: Sequence[int]) -> str:
    return "(" + ", ".join(str(e) for e in v) + ")"


def _check(f: LoopFunction, g: LoopFunction) -> None:
    if f.nvars != g.nvars or f.field != g.field:
        raise ValueError("loop functions live over different lattices or fields")


def convolve(f: LoopFunction, g: LoopFunction) -> LoopFunction:
    """``(f * g)_v = sum_{v' + v'' = v} f_{v'} g_{v''}``.

    Evaluated target by target: for each lattice point of the Minkowski sum
    of the supports, gather the matching pairs.
    """
    _check(f, g)
    targets = {tuple(a + b for a, b in zip(u, w)) for u in f.terms for w in g.terms}
    out = {}
    for v in targets:
        acc = None
        for u, cu in f.terms.items():
            cw = g.terms.get(tuple(a - b for a, b in zip(v, u)))
            if cw is not None:
                acc = cu * cw if acc is None else acc + cu * cw
        if acc is not None and acc:
            out[v] = acc
    return LoopFunction(f.nvars, f.field, out)


def conv_power(f: LoopFunction, k: int) -> LoopFunction:
    if k < 0:
        raise ValueError("negative convolution power")
    out = LoopFunction.delta(f.nvars, f.field)
    for _ in range(k):
        out = convolve(out, f)
    return out


def conv_exp(f: LoopFunction, cutoff: int) -> LoopFunction:
    """``sum_{k=0}^{cutoff} f^{*k} / k!``."""
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    total = LoopFunction.delta(f.nvars, f.field)
    power = LoopFunction.delta(f.nvars, f.field)
    for k in range(1, cutoff + 1):
        power = convolve(power, f)
        total = total + power.scale(Fraction(1, factorial(k)))
    return total


def fourier(f: LoopFunction) -> LaurentPoly:
    """Fiberwise Fourier series ``sum_v c_v z^v``."""
    out = LaurentPoly(f.nvars, f.field)
    for v, c in f.terms.items():
        out = out + LaurentPoly.monomial(v, c, f.field)
    return out


def inverse_fourier(p: LaurentPoly) -> LoopFunction:
    return LoopFunction(p.nvars, p.field, dict(p.terms))


def build_psi(fp: FanPolytope) -> list[LoopFunction]:
    """Disc-counting functions: ``Psi_i`` is ``q^{m_i}`` supported at ``v_i``."""
    if not is_normalized(fp):
        raise ValueError("fan must be normalized first")
    K = param_field(fp.kahler_params)
    return [LoopFunction.delta(fp.dim, K, f.normal, kahler_coefficient(fp, i) * DISC_COUNT)
            for i, f in enumerate(fp.facets)]


def psi_total(fp: FanPolytope) -> LoopFunction:
    psis = build_psi(fp)
    out = psis[0]
    for p in psis[1:]:
        out = out + p
    return out


@dataclass(frozen=True)
class QhPresentation:
    generators: tuple[LoopFunction, ...]
    linear_relations: tuple[LoopFunction, ...]
    realization: QuotientPresentation

    def relation_coefficients(self, fp: FanPolytope) -> list[list[int]]:
        return [[f.normal[j] for f in fp.facets] for j in range(fp.dim)]


def linear_relations(fp: FanPolytope) -> list[LoopFunction]:
    """``r_j = sum_i v_i^j Psi_i`` for the standard basis of M."""
    psis = build_psi(fp)
    K = psis[0].field
    rels = []
    for j in range(fp.dim):
        r = LoopFunction(fp.dim, K)
        for f, p in zip(fp.facets, psis):
            if f.normal[j]:
                r = r + p.scale(f.normal[j])
        rels.append(r)
    return rels


def render_relation(fp: FanPolytope, j: int) -> str:
    parts = []
    for i, f in enumerate(fp.facets):
        c = f.normal[j]
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        mag = "" if abs(c) == 1 else f"{abs(c)}*"
        parts.append((sign, f"{mag}Psi{i + 1}"))
    if not parts:
        return "0"
    head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    return head + "".join(f" {s} {t}" for s, t in parts[1:])


def qh_presentation(fp: FanPolytope) -> QhPresentation:
    psis = build_psi(fp)
    rels = linear_relations(fp)
    realization = laurent_quotient([fourier(r) for r in rels])
    return QhPresentation(tuple(psis), tuple(rels), realization)


# quantum (multiplicative) relations

def primitive_collections(fp: FanPolytope) -> list[tuple[int, ...]]:
    """Minimal facet sets not contained in any maximal cone."""
    cones = [set(c) for c in fp.maximal_cones]

    def in_cone(s):
        return any(set(s) <= c for c in cones)

    out = []
    for k in range(2, fp.n_facets + 1):
        for s in itertools.combinations(range(fp.n_facets), k):
            if in_cone(s):
                continue
            if all(in_cone(t) for t in itertools.combinations(s, k - 1)):
                out.append(s)
    return out


@dataclass
class QuantumRelation:
    collection: tuple[int, ...]
    cone_coefficients: dict[int, int]
    q_factor: GaussScalar
    holds: bool

    def render(self) -> str:
        lhs = "*".join(f"Psi{i + 1}" for i in self.collection)
        rhs = [self.q_factor.render()] if self.q_factor != 1 or not self.cone_coefficients else []
        for j, c in sorted(self.cone_coefficients.items()):
            rhs.append(f"Psi{j + 1}" + (f"^{c}" if c != 1 else ""))
        return f"{lhs} = {'*'.join(rhs)}"


def quantum_relations(fp: FanPolytope) -> list[QuantumRelation]:
    """Batyrev relation for each primitive collection, checked by convolution.

    For ``P`` with ``sum_{i in P} v_i = sum_{j in sigma} c_j v_j`` (``sigma``
    the cone containing the sum), the star product over ``P`` equals
    ``q^beta`` times the star product of ``Psi_j^{c_j}``.
    """
    psis = build_psi(fp)
    K = psis[0].field
    n = fp.dim
    out = []
    for P in primitive_collections(fp):
        s = [sum(fp.facets[i].normal[j] for i in P) for j in range(n)]
        coeffs: dict[int, int] = {}
        if any(s):
            for c in fp.maximal_cones:
                x = _solve([fp.facets[i].normal for i in c], s, transpose=True)
                if x is not None and all(t >= 0 for t in x):
                    coeffs = {i: int(t) for i, t in zip(c, x) if t}
                    break
        lhs = LoopFunction.delta(n, K)
        for i in P:
            lhs = convolve(lhs, psis[i])
        rhs = LoopFunction.delta(n, K)
        for j, c in coeffs.items():
            rhs = convolve(rhs, conv_power(psis[j], c))
        # lhs and rhs are single deltas at the same lattice point
        (lv, lc), = lhs.terms.items()
        (rv, rc), = rhs.terms.items()
        factor = lc / rc
        out.append(QuantumRelation(P, coeffs, factor, lv == rv and convolve(rhs, LoopFunction.delta(n, K, None, factor)) == lhs))
    return out


# isomorphism check

@dataclass
class IsoReport:
    name: str
    checks: dict[str, bool]
    dimension: int | None
    euler: int
    within_hypothesis: bool
    relations: list[str]
    gradient: list[str]
    quantum_relations: list[str]
    standard_monomials: list[str]
    witnesses: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "checks": dict(self.checks),
            "dimension": self.dimension,
            "euler_characteristic": self.euler,
            "within_hypothesis": self.within_hypothesis,
            "note": ("product of projective spaces" if self.within_hypothesis
                     else "beyond product-of-projective-spaces hypothesis"),
            "relations": list(self.relations),
            "gradient": list(self.gradient),
            "quantum_relations": list(self.quantum_relations),
            "standard_monomials": list(self.standard_monomials),
            "witnesses": list(self.witnesses),
        }


def verify_qh_jac_iso(fp: FanPolytope) -> IsoReport:
    """Presentation-level check that Fourier series identifies QH* with Jac(W)."""
    from .laurent import render_monomial

    W = build_superpotential(fp)
    jac = jacobian_ring(W)
    qh = qh_presentation(fp)
    witnesses = []

    images = [fourier(r) for r in qh.linear_relations]
    rel_ok = True
    for j, (img, grad) in enumerate(zip(images, W.gradient), start=1):
        if img != grad:
            rel_ok = False
            witnesses.append(f"fourier(r{j}) = {img.render()} but d{j}W = {grad.render()}")

    member_ok = True
    for j, grad in enumerate(W.gradient, start=1):
        if not ideal_membership(grad, qh.realization):
            member_ok = False
            witnesses.append(f"d{j}W not in the relation ideal")
    for j, img in enumerate(images, start=1):
        if not ideal_membership(img, jac.presentation):
            member_ok = False
            witnesses.append(f"fourier(r{j}) not in the Jacobian ideal")

    dim = jac.dimension
    chi = euler_characteristic(fp)
    dim_ok = dim == chi and qh.realization.dimension == dim
    if not dim_ok:
        witnesses.append(f"dim Jac(W) = {dim}, relation quotient = {qh.realization.dimension}, cones = {chi}")

    gen_ok = True
    for i, (psi, Z) in enumerate(zip(qh.generators, jac.generator_images), start=1):
        if fourier(psi) != Z:
            gen_ok = False
            witnesses.append(f"fourier(Psi{i}) = {fourier(psi).render()} but Z{i} = {Z.render()}")

    qrels = quantum_relations(fp)
    qrel_ok = all(r.holds for r in qrels)
    if not qrel_ok:
        witnesses.extend(f"quantum relation fails: {r.render()}" for r in qrels if not r.holds)

    checks = {
        "relations_match_gradient": rel_ok,
        "mutual_ideal_membership": member_ok,
        "dimension_equals_euler": dim_ok,
        "generators_match": gen_ok,
        "quantum_relations": qrel_ok,
    }
    std = [render_monomial(v) for v in jac.presentation.standard_laurent_monomials()] if jac.is_finite else []
    return IsoReport(
        name=fp.name,
        checks=checks,
        dimension=dim,
        euler=chi,
        within_hypothesis=is_product_of_projective_spaces(fp),
        relations=[render_relation(fp, j) for j in range(fp.dim)],
        gradient=[g.render() for g in W.gradient],
        quantum_relations=[r.render() for r in qrels],
        standard_monomials=std,
        witnesses=witnesses,
    )


def phi_derivative_identity_check(fp: FanPolytope, a: int, cutoff: int) -> bool:
    """Truncated ``q_a dPhi/dq_a = Phi * Psi_{n+a}`` with ``Phi = Exp Psi``.

    Differentiating the degree-``cutoff`` truncation lands in the
    degree-``cutoff - 1`` truncation on the right.
    """
    n, l = fp.dim, fp.kahler_params
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    if not 1 <= a <= l:
        raise IndexError(f"parameter index {a} out of range 1..{l}")
    for i, f in enumerate(fp.facets):
        if f.q_exponent[a - 1] != int(i == n + a - 1):
            raise ValueError(f"q{a} must appear exactly in facet {n + a} with exponent 1")
    psis = build_psi(fp)
    psi = psis[0]
    for p in psis[1:]:
        psi = psi + p
    qa = GaussScalar(psi.field.gens[a - 1])
    lhs = conv_exp(psi, cutoff).q_derivative(a).scale(qa)
    rhs = convolve(conv_exp(psi, cutoff - 1), psis[n + a - 1])
    return lhs == rhs
