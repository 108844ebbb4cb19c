"""Quotients of Laurent polynomial rings by finitely generated ideals.

A Laurent ideal in z1..zn is realized inside QQ(q)[z1, ..., zn, w] by
adjoining the single relation ``w*z1*...*zn - 1``.  The Gröbner basis is
computed by sympy's Buchberger implementation under grevlex with ``w``
as the smallest variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from sympy.polys.groebnertools import groebner
from sympy.polys.orderings import grevlex
from sympy.polys.rings import PolyElement, PolyRing, ring

from .laurent import Exponent, LaurentPoly, delocalize, localize, order_key
from .scalars import GaussScalar

ORDER_NAME = "grevlex"


class InfiniteQuotientError(ValueError):
    """Raised when a finite-dimensional quotient is required but not present."""


@dataclass(frozen=True)
class QuotientPresentation:
    nvars: int  # Laurent variables; the ambient ring has nvars + 1
    poly_ring: PolyRing = dc_field(repr=False)
    groebner: tuple[PolyElement, ...] = dc_field(repr=False)
    standard_monomials: tuple[tuple[int, ...], ...] | None
    order: str = ""

    @property
    def ambient_nvars(self) -> int:
        return self.nvars + 1

    @property
    def is_finite(self) -> bool:
        return self.standard_monomials is not None

    @property
    def dimension(self) -> int | None:
        return None if self.standard_monomials is None else len(self.standard_monomials)

    @property
    def leading_monomials(self) -> list[tuple[int, ...]]:
        return [g.LM for g in self.groebner]

    def standard_laurent_monomials(self) -> list[Exponent]:
        """Standard monomials mapped back to Laurent exponents, in order."""
        if self.standard_monomials is None:
            raise InfiniteQuotientError("quotient is infinite-dimensional")
        return [delocalize(e) for e in self.standard_monomials]


def _ambient_ring(nvars: int, K) -> PolyRing:
    names = [f"z{j + 1}" for j in range(nvars)] + ["w"]
    return ring(",".join(names), K.to_domain(), grevlex)[0]


def _to_poly(f: LaurentPoly, R: PolyRing) -> PolyElement:
    """Map a real Laurent polynomial into the localized polynomial ring."""
    if not f.is_real():
        raise ValueError("only real-coefficient Laurent polynomials map into the quotient ring")
    dom = R.domain
    return R({localize(v): dom.convert(c.re) for v, c in f.terms.items()})


def _from_poly(p: PolyElement, nvars: int, K) -> LaurentPoly:
    out: dict[Exponent, GaussScalar] = {}
    for e, c in p.terms():
        v = delocalize(e)
        c = GaussScalar(c)
        out[v] = out[v] + c if v in out else c
    return LaurentPoly(nvars, K, out)


def _clear(f: LaurentPoly, R: PolyRing) -> PolyElement:
    """Multiply ``f`` by the monomial unit that makes it a polynomial in z alone."""
    n = f.nvars
    shift = [max(0, -min(v[j] for v in f.terms)) for j in range(n)]
    g = LaurentPoly(n, f.field, {tuple(e + s for e, s in zip(v, shift)): c for v, c in f.terms.items()})
    return _to_poly(g, R)


def _standard_monomials(lms: list[tuple[int, ...]], nv: int) -> tuple[tuple[int, ...], ...] | None:
    if any(all(e == 0 for e in m) for m in lms):
        return ()
    # finite iff every variable has a pure power among the leading monomials
    for i in range(nv):
        if not any(m[i] > 0 and all(m[k] == 0 for k in range(nv) if k != i) for m in lms):
            return None

    def divisible(e, m):
        return all(a >= b for a, b in zip(e, m))

    seen = {(0,) * nv}
    frontier = [(0,) * nv]
    while frontier:
        nxt = []
        for e in frontier:
            for i in range(nv):
                f = e[:i] + (e[i] + 1,) + e[i + 1:]
                if f in seen or any(divisible(f, m) for m in lms):
                    continue
                seen.add(f)
                nxt.append(f)
        frontier = nxt
    return tuple(sorted(seen, key=grevlex, reverse=True))


def laurent_quotient(generators) -> QuotientPresentation:
    """Presentation of QQ(q)[z^{+-1}] / <generators>.

    Each generator is cleared to a polynomial by a monomial unit, the
    localization relation ``w*z1*...*zn - 1`` is adjoined, and a reduced
    Gröbner basis is computed.
    """
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    n, K = gens[0].nvars, gens[0].field
    for g in gens:
        if g.nvars != n or g.field != K:
            raise ValueError("generators must share variable count and field")
    R = _ambient_ring(n, K)
    polys = [_clear(g, R) for g in gens if g]
    w = R.gens[-1]
    unit = w
    for z in R.gens[:-1]:
        unit = unit * z
    polys.append(unit - 1)
    G = groebner(polys, R)
    G = sorted((g.monic() for g in G), key=lambda g: grevlex(g.LM), reverse=True)
    std = _standard_monomials([g.LM for g in G], n + 1)
    return QuotientPresentation(n, R, tuple(G), std, f"{ORDER_NAME}({'>'.join(str(s) for s in R.symbols)})")


def _reduce_real(f: LaurentPoly, p: QuotientPresentation) -> LaurentPoly:
    R = p.poly_ring
    r = _to_poly(f, R).rem(list(p.groebner))
    return _from_poly(r, f.nvars, f.field)


def normal_form(f: LaurentPoly, p: QuotientPresentation) -> LaurentPoly:
    """Canonical representative of ``f`` modulo the ideal of ``p``.

    Gaussian coefficients are reduced part by part; this is valid because
    the Gröbner basis is defined over the real subfield.
    """
    if not p.is_finite:
        raise InfiniteQuotientError("normal forms require a finite-dimensional quotient")
    if f.nvars != p.nvars:
        raise ValueError("variable count mismatch")
    if not f:
        return f
    K = f.field
    if p.poly_ring.domain.field != K:
        raise ValueError("polynomial field differs from the quotient's coefficient field")
    re = LaurentPoly(f.nvars, K, {v: GaussScalar(c.re) for v, c in f.terms.items()})
    im = LaurentPoly(f.nvars, K, {v: GaussScalar(c.im) for v, c in f.terms.items()})
    out = _reduce_real(re, p)
    if im:
        out = out + _reduce_real(im, p) * GaussScalar(K(0), K(1))
    return out


def ideal_membership(f: LaurentPoly, p: QuotientPresentation) -> bool:
    """True iff ``f`` lies in the ideal presented by ``p``."""
    if not f:
        return True
    if not p.is_finite:
        # the remainder is still canonical for any Gröbner basis
        R = p.poly_ring
        re = LaurentPoly(f.nvars, f.field, {v: GaussScalar(c.re) for v, c in f.terms.items()})
        im = LaurentPoly(f.nvars, f.field, {v: GaussScalar(c.im) for v, c in f.terms.items()})
        G = list(p.groebner)
        return not _to_poly(re, R).rem(G) and not _to_poly(im, R).rem(G)
    return not normal_form(f, p)


def multiplication_matrix(f: LaurentPoly, p: QuotientPresentation) -> list[list[GaussScalar]]:
    """Matrix of multiplication by ``f`` on the standard-monomial basis (columns = images)."""
    basis = p.standard_laurent_monomials()
    index = {}
    for i, v in enumerate(basis):
        index[localize(v)] = i
    K = f.field
    cols = []
    for v in basis:
        img = normal_form(f * LaurentPoly.monomial(v, 1, K), p)
        col = [GaussScalar(K(0))] * len(basis)
        for u, c in img.terms.items():
            col[index[localize(u)]] = c
        cols.append(col)
    return [[cols[j][i] for j in range(len(basis))] for i in range(len(basis))]


__all__ = [
    "QuotientPresentation", "InfiniteQuotientError", "laurent_quotient", "normal_form",
    "ideal_membership", "multiplication_matrix", "order_key",
]
