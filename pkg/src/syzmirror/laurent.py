"""Sparse Laurent polynomials in z1..zn over the Gaussian rational function field."""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from sympy.polys.fields import FracField
from sympy.polys.orderings import grevlex

from .scalars import GaussScalar, QScalar, field_names, param_field, render_q, to_field

Exponent = tuple[int, ...]


def localize(v: Sequence[int]) -> tuple[int, ...]:
    """Polynomial exponent (z-part, w) of z^v under w*z1*...*zn = 1.

    The smallest power of w that clears every negative entry is used.
    """
    m = max(0, -min(v)) if len(v) else 0
    return tuple(e + m for e in v) + (m,)


def delocalize(e: Sequence[int]) -> Exponent:
    """Inverse of :func:`localize` on arbitrary exponents: z^a w^b -> z^(a-b)."""
    *a, b = e
    return tuple(x - b for x in a)


def order_key(v: Exponent):
    """Grevlex key with the localizing variable last; larger sorts first."""
    return grevlex(localize(v))


class LaurentPoly:
    """Finite sum of terms c * z^v, v in Z^n, stored as ``{v: GaussScalar}``.

    Zero coefficients are never stored.
    """

    __slots__ = ("nvars", "field", "terms")

    def __init__(self, nvars: int, K: FracField, terms: Mapping[Exponent, GaussScalar] | None = None):
        self.nvars = nvars
        self.field = K
        clean = {}
        for v, c in (terms or {}).items():
            v = tuple(int(e) for e in v)
            if len(v) != nvars:
                raise ValueError(f"exponent {v} has wrong length for {nvars} variables")
            if not isinstance(c, GaussScalar):
                c = GaussScalar(to_field(K, c))
            elif c.field != K:
                c = c.promote(K)
            if c:
                clean[v] = c
        self.terms = clean

    # constructors

    @classmethod
    def zero(cls, nvars: int, K: FracField | None = None) -> LaurentPoly:
        return cls(nvars, K or param_field(0))

    @classmethod
    def constant(cls, nvars: int, c, K: FracField | None = None) -> LaurentPoly:
        K = K or (c.field if isinstance(c, GaussScalar) else param_field(0))
        return cls(nvars, K, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, v: Sequence[int], c=1, K: FracField | None = None) -> LaurentPoly:
        K = K or (c.field if isinstance(c, GaussScalar) else param_field(0))
        return cls(len(v), K, {tuple(v): c})

    @classmethod
    def variables(cls, nvars: int, K: FracField | None = None) -> list[LaurentPoly]:
        basis = [tuple(int(i == j) for i in range(nvars)) for j in range(nvars)]
        return [cls.monomial(v, 1, K) for v in basis]

    # structure

    def _check(self, other: LaurentPoly) -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
        if self.field != other.field:
            raise ValueError("coefficient fields differ; promote first")

    def _lift(self, other) -> LaurentPoly:
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        return LaurentPoly.constant(self.nvars, GaussScalar(to_field(self.field, other))
                                    if not isinstance(other, GaussScalar) else other, self.field)

    def promote(self, K: FracField) -> LaurentPoly:
        return LaurentPoly(self.nvars, K, {v: c.promote(K) for v, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def support(self) -> set[Exponent]:
        return set(self.terms)

    def coeff(self, v: Sequence[int]) -> GaussScalar:
        return self.terms.get(tuple(v), GaussScalar(self.field(0)))

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            if isinstance(other, (int, GaussScalar)):
                other = self._lift(other)
            else:
                return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    # arithmetic

    def __add__(self, other) -> LaurentPoly:
        other = self._lift(other)
        out = dict(self.terms)
        for v, c in other.terms.items():
            s = out.get(v)
            s = c if s is None else s + c
            if s:
                out[v] = s
            else:
                out.pop(v, None)
        return LaurentPoly(self.nvars, self.field, out)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly(self.nvars, self.field, {v: -c for v, c in self.terms.items()})

    def __sub__(self, other) -> LaurentPoly:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> LaurentPoly:
        return self._lift(other) - self

    def scale(self, c) -> LaurentPoly:
        if not isinstance(c, GaussScalar):
            c = GaussScalar(to_field(self.field, c))
        return LaurentPoly(self.nvars, self.field, {v: a * c for v, a in self.terms.items()})

    def __mul__(self, other) -> LaurentPoly:
        if not isinstance(other, LaurentPoly):
            return self.scale(other)
        self._check(other)
        out: dict[Exponent, GaussScalar] = {}
        for v, a in self.terms.items():
            for w, b in other.terms.items():
                u = tuple(x + y for x, y in zip(v, w))
                s = out.get(u)
                out[u] = a * b if s is None else s + a * b
        return LaurentPoly(self.nvars, self.field, out)

    def __rmul__(self, other) -> LaurentPoly:
        return self.scale(other)

    def __pow__(self, k: int) -> LaurentPoly:
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (v, c), = self.terms.items()
            return LaurentPoly(self.nvars, self.field, {tuple(-e for e in v): c.inverse()}) ** (-k)
        result = LaurentPoly.constant(self.nvars, GaussScalar(self.field(1)), self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # calculus

    def log_derivative(self, j: int) -> LaurentPoly:
        """z_j d/dz_j with 1-based ``j``: c z^v -> v_j c z^v."""
        if not 1 <= j <= self.nvars:
            raise IndexError(f"axis {j} out of range 1..{self.nvars}")
        return LaurentPoly(self.nvars, self.field,
                           {v: c * v[j - 1] for v, c in self.terms.items() if v[j - 1]})

    def q_derivative(self, a: int) -> LaurentPoly:
        return LaurentPoly(self.nvars, self.field,
                           {v: gauss_q_derivative(c, a) for v, c in self.terms.items()})

    def evaluate(self, z: Sequence[complex], q: Mapping[str, complex] | None = None) -> complex:
        if len(z) != self.nvars:
            raise ValueError("point has wrong dimension")
        if any(zj == 0 for zj in z):
            raise ZeroDivisionError("Laurent polynomial evaluated at a zero coordinate")
        total = 0j
        for v, c in self.terms.items():
            t = c.evaluate(q)
            for zj, e in zip(z, v):
                if e:
                    t *= complex(zj) ** e
            total += t
        return total

    # rendering

    def sorted_terms(self) -> list[tuple[Exponent, GaussScalar]]:
        return sorted(self.terms.items(), key=lambda t: order_key(t[0]), reverse=True)

    def render(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, (v, c) in enumerate(self.sorted_terms()):
            mono = render_monomial(v)
            cs = c.render()
            neg = cs.startswith("-") and _is_atomic(cs[1:])
            if neg:
                cs = cs[1:]
            elif not _is_atomic(cs):
                cs = f"({cs})" if not (cs.startswith("(") and cs.endswith(")")) else cs
            if mono == "1":
                body = cs
            elif cs == "1":
                body = mono
            else:
                body = f"{cs}*{mono}"
            if i == 0:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f" - {body}" if neg else f" + {body}")
        return "".join(out)

    __str__ = render

    def __repr__(self) -> str:
        return f"LaurentPoly({self.render()})"


def _is_atomic(s: str) -> bool:
    return not any(ch in s for ch in "+- ") or (s.startswith("(") and s.endswith(")"))


def render_monomial(v: Sequence[int]) -> str:
    parts = []
    for j, e in enumerate(v, start=1):
        if e == 1:
            parts.append(f"z{j}")
        elif e:
            parts.append(f"z{j}^{e}")
    return "*".join(parts) or "1"


def q_derivative(s: QScalar, a: int) -> QScalar:
    """Formal partial derivative d/dq_a (1-based) of a rational function."""
    names = field_names(s.field)
    name = f"q{a}"
    if name not in names:
        raise IndexError(f"parameter index {a} out of range")
    return s.diff(s.field.gens[names.index(name)])


def gauss_q_derivative(c: GaussScalar, a: int) -> GaussScalar:
    return GaussScalar(q_derivative(c.re, a), q_derivative(c.im, a))


def sum_polys(polys: Iterable[LaurentPoly], nvars: int, K: FracField) -> LaurentPoly:
    acc = LaurentPoly(nvars, K)
    for p in polys:
        acc = acc + p
    return acc


__all__ = [
    "Exponent", "LaurentPoly", "localize", "delocalize", "order_key",
    "render_monomial", "q_derivative", "gauss_q_derivative", "sum_polys", "render_q",
]
