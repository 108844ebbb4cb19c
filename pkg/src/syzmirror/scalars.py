"""Exact scalars: rational functions in the Kähler parameters and their
Gaussian extension by sqrt(-1).

Rational function arithmetic is delegated to sympy's sparse
``FracField``; elements are kept in lowest terms by sympy, so equality of
two ``QScalar`` values is structural.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from sympy import QQ
from sympy.polys.fields import FracElement, FracField, field

QScalar = FracElement

TAU = "tau"  # formal symbol for 2*pi


@lru_cache(maxsize=None)
def rational_field(names: tuple[str, ...]) -> FracField:
    """Return the field QQ(names...), cached by symbol tuple."""
    return field(",".join(names), QQ)[0]


def param_names(l: int) -> tuple[str, ...]:
    return tuple(f"q{a + 1}" for a in range(l))


def param_field(l: int) -> FracField:
    """QQ(q1, ..., ql)."""
    return rational_field(param_names(l))


def with_tau(K: FracField) -> FracField:
    """Extend ``K`` by the formal symbol ``tau`` standing for 2*pi."""
    names = tuple(str(s) for s in K.symbols)
    if TAU in names:
        return K
    return rational_field(names + (TAU,))


def field_names(K: FracField) -> tuple[str, ...]:
    return tuple(str(s) for s in K.symbols)


def to_field(K: FracField, x) -> QScalar:
    """Coerce an int, Fraction or element of a sub-field into ``K``."""
    if isinstance(x, FracElement):
        if x.field == K:
            return x
        sub = field_names(x.field)
        if not set(sub) <= set(field_names(K)):
            raise ValueError(f"cannot embed field {sub} into {field_names(K)}")
        return x.set_field(K)
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return K(x)
    if isinstance(x, (Fraction, Rational)):
        return K(QQ(int(x.numerator), int(x.denominator)))
    if isinstance(x, str):
        return to_field(K, Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to a field element")


def evaluate_q(s: QScalar, values: dict[str, complex] | None) -> complex:
    """Float evaluation of a rational function at numeric parameter values."""
    values = values or {}
    names = field_names(s.field)
    try:
        point = [values[nm] for nm in names]
    except KeyError as exc:
        raise ValueError(f"no numeric value for parameter {exc.args[0]}") from None

    def poly_at(p) -> complex:
        acc = 0j
        for monom, c in p.terms():
            t = complex(float(c))
            for val, e in zip(point, monom):
                if e:
                    t *= val**e
            acc += t
        return acc

    den = poly_at(s.denom)
    if den == 0:
        raise ZeroDivisionError("denominator vanishes at the given parameters")
    return poly_at(s.numer) / den


def render_q(s: QScalar) -> str:
    return str(s).replace("**", "^")


class GaussScalar:
    """``re + sqrt(-1)*im`` with ``re``, ``im`` in a common rational function field."""

    __slots__ = ("re", "im")

    def __init__(self, re: QScalar, im: QScalar | None = None):
        K = re.field
        self.re = re
        self.im = K(0) if im is None else to_field(K, im)

    @classmethod
    def of(cls, K: FracField, re=0, im=0) -> GaussScalar:
        return cls(to_field(K, re), to_field(K, im))

    @property
    def field(self) -> FracField:
        return self.re.field

    def _coerce(self, other) -> GaussScalar:
        if isinstance(other, GaussScalar):
            if other.field != self.field:
                raise ValueError("scalars live in different fields")
            return other
        if isinstance(other, complex):
            raise TypeError("floating complex values are not exact scalars")
        return GaussScalar(to_field(self.field, other))

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_real(self) -> bool:
        return not self.im

    def __eq__(self, other) -> bool:
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __add__(self, other) -> GaussScalar:
        o = self._coerce(other)
        return GaussScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> GaussScalar:
        return GaussScalar(-self.re, -self.im)

    def __sub__(self, other) -> GaussScalar:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> GaussScalar:
        return self._coerce(other) - self

    def __mul__(self, other) -> GaussScalar:
        o = self._coerce(other)
        if not self.im and not o.im:
            return GaussScalar(self.re * o.re)
        return GaussScalar(self.re * o.re - self.im * o.im,
                           self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conjugate(self) -> GaussScalar:
        return GaussScalar(self.re, -self.im)

    def inverse(self) -> GaussScalar:
        norm = self.re * self.re + self.im * self.im
        if not norm:
            raise ZeroDivisionError("inverse of zero scalar")
        return GaussScalar(self.re / norm, -self.im / norm)

    def __truediv__(self, other) -> GaussScalar:
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> GaussScalar:
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> GaussScalar:
        if k < 0:
            return self.inverse() ** (-k)
        result = GaussScalar(self.field(1))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def promote(self, K: FracField) -> GaussScalar:
        return GaussScalar(to_field(K, self.re), to_field(K, self.im))

    def evaluate(self, values: dict[str, complex] | None = None) -> complex:
        z = evaluate_q(self.re, values)
        if self.im:
            z += 1j * evaluate_q(self.im, values)
        return z

    def render(self) -> str:
        if not self.im:
            return render_q(self.re)
        im = {"1": "I", "-1": "-I"}.get(render_q(self.im))
        im = im or f"{_wrap(render_q(self.im))}*I"
        if not self.re:
            return im
        return f"({render_q(self.re)} + {im})"

    def __repr__(self) -> str:
        return f"GaussScalar({self.render()})"


def _wrap(s: str) -> str:
    if any(ch in s for ch in "+-/") and not (s.startswith("(") and s.endswith(")")):
        return f"({s})"
    return s


def I(K: FracField) -> GaussScalar:  # noqa: E743
    """sqrt(-1) in ``K``."""
    return GaussScalar(K(0), K(1))
