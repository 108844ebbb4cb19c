"""Constant-coefficient differential forms on the fibered product X x_B Y.

Generators are indexed ``0..3n-1``: ``dx_j -> j-1``, ``dy_j -> n+j-1``,
``du_j -> 2n+j-1``.  A monomial is a strictly increasing index tuple; the
canonical order is therefore dx-block, dy-block, du-block.  Coefficients
are :class:`GaussScalar` values.  ``tau`` in the coefficient field stands
for ``2*pi`` so that torus volumes stay exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from sympy.polys.fields import FracField

from .scalars import TAU, GaussScalar, field_names, param_field, to_field, with_tau

Monomial = tuple[int, ...]

BLOCKS = ("x", "y", "u")


def block_offset(block: str, n: int) -> int:
    try:
        return BLOCKS.index(block) * n
    except ValueError:
        raise ValueError(f"unknown block {block!r}; expected one of {BLOCKS}") from None


def block_indices(block: str, n: int) -> tuple[int, ...]:
    off = block_offset(block, n)
    return tuple(range(off, off + n))


def generator_name(g: int, n: int) -> str:
    return f"d{BLOCKS[g // n]}{g % n + 1}"


def _inversions(seq: Sequence[int]) -> int:
    return sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])


def canonicalize(seq: Sequence[int]) -> tuple[int, Monomial] | None:
    """Sort a generator word; returns ``(sign, monomial)`` or None if a generator repeats."""
    if len(set(seq)) != len(seq):
        return None
    sign = -1 if _inversions(seq) % 2 else 1
    return sign, tuple(sorted(seq))


class DifferentialForm:
    """Finite sum ``sum_I c_I dg_I`` with ``I`` a canonical monomial."""

    __slots__ = ("n", "field", "terms")

    def __init__(self, n: int, K: FracField, terms: Mapping[Monomial, GaussScalar] | None = None):
        self.n = n
        self.field = K
        clean = {}
        for m, c in (terms or {}).items():
            m = tuple(m)
            if any(not 0 <= g < 3 * n for g in m) or list(m) != sorted(set(m)):
                raise ValueError(f"{m} is not a canonical monomial for n={n}")
            if not isinstance(c, GaussScalar):
                c = GaussScalar(to_field(K, c))
            elif c.field != K:
                c = c.promote(K)
            if c:
                clean[m] = c
        self.terms = clean

    # constructors

    @classmethod
    def zero(cls, n: int, K: FracField | None = None) -> DifferentialForm:
        return cls(n, K or default_field())

    @classmethod
    def scalar(cls, n: int, c=1, K: FracField | None = None) -> DifferentialForm:
        K = K or (c.field if isinstance(c, GaussScalar) else default_field())
        return cls(n, K, {(): c})

    @classmethod
    def generator(cls, n: int, block: str, j: int, K: FracField | None = None) -> DifferentialForm:
        if not 1 <= j <= n:
            raise IndexError(f"generator index {j} out of range 1..{n}")
        return cls(n, K or default_field(), {(block_offset(block, n) + j - 1,): 1})

    @classmethod
    def monomial(cls, n: int, word: Sequence[int], c=1, K: FracField | None = None) -> DifferentialForm:
        K = K or (c.field if isinstance(c, GaussScalar) else default_field())
        can = canonicalize(word)
        if can is None:
            return cls(n, K)
        sign, m = can
        c = c if isinstance(c, GaussScalar) else GaussScalar(to_field(K, c))
        return cls(n, K, {m: c * sign})

    # structure

    def _check(self, other: DifferentialForm) -> None:
        if self.n != other.n:
            raise ValueError(f"forms on different spaces: n={self.n} vs n={other.n}")
        if self.field != other.field:
            raise ValueError("coefficient fields differ; promote first")

    def promote(self, K: FracField) -> DifferentialForm:
        if K == self.field:
            return self
        return DifferentialForm(self.n, K, {m: c.promote(K) for m, c in self.terms.items()})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def degrees(self) -> set[int]:
        return {len(m) for m in self.terms}

    def is_function(self) -> bool:
        """True for the zero form and for pure 0-forms."""
        return all(not m for m in self.terms)

    def constant_term(self) -> GaussScalar:
        return self.terms.get((), GaussScalar(self.field(0)))

    def uses(self, block: str) -> bool:
        idx = set(block_indices(block, self.n))
        return any(idx.intersection(m) for m in self.terms)

    # arithmetic

    def __add__(self, other: DifferentialForm) -> DifferentialForm:
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return DifferentialForm(self.n, self.field, out)

    def __neg__(self) -> DifferentialForm:
        return DifferentialForm(self.n, self.field, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: DifferentialForm) -> DifferentialForm:
        return self + (-other)

    def scale(self, c) -> DifferentialForm:
        if not isinstance(c, GaussScalar):
            c = GaussScalar(to_field(self.field, c))
        elif c.field != self.field:
            c = c.promote(self.field)
        return DifferentialForm(self.n, self.field, {m: a * c for m, a in self.terms.items()})

    def __mul__(self, c) -> DifferentialForm:
        if isinstance(c, DifferentialForm):
            return wedge(self, c)
        return self.scale(c)

    __rmul__ = scale

    def __xor__(self, other: DifferentialForm) -> DifferentialForm:
        return wedge(self, other)

    # rendering

    def sorted_terms(self) -> list[tuple[Monomial, GaussScalar]]:
        return sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "^".join(generator_name(g, self.n) for g in m) or "1"
            parts.append(f"{c.render()} * {mono}")
        return " + ".join(parts)

    __str__ = render

    def __repr__(self) -> str:
        return f"DifferentialForm(n={self.n}, {self.render()})"


def default_field() -> FracField:
    return with_tau(param_field(0))


def tau_scalar(K: FracField) -> GaussScalar:
    """The formal ``2*pi`` as a scalar of ``with_tau(K)``."""
    K = with_tau(K)
    return GaussScalar(K.gens[field_names(K).index(TAU)])


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    """Graded-commutative product with canonicalization signs."""
    a._check(b)
    out: dict[Monomial, GaussScalar] = {}
    for m1, c1 in a.terms.items():
        s1 = set(m1)
        for m2, c2 in b.terms.items():
            if s1.intersection(m2):
                continue
            sign, m = canonicalize(m1 + m2)
            c = c1 * c2
            if sign < 0:
                c = -c
            out[m] = out[m] + c if m in out else c
    return DifferentialForm(a.n, a.field, out)


def wedge_all(forms: Iterable[DifferentialForm], n: int, K: FracField) -> DifferentialForm:
    acc = DifferentialForm.scalar(n, 1, K)
    for f in forms:
        acc = wedge(acc, f)
    return acc


def form_exp(a: DifferentialForm) -> DifferentialForm:
    """``sum_k a^k / k!`` for an even form; terminates since the degree is bounded."""
    if any(d % 2 for d in a.degrees()):
        raise ValueError("exponential of a form with odd-degree terms is not defined here")
    if a.terms.get(()):
        raise ValueError("exponential of a form with a nonzero constant term is not polynomial")
    total = DifferentialForm.scalar(a.n, 1, a.field)
    power = total
    k = 0
    while True:
        k += 1
        power = wedge(power, a)
        if not power:
            return total
        total = total + power.scale(Fraction(1, factorial(k)))


def fiber_integrate(a: DifferentialForm, block: str, reverse: bool = False) -> DifferentialForm:
    """Integrate over the torus whose coordinate differentials form ``block``.

    Only monomials containing the whole block survive.  The block is moved
    to the right end (sign of the move), stripped, and the result is
    multiplied by ``tau^n``.  With ``reverse`` the fiber carries the
    orientation ``d{block}_n ^ ... ^ d{block}_1``, which differs from the
    ascending one by ``(-1)^(n(n-1)/2)``.
    """
    n = a.n
    idx = block_indices(block, n)
    K = with_tau(a.field)
    vol = tau_scalar(K) ** n
    if reverse and (n * (n - 1) // 2) % 2:
        vol = -vol
    out: dict[Monomial, GaussScalar] = {}
    bset = set(idx)
    for m, c in a.terms.items():
        if not bset.issubset(m):
            continue
        rest = tuple(g for g in m if g not in bset)
        # sign of the permutation m -> rest + block
        sign = -1 if _inversions([m.index(g) for g in rest + idx]) % 2 else 1
        c = c.promote(K) * vol
        if sign < 0:
            c = -c
        out[rest] = out[rest] + c if rest in out else c
    return DifferentialForm(n, K, out)


def basis_monomials(n: int, blocks: Sequence[str]) -> list[Monomial]:
    """Every monomial in the generators of ``blocks``, degree then lexicographic."""
    gens = sorted(g for b in blocks for g in block_indices(b, n))
    out = []
    for mask in range(1 << len(gens)):
        out.append(tuple(g for i, g in enumerate(gens) if mask >> i & 1))
    return sorted(out, key=lambda m: (len(m), m))


__all__ = [
    "DifferentialForm", "Monomial", "wedge", "wedge_all", "form_exp", "fiber_integrate",
    "canonicalize", "basis_monomials", "tau_scalar", "generator_name", "block_indices", "default_field",
]
