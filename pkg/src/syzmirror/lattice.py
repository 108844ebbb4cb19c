"""Fans of smooth toric Fano manifolds: data model, validation,
normalization, and the Guillemin potential of the moment polytope."""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import reduce
from pathlib import Path
from typing import Sequence

from sympy import Matrix

LatticeVector = tuple[int, ...]


class StructureError(ValueError):
    """Input is malformed (as opposed to well-formed but failing validation)."""


class DomainError(ValueError):
    """Point lies on or outside the boundary of the moment polytope."""


def is_primitive(v: Sequence[int]) -> bool:
    return reduce(math.gcd, (abs(int(e)) for e in v), 0) == 1


def det(rows: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant."""
    return int(Matrix([list(r) for r in rows]).det())


@dataclass(frozen=True)
class Facet:
    normal: LatticeVector
    q_exponent: tuple[int, ...]
    support: Fraction | None = None  # numeric lambda_i


@dataclass(frozen=True)
class FanPolytope:
    """Facet normals with Kähler exponents and the maximal cones of the dual fan.

    Cones are stored 0-based; the JSON format is 1-based.
    """

    dim: int
    kahler_params: int
    facets: tuple[Facet, ...]
    maximal_cones: tuple[tuple[int, ...], ...]
    name: str = ""
    normalized: bool = field(default=False, compare=False)

    def __post_init__(self):
        n, l = self.dim, self.kahler_params
        if n < 1 or l < 0:
            raise StructureError("dim must be >= 1 and kahler_params >= 0")
        if len(self.facets) != n + l:
            raise StructureError(f"expected {n + l} facets, got {len(self.facets)}")
        for i, f in enumerate(self.facets):
            if len(f.normal) != n:
                raise StructureError(f"facet {i + 1}: normal has length {len(f.normal)}, dim is {n}")
            if len(f.q_exponent) != l:
                raise StructureError(f"facet {i + 1}: q_exponent has length {len(f.q_exponent)}, expected {l}")
        for c in self.maximal_cones:
            if len(c) != n or len(set(c)) != n:
                raise StructureError(f"cone {[i + 1 for i in c]} must list {n} distinct facets")
            if any(not 0 <= i < n + l for i in c):
                raise StructureError(f"cone {[i + 1 for i in c]} references an unknown facet")

    @property
    def n_facets(self) -> int:
        return len(self.facets)

    @property
    def normals(self) -> list[LatticeVector]:
        return [f.normal for f in self.facets]

    @property
    def has_supports(self) -> bool:
        return all(f.support is not None for f in self.facets)

    def with_supports(self, supports: Sequence) -> FanPolytope:
        if len(supports) != self.n_facets:
            raise StructureError("one support value per facet is required")
        facets = tuple(replace(f, support=Fraction(s)) for f, s in zip(self.facets, supports))
        return replace(self, facets=facets)

    # serialization

    def to_json(self) -> dict:
        facets = []
        for f in self.facets:
            d = {"normal": list(f.normal), "q_exponent": list(f.q_exponent)}
            if f.support is not None:
                d["lambda"] = str(f.support)
            facets.append(d)
        return {
            "dim": self.dim,
            "kahler_params": self.kahler_params,
            "facets": facets,
            "maximal_cones": [[i + 1 for i in c] for c in self.maximal_cones],
        }

    @classmethod
    def from_json(cls, data: dict, name: str = "") -> FanPolytope:
        try:
            n = int(data["dim"])
            l = int(data["kahler_params"])
            facets = []
            for fd in data["facets"]:
                lam = fd.get("lambda")
                facets.append(Facet(
                    tuple(int(e) for e in fd["normal"]),
                    tuple(int(e) for e in fd.get("q_exponent", [0] * l)),
                    None if lam is None else Fraction(str(lam)),
                ))
            cones = tuple(tuple(int(i) - 1 for i in c) for c in data["maximal_cones"])
        except (KeyError, TypeError, ValueError) as exc:
            raise StructureError(f"malformed polytope document: {exc}") from exc
        return cls(n, l, tuple(facets), cones, name=name or data.get("name", ""))


def load_polytope(path: str | Path) -> FanPolytope:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise StructureError(f"{path}: invalid JSON ({exc})") from exc
    return FanPolytope.from_json(data, name=path.stem)


# validation

@dataclass
class ValidationReport:
    checks: dict[str, bool]
    failures: list[str]
    warnings: list[str]
    cone_determinants: list[int]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checks": dict(self.checks),
            "failures": list(self.failures),
            "warnings": list(self.warnings),
            "cone_determinants": list(self.cone_determinants),
        }


def _solve(rows: Sequence[Sequence[int]], rhs: Sequence, transpose: bool = False) -> list[Fraction] | None:
    """Solve ``<x, r_i> = rhs_i`` exactly, or ``sum_i x_i r_i = rhs`` when
    ``transpose``; None if singular."""
    M = Matrix([list(r) for r in rows])
    if transpose:
        M = M.T
    if M.det() == 0:
        return None
    sol = M.LUsolve(Matrix([Fraction(x) for x in rhs]))
    return [Fraction(int(s.p), int(s.q)) for s in sol]


def _wall_sides(fp: FanPolytope, wall: tuple[int, ...], others: list[int]) -> bool:
    """Whether the two cones through ``wall`` lie on opposite sides of it."""
    n = fp.dim
    normals = fp.normals
    if n == 1:
        a, b = (normals[i][0] for i in others)
        return a * b < 0
    # a normal to span(wall): cofactors of the (n-1) x n matrix
    rows = [list(normals[i]) for i in wall]
    h = [(-1) ** k * det([r[:k] + r[k + 1:] for r in rows]) for k in range(n)]
    s = [sum(hk * vk for hk, vk in zip(h, normals[i])) for i in others]
    return s[0] * s[1] < 0


def validate_smooth_fano(fp: FanPolytope) -> ValidationReport:
    """Check primitivity, unimodularity and completeness of the fan.

    Completeness is certified by: every wall (codimension-one face of a
    maximal cone) lies in exactly two maximal cones, these sit on opposite
    sides of the wall, and a generic vector lies in exactly one cone.
    The Fano condition and the sign of the Kähler exponents are reported
    as warnings only.
    """
    n = fp.dim
    normals = fp.normals
    checks: dict[str, bool] = {}
    failures: list[str] = []
    warnings: list[str] = []

    bad = [i + 1 for i, v in enumerate(normals) if not is_primitive(v)]
    checks["primitive"] = not bad
    if bad:
        failures.append(f"non-primitive normals at facets {bad}")

    if len(set(normals)) != len(normals):
        checks["distinct_rays"] = False
        failures.append("repeated facet normals")
    else:
        checks["distinct_rays"] = True

    dets = []
    nonunimodular = []
    for c in fp.maximal_cones:
        d = det([normals[i] for i in c])
        dets.append(d)
        if abs(d) != 1:
            nonunimodular.append(([i + 1 for i in c], d))
    checks["unimodular"] = not nonunimodular and bool(fp.maximal_cones)
    for cone, d in nonunimodular:
        failures.append(f"cone {cone} is not unimodular (|det| = {abs(d)})")
    if not fp.maximal_cones:
        failures.append("no maximal cones")

    checks["complete"] = _check_complete(fp, failures) if checks["unimodular"] else False
    if not checks["unimodular"] and fp.maximal_cones:
        failures.append("completeness not assessed: cones are not unimodular")

    if all(checks.values()):
        if not _is_fano(fp):
            warnings.append("support function is not strictly convex: fan is not Fano")
        if any(e < 0 for f in fp.facets for e in f.q_exponent):
            warnings.append("negative Kähler exponents present")
        if not is_product_of_projective_spaces(fp):
            warnings.append("not a product of projective spaces")
    return ValidationReport(checks, failures, warnings, dets)


def _check_complete(fp: FanPolytope, failures: list[str]) -> bool:
    n = fp.dim
    cones = [tuple(sorted(c)) for c in fp.maximal_cones]
    if len(set(cones)) != len(cones):
        failures.append("repeated maximal cones")
        return False
    walls: Counter = Counter()
    owners: dict[tuple[int, ...], list[int]] = {}
    for c in cones:
        for k in range(n):
            wall = c[:k] + c[k + 1:]
            walls[wall] += 1
            owners.setdefault(wall, []).append(c[k])
    ok = True
    for wall, count in sorted(walls.items()):
        if count != 2:
            failures.append(f"wall {[i + 1 for i in wall]} lies in {count} maximal cone(s); expected 2")
            ok = False
        elif not _wall_sides(fp, wall, owners[wall]):
            failures.append(f"cones through wall {[i + 1 for i in wall]} overlap")
            ok = False
    if not ok:
        return False
    # generic point: coordinates are distinct powers of a large prime
    probe = [Fraction(1, 7 ** (k + 1)) + Fraction(k + 1, 1) * (-1) ** k for k in range(n)]
    hits = 0
    for c in cones:
        coords = _solve([fp.normals[i] for i in c], probe, transpose=True)
        if coords is not None and all(x > 0 for x in coords):
            hits += 1
    if hits != 1:
        failures.append(f"generic vector covered by {hits} cones; expected 1")
        return False
    return True


def _is_fano(fp: FanPolytope) -> bool:
    for c in fp.maximal_cones:
        m = _solve([fp.normals[i] for i in c], [1] * fp.dim)
        if m is None:
            return False
        for j, v in enumerate(fp.normals):
            if j not in c and sum(mi * vi for mi, vi in zip(m, v)) >= 1:
                return False
    return True


def is_product_of_projective_spaces(fp: FanPolytope) -> bool:
    """Detect a product of projective spaces via ray support blocks.

    Requires a fan whose rays include a lattice basis (as after
    :func:`normalize_basis`); each connected block of coordinate supports
    must carry k+1 rays summing to zero in a k-dimensional coordinate span.
    """
    fp = normalize_basis(fp) if not fp.normalized else fp
    normals = fp.normals
    supports = [frozenset(j for j, e in enumerate(v) if e) for v in normals]
    groups: list[set[int]] = []
    coords: list[set[int]] = []
    for i, s in enumerate(supports):
        merged_r, merged_c = {i}, set(s)
        keep_r, keep_c = [], []
        for g, cs in zip(groups, coords):
            if cs & merged_c:
                merged_r |= g
                merged_c |= cs
            else:
                keep_r.append(g)
                keep_c.append(cs)
        groups = keep_r + [merged_r]
        coords = keep_c + [merged_c]
    for g, cs in zip(groups, coords):
        if len(g) != len(cs) + 1:
            return False
        if any(sum(normals[i][j] for i in g) for j in range(fp.dim)):
            return False
    return True


def euler_characteristic(fp: FanPolytope) -> int:
    """Number of maximal cones (= number of torus fixed points)."""
    return len(fp.maximal_cones)


def normalize_basis(fp: FanPolytope) -> FanPolytope:
    """Change lattice basis and relabel so that facets 1..n are the standard
    basis with zero Kähler exponent.

    Any n facets whose normals form a lattice basis may be moved to the
    front (they need not span a cone); sets whose facets already carry zero
    exponents are preferred.  Otherwise the polytope is translated, which
    shifts every exponent by ``-<v_i, m_basis>``.
    """
    n = fp.dim
    normals = fp.normals
    if not any(abs(det([normals[i] for i in c])) == 1 for c in fp.maximal_cones):
        raise StructureError("no unimodular maximal cone: fan is not smooth")
    candidates = []
    for c in itertools.combinations(range(fp.n_facets), n):
        if abs(det([normals[i] for i in c])) == 1:
            zero = all(not any(fp.facets[i].q_exponent) for i in c)
            candidates.append((not zero, c))
    candidates.sort()
    _, cone = candidates[0]
    B = Matrix([list(normals[i]) for i in cone])
    Binv = B.inv()
    order = list(cone) + [i for i in range(fp.n_facets) if i not in cone]
    relabel = {old: new for new, old in enumerate(order)}
    shift = [fp.facets[i].q_exponent for i in cone]
    sup_shift = [fp.facets[i].support for i in cone]
    facets = []
    for old in order:
        f = fp.facets[old]
        v = tuple(int(x) for x in (Matrix([list(f.normal)]) * Binv))
        m = tuple(e - sum(v[j] * shift[j][a] for j in range(n)) for a, e in enumerate(f.q_exponent))
        sup = f.support
        if sup is not None and all(s is not None for s in sup_shift):
            sup = sup - sum(v[j] * sup_shift[j] for j in range(n))
        facets.append(Facet(v, m, sup))
    cones = tuple(tuple(sorted(relabel[i] for i in c)) for c in fp.maximal_cones)
    return FanPolytope(n, fp.kahler_params, tuple(facets), cones, name=fp.name, normalized=True)


def is_normalized(fp: FanPolytope) -> bool:
    n = fp.dim
    for j in range(n):
        f = fp.facets[j]
        if f.normal != tuple(int(k == j) for k in range(n)) or any(f.q_exponent):
            return False
    return True


# Guillemin potential

def _moment_values(fp: FanPolytope, x: Sequence, supports=None) -> list[Fraction]:
    if supports is None:
        if not fp.has_supports:
            raise DomainError("numeric supports (lambda) are required")
        supports = [f.support for f in fp.facets]
    if len(x) != fp.dim:
        raise DomainError("point has wrong dimension")
    vals = []
    for f, lam in zip(fp.facets, supports):
        vals.append(sum(Fraction(xi) * vi for xi, vi in zip(x, f.normal)) - Fraction(lam))
    if any(v <= 0 for v in vals):
        raise DomainError("point is on or outside the boundary of the polytope")
    return vals


def guillemin_potential(fp: FanPolytope, x: Sequence, supports=None) -> float:
    """``1/2 * sum_i l_i(x) log l_i(x)`` with ``l_i(x) = <x, v_i> - lambda_i``."""
    vals = _moment_values(fp, x, supports)
    return 0.5 * math.fsum(float(l) * math.log(l) for l in vals)


def legendre_gradient(fp: FanPolytope, x: Sequence, supports=None) -> list[float]:
    """Gradient of the Guillemin potential: ``1/2 sum_i v_i (log l_i + 1)``."""
    vals = _moment_values(fp, x, supports)
    return [0.5 * math.fsum(f.normal[j] * (math.log(l) + 1.0) for f, l in zip(fp.facets, vals))
            for j in range(fp.dim)]


def guillemin_hessian(fp: FanPolytope, x: Sequence, supports=None) -> list[list[Fraction]]:
    """Exact Hessian ``1/2 sum_i v_i v_i^T / l_i(x)``; rational at rational x."""
    vals = _moment_values(fp, x, supports)
    n = fp.dim
    return [[sum(Fraction(f.normal[j] * f.normal[k]) / (2 * l) for f, l in zip(fp.facets, vals))
             for k in range(n)] for j in range(n)]


def polytope_vertices(fp: FanPolytope) -> list[list[Fraction]]:
    """Vertices of the moment polytope, one per maximal cone."""
    if not fp.has_supports:
        raise DomainError("numeric supports (lambda) are required")
    out = []
    for c in fp.maximal_cones:
        x = _solve([fp.normals[i] for i in c], [fp.facets[i].support for i in c])
        out.append(x)
    return out


def interior_point(fp: FanPolytope) -> list[Fraction]:
    """Vertex barycentre; interior for a full-dimensional polytope."""
    verts = polytope_vertices(fp)
    return [sum(v[j] for v in verts) / len(verts) for j in range(fp.dim)]


__all__ = [
    "LatticeVector", "Facet", "FanPolytope", "ValidationReport", "StructureError", "DomainError",
    "is_primitive", "validate_smooth_fano", "euler_characteristic", "normalize_basis",
    "is_normalized", "guillemin_potential", "legendre_gradient", "guillemin_hessian",
    "polytope_vertices", "interior_point", "load_polytope", "is_product_of_projective_spaces",
]
