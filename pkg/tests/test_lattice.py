import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from syzmirror.lattice import (DomainError, Facet, FanPolytope, StructureError, euler_characteristic,
                               guillemin_hessian, guillemin_potential, interior_point, is_normalized,
                               is_product_of_projective_spaces, legendre_gradient, load_polytope,
                               normalize_basis, polytope_vertices, validate_smooth_fano)
from syzmirror.presets import PRESET_NAMES, load_preset


def make(normals, qexp, cones, supports=None, l=None):
    n = len(normals[0])
    l = len(qexp[0]) if l is None else l
    sup = supports or [None] * len(normals)
    facets = tuple(Facet(tuple(v), tuple(m), None if s is None else Fraction(s))
                   for v, m, s in zip(normals, qexp, sup))
    return FanPolytope(n, l, facets, tuple(tuple(i - 1 for i in c) for c in cones))


CP2 = make([(1, 0), (0, 1), (-1, -1)], [(0,), (0,), (1,)], [(1, 2), (2, 3), (1, 3)], ["0", "0", "-3"])
BROKEN = make([(1, 0), (0, 1), (-1, -2)], [(0,), (0,), (1,)], [(1, 3), (1, 2), (2, 3)])


def test_cp2_passes():
    rep = validate_smooth_fano(CP2)
    assert rep.ok and not rep.failures
    assert all(abs(d) == 1 for d in rep.cone_determinants)


def test_determinant_two_fails_with_diagnostic():
    rep = validate_smooth_fano(BROKEN)
    assert not rep.ok
    assert rep.checks["unimodular"] is False
    assert "cone [1, 3] is not unimodular (|det| = 2)" in rep.failures


def test_cp1_passes():
    cp1 = make([(1,), (-1,)], [(0,), (1,)], [(1,), (2,)])
    assert validate_smooth_fano(cp1).ok


def test_non_primitive_normal():
    fp = make([(2, 0), (0, 1), (-1, -1)], [(0,), (0,), (1,)], [(1, 2), (2, 3), (1, 3)])
    rep = validate_smooth_fano(fp)
    assert rep.checks["primitive"] is False


def test_incomplete_fan():
    fp = make([(1, 0), (0, 1), (-1, -1)], [(0,), (0,), (1,)], [(1, 2), (2, 3)])
    rep = validate_smooth_fano(fp)
    assert rep.checks["complete"] is False


def test_structural_errors_are_distinct():
    with pytest.raises(StructureError):
        make([(1, 0), (0, 1), (-1,)], [(0,), (0,), (1,)], [(1, 2)])
    with pytest.raises(StructureError):
        FanPolytope.from_json({"dim": 2, "facets": []})


def test_all_presets_validate(presets):
    for name, fp in presets.items():
        assert validate_smooth_fano(fp).ok, name


def test_bl1_warns_not_product(presets):
    rep = validate_smooth_fano(presets["Bl1CP2"])
    assert rep.ok and rep.warnings
    assert not is_product_of_projective_spaces(presets["Bl1CP2"])
    for name in ("CP1", "CP2", "CP3", "CP1xCP1", "CP1xCP2"):
        assert is_product_of_projective_spaces(presets[name]), name


def test_euler_characteristics(presets):
    expect = {"CP1": 2, "CP2": 3, "CP3": 4, "CP1xCP1": 4, "CP1xCP2": 6, "Bl1CP2": 4}
    assert {k: euler_characteristic(v) for k, v in presets.items()} == expect


def test_normalize_identity_on_presets(presets):
    for fp in presets.values():
        assert is_normalized(fp)
        assert normalize_basis(fp) == fp


def test_normalize_permuted_cp2():
    fp = make([(-1, -1), (1, 0), (0, 1)], [(1,), (0,), (0,)], [(1, 2), (2, 3), (1, 3)])
    norm = normalize_basis(fp)
    assert is_normalized(norm)
    assert norm.normals == [(1, 0), (0, 1), (-1, -1)]
    assert [f.q_exponent for f in norm.facets] == [(0,), (0,), (1,)]
    assert validate_smooth_fano(norm).ok


def test_normalize_flipped_cp1():
    fp = make([(-1,), (1,)], [(1,), (0,)], [(1,), (2,)])
    norm = normalize_basis(fp)
    assert norm.normals == [(1,), (-1,)]
    assert [f.q_exponent for f in norm.facets] == [(0,), (1,)]


def test_normalize_translates_exponents():
    # q on a basis facet: translation moves it to the opposite facet
    fp = make([(1,), (-1,)], [(1,), (0,)], [(1,), (2,)], ["1", "-3"])
    norm = normalize_basis(fp)
    assert [f.q_exponent for f in norm.facets] == [(0,), (1,)]
    assert [f.support for f in norm.facets] == [0, -2]


def test_normalize_rejects_singular_fan():
    # every pair of normals has determinant 0 or +-2
    fp = make([(1, 1), (-1, 1), (-1, -1), (1, -1)], [(0, 0), (0, 0), (1, 0), (0, 1)],
              [(1, 2), (2, 3), (3, 4), (1, 4)])
    with pytest.raises(StructureError):
        normalize_basis(fp)


UNIMODULAR = [((1, 1), (0, 1)), ((0, 1), (1, 0)), ((1, 0), (2, 1)), ((-1, 0), (0, 1)), ((2, 1), (1, 1))]


@given(st.sampled_from(PRESET_NAMES[1:]), st.lists(st.sampled_from(UNIMODULAR), min_size=1, max_size=3))
def test_validation_is_unimodular_covariant(name, mats):
    fp = load_preset(name)
    if fp.dim != 2:
        return
    facets = fp.facets
    for A in mats:
        facets = tuple(Facet((f.normal[0] * A[0][0] + f.normal[1] * A[1][0],
                              f.normal[0] * A[0][1] + f.normal[1] * A[1][1]), f.q_exponent, f.support)
                       for f in facets)
    moved = FanPolytope(2, fp.kahler_params, facets, fp.maximal_cones)
    assert validate_smooth_fano(moved).ok
    norm = normalize_basis(moved)
    assert euler_characteristic(norm) == euler_characteristic(fp)
    assert validate_smooth_fano(norm).ok


def test_json_round_trip(tmp_path, presets):
    for fp in presets.values():
        path = tmp_path / f"{fp.name}.json"
        path.write_text(json.dumps(fp.to_json()))
        assert load_polytope(path) == fp


def test_guillemin_examples(presets):
    cp2, cp1 = presets["CP2"], presets["CP1"]
    assert guillemin_potential(cp2, [1, 1]) == pytest.approx(0)
    assert guillemin_potential(cp2, [Fraction(1, 2), Fraction(1, 2)]) == pytest.approx(0.5 * math.log(2))
    assert guillemin_potential(cp1, [1]) == pytest.approx(0)
    assert legendre_gradient(cp2, [1, 1]) == pytest.approx([0, 0])
    assert legendre_gradient(cp1, [1]) == pytest.approx([0])
    assert legendre_gradient(cp1, [Fraction(3, 2)]) == pytest.approx([0.5 * math.log(3)])


def test_guillemin_domain_errors(presets):
    with pytest.raises(DomainError):
        guillemin_potential(presets["CP2"], [0, 1])
    with pytest.raises(DomainError):
        legendre_gradient(presets["CP1"], [3])
    nosup = make([(1,), (-1,)], [(0,), (1,)], [(1,), (2,)])
    with pytest.raises(DomainError):
        guillemin_potential(nosup, [1])


def test_legendre_gradient_matches_finite_differences(presets):
    rng = random.Random(3)
    h = 1e-6
    for fp in presets.values():
        verts = polytope_vertices(fp)
        for _ in range(5):
            w = [rng.random() + 0.05 for _ in verts]
            x = [sum(wi * float(v[j]) for wi, v in zip(w, verts)) / sum(w) for j in range(fp.dim)]
            g = legendre_gradient(fp, x)
            for j in range(fp.dim):
                xp, xm = list(x), list(x)
                xp[j] += h
                xm[j] -= h
                fd = (guillemin_potential(fp, xp) - guillemin_potential(fp, xm)) / (2 * h)
                assert fd == pytest.approx(g[j], rel=1e-6, abs=1e-7)


def test_hessian_is_exact_and_positive(presets):
    for fp in presets.values():
        H = guillemin_hessian(fp, interior_point(fp))
        assert all(isinstance(x, Fraction) for row in H for x in row)
        assert all(H[j][k] == H[k][j] for j in range(fp.dim) for k in range(fp.dim))
        assert H[0][0] > 0
