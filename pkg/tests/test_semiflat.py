import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import loop_functions
from syzmirror.forms import DifferentialForm, fiber_integrate, form_exp, tau_scalar, wedge
from syzmirror.loops import LoopFunction, conv_power, fourier, psi_total
from syzmirror.mirror import build_superpotential
from syzmirror.scalars import I, with_tau
from syzmirror.semiflat import (FormDomainError, GradedForm, Omega_X, Omega_Y, SPDMatrix, _kernel_transform,
                                _semiflat_prefactor, action_coordinate_check, check_theorem_3_1, curvature,
                                exp_i_omega_X, exp_i_omega_Y, holonomy, random_spd, round_trip_check,
                                semiflat_fwd, semiflat_identities, semiflat_inv, toric_Omega_Y, toric_syz_fwd,
                                toric_syz_inv)


def phis(n, count=5, seed=0):
    rng = random.Random(seed + n)
    return [random_spd(n, rng) for _ in range(count)]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_first_pair(n):
    assert semiflat_fwd(exp_i_omega_X(n)) == Omega_Y(n)
    assert semiflat_inv(Omega_Y(n)) == exp_i_omega_X(n)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_round_trip(n):
    rep = round_trip_check(n)
    assert rep.size == 4 ** n
    assert rep.ok


def test_round_trip_basis_element():
    dx = DifferentialForm.generator(1, "x", 1, with_tau(exp_i_omega_X(1).field))
    assert semiflat_inv(semiflat_fwd(dx)) == dx


def test_kernel_on_one():
    K = exp_i_omega_X(1).field
    # exp(iF) = 1 - dy^du; the du integral and (2 pi i)^-1 leave i dy
    out = semiflat_fwd(DifferentialForm.scalar(1, 1, K))
    assert out == DifferentialForm.generator(1, "y", 1, K).scale(I(K))


def test_second_pair_n1_exact():
    for phi in phis(1):
        assert semiflat_fwd(Omega_X(phi)) == exp_i_omega_Y(phi)
        assert semiflat_inv(exp_i_omega_Y(phi)) == Omega_X(phi)


@pytest.mark.parametrize("n", [2, 3])
def test_second_pair_orientation_obstruction(n):
    """With the fiber orientation that makes the first pair exact, the
    second pair comes out with sign (-1)^(n(n-1)/2); flipping the
    orientation moves the sign onto the first pair instead."""
    sign = (-1) ** (n * (n - 1) // 2)
    for phi in phis(n):
        assert semiflat_fwd(Omega_X(phi)) == exp_i_omega_Y(phi).scale(sign)
        assert semiflat_inv(exp_i_omega_Y(phi)) == Omega_X(phi).scale(sign)
    K = exp_i_omega_X(n).field
    pref = _semiflat_prefactor(n, K)
    flipped = _kernel_transform(exp_i_omega_X(n), 1, "u", False, pref)
    assert flipped == Omega_Y(n).scale(sign)
    phi = phis(n)[0]
    assert _kernel_transform(Omega_X(phi), 1, "u", False, pref) == exp_i_omega_Y(phi)


def test_shared_monomial_forces_opposite_signs():
    n = 2
    phi = SPDMatrix.from_rows([[2, 1], [1, 2]])
    K = exp_i_omega_X(n).field
    kernel = form_exp(curvature(n, K).scale(I(K)))
    shared = (0, 3, 4, 5)  # dx1^dy2^du1^du2 in canonical order
    a = wedge(exp_i_omega_X(n, K), kernel)
    b = wedge(Omega_X(phi, K), kernel)
    assert shared in a.terms and shared in b.terms
    # it is the only monomial feeding dx1^dy2 in either integrand
    for form in (a, b):
        feeders = [m for m in form.terms if set(m) >= {4, 5} and tuple(g for g in m if g not in (4, 5)) == (0, 3)]
        assert feeders == [shared]
    target = (0, 3)
    want_a = Omega_Y(n, K).terms[target] / a.terms[shared]
    want_b = exp_i_omega_Y(phi, K).terms[target] / b.terms[shared]
    # the fiber integral of the shared monomial would need both values at once
    assert want_a == -want_b


def test_identity_report():
    rep = semiflat_identities(2, phis(2)[0], round_trip=True)
    assert rep.checks["fwd(exp(i omega_X)) = Omega_Y"]
    assert rep.checks["exhaustive round trip"]
    assert rep.checks["phi inverse relation"] and rep.checks["Legendre dual coordinates"]
    assert not rep.ok


def test_spd_validation():
    with pytest.raises(ValueError):
        SPDMatrix.from_rows([[1, 2], [2, 1]])
    with pytest.raises(ValueError):
        SPDMatrix.from_rows([[1, 2], [0, 1]])
    phi = SPDMatrix.from_rows([[2, 1], [1, 2]])
    assert phi.inverse == ((Fraction(2, 3), Fraction(-1, 3)), (Fraction(-1, 3), Fraction(2, 3)))
    for n in (1, 2, 3):
        for p in phis(n):
            assert p.inverse_relation_holds()
            assert action_coordinate_check(p)


def test_holonomy():
    assert holonomy((0, 0), (0.3, 1.2)) == 1
    assert holonomy((1, 0), (math.pi, 0)) == pytest.approx(-1, abs=1e-15)
    assert holonomy((1, 1), (math.pi / 2, math.pi / 2)) == pytest.approx(-1, abs=1e-15)
    with pytest.raises(ValueError):
        holonomy((1,), (0.0, 1.0))


def test_domain_errors():
    K = exp_i_omega_X(2).field
    with pytest.raises(FormDomainError):
        semiflat_fwd(DifferentialForm.generator(2, "y", 1, K))
    with pytest.raises(FormDomainError):
        semiflat_inv(DifferentialForm.generator(2, "u", 1, K))
    with pytest.raises(FormDomainError):
        toric_syz_fwd(GradedForm(2, K, {(0, 0): DifferentialForm.generator(2, "y", 1, K)}))


@settings(max_examples=60)
@given(loop_functions())
def test_toric_on_functions_is_fourier(f):
    assert toric_syz_fwd(GradedForm.from_loop(f)).to_laurent() == fourier(f).promote(with_tau(f.field))
    assert toric_syz_inv(GradedForm.from_laurent(fourier(f))).to_loop() == f.promote(with_tau(f.field))


def test_toric_examples(presets):
    fp = presets["CP2"]
    W = build_superpotential(fp).poly
    psi = psi_total(fp)
    assert toric_syz_fwd(GradedForm.from_loop(psi)).to_laurent() == W.promote(with_tau(W.field))
    for k in range(1, 5):
        out = toric_syz_fwd(GradedForm.from_loop(conv_power(psi, k))).to_laurent()
        assert out == (W ** k).promote(with_tau(W.field))
    K = with_tau(psi.field)
    g = GradedForm.from_loop(LoopFunction.delta(2, psi.field), exp_i_omega_X(2, K))
    assert toric_syz_fwd(g).strata == {(0, 0): toric_Omega_Y(2, K)}


def test_toric_omega_is_dlogz():
    # Omega_Y written in z = exp(-x - iy) coordinates
    for n in (1, 2, 3):
        assert toric_Omega_Y(n) == Omega_Y(n).scale((-1) ** n)


@pytest.mark.parametrize("name,cutoff", [("CP1", 4), ("CP2", 3), ("CP1xCP1", 3), ("CP2", 0)])
def test_theorem_check(presets, name, cutoff):
    rep = check_theorem_3_1(presets[name], cutoff)
    assert rep.ok, rep.to_json()


def test_theorem_rejects_negative_cutoff(presets):
    with pytest.raises(ValueError):
        check_theorem_3_1(presets["CP1"], -1)
