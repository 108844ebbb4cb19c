import pytest
from hypothesis import given
from hypothesis import strategies as st

from syzmirror.forms import (DifferentialForm, basis_monomials, block_indices, default_field, fiber_integrate,
                             form_exp, tau_scalar, wedge)
from syzmirror.scalars import I

K = default_field()
i = I(K)
tau = tau_scalar(K)


def g(n, b, j):
    return DifferentialForm.generator(n, b, j, K)


def test_wedge_examples():
    dx, du = g(1, "x", 1), g(1, "u", 1)
    assert (dx ^ du).terms == {(0, 2): 1}
    assert du ^ dx == -(dx ^ du)
    assert not (dx ^ dx)


def test_render():
    f = (g(2, "x", 1) ^ g(2, "y", 2)).scale(3)
    assert f.render() == "3 * dx1^dy2"
    assert DifferentialForm.zero(2, K).render() == "0"


def test_form_exp_examples():
    one = DifferentialForm.scalar(1, 1, K)
    assert form_exp(DifferentialForm.zero(1, K)) == one
    a = (g(1, "x", 1) ^ g(1, "u", 1)).scale(i)
    assert form_exp(a) == one + a
    w = (g(2, "x", 1) ^ g(2, "u", 1)) + (g(2, "x", 2) ^ g(2, "u", 2))
    cross = g(2, "x", 1) ^ g(2, "u", 1) ^ g(2, "x", 2) ^ g(2, "u", 2)
    assert form_exp(w.scale(i)) == DifferentialForm.scalar(2, 1, K) + w.scale(i) - cross


def test_form_exp_rejects_odd_and_constant():
    with pytest.raises(ValueError):
        form_exp(g(1, "x", 1))
    with pytest.raises(ValueError):
        form_exp(DifferentialForm.scalar(1, 2, K))


def test_fiber_integrate_examples():
    dy, du = g(1, "y", 1), g(1, "u", 1)
    assert fiber_integrate(dy ^ du, "u") == dy.scale(tau)
    assert not fiber_integrate(DifferentialForm.scalar(1, 1, K), "u")
    assert fiber_integrate(dy, "y") == DifferentialForm.scalar(1, tau, K)


def test_fiber_integrate_move_sign():
    # du1 ^ dx1 = -(dx1 ^ du1); and dx2 sits between the block members
    assert fiber_integrate(g(1, "u", 1) ^ g(1, "x", 1), "u") == g(1, "x", 1).scale(-tau)
    f = g(2, "u", 1) ^ g(2, "x", 2) ^ g(2, "u", 2)
    assert fiber_integrate(f, "u") == g(2, "x", 2).scale(-tau * tau)
    rev = fiber_integrate(g(2, "u", 1) ^ g(2, "u", 2), "u", reverse=True)
    assert rev == DifferentialForm.scalar(2, -tau * tau, K)


@given(st.integers(1, 3), st.data())
def test_integration_annihilates_partial_blocks(n, data):
    monos = [m for m in basis_monomials(n, ("x", "u")) if not set(block_indices("u", n)) <= set(m)]
    m = data.draw(st.sampled_from(monos))
    assert not fiber_integrate(DifferentialForm(n, K, {m: 1}), "u")


@given(st.integers(1, 3), st.data())
def test_graded_commutativity(n, data):
    monos = basis_monomials(n, ("x", "y", "u"))
    a, b = (DifferentialForm(n, K, {data.draw(st.sampled_from(monos)): 1}) for _ in range(2))
    da, db = len(next(iter(a.terms))), len(next(iter(b.terms)))
    assert a ^ b == (b ^ a).scale((-1) ** (da * db))


def test_bad_monomials():
    with pytest.raises(ValueError):
        DifferentialForm(1, K, {(2, 0): 1})
    with pytest.raises(IndexError):
        DifferentialForm.generator(2, "x", 3, K)
    with pytest.raises(ValueError):
        wedge(g(1, "x", 1), g(2, "x", 1))
