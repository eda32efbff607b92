import math

import numpy as np
import pytest

from agf import (
    ParameterError,
    PreconditionError,
    besov_seminorm,
    decreasing_rearrangement,
    derive_lipschitz_params,
    derive_params,
    gagliardo_seminorm,
    iterated_rearrangement,
    lipschitz_seminorm,
    lorentz_norm,
    lp_norm,
    make_grid_function,
    mixed_lorentz_norm,
    modulus_curve,
)
from agf.step import StepFunction


def test_lorentz_pp_equals_lp():
    rng = np.random.default_rng(4)
    f = make_grid_function(rng.uniform(0, 3, size=(5, 4)), (0.5, 0.25))
    sf = decreasing_rearrangement(f)
    for p in [1.0, 1.5, 2.0, 3.0]:
        assert lorentz_norm(sf, p, p) == pytest.approx(lp_norm(f, p), rel=1e-12)


def test_lorentz_against_quadrature():
    sf = StepFunction(np.array([0.5, 2.0]), np.array([3.0, 1.0]))
    p, r = 2.0, 1.0
    s = np.linspace(0, np.sqrt(2.0), 400001)[1:]
    t = s**2
    integrand = 2.0 * s ** (2.0 * r / p - 1.0) * np.asarray(sf(t)) ** r
    approx = float(np.trapezoid(integrand, s)) ** (1.0 / r)
    assert lorentz_norm(sf, p, r) == pytest.approx(approx, rel=1e-4)


def test_lorentz_weak_norm():
    sf = StepFunction(np.array([1.0, 4.0]), np.array([2.0, 1.0]))
    assert lorentz_norm(sf, 2.0, math.inf) == pytest.approx(max(2.0, 1.0 * 2.0))


def test_lorentz_requires_nonincreasing():
    sf = StepFunction(np.array([1.0, 2.0]), np.array([1.0, 2.0]))
    with pytest.raises(PreconditionError):
        lorentz_norm(sf, 2.0, 1.0)


def test_mixed_lorentz_1d_reduces_to_lorentz():
    rng = np.random.default_rng(8)
    f = make_grid_function(rng.uniform(0, 2, size=12), 0.25)
    g = iterated_rearrangement(f, (0,))
    sf = decreasing_rearrangement(f)
    for p, r in [(1.0, 1.0), (2.0, 1.0), (1.5, 3.0), (2.0, math.inf)]:
        assert mixed_lorentz_norm(g, p, r) == pytest.approx(lorentz_norm(sf, p, r), rel=1e-12)


def test_mixed_lorentz_against_riemann_2d():
    vals = np.array([[2.0, 1.0], [1.0, 0.5]])
    g = make_grid_function(vals, (0.5, 0.5), halfspace=True)
    p, r = 2.0, 1.0
    m = 800
    # substitute x = u^2 per axis so the (xy)^(r/p - 1) weight stays bounded
    us = (np.arange(m) + 0.5) / m
    U, W = np.meshgrid(us, us, indexing="ij")
    X, Y = U**2, W**2
    G = vals[np.minimum((X / 0.5).astype(int), 1), np.minimum((Y / 0.5).astype(int), 1)]
    weight = (X * Y) ** (r / p - 1.0) * 4.0 * U * W
    riemann = float(np.sum(G**r * weight)) / m**2
    assert mixed_lorentz_norm(g, p, r) == pytest.approx(riemann ** (1.0 / r), rel=1e-3)


def _besov_quadrature_oracle(f, k, alpha, theta, p):
    # substitute t = s^8 so the integrand stays bounded near zero for every
    # convergent parameter combination exercised below
    curve = modulus_curve(f, k, p)
    dlast = float(curve.deltas[-1])
    s = np.linspace(0, dlast ** (1.0 / 8.0), 800001)[1:]
    t = s**8
    om = np.asarray(curve(t))
    integrand = 8.0 * s ** (-8.0 * alpha * theta - 1.0) * om**theta
    acc = float(np.trapezoid(integrand, s))
    acc += curve.sup_value**theta * dlast ** (-alpha * theta) / (alpha * theta)
    return acc ** (1.0 / theta)


def test_besov_against_quadrature():
    rng = np.random.default_rng(14)
    f = make_grid_function(rng.uniform(0, 2, size=(6, 5)), (0.4, 0.3))
    for k, alpha, theta, p in [(0, 0.5, 1.0, 1.0), (1, 0.3, 2.0, 1.0), (0, 0.4, 2.0, 2.0)]:
        got = besov_seminorm(f, k, alpha, theta, p)
        want = _besov_quadrature_oracle(f, k, alpha, theta, p)
        assert got == pytest.approx(want, rel=2e-3)


def test_besov_divergence_and_guards():
    f = make_grid_function([1.0, 0.0], 0.5)
    # discontinuous representative with alpha >= 1/p: sub-cell piece diverges
    assert besov_seminorm(f, 0, 0.6, 2.0, 2.0) == math.inf
    with pytest.raises(ParameterError):
        besov_seminorm(f, 0, 0.5, 0.5, 1.0)  # theta < 1
    with pytest.raises(ParameterError):
        besov_seminorm(f, 0, 1.5, 1.0, 1.0)


def test_besov_theta_inf_is_lipschitz_sup():
    f = make_grid_function([2.0, 1.0, 0.5], 0.5)
    got = besov_seminorm(f, 0, 0.4, math.inf, 1.0)
    want = lipschitz_seminorm(f, 0, 0.4, 1.0).value
    assert got == pytest.approx(want, rel=1e-12)


def test_gagliardo_indicator_oracle():
    f = make_grid_function(np.ones(16), 1 / 16)
    for alpha in [0.25, 0.5, 0.75]:
        assert gagliardo_seminorm(f, alpha, 1.0) == pytest.approx(
            4.0 / (alpha * (1.0 - alpha)), rel=1e-12)


def test_gagliardo_scaling_law():
    rng = np.random.default_rng(19)
    vals1 = rng.uniform(0, 1, size=10)
    alpha, p = 0.5, 1.0
    a = gagliardo_seminorm(make_grid_function(vals1, 0.5), alpha, p)
    b = gagliardo_seminorm(make_grid_function(vals1, 0.25), alpha, p)
    assert b == pytest.approx(2.0 ** (alpha * p - 1.0) * a, rel=1e-12)
    vals2 = rng.uniform(0, 1, size=(5, 5))
    a2 = gagliardo_seminorm(make_grid_function(vals2, (0.5, 0.5)), alpha, p)
    b2 = gagliardo_seminorm(make_grid_function(vals2, (0.25, 0.25)), alpha, p)
    assert b2 == pytest.approx(2.0 ** (alpha * p - 2.0) * a2, rel=1e-12)


def test_gagliardo_infinite_for_jumps_past_critical():
    f = make_grid_function([1.0, 0.0], 0.5)
    assert gagliardo_seminorm(f, 0.75, 2.0) == math.inf


def test_derive_params_isotropic_consistency():
    params = derive_params(1.0, (0.5, 0.5), (1.0, 1.0), 2)
    assert params.beta == pytest.approx(0.5)
    assert params.theta == pytest.approx(1.0)
    assert params.q == pytest.approx(2 * 1 / (2 - 0.5))
    assert params.admissible
    mixed = derive_params(1.0, (0.3, 0.6), (1.0, 2.0), 2)
    assert mixed.beta == pytest.approx(2.0 / (1 / 0.3 + 1 / 0.6))
    inf_theta = derive_params(1.0, (0.5, 0.5), (math.inf, math.inf), 2)
    assert math.isinf(inf_theta.theta)


def test_derive_params_guards():
    with pytest.raises(ParameterError):
        derive_params(1.0, (0.5,), (1.0, 1.0), 2)
    with pytest.raises(ParameterError):
        derive_params(2.0, (0.5, 0.5), (1.0, 1.0), 2)  # theta_j < p


def test_derive_lipschitz_params():
    lp = derive_lipschitz_params(1.0, (1.0, 1.0), 2)
    assert lp.alpha == pytest.approx(1.0)
    assert lp.nu == 2
    assert lp.q_star == pytest.approx(2.0)
    assert lp.s == pytest.approx(1.0)
