import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphereiso.algebra import AnalyticFunction, sharp_sup_norm
from sphereiso.bishop import (
    BishopError,
    additive_bishop,
    level_set_indices,
    random_unit_polynomial,
    unit_direction,
    verify_distance_bounds,
)
from sphereiso.peaking import sample_angles
from sphereiso.polygon import HEXAGON, contains

Z = AnalyticFunction.identity()


def test_unit_direction_convention():
    assert unit_direction(0) == 1
    assert unit_direction(-2j) == -1j


def test_constant_function(cmap):
    one = AnalyticFunction([1.0])
    out = additive_bishop(one, 1, 0.5, 0.25, cmap)
    assert out.level_set_count == 0
    t = np.linspace(-np.pi, np.pi, 101)
    assert np.allclose(out.u_r(t), 1)
    assert np.allclose(out.g_plus(t), 1)
    assert np.allclose(out.g_minus(t), -1)
    rep = verify_distance_bounds(out, one)
    assert rep["pass"] and rep["plus"]["sampled"] < 1e-15


def test_identity_example(cmap):
    out = additive_bishop(Z, 1, 0.7, 0.1, cmap)
    n = out.norms
    assert out.passed
    assert 1 - 1e-6 <= n["g_plus_lower"] <= n["g_plus_upper"] <= 1 + 1e-6
    assert 1 - 1e-6 <= n["g_minus_lower"] <= n["g_minus_upper"] <= 1 + 1e-6
    vals = np.array([out.g_plus(np.array([0.0]))[0], out.g_minus(np.array([0.0]))[0]])
    assert np.abs(vals - [1, -1]).max() < 1e-8


def test_form_identity(cmap):
    f = AnalyticFunction([0.2, 0.5j, 0.3])
    f = AnalyticFunction(f.coeffs / sharp_sup_norm(f)[1])
    out = additive_bishop(f, np.exp(0.7j), 0.8, cmap=cmap)
    t = sample_angles([out.angle], base=1024)
    a, u = out.alpha, out.unit
    fu, uv = f.on_circle(t), out.u_r(t)
    assert np.abs(out.g_plus(t) - ((u - 0.8 * a) * uv + 0.8 * fu)).max() < 1e-12
    assert np.abs(out.g_minus(t) - ((-u - 0.8 * a) * uv + 0.8 * fu)).max() < 1e-12


def test_u_r_properties(cmap):
    out = additive_bishop(Z, 1j, 0.9, cmap=cmap)
    t = sample_angles([out.angle], base=8192)
    uv = out.u_r(t)
    assert abs(out.u_r(np.array([np.pi / 2]))[0] - 1) < 1e-12
    assert np.abs(uv).max() <= 1 + 1e-12
    assert np.all(contains(HEXAGON, uv, 1e-12))
    assert np.abs(1 - 2 * uv).max() <= 1 + 1e-6


@pytest.mark.parametrize("r", [0.9])
def test_distance_bound_examples(cmap, r):
    out = additive_bishop(Z, 1, r, cmap=cmap)
    rep = verify_distance_bounds(out, Z)
    assert rep["pass"]
    assert rep["plus"]["bound"] == pytest.approx(0.2)
    assert rep["plus"]["sampled"] <= 0.2 + 1e-5
    assert rep["minus"]["bound"] == pytest.approx(2.0)
    assert rep["minus"]["sampled"] <= 2.0 + 1e-5


def test_three_case_argument(cmap):
    f = AnalyticFunction([0.1, 0.6, 0.3j])
    f = AnalyticFunction(f.coeffs / sharp_sup_norm(f)[1])
    r = 0.7
    out = additive_bishop(f, 1, r, cmap=cmap)
    eps = out.epsilon
    t = 2 * np.pi * np.arange(4096) / 4096
    d = r * np.abs(out.alpha - f.on_circle(t))
    gp, gm = np.abs(out.g_plus(t)), np.abs(out.g_minus(t))
    in_f0 = d >= eps / 4
    assert np.all(gm[in_f0] <= 1 + 1e-8)
    assert np.all(gp[in_f0] <= 1 + 1e-8)
    rest = ~in_f0
    assert np.all(gp[rest] <= 1 + 1e-8) and np.all(gm[rest] <= 1 + 1e-8)


def test_alpha_zero(cmap):
    f = AnalyticFunction([0.5, -0.5])  # f(1) = 0, norm 1 at z = -1
    out = additive_bishop(f, 1, 0.6, cmap=cmap)
    assert out.alpha == 0 and out.unit == 1
    assert out.passed


def test_distance_tends_to_face_distance(cmap):
    f = AnalyticFunction([0.25, 0.75])
    alpha = abs(f.on_circle([2.0])[0])
    sampled = []
    for r in (0.9, 0.99, 0.999):
        out = additive_bishop(f, np.exp(2j), r, cmap=cmap)
        sampled.append(verify_distance_bounds(out, f)["plus"]["sampled"])
    assert sampled[0] >= sampled[1] >= sampled[2]
    assert abs(sampled[-1] - (1 - alpha)) < 3e-3


def test_level_sets():
    assert level_set_indices(AnalyticFunction([1.0]), 0.0, 0.5, 0.25) == []
    idx = level_set_indices(Z, 0.0, 0.9, 0.05)
    assert idx[0] == 0


def test_errors(cmap, monkeypatch):
    with pytest.raises(ValueError):
        additive_bishop(Z, 1, 1.0, cmap=cmap)
    with pytest.raises(ValueError):
        additive_bishop(Z, 1, 0.5, eps=0.5, cmap=cmap)  # eps must be < 1 - r|alpha| = 0.5
    with pytest.raises(ValueError):
        additive_bishop(AnalyticFunction([0, 2.0]), 1, 0.5, cmap=cmap)
    with pytest.raises(ValueError):
        additive_bishop(Z, 0.5, 0.5, cmap=cmap)
    import sphereiso.bishop as bishop

    monkeypatch.setattr(bishop, "MAX_TERMS", 5)
    with pytest.raises(BishopError) as info:
        additive_bishop(Z, 1, 0.5, cmap=cmap)
    assert info.value.level is not None


@settings(max_examples=6)
@given(st.integers(0, 2**31), st.sampled_from([0.3, 0.7, 0.9]), st.floats(-np.pi, np.pi))
def test_random_polynomials(seed, r, xa):
    f = random_unit_polynomial(6, np.random.default_rng(seed))
    out = additive_bishop(f, np.exp(1j * xa), r)
    assert out.passed
    assert verify_distance_bounds(out, f)["pass"]
