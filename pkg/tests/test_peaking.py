import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sphereiso.algebra import CircleGrid, grid_values, sharp_sup_norm
from sphereiso.peaking import (
    Arc,
    PeakingError,
    basic_peak,
    certify_peak,
    localized_peak,
    power_peak_values,
    sample_angles,
    sharpness_for,
    two_point_interpolation,
)
from sphereiso.polygon import RHOMBUS, contains


def test_basic_peak_examples():
    f = basic_peak(1, 1)
    assert np.allclose(f.coeffs, [0.5, 0.5])
    assert f(1) == pytest.approx(1) and abs(f(-1)) < 1e-16
    g = basic_peak(1, 2)
    assert g(1j) == pytest.approx(0.5j, abs=1e-15)
    assert abs(basic_peak(1j, 1)(1j) - 1) < 1e-15


def test_basic_peak_cosine_bound():
    m = 7
    f = basic_peak(np.exp(0.4j), m)
    theta = np.linspace(-np.pi, np.pi, 2001)
    vals = np.abs(f.on_circle(0.4 + theta))
    assert np.all(vals <= np.abs(np.cos(theta / 2)) ** m + 1e-14)


def test_basic_peak_unique_maximum():
    m, grid = 9, CircleGrid(256)
    vals = np.sort(np.abs(grid_values(basic_peak(1, m), grid)))
    # the nearest other node sits at angle 2 pi / M
    assert vals[-1] == pytest.approx(1, abs=1e-14)
    assert vals[-2] <= np.cos(np.pi / 256) ** m + 1e-14 < 1


def test_basic_peak_rejects():
    with pytest.raises(ValueError):
        basic_peak(1, 0)
    with pytest.raises(ValueError):
        basic_peak(1.1, 2)


@given(st.integers(1, 60), st.floats(-np.pi, np.pi))
def test_closed_form_matches_polynomial(m, phi):
    v, omv = power_peak_values(np.array([phi]), m)
    direct = basic_peak(1, m).on_circle([phi])[0]
    assert abs(v[0] - direct) < 1e-12
    assert abs(omv[0] - (1 - direct)) < 1e-12


def test_one_minus_keeps_relative_precision():
    phi = np.array([1e-12])
    v, omv = power_peak_values(phi, 3.0)
    # 1 - ((1+e^{i phi})/2)^3 ~ -3 i phi / 2 for tiny phi
    assert omv[0] == pytest.approx(-1.5j * 1e-12, rel=1e-6)


@given(st.floats(1e-2, 3.0))
def test_sharpness_is_minimal(w):
    m = sharpness_for(w)
    assert np.cos(w / 2) ** m < 0.5
    if m > 1:
        assert np.cos(w / 2) ** (m - 1) >= 0.5 * (1 - 1e-12)


def test_localized_peak_example(cmap):
    u = localized_peak(1, Arc(-0.3, 0.3), 0.1, cmap)
    cert = u.certificate
    assert cert.passed
    assert cert.off_peak_max < 0.1
    assert cert.peak_value_residual <= 1e-6
    assert cert.range_polygon_pass


def test_localized_peak_fine_recheck(cmap):
    u = localized_peak(np.exp(1j), Arc.around(1.0, 0.2), 0.02, cmap)
    theta = np.linspace(-np.pi, np.pi, 50_001)
    vals = u(theta)
    assert np.all(contains(RHOMBUS, vals, 1e-8))
    off = ~u.arc.contains(theta)
    assert np.abs(vals[off]).max() < 0.02
    assert abs(u(np.array([1.0]))[0] - 1) < 1e-12
    # modulus 1 only at x
    away = np.abs(np.angle(np.exp(1j * (theta - 1.0)))) > 1e-6
    assert np.abs(vals[away]).max() < 1


def test_arc_wrapping(cmap):
    u = localized_peak(-1, Arc(np.pi - 0.2, np.pi + 0.2), 0.1, cmap)
    assert u.certificate.passed
    assert abs(u(np.array([np.pi]))[0] - 1) < 1e-12
    assert abs(u(np.array([0.0]))[0]) < 0.1


def test_localized_peak_errors(cmap):
    with pytest.raises(ValueError):
        localized_peak(1, Arc(0.1, 0.3), 0.1, cmap)
    with pytest.raises(ValueError):
        localized_peak(1, Arc(-0.1, 0.1), 1.5, cmap)


def test_certificate_detects_failure(cmap):
    u = localized_peak(1, Arc(-0.3, 0.3), 0.1, cmap, certify=False)
    blunt = type(u)(u.x, u.arc, u.delta, 1, u.pinch, theta=u.theta)
    cert = certify_peak(blunt)
    assert cert.off_peak_sampled > cert.off_peak_max
    assert not cert.passed


def test_two_point_trivial_cases(cmap):
    res = two_point_interpolation(1, -1, 1, -1, cmap)
    assert not res.corrected and np.allclose(res.g.coeffs, [0, 1])
    res = two_point_interpolation(1, -1, 1, 1, cmap)
    assert not res.corrected and np.allclose(res.g.coeffs, [1, 0])


def test_two_point_corrected(cmap):
    res = two_point_interpolation(1, 1j, 1, -1, cmap)
    assert res.corrected
    assert sharp_sup_norm(res.affine)[0] > 1
    vals = res.g(np.array([0.0, np.pi / 2]))
    assert abs(vals[0] - 1) < 1e-8 and abs(vals[1] + 1) < 1e-8
    assert res.norm_upper <= 1 + 1e-6
    dense = np.abs(res.g(np.linspace(-np.pi, np.pi, 40_001))).max()
    assert dense <= res.norm_upper


def test_two_point_errors(cmap):
    with pytest.raises(ValueError):
        two_point_interpolation(1j, 1j, 1, -1, cmap)
    with pytest.raises(PeakingError):
        two_point_interpolation(1, 1j, 1, -1, cmap, terms=80)


angle = st.floats(-np.pi, np.pi)


@settings(max_examples=8)
@given(angle, angle, angle, angle)
def test_two_point_random(a1, a2, b1, b2):
    if abs(np.exp(1j * a1) - np.exp(1j * a2)) < 1e-3:
        return
    res = two_point_interpolation(np.exp(1j * a1), np.exp(1j * a2), np.exp(1j * b1), np.exp(1j * b2))
    assert max(res.value_residuals) < 1e-8
    assert res.norm_upper <= 1 + 1e-6
    assert res.norm_sampled <= res.norm_upper


def test_sample_angles_cluster():
    t = sample_angles([0.5], base=64, cluster=10)
    assert t.size == 64 + 21
    assert np.min(np.abs(t[t != 0.5] - 0.5)) == pytest.approx(1e-15)


def test_peak_value_exact_at_caller_angle(cmap):
    # points whose renormalization perturbs np.angle by an ulp
    for a in np.random.default_rng(8).uniform(-np.pi, np.pi, 50):
        x = np.exp(1j * a) * (1 + 1e-14)
        u = localized_peak(x, Arc.around(float(np.angle(x)), 0.05), 1e-6, cmap, certify=False)
        assert u(np.array([np.angle(x)]))[0] == 1
