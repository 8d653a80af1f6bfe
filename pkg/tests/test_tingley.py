import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sphereiso.tingley import (
    FunctionOracle,
    NotWeightedComposition,
    ReconstructedIsometry,
    TableOracle,
    apply_form,
    build_extension,
    generate_oracle,
    random_sphere,
    recover_structure,
    spike,
    tau_law_residual,
    verify_theorem,
)


def _fixed(sigma, w, s):
    R = ReconstructedIsometry(np.array(sigma), np.array(w, dtype=complex), np.array(s))
    return FunctionOracle(lambda f: apply_form(R, f), R.n), R


def test_identity_oracle():
    T, R = _fixed([0, 1, 2], [1, 1, 1], [1, 1, 1])
    rec = recover_structure(T)
    assert rec.equals(R)
    rep = verify_theorem(T, rec, 100, 0)
    assert rep["pass"] and rep["max_residual"] < 1e-15
    for clause in ("a_extension", "b_unit_image", "c_odd_constants", "e_face_distance"):
        assert rep["clauses"][clause]["max_residual"] == 0


def test_conjugation_oracle():
    T, R = _fixed([0, 1, 2], [1, 1, 1], [-1, -1, -1])
    rec = recover_structure(T)
    assert np.array_equal(rec.signs, [-1, -1, -1])
    ones = np.ones(3)
    assert np.allclose(T(-1j * ones), 1j * ones)
    assert np.allclose(T(-1j * ones), -T(1j * ones))
    ext = build_extension(rec)
    f = np.array([0.2 + 0.5j, -0.1j, 1.0])
    assert np.allclose(ext(1j * f), -1j * ext(f))


def test_circle_cases():
    T, _ = _fixed([0], [1], [1])
    z = np.exp(0.7j)
    assert T(np.array([z]))[0] == z
    T, _ = _fixed([0], [1], [-1])
    assert T(np.array([z]))[0] == np.conj(z)


def test_swap_example():
    T, R = _fixed([1, 0], [1j, 1], [1, -1])
    f = np.array([0.3 + 0.2j, 1j])
    assert np.allclose(T(f), [1j * f[1], np.conj(f[0])])
    rng = np.random.default_rng(0)
    a, b = random_sphere(rng, 2, 100), random_sphere(rng, 2, 100)
    gap = np.abs(np.abs(T(a) - T(b)).max(axis=1) - np.abs(a - b).max(axis=1))
    assert gap.max() < 1e-12


def test_seed_seven_round_trip():
    T, truth = generate_oracle(5, 7)
    assert recover_structure(T).equals(truth)
    T4, _ = generate_oracle(4, 7)
    rep = verify_theorem(T4, recover_structure(T4), 1000, 7)
    assert rep["pass"] and rep["max_residual"] < 1e-9
    for clause in ("a_extension", "b_unit_image", "c_odd_constants", "d_real_linear", "e_face_distance"):
        assert rep["clauses"][clause]["count"] > 0


def test_extension_basics():
    _, truth = generate_oracle(6, 1)
    ext = build_extension(truth)
    assert np.all(ext(np.zeros(6)) == 0)
    rng = np.random.default_rng(4)
    f = rng.normal(size=(200, 6)) + 1j * rng.normal(size=(200, 6))
    assert np.allclose(np.abs(ext(f)).max(axis=1), np.abs(f).max(axis=1), rtol=0, atol=1e-15)


@given(st.integers(1, 8), st.integers(0, 10_000))
def test_round_trip_property(n, seed):
    T, truth = generate_oracle(n, seed)
    R = recover_structure(T)
    assert np.array_equal(R.sigma, truth.sigma)
    assert np.array_equal(R.signs, truth.signs)
    assert np.abs(R.weights - truth.weights).max() < 1e-12


@given(st.integers(1, 6), st.integers(0, 10_000))
def test_tau_law(n, seed):
    T, truth = generate_oracle(n, seed)
    R = recover_structure(T)
    lams = np.exp(2j * np.pi * np.arange(16) / 16)
    for x in range(n):
        y = R.phi[x]
        got = T(lams[:, None] * spike(n, x, 1))[:, y]
        t1 = R.weights[y]
        want = lams * t1 if R.signs[y] > 0 else np.conj(lams) * t1
        assert np.abs(got - want).max() < 1e-9
    assert tau_law_residual(T, R) < 1e-9


def test_rejects_ambiguous_spike():
    # copies the first entry everywhere, so spikes have several unimodular coordinates
    T = FunctionOracle(lambda f: np.repeat(f[..., :1], 3, axis=-1), 3)
    with pytest.raises(NotWeightedComposition, match="weighted-composition form"):
        recover_structure(T)


def test_rejects_bad_sign_ratio():
    # f -> f^2/|f| keeps spikes unimodular but sends i to -1
    T = FunctionOracle(lambda f: f * f / np.maximum(np.abs(f), 1e-300), 2)
    with pytest.raises(NotWeightedComposition):
        recover_structure(T)


def test_rejects_non_bijective():
    # both spikes land on coordinate 0
    T = FunctionOracle(lambda f: np.stack([f[..., 0] + f[..., 1], 0 * f[..., 0]], axis=-1), 2)
    with pytest.raises(NotWeightedComposition):
        recover_structure(T)


def test_oracle_checks_inputs():
    T, _ = generate_oracle(3, 0)
    with pytest.raises(ValueError):
        T(np.array([0.5, 0, 0]))
    with pytest.raises(ValueError):
        T(np.array([1, 0]))


def test_invalid_reconstruction():
    with pytest.raises(ValueError):
        ReconstructedIsometry(np.array([0, 0]), np.ones(2), np.ones(2))
    with pytest.raises(ValueError):
        ReconstructedIsometry(np.array([0, 1]), np.array([1, 0.5]), np.ones(2))
    with pytest.raises(ValueError):
        ReconstructedIsometry(np.array([0, 1]), np.ones(2), np.array([1, 0]))


def test_json_round_trip():
    _, truth = generate_oracle(4, 2)
    back = ReconstructedIsometry.from_json(json.loads(json.dumps(truth.to_json())))
    assert back.equals(truth, tol=1e-16)


def _table_json(T, n, rng, count=50):
    inputs = [spike(n, x, lam) for x in range(n) for lam in (1, 1j)]
    inputs += [np.ones(n, dtype=complex)]
    inputs += list(random_sphere(rng, n, count))
    pairs = [{"input": [[z.real, z.imag] for z in v], "output": [[z.real, z.imag] for z in T(v)]} for v in inputs]
    return {"n": n, "pairs": pairs}


def test_table_oracle(tmp_path):
    T, truth = generate_oracle(3, 5)
    path = tmp_path / "table.json"
    path.write_text(json.dumps(_table_json(T, 3, np.random.default_rng(0))))
    table = TableOracle.load(path)
    R = recover_structure(table)
    assert R.equals(truth)
    rep = verify_theorem(table, R, 20, 0)
    assert rep["pass"]
    assert rep["clauses"]["c_odd_constants"]["skipped"]
    assert not rep["clauses"]["a_extension"]["skipped"]
    with pytest.raises(KeyError):
        table(np.array([1, 1, 1j]))


def test_verify_flags_wrong_reconstruction():
    T, truth = generate_oracle(3, 9)
    wrong = ReconstructedIsometry(truth.sigma, truth.weights * 1j, truth.signs)
    rep = verify_theorem(T, wrong, 50, 0)
    assert not rep["pass"]
    assert not rep["clauses"]["a_extension"]["pass"]
    assert rep["witnesses"]["a_extension"]
