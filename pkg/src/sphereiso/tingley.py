"""Reconstruction of surjective isometries between unit spheres of finite
``C(X) = (C^n, sup-norm)``.

Every such isometry has the weighted-composition form
``T(f)(y) = w_y * c_{s_y}(f(sigma(y)))`` with ``c_+`` the identity and ``c_-``
complex conjugation. The engine recovers ``(sigma, w, s)`` from black-box
queries on spike probes, builds the real-linear extension, and checks the
conclusions of the extension theorem on random inputs. Indices are 0-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .faces import face_distances_finite

SPIKE_TOL = 1e-9
RESIDUAL_TOL = 1e-9
ORACLE_UNIT_TOL = 1e-9
ISOMETRY_TOL = 1e-12


class NotWeightedComposition(ValueError):
    """The oracle's answers are not of weighted-composition form at tolerance."""


@dataclass(frozen=True, eq=False)
class ReconstructedIsometry:
    sigma: np.ndarray
    weights: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=int)
        w = np.asarray(self.weights, dtype=complex)
        s = np.asarray(self.signs, dtype=int)
        n = sigma.size
        if w.shape != (n,) or s.shape != (n,):
            raise ValueError("sigma, weights and signs must have equal length")
        if not np.array_equal(np.sort(sigma), np.arange(n)):
            raise ValueError("sigma must be a permutation")
        if np.any(np.abs(np.abs(w) - 1) > 1e-12):
            raise ValueError("weights must be unimodular")
        if not np.all(np.isin(s, (-1, 1))):
            raise ValueError("signs must be +-1")
        for name, arr in (("sigma", sigma), ("weights", w), ("signs", s)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.sigma.size

    @property
    def phi(self) -> np.ndarray:
        """``phi = sigma^{-1}``: coordinate x of the domain goes to ``phi[x]``."""
        out = np.empty(self.n, dtype=int)
        out[self.sigma] = np.arange(self.n)
        return out

    def tau(self, x: int, lam: complex) -> complex:
        y = self.phi[x]
        lam = complex(lam)
        return self.weights[y] * (lam if self.signs[y] > 0 else lam.conjugate())

    def equals(self, other: "ReconstructedIsometry", tol: float = 1e-12) -> bool:
        return (
            np.array_equal(self.sigma, other.sigma)
            and np.array_equal(self.signs, other.signs)
            and float(np.abs(self.weights - other.weights).max()) < tol
        )

    def to_json(self) -> dict:
        return {
            "sigma": self.sigma.tolist(),
            "weights": [[z.real, z.imag] for z in self.weights.tolist()],
            "signs": self.signs.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ReconstructedIsometry":
        w = np.array([complex(a, b) for a, b in data["weights"]])
        return cls(np.array(data["sigma"]), w, np.array(data["signs"]))


def apply_form(R: ReconstructedIsometry, f) -> np.ndarray:
    """``w_y * c_{s_y}(f[..., sigma[y]])``, vectorized over leading axes."""
    g = np.asarray(f, dtype=complex)[..., R.sigma]
    g = np.where(R.signs > 0, g, np.conj(g))
    return R.weights * g


def build_extension(R: ReconstructedIsometry):
    """The real-linear isometry of ``C^n`` extending the sphere map."""

    def extension(f):
        return apply_form(R, f)

    return extension


class SphereIsometryOracle:
    """Black-box sphere map; subclasses implement :meth:`_evaluate`."""

    n: int

    def __call__(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=complex)
        if f.shape[-1] != self.n:
            raise ValueError(f"expected vectors of length {self.n}")
        norms = np.abs(f).max(axis=-1)
        if np.any(np.abs(norms - 1) > ORACLE_UNIT_TOL):
            raise ValueError("oracle inputs must lie on the unit sphere")
        return self._evaluate(f)

    def _evaluate(self, f):
        raise NotImplementedError

    def sample_inputs(self, rng, count: int) -> np.ndarray:
        return random_sphere(rng, self.n, count)

    def has(self, f) -> bool:
        return True


class FunctionOracle(SphereIsometryOracle):
    def __init__(self, fn, n: int):
        self._fn = fn
        self.n = int(n)

    def _evaluate(self, f):
        return np.asarray(self._fn(f), dtype=complex)


class TableOracle(SphereIsometryOracle):
    """Oracle given as a finite table of (input, output) pairs.

    Lookups match stored inputs to 1e-12; unseen inputs raise ``KeyError``.
    """

    def __init__(self, inputs, outputs):
        self.inputs = np.asarray(inputs, dtype=complex)
        self.outputs = np.asarray(outputs, dtype=complex)
        if self.inputs.ndim != 2 or self.inputs.shape != self.outputs.shape:
            raise ValueError("table inputs and outputs must be equal-shape 2-d arrays")
        self.n = self.inputs.shape[1]

    def _find(self, f):
        d = np.abs(self.inputs - f).max(axis=1)
        k = int(np.argmin(d))
        return k if d[k] <= 1e-12 else None

    def has(self, f) -> bool:
        return self._find(np.asarray(f, dtype=complex)) is not None

    def _evaluate(self, f):
        if f.ndim == 1:
            k = self._find(f)
            if k is None:
                raise KeyError("input not present in the oracle table")
            return self.outputs[k].copy()
        return np.stack([self._evaluate(row) for row in f])

    def sample_inputs(self, rng, count: int) -> np.ndarray:
        idx = rng.permutation(len(self.inputs))[:count]
        return self.inputs[idx]

    @classmethod
    def from_json(cls, data) -> "TableOracle":
        def vec(v):
            return [complex(a, b) for a, b in v]

        pairs = data["pairs"]
        return cls([vec(p["input"]) for p in pairs], [vec(p["output"]) for p in pairs])

    @classmethod
    def load(cls, path) -> "TableOracle":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def random_sphere(rng, n: int, count: int) -> np.ndarray:
    """Random unit-sup-norm vectors: uniform disk entries, one forced onto the circle."""
    r = np.sqrt(rng.random((count, n)))
    f = r * np.exp(2j * np.pi * rng.random((count, n)))
    j = rng.integers(0, n, count)
    rows = np.arange(count)
    f[rows, j] /= np.abs(f[rows, j])
    return f


def random_truth(n: int, rng) -> ReconstructedIsometry:
    return ReconstructedIsometry(
        rng.permutation(n),
        np.exp(2j * np.pi * rng.random(n)),
        rng.choice(np.array([1, -1]), n),
    )


def generate_oracle(n: int, seed: int = 0):
    if n < 1:
        raise ValueError("n must be >= 1")
    truth = random_truth(n, np.random.default_rng(seed))
    return FunctionOracle(lambda f: apply_form(truth, f), n), truth


def spike(n: int, x: int, lam: complex) -> np.ndarray:
    e = np.zeros(n, dtype=complex)
    e[x] = lam
    return e


def recover_structure(T: SphereIsometryOracle, tol: float = SPIKE_TOL) -> ReconstructedIsometry:
    """Recover ``(sigma, w, s)`` from the images of the spikes ``e_{x,1}`` and ``e_{x,i}``."""
    n = T.n
    sigma = np.full(n, -1)
    w = np.zeros(n, dtype=complex)
    s = np.zeros(n, dtype=int)
    for x in range(n):
        e1, ei = spike(n, x, 1), spike(n, x, 1j)
        a, b = T(e1), T(ei)
        gap = abs(float(np.abs(a - b).max()) - float(np.abs(e1 - ei).max()))
        if gap > ISOMETRY_TOL + tol:
            raise NotWeightedComposition(f"probe pair at x={x} is not isometric (gap {gap:.2e})")
        near = np.flatnonzero(np.abs(a) >= 1 - tol)
        if near.size != 1:
            raise NotWeightedComposition(
                f"oracle not of weighted-composition form at tolerance: spike at x={x} "
                f"has {near.size} near-unimodular coordinates"
            )
        y = int(near[0])
        ratio = b[y] / a[y]
        if abs(ratio - 1j) <= tol:
            sign = 1
        elif abs(ratio + 1j) <= tol:
            sign = -1
        else:
            raise NotWeightedComposition(
                f"oracle not of weighted-composition form at tolerance: ratio {ratio} at x={x}"
            )
        if sigma[y] >= 0:
            raise NotWeightedComposition(
                f"oracle not of weighted-composition form at tolerance: coordinate {y} hit twice"
            )
        sigma[y] = x
        w[y] = a[y] / abs(a[y])
        s[y] = sign
    return ReconstructedIsometry(sigma, w, s)


def _clause(residuals, tol=RESIDUAL_TOL, witnesses=None, skipped=False) -> dict:
    res = np.asarray(residuals, dtype=float).ravel()
    if skipped or res.size == 0:
        return {"count": 0, "max_residual": 0.0, "pass": True, "skipped": True}
    bad = np.flatnonzero(~(res < tol))
    out = {
        "count": int(res.size),
        "max_residual": float(res.max()),
        "pass": bool(bad.size == 0),
        "skipped": False,
    }
    if bad.size and witnesses is not None:
        out["witnesses"] = [witnesses(int(k)) for k in bad[:3]]
    return out


def _query_constants(T, mus):
    """``T(mu 1)`` for each mu, or None if the oracle cannot answer."""
    ones = np.ones(T.n)
    vecs = mus[:, None] * ones
    if not all(T.has(v) for v in vecs):
        return None
    return T(vecs)


def _vec(v):
    return [[z.real, z.imag] for z in np.asarray(v).tolist()]


def tau_law_residual(T: SphereIsometryOracle, R: ReconstructedIsometry, points: int = 16) -> float:
    """Max of ``|T(e_{x,lam})(phi(x)) - tau(x, lam)|`` over a unimodular grid of lam."""
    lams = np.exp(2j * np.pi * np.arange(points) / points)
    phi = R.phi
    worst = 0.0
    for x in range(R.n):
        probes = lams[:, None] * spike(R.n, x, 1)
        if not all(T.has(p) for p in probes):
            continue
        got = T(probes)[:, phi[x]]
        want = np.array([R.tau(x, lam) for lam in lams])
        worst = max(worst, float(np.abs(got - want).max()))
    return worst


def verify_theorem(T: SphereIsometryOracle, R: ReconstructedIsometry, trials: int, rng=None) -> dict:
    """Check the extension theorem's conclusions for T against the recovered form.

    Clauses: (a) the extension agrees with T on the sphere; (b) ``|T(1)| = 1``;
    (c) ``T(-mu) = -T(mu)`` for unimodular constants; (d) real-linearity of
    the extension; (e) ``d(f, F_{x,lam}) = d(T f, F_{phi(x), tau(x,lam)})``.
    """
    rng = np.random.default_rng(rng)
    n = T.n
    ext = build_extension(R)

    f = T.sample_inputs(rng, trials)
    Tf = T(f)
    res_a = np.abs(ext(f) - Tf).max(axis=1)
    clause_a = _clause(res_a, witnesses=lambda k: {"f": _vec(f[k])})

    ones = np.ones(n, dtype=complex)
    if T.has(ones):
        t1 = T(ones)
        clause_b = _clause(np.abs(np.abs(t1) - 1), witnesses=lambda k: {"y": k})
    else:
        clause_b = _clause([], skipped=True)

    mus = np.exp(2j * np.pi * rng.random(trials))
    plus = _query_constants(T, mus)
    minus = _query_constants(T, -mus)
    if plus is None or minus is None:
        clause_c = _clause([], skipped=True)
    else:
        res_c = np.abs(plus + minus).max(axis=1)
        clause_c = _clause(res_c, witnesses=lambda k: {"mu": [mus[k].real, mus[k].imag]})

    g = rng.normal(size=(trials, n)) + 1j * rng.normal(size=(trials, n))
    h = rng.normal(size=(trials, n)) + 1j * rng.normal(size=(trials, n))
    a, b = rng.normal(size=(2, trials, 1))
    res_d = np.abs(ext(a * g + b * h) - a * ext(g) - b * ext(h)).max(axis=1)
    res_d = np.maximum(res_d, np.abs(np.abs(ext(g)).max(axis=1) - np.abs(g).max(axis=1)))
    clause_d = _clause(res_d)

    phi = R.phi
    xs = rng.integers(0, n, len(f))
    lams = np.exp(2j * np.pi * rng.random(len(f)))
    taus = np.array([R.tau(int(x), lam) for x, lam in zip(xs, lams)])
    fn = f / np.abs(f).max(axis=1, keepdims=True)
    tn = Tf / np.abs(Tf).max(axis=1, keepdims=True)
    res_e = np.abs(face_distances_finite(fn, xs, lams) - face_distances_finite(tn, phi[xs], taus))
    clause_e = _clause(res_e, witnesses=lambda k: {"f": _vec(f[k]), "x": int(xs[k])})

    tau_res = tau_law_residual(T, R)
    clause_tau = _clause([tau_res])

    clauses = {
        "a_extension": clause_a,
        "b_unit_image": clause_b,
        "c_odd_constants": clause_c,
        "d_real_linear": clause_d,
        "e_face_distance": clause_e,
        "tau_law": clause_tau,
    }
    witnesses = {k: v["witnesses"] for k, v in clauses.items() if "witnesses" in v}
    return {
        "check": "extension_theorem",
        "n": n,
        "trials": int(trials),
        "clauses": clauses,
        "max_residual": max(c["max_residual"] for c in clauses.values()),
        "witnesses": witnesses,
        "pass": all(c["pass"] for c in clauses.values()),
    }
