"""Schwarz-Christoffel map of the closed disk onto the rhombus R, and the
pinched map ``pi = pi0 o m_r`` with ``m_r(z) = (z - r)/(1 - r z)``.

The rhombus has dihedral symmetry, so the prevertices sit exactly at
``1, i, -1, -i`` and no parameter problem has to be solved. Every evaluation
integrates from the nearest prevertex with Gauss-Jacobi quadrature, which
absorbs the algebraic endpoint singularity exactly; points arbitrarily close
to a prevertex are passed as offsets ``t = w - w_k`` to keep full relative
precision there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .polygon import RHOMBUS, V_MINUS, V_PLUS

PREVERTICES = np.array([1.0, 1j, -1.0, -1j])
# interior angle / pi - 1 at the images 1, v+, 0, v-
EXPONENTS = np.array([-2.0 / 3.0, -1.0 / 3.0, -2.0 / 3.0, -1.0 / 3.0])
VERTEX_IMAGES = np.array([1.0, V_PLUS, 0.0, V_MINUS])
QUAD_TOL = 1e-8
PINCH_SAMPLES = 720
# 1 - r is searched on a log scale down to this floor
MIN_ONE_MINUS_R = 1e-280


class QuadratureError(RuntimeError):
    pass


class PinchError(ValueError):
    pass


@lru_cache(maxsize=None)
def _jacobi(order: int, beta: float):
    s, w = roots_jacobi(order, 0.0, beta)
    return s, w


@lru_cache(maxsize=None)
def _legendre_jacobi(order: int, beta: float):
    s, w = roots_jacobi(order, beta, beta)
    return s, w


def _scale_constant(order: int) -> float:
    # C * int_{-1}^{1} (1-x^2)^(-2/3) (1+x^2)^(-1/3) dx = pi0(1) - pi0(-1) = 1
    s, w = _legendre_jacobi(order, -2.0 / 3.0)
    return 1.0 / float(np.sum(w * (1 + s * s) ** (-1.0 / 3.0)))


@dataclass(frozen=True, eq=False)
class ConformalMap:
    """``pi0(w) = A + C * int_{-1}^{w} prod_k (1 - z/w_k)^beta_k dz`` onto R."""

    scale: float
    quadrature_order: int
    offset: complex = 0.0
    prevertices: np.ndarray = field(default_factory=lambda: PREVERTICES.copy())
    exponents: np.ndarray = field(default_factory=lambda: EXPONENTS.copy())

    def _other_factors(self, k: int, zeta: np.ndarray) -> np.ndarray:
        # pairs of opposite prevertices share a single log, e.g.
        # (1 - z)(1 + z) = 1 - z**2; principal branches add on the disk
        b = self.exponents
        if k == 0:
            acc = b[2] * np.log1p(zeta) + b[1] * np.log1p(zeta * zeta)
        elif k == 2:
            acc = b[0] * np.log1p(-zeta) + b[1] * np.log1p(zeta * zeta)
        elif k == 1:
            acc = b[0] * np.log1p(-zeta * zeta) + b[3] * np.log1p(-1j * zeta)
        else:
            acc = b[0] * np.log1p(-zeta * zeta) + b[1] * np.log1p(1j * zeta)
        return np.exp(acc)

    def from_prevertex(self, k: int, t) -> np.ndarray:
        """``pi0(w_k + t)``, integrating along the segment from ``w_k``."""
        t = np.asarray(t, dtype=complex)
        shape = t.shape
        t = t.ravel()
        wk = self.prevertices[k]
        beta = self.exponents[k]
        s, wts = _jacobi(self.quadrature_order, beta)
        zeta = wk + t[:, None] * (1 + s[None, :]) / 2
        integral = (self._other_factors(k, zeta) * wts).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            pref = (t / 2) * (-t / (2 * wk)) ** beta
        pref = np.where(t == 0, 0.0, pref)
        out = VERTEX_IMAGES[k] + self.scale * pref * integral
        return out.reshape(shape)

    def nearest_prevertex(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        return np.argmin(np.abs(w[..., None] - self.prevertices), axis=-1)

    def __call__(self, w):
        return apply(self, w)

    def to_json(self) -> dict:
        return {
            "prevertices": [[p.real, p.imag] for p in self.prevertices.astype(complex)],
            "exponents": self.exponents.tolist(),
            "scale": self.scale,
            "offset": [complex(self.offset).real, complex(self.offset).imag],
            "quadrature_order": self.quadrature_order,
        }


def build_rhombus_map(quadrature_order: int = 24) -> ConformalMap:
    if quadrature_order < 8:
        raise ValueError("quadrature_order must be >= 8")
    c = _scale_constant(quadrature_order)
    c2 = _scale_constant(2 * quadrature_order)
    if abs(c - c2) > QUAD_TOL:
        raise QuadratureError(f"scale constant unstable under order doubling: {abs(c - c2):.2e}")
    return ConformalMap(scale=c, quadrature_order=quadrature_order)


def from_offsets(cmap: ConformalMap, w, one_plus_w=None, one_minus_w=None) -> np.ndarray:
    """Evaluate, using accurately known ``1 + w`` / ``1 - w`` near the real prevertices."""
    w = np.asarray(w, dtype=complex)
    k = cmap.nearest_prevertex(w)
    t = w - cmap.prevertices[k]
    if one_minus_w is not None:
        t = np.where(k == 0, -np.asarray(one_minus_w, dtype=complex), t)
    if one_plus_w is not None:
        t = np.where(k == 2, np.asarray(one_plus_w, dtype=complex), t)
    out = np.empty(w.shape, dtype=complex)
    for j in range(4):
        sel = k == j
        if np.any(sel):
            out[sel] = cmap.from_prevertex(j, t[sel])
    return out


def apply(cmap: ConformalMap, w):
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(w) > 1 + 1e-12):
        raise ValueError("point outside the closed unit disk")
    out = from_offsets(cmap, w)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class MobiusAutomorphism:
    """``m(z) = (z - r)/(1 - r z)``, stored through ``s = 1 - r`` for precision."""

    one_minus_r: float

    @property
    def r(self) -> float:
        return 1.0 - self.one_minus_r

    def apply_offsets(self, v, one_minus_v=None):
        """Return ``(m(v), 1 + m(v), 1 - m(v))`` without cancellation near ``v = 1``."""
        v = np.asarray(v, dtype=complex)
        omv = 1 - v if one_minus_v is None else np.asarray(one_minus_v, dtype=complex)
        s = self.one_minus_r
        den = omv + s * v
        one_plus = s * (2 - omv) / den
        one_minus = (2 - s) * omv / den
        w = (s - omv) / den
        return w, one_plus, one_minus

    def __call__(self, v):
        return self.apply_offsets(v)[0]


@dataclass(frozen=True, eq=False)
class PinchedMap:
    """``pi = pi0 o m_r``; sends 1 to 1 and the disk |z| <= 1/2 near the vertex 0."""

    base: ConformalMap
    mobius: MobiusAutomorphism
    delta: float
    max_on_half_circle: float

    def evaluate(self, v, one_minus_v=None) -> np.ndarray:
        w, op, om = self.mobius.apply_offsets(v, one_minus_v)
        return from_offsets(self.base, w, op, om)

    def __call__(self, v):
        return self.evaluate(v)


def _half_circle_max(cmap: ConformalMap, s: float) -> float:
    v = 0.5 * np.exp(2j * np.pi * np.arange(PINCH_SAMPLES) / PINCH_SAMPLES)
    w, op, om = MobiusAutomorphism(s).apply_offsets(v)
    return float(np.max(np.abs(from_offsets(cmap, w, op, om))))


@lru_cache(maxsize=4096)
def _pinch_parameter(delta: float, order: int, margin: float):
    cmap = build_rhombus_map(order)
    target = delta * (1 - margin)
    ok = lambda s: _half_circle_max(cmap, s) < target  # noqa: E731
    lo, hi = np.log(MIN_ONE_MINUS_R), np.log(1 - 1e-9)
    if ok(np.exp(hi)):
        s = float(np.exp(hi))
        return s, _half_circle_max(cmap, s)
    if not ok(np.exp(lo)):
        raise PinchError(f"no admissible r for delta={delta:.3e}")
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if ok(np.exp(mid)):
            lo = mid
        else:
            hi = mid
    s = float(np.exp(lo))
    return s, _half_circle_max(cmap, s)


def build_pinch_map(delta: float, cmap: ConformalMap | None = None, margin: float = 1e-2):
    """Largest ``1 - r`` with ``|pi| < delta (1 - margin)`` on ``|z| = 1/2``.

    The map is analytic on the closed half-disk, so by the maximum principle
    the bound on the circle covers the whole disk ``|z| <= 1/2``.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    cmap = cmap or build_rhombus_map()
    s, mx = _pinch_parameter(float(delta), cmap.quadrature_order, float(margin))
    mob = MobiusAutomorphism(s)
    return mob, PinchedMap(cmap, mob, float(delta), mx)


def boundary_image(cmap: ConformalMap, nodes: int = 2048):
    theta = 2 * np.pi * np.arange(nodes) / nodes
    return theta, apply(cmap, np.exp(1j * theta))


def _distance_to_polyline(q: np.ndarray, p: np.ndarray, chunk: int = 2048) -> np.ndarray:
    a = p
    e = np.roll(p, -1) - p
    norm2 = np.maximum(np.abs(e) ** 2, 1e-300)
    out = np.empty(q.size)
    for i in range(0, q.size, chunk):
        qq = q[i : i + chunk, None]
        t = np.clip(((qq - a) * np.conj(e)).real / norm2, 0.0, 1.0)
        out[i : i + chunk] = np.abs(qq - (a + t * e)).min(axis=1)
    return out


def hausdorff_to_boundary(points: np.ndarray, per_edge: int = 4096, dense: int = 8) -> float:
    """Hausdorff distance between the closed polyline through ``points`` and the boundary of R."""
    p = np.asarray(points, dtype=complex)
    seg = np.roll(p, -1) - p
    t = np.arange(dense) / dense
    poly = (p[:, None] + seg[:, None] * t[None, :]).ravel()
    d1 = float(RHOMBUS.distance_to_boundary(poly).max())
    bd = np.concatenate([RHOMBUS.boundary_points(per_edge), RHOMBUS.vertices])
    d2 = float(_distance_to_polyline(bd, p).max())
    return max(d1, d2)


def riemann_report(cmap: ConformalMap, nodes: int = 2048) -> dict:
    theta, img = boundary_image(cmap, nodes)
    return {
        "f1_residual": float(abs(apply(cmap, 1.0) - 1.0)),
        "fm1_residual": float(abs(apply(cmap, -1.0))),
        "hausdorff": hausdorff_to_boundary(img),
        "nodes": nodes,
        "quadrature_order": cmap.quadrature_order,
    }
