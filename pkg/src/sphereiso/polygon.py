"""The rhombus R and hexagon R~ that control peaking-function ranges, with
membership tests and randomized checks of the two geometric facts used by the
additive Bishop construction: R~ lies in the disk |2z - 1| <= 1, and R * R
lies in R~."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

MEMBERSHIP_TOL = 1e-12


class VerificationFailure(AssertionError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True, eq=False)
class Polygon:
    """Closed convex polygon given by counterclockwise vertices."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=complex).copy()
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)
        e = self.edges
        cross = (np.conj(e) * np.roll(e, -1)).imag
        if np.any(cross < -1e-14):
            raise ValueError("vertices are not a counterclockwise convex polygon")

    @property
    def edges(self) -> np.ndarray:
        return np.roll(self.vertices, -1) - self.vertices

    def signed_distance(self, z) -> np.ndarray:
        """Minimum over edges of the signed distance to the edge line (>0 inside)."""
        z = np.asarray(z, dtype=complex)
        e = self.edges
        rel = z[..., None] - self.vertices
        d = (np.conj(e) * rel).imag / np.abs(e)
        return d.min(axis=-1)

    def distance_to_boundary(self, z) -> np.ndarray:
        """Euclidean distance from ``z`` to the polygon's boundary."""
        z = np.asarray(z, dtype=complex)[..., None]
        a = self.vertices
        e = self.edges
        t = np.clip(((z - a) * np.conj(e)).real / np.abs(e) ** 2, 0.0, 1.0)
        return np.abs(z - (a + t * e)).min(axis=-1)

    def boundary_points(self, per_edge: int) -> np.ndarray:
        t = np.arange(per_edge) / per_edge
        return (self.vertices[:, None] + self.edges[:, None] * t[None, :]).ravel()

    def bounding_box(self):
        v = self.vertices
        return v.real.min(), v.real.max(), v.imag.min(), v.imag.max()

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform points by rejection from the bounding box."""
        x0, x1, y0, y1 = self.bounding_box()
        out = []
        have = 0
        while have < count:
            k = max(2 * (count - have), 64)
            z = rng.uniform(x0, x1, k) + 1j * rng.uniform(y0, y1, k)
            z = z[self.signed_distance(z) >= 0]
            out.append(z)
            have += z.size
        return np.concatenate(out)[:count]


def contains(p: Polygon, z, tol: float = MEMBERSHIP_TOL):
    res = p.signed_distance(z) >= -tol
    return bool(res) if np.ndim(res) == 0 else res


_S3 = np.sqrt(3.0) / 3.0
V_PLUS = _S3 * np.exp(1j * np.pi / 6)
V_MINUS = np.conj(V_PLUS)
W_PLUS = np.exp(1j * np.pi / 3) / 3.0
W_MINUS = np.conj(W_PLUS)

RHOMBUS = Polygon([0.0, V_MINUS, 1.0, V_PLUS])
HEXAGON = Polygon([0.0, W_MINUS, V_MINUS, 1.0, V_PLUS, W_PLUS])


def _report(lemma, samples, max_violation, **extra):
    out = {
        "lemma": lemma,
        "samples": int(samples),
        "max_violation": float(max_violation),
        "pass": bool(max_violation <= MEMBERSHIP_TOL),
    }
    out.update(extra)
    return out


def verify_hexagon_disk_bound(samples: int, rng=None, raise_on_failure=True) -> dict:
    """Check ``|2z - 1| <= 1`` on random points of R~ plus its vertices and edge midpoints."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(rng)
    v = HEXAGON.vertices
    z = np.concatenate([HEXAGON.sample(samples, rng), v, v + HEXAGON.edges / 2])
    mod = np.abs(2 * z - 1)
    k = int(np.argmax(mod))
    violation = max(0.0, float(mod[k]) - 1.0)
    if violation > MEMBERSHIP_TOL and raise_on_failure:
        raise VerificationFailure("|2z-1| <= 1 violated on the hexagon", witness=complex(z[k]))
    return _report("hexagon_disk_bound", z.size, violation, max_modulus=float(mod[k]))


def vertex_products() -> np.ndarray:
    v = RHOMBUS.vertices
    return (v[:, None] * v[None, :]).ravel()


def hull_vertices(points) -> np.ndarray:
    pts = np.asarray(points, dtype=complex)
    uniq = np.unique(np.round(pts, 13))
    hull = ConvexHull(np.column_stack([uniq.real, uniq.imag]))
    return uniq[hull.vertices]


def _set_distance(a, b) -> float:
    d = np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def verify_product_lemma(samples: int, rng=None, raise_on_failure=True) -> dict:
    """Check ``zw`` lies in R~ for random ``z, w`` in R and all vertex pairs,
    and that the hull of the sixteen vertex products is exactly R~."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(rng)
    z = RHOMBUS.sample(samples, rng)
    w = RHOMBUS.sample(samples, rng)
    v = RHOMBUS.vertices
    z = np.concatenate([z, np.repeat(v, 4)])
    w = np.concatenate([w, np.tile(v, 4)])
    prod = z * w
    sd = HEXAGON.signed_distance(prod)
    k = int(np.argmin(sd))
    violation = max(0.0, -float(sd[k]))
    hull = hull_vertices(vertex_products())
    hull_err = _set_distance(hull, HEXAGON.vertices)
    hull_ok = hull.size == HEXAGON.vertices.size and hull_err <= MEMBERSHIP_TOL
    if raise_on_failure and violation > MEMBERSHIP_TOL:
        raise VerificationFailure(
            "product of rhombus points left the hexagon", witness=(complex(z[k]), complex(w[k]))
        )
    if raise_on_failure and not hull_ok:
        raise VerificationFailure("hull of vertex products differs from the hexagon", witness=hull)
    rep = _report(
        "product_lemma", z.size, violation, hull_vertices=int(hull.size), hull_error=hull_err
    )
    rep["pass"] = rep["pass"] and hull_ok
    return rep
