"""Maximal convex subsets ``F_{x,lam} = {f in S : f(x) = lam}`` of the unit
sphere, distances to them, and the sets ``M_{x,alpha}``.

Points of a finite X are 0-based indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AnalyticFunction, FiniteFunction, sharp_sup_norm
from .bishop import additive_bishop, unit_direction
from .conformal import ConformalMap

UNIT_TOL = 1e-12
DEFAULT_SCHEDULE = (0.9, 0.99, 0.999)
GAP_LIMIT = 0.02


class FaceError(ValueError):
    pass


@dataclass(frozen=True)
class MaximalFace:
    point: object
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if abs(abs(v) - 1) > 1e-12:
            raise FaceError("face value must be unimodular")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class DistanceProfile:
    alpha: complex
    d_plus: float
    d_minus: float

    def __post_init__(self):
        if abs(self.d_plus + self.d_minus - 2) > 1e-9:
            raise FaceError("distances to the antipodal faces must sum to 2")


def _check_unit(f: FiniteFunction):
    if abs(f.sup_norm - 1) > UNIT_TOL:
        raise FaceError(f"function must have unit sup-norm, got {f.sup_norm!r}")


def face_distance_finite(f: FiniteFunction, face: MaximalFace) -> float:
    """Exact ``d(f, F_{x,lam}) = |f(x) - lam|`` on finite X.

    The bound ``>=`` is pointwise evaluation at x; equality is attained by
    :func:`closest_face_point`, which changes f only at x.
    """
    _check_unit(f)
    return float(abs(f.values[face.point] - face.value))


def face_distances_finite(f, points, values) -> np.ndarray:
    """Batched :func:`face_distance_finite` for rows ``f[k]`` and faces ``(points[k], values[k])``."""
    f = np.asarray(f, dtype=complex)
    if np.any(np.abs(np.abs(f).max(axis=-1) - 1) > UNIT_TOL):
        raise FaceError("every row must have unit sup-norm")
    values = np.asarray(values, dtype=complex)
    if np.any(np.abs(np.abs(values) - 1) > 1e-12):
        raise FaceError("face values must be unimodular")
    rows = np.arange(f.shape[0])
    return np.abs(f[rows, np.asarray(points)] - values)


def closest_face_point(f: FiniteFunction, face: MaximalFace) -> FiniteFunction:
    g = np.array(f.values)
    g[face.point] = face.value
    return FiniteFunction(g)


def _random_disk(rng, shape):
    r = np.sqrt(rng.random(shape))
    return r * np.exp(2j * np.pi * rng.random(shape))


def _clip_disk(z):
    m = np.abs(z)
    return np.where(m > 1, z / np.maximum(m, 1e-300), z)


def sampled_face_distance(
    f: FiniteFunction, face: MaximalFace, rng=None, budget: int = 100_000, batch: int = 1000
) -> float:
    """Upper bound on ``d(f, F)`` by random search over face elements.

    Every candidate is a genuine face element (``lam`` at x, arbitrary points
    of the closed disk elsewhere), so the result never undercuts the true
    distance. The sup-norm objective is a max of per-coordinate terms, so each
    free coordinate keeps its own incumbent: after a uniform draw from the disk
    it is refined by local perturbations whose radius shrinks on failure.
    """
    rng = np.random.default_rng(rng)
    fv = f.values
    others = np.ones(fv.size, dtype=bool)
    others[face.point] = False
    k = int(others.sum())
    base = float(abs(fv[face.point] - face.value))
    if k == 0:
        return base
    target = fv[others][:, None]
    cols = np.arange(k)

    cands = _random_disk(rng, (k, batch))
    err = np.abs(cands - target)
    i = err.argmin(axis=1)
    best, best_err = cands[cols, i], err[cols, i]
    radius = np.ones(k)
    for _ in range(budget // batch - 1):
        if best_err.max() <= base:
            break
        cands = _clip_disk(best[:, None] + radius[:, None] * _random_disk(rng, (k, batch)))
        err = np.abs(cands - target)
        i = err.argmin(axis=1)
        better = err[cols, i] < best_err
        best = np.where(better, cands[cols, i], best)
        best_err = np.where(better, err[cols, i], best_err)
        radius = np.where(better, radius, 0.5 * radius)
    return max(base, float(best_err.max()))


def distance_profile(f: FiniteFunction, x: int) -> DistanceProfile:
    alpha = complex(f.values[x])
    u = unit_direction(alpha)
    return DistanceProfile(
        alpha,
        face_distance_finite(f, MaximalFace(x, u)),
        face_distance_finite(f, MaximalFace(x, -u)),
    )


def face_distance_disk_bounds(
    f: AnalyticFunction,
    face: MaximalFace,
    r_schedule=DEFAULT_SCHEDULE,
    cmap: ConformalMap | None = None,
    check_gap: bool = True,
):
    """Interval ``(lower, upper)`` for ``d(f, F_{x,lam})`` in the disk algebra.

    ``lower = |f(x) - lam|`` holds for every lam. For ``lam = +-alpha/|alpha|``
    the additive Bishop functions lie in the face and give
    ``upper = min_r ||g_r - f||`` (triangle-inequality bound); for any other
    lam no witness is available and ``upper`` is ``inf``.
    """
    x = complex(face.point)
    xa = float(np.angle(x))
    alpha = complex(f.on_circle([xa])[0])
    lam = face.value
    lower = float(abs(alpha - lam))
    u = unit_direction(alpha)
    if abs(lam - u) <= 1e-12:
        sign = 1
    elif abs(lam + u) <= 1e-12:
        sign = -1
    else:
        return lower, float("inf")
    f_up = sharp_sup_norm(f)[1]
    upper = float("inf")
    for r in r_schedule:
        out = additive_bishop(f, x, r, cmap=cmap)
        coef = abs(sign * u - r * alpha)
        u_up = 1 + out.norms["u_r_range_violation"]
        upper = min(upper, coef * u_up + (1 - r) * f_up)
    if check_gap and upper - lower >= GAP_LIMIT:
        raise AssertionError(f"distance interval too wide: [{lower}, {upper}]")
    return lower, upper


def membership_M(f, x, alpha: complex, tol: float = 1e-6, cmap=None, r_schedule=DEFAULT_SCHEDULE):
    """Whether f lies in ``M_{x,alpha}``: distance ``1 - |alpha|`` to ``F_{x, alpha/|alpha|}``
    and ``1 + |alpha|`` to ``F_{x, -alpha/|alpha|}``.

    On finite X this is the pointwise test ``f(x) = alpha``. In the disk
    algebra both distances are bracketed: the lower ends must reach the
    targets within ``tol`` and the upper ends within the Bishop resolution
    ``max(tol, GAP_LIMIT)``.
    """
    alpha = complex(alpha)
    if abs(alpha) > 1 + 1e-12:
        raise FaceError("|alpha| must be <= 1")
    if isinstance(f, FiniteFunction):
        return bool(abs(f.values[x] - alpha) <= tol)
    u = unit_direction(alpha)
    member = True
    for lam, target in ((u, 1 - abs(alpha)), (-u, 1 + abs(alpha))):
        lo, up = face_distance_disk_bounds(f, MaximalFace(x, lam), r_schedule, cmap, False)
        member &= lo <= target + tol and up <= target + max(tol, GAP_LIMIT)
    value = complex(f.on_circle([float(np.angle(complex(x)))])[0])
    pointwise = abs(value - alpha)
    # the two lower bounds alone force f(x) = alpha up to O(sqrt(tol))
    if member and pointwise > 4 * np.sqrt(tol) or not member and pointwise <= 1e-12:
        raise AssertionError("distance test disagrees with pointwise evaluation")
    return bool(member)


def verify_face_maximality(n: int, trials: int, rng=None) -> dict:
    """Randomized check that ``F_{x,lam}`` is convex and cannot be enlarged.

    For h in the sphere with ``h(x) != lam``, the face element ``g = lam e_x``
    gives ``||(h + g)/2|| < 1``, so the convex hull of ``F`` and h leaves the
    sphere.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(rng)
    xs = rng.integers(0, n, trials)
    lam = np.exp(2j * np.pi * rng.random(trials))
    rows = np.arange(trials)

    members = _random_disk(rng, (trials, 3, n))
    members[rows, :, xs] = lam[:, None]
    w = rng.dirichlet(np.ones(3), trials)
    combo = np.einsum("tk,tkn->tn", w, members)
    conv_bad = (np.abs(np.abs(combo).max(axis=1) - 1) > 1e-12) | (
        np.abs(combo[rows, xs] - lam) > 1e-12
    )

    h = _random_disk(rng, (trials, n))
    # put h on the sphere through a random coordinate
    j = rng.integers(0, n, trials)
    h[rows, j] = np.exp(2j * np.pi * rng.random(trials))
    same = np.abs(h[rows, xs] - lam) < 1e-9
    h[rows[same], xs[same]] = -lam[same]
    g = np.zeros((trials, n), dtype=complex)
    g[rows, xs] = lam
    mid = np.abs((h + g) / 2).max(axis=1)
    max_bad = mid >= 1
    violations = int(conv_bad.sum() + max_bad.sum())
    return {
        "check": "face_maximality",
        "n": n,
        "trials": int(trials),
        "violations": violations,
        "max_midpoint_norm": float(mid.max()),
        "pass": violations == 0,
    }
