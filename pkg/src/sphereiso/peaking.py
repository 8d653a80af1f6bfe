"""Peaking functions in the disk algebra.

``basic_peak`` is the polynomial ``((1 + conj(x) z)/2)**m``. ``localized_peak``
composes it with the pinched rhombus map, giving a function that is exactly 1
at x, maps the circle into R, and is below delta off a prescribed arc. Such a
function has a cusp at x (a smooth map into a wedge of opening < pi through 1
would contradict Julia's lemma), so it is kept in closed form and evaluated
on the circle rather than expanded in Taylor coefficients.

``two_point_interpolation`` produces a unit-norm function with prescribed
unimodular values at two boundary points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gammaln

from . import algebra
from .algebra import AnalyticFunction
from .conformal import ConformalMap, PinchedMap, build_pinch_map, build_rhombus_map
from .polygon import RHOMBUS

RANGE_TOL = 1e-8
PEAK_TOL = 1e-6
# the off-arc threshold for the basic peak before pinching
OFF_ARC_LEVEL = 0.5
TAIL_SLACK = 1e-7
MAX_TERMS = 40


class PeakingError(RuntimeError):
    pass


def wrap_angle(phi):
    """Reduce to (-pi, pi] without touching values already in range."""
    phi = np.asarray(phi, dtype=float)
    big = np.abs(phi) > np.pi
    if np.any(big):
        phi = np.where(big, np.remainder(phi + np.pi, 2 * np.pi) - np.pi, phi)
    return phi


def sample_angles(centers=(), base: int = 4096, cluster: int = 160) -> np.ndarray:
    """Uniform grid plus log-spaced clusters around each center angle."""
    parts = [2 * np.pi * np.arange(base) / base]
    offs = np.logspace(-15, 0, cluster)
    for c in centers:
        parts.append(np.concatenate([[c], c + offs, c - offs]))
    return np.concatenate(parts)


def boundary_values(f, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if isinstance(f, AnalyticFunction):
        return f.on_circle(theta)
    return np.asarray(f(theta), dtype=complex)


@dataclass(frozen=True, eq=False)
class BoundaryFunction:
    """Disk-algebra element known through its values on the unit circle."""

    fn: Callable[[np.ndarray], np.ndarray]
    centers: tuple = ()

    def __call__(self, theta):
        return self.fn(np.asarray(theta, dtype=float))

    @staticmethod
    def lift(g) -> "BoundaryFunction":
        if isinstance(g, BoundaryFunction):
            return g
        if isinstance(g, AnalyticFunction):
            return BoundaryFunction(g.on_circle)
        c = complex(g)
        return BoundaryFunction(lambda t: np.full(np.shape(t), c, dtype=complex))

    def __add__(self, other):
        o = BoundaryFunction.lift(other)
        return BoundaryFunction(lambda t: self(t) + o(t), self.centers + o.centers)

    __radd__ = __add__

    def __sub__(self, other):
        o = BoundaryFunction.lift(other)
        return BoundaryFunction(lambda t: self(t) - o(t), self.centers + o.centers)

    def __mul__(self, other):
        o = BoundaryFunction.lift(other)
        return BoundaryFunction(lambda t: self(t) * o(t), self.centers + o.centers)

    __rmul__ = __mul__

    def __neg__(self):
        return BoundaryFunction(lambda t: -self(t), self.centers)


def basic_peak(x: complex, sharpness: int) -> AnalyticFunction:
    """``((1 + conj(x) z)/2) ** m``; equals 1 at x and ``cos(theta/2)**m`` in modulus
    at angular distance theta from x."""
    m = int(sharpness)
    if m < 1:
        raise ValueError("sharpness must be >= 1")
    if abs(abs(x) - 1) > 1e-12:
        raise ValueError("peak point must be unimodular")
    if m + 1 > algebra.MAX_COEFFS:
        raise ValueError(f"sharpness {m} exceeds the coefficient cap")
    k = np.arange(m + 1)
    logc = gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1) - m * np.log(2.0)
    return AnalyticFunction(np.exp(logc) * np.conj(x) ** k)


def sharpness_for(half_width: float, level: float = OFF_ARC_LEVEL) -> int:
    """Least m with ``cos(w/2)**m < level`` for every angular distance ``w >= half_width``."""
    if half_width >= np.pi:
        return 1
    rate = -np.log1p(-2 * np.sin(half_width / 4) ** 2)
    return int(np.floor(np.log(1 / level) / rate)) + 1


def power_peak_values(phi, m: float):
    """``v = ((1 + e^{i phi})/2)**m`` and ``1 - v``, both to full relative precision."""
    phi = np.asarray(phi, dtype=float)
    with np.errstate(divide="ignore"):
        a = m * np.log1p(-2 * np.sin(phi / 4) ** 2)
    b = m * phi / 2
    eib = np.exp(1j * b)
    v = np.exp(a) * eib
    one_minus = -(np.expm1(a) * eib + 2j * np.sin(b / 2) * np.exp(0.5j * b))
    return v, one_minus


@dataclass(frozen=True)
class Arc:
    """Open arc ``(lo, hi)`` of angles, ``hi - lo <= 2 pi``."""

    lo: float
    hi: float

    @classmethod
    def around(cls, center: float, half_width: float) -> "Arc":
        return cls(center - half_width, center + half_width)

    def contains(self, theta) -> np.ndarray:
        if self.hi - self.lo >= 2 * np.pi:
            return np.ones(np.shape(theta), dtype=bool)
        mid = 0.5 * (self.lo + self.hi)
        rel = np.abs(wrap_angle(np.asarray(theta) - mid))
        return rel < 0.5 * (self.hi - self.lo)

    def distance_from(self, center: float) -> float:
        return float(min(center - self.lo, self.hi - center))

    def describe(self) -> dict:
        return {"lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class PeakingCertificate:
    peak_value_residual: float
    off_peak_max: float
    off_peak_sampled: float
    range_violation: float
    range_polygon_pass: bool
    region_G: dict
    delta: float

    @property
    def passed(self) -> bool:
        return (
            self.peak_value_residual <= PEAK_TOL
            and self.off_peak_max < self.delta
            and self.off_peak_sampled <= self.off_peak_max
            and self.range_polygon_pass
        )

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        out["pass"] = self.passed
        return out


@dataclass(frozen=True, eq=False)
class LocalizedPeak:
    """``u = pi o f_x`` with ``f_x`` the sharpened basic peak and ``pi`` a pinched map.

    ``sharpness == 0`` encodes the constant 1 (no smallness required)."""

    x: complex
    arc: Arc
    delta: float
    sharpness: float
    pinch: PinchedMap | None
    certificate: PeakingCertificate | None = field(default=None, compare=False)
    # angle of the caller's x; renormalizing x can move np.angle by an ulp
    theta: float | None = None

    @property
    def angle(self) -> float:
        return float(np.angle(self.x)) if self.theta is None else self.theta

    @property
    def off_arc_bound(self) -> float:
        """Certified bound for |u| off the arc (max of |pi| on |z| = 1/2)."""
        if self.pinch is None:
            return 0.0 if self.sharpness else 1.0
        return self.pinch.max_on_half_circle

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.sharpness == 0:
            return np.ones(theta.shape, dtype=complex)
        phi = wrap_angle(theta - self.angle)
        v, omv = power_peak_values(phi, self.sharpness)
        # on |v| <= 1/2 the map is bounded by delta, so |pi(v) - pi(0)| <= 4 delta |v|
        tiny = np.abs(v) < 1e-17
        out = np.empty(v.shape, dtype=complex)
        if np.any(tiny):
            out[tiny] = self.pinch.evaluate(np.zeros(1))[0]
        if not np.all(tiny):
            out[~tiny] = self.pinch.evaluate(v[~tiny], omv[~tiny])
        return out

    def as_boundary_function(self) -> BoundaryFunction:
        return BoundaryFunction(self, (self.angle,))

    def to_json(self) -> dict:
        out = {
            "kind": "localized_peak",
            "x": [self.x.real, self.x.imag],
            "arc": self.arc.describe(),
            "delta": self.delta,
            "sharpness": float(self.sharpness),
            "one_minus_r": None if self.pinch is None else self.pinch.mobius.one_minus_r,
        }
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def certify_peak(u: LocalizedPeak, theta=None) -> PeakingCertificate:
    """Re-evaluate ``u`` on a dense sample and check the three peaking clauses."""
    if theta is None:
        theta = sample_angles([u.angle, u.arc.lo, u.arc.hi])
    vals = u(theta)
    peak = complex(u(np.array([u.angle]))[0])
    off = ~u.arc.contains(theta)
    off_sampled = float(np.abs(vals[off]).max()) if np.any(off) else 0.0
    violation = max(0.0, -float(RHOMBUS.signed_distance(vals).min()))
    return PeakingCertificate(
        peak_value_residual=abs(peak - 1.0),
        off_peak_max=u.off_arc_bound if np.any(off) else 0.0,
        off_peak_sampled=off_sampled,
        range_violation=violation,
        range_polygon_pass=violation <= RANGE_TOL,
        region_G=u.arc.describe(),
        delta=u.delta,
    )


def _as_unimodular(x) -> complex:
    x = complex(x)
    if abs(abs(x) - 1) > 1e-12:
        raise ValueError("peak point must be unimodular")
    return x / abs(x)


def localized_peak(
    x,
    arc: Arc,
    delta: float,
    cmap: ConformalMap | None = None,
    certify: bool = True,
    theta=None,
) -> LocalizedPeak:
    """Peaking function at ``x`` with range in R and modulus below ``delta`` off ``arc``."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    xa = float(np.angle(complex(x)))
    x = _as_unimodular(x)
    # arcs are stored relative to the principal angle of x
    shift = np.round((0.5 * (arc.lo + arc.hi) - xa) / (2 * np.pi)) * 2 * np.pi
    arc = Arc(arc.lo - shift, arc.hi - shift)
    if not arc.lo < xa < arc.hi:
        raise ValueError("arc must contain the peak point")
    w = arc.distance_from(xa)
    if arc.hi - arc.lo >= 2 * np.pi or w >= np.pi:
        u = LocalizedPeak(x, arc, delta, 0, None, theta=xa)
    else:
        cmap = cmap or build_rhombus_map()
        _, pinch = build_pinch_map(delta, cmap)
        u = LocalizedPeak(x, arc, delta, sharpness_for(w), pinch, theta=xa)
    if not certify:
        return u
    cert = certify_peak(u, theta)
    if not cert.passed:
        raise PeakingError(f"peaking certificate failed: {cert.to_json()}")
    return LocalizedPeak(u.x, u.arc, u.delta, u.sharpness, u.pinch, cert, xa)


@dataclass(frozen=True, eq=False)
class TwoPointResult:
    g: object
    affine: AnalyticFunction
    corrected: bool
    value_residuals: tuple
    norm_upper: float
    norm_sampled: float
    terms: int
    points: tuple

    @property
    def passed(self) -> bool:
        return max(self.value_residuals) <= 1e-8 and self.norm_upper <= 1 + PEAK_TOL

    def to_json(self) -> dict:
        return {
            "corrected": self.corrected,
            "affine": self.affine.to_json(),
            "value_residuals": list(self.value_residuals),
            "norm_upper": self.norm_upper,
            "norm_sampled": self.norm_sampled,
            "terms": self.terms,
            "pass": self.passed,
        }


def _two_point_multiplier(y1, y2, half_width, target, cmap) -> BoundaryFunction:
    """``p1 + p2 - p1 p2`` from peaks at the two points: equals 1 at both, stays in
    the disk ``|z - 1/2| <= 1/2`` (it is ``1 - (1-p1)(1-p2)`` with ``1 - R = R`` and
    ``R R`` inside the hexagon), and is below ``target`` off both arcs."""
    if half_width >= np.pi:
        return BoundaryFunction.lift(1.0)
    d = target / 3
    # peaks are built from the points themselves so that their stored angles
    # agree bit for bit with the evaluation angles; near the cusp at a peak a
    # one-ulp shift can move the value visibly
    ya, yb = float(np.angle(y1)), float(np.angle(y2))
    p1 = localized_peak(y1, Arc.around(ya, half_width), d, cmap, certify=False)
    p2 = localized_peak(y2, Arc.around(yb, half_width), d, cmap, certify=False)
    return BoundaryFunction(lambda t: (lambda a, b: a + b - a * b)(p1(t), p2(t)), (ya, yb))


def two_point_interpolation(
    y1, y2, mu1, mu2, cmap: ConformalMap | None = None, terms: int | None = None
) -> TwoPointResult:
    """Unit-norm g with ``g(y1) = mu1`` and ``g(y2) = mu2``.

    Start from the affine interpolant h. When ``||h|| > 1`` multiply by
    ``u = u0 * (sum_n u_n / 2**n + 2**-N)`` where every factor is 1 at both
    points, ``|u0| < 1/||h||`` where ``|h| >= 3/2`` and
    ``|u_n| < 1/(2**n + 1)`` where ``|h| >= 1 + 2**-(n+1)``. The constant tail
    stands in for the omitted factors and costs at most ``2**-(N+1)`` in norm.
    """
    y1, y2 = _as_unimodular(y1), _as_unimodular(y2)
    mu1, mu2 = _as_unimodular(mu1), _as_unimodular(mu2)
    if abs(y1 - y2) < 1e-14:
        raise ValueError("interpolation points must differ")
    b = (mu1 - mu2) / (y1 - y2)
    a = mu1 - b * y1
    h = AnalyticFunction([a, b])
    a1, a2 = float(np.angle(y1)), float(np.angle(y2))
    hnorm = abs(a) + abs(b)
    if hnorm <= 1 + 1e-12:
        res = (abs(h.on_circle([a1])[0] - mu1), abs(h.on_circle([a2])[0] - mu2))
        return TwoPointResult(h, h, False, res, hnorm, hnorm, 0, (a1, a2))

    if terms is None:
        terms = int(np.ceil(np.log2(1 / TAIL_SLACK)))
    if terms > MAX_TERMS:
        raise PeakingError(f"series truncation {terms} exceeds {MAX_TERMS} terms")
    cmap = cmap or build_rhombus_map()
    lip = abs(b)  # |h(e^{it}) - mu_i| <= |b| |t - t_i|
    u0 = _two_point_multiplier(y1, y2, 0.5 / lip, 1 / hnorm, cmap)
    series = BoundaryFunction.lift(2.0**-terms)
    for n in range(1, terms + 1):
        un = _two_point_multiplier(y1, y2, 2.0 ** -(n + 1) / lip, 1 / (2.0**n + 1), cmap)
        series = series + (2.0**-n) * un
    hb = BoundaryFunction.lift(h)
    g = BoundaryFunction(lambda t: hb(t) * u0(t) * series(t), (a1, a2))

    at = g(np.array([a1, a2]))
    res = (abs(at[0] - mu1), abs(at[1] - mu2))
    sampled = float(np.abs(g(sample_angles([a1, a2]))).max())
    bound = 1 + 2.0 ** -(terms + 1) + RANGE_TOL
    result = TwoPointResult(g, h, True, res, bound, sampled, terms, (a1, a2))
    if not result.passed or sampled > bound:
        raise PeakingError(f"two-point interpolation failed certification: {result.to_json()}")
    return result
