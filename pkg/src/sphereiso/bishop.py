"""Additive Bishop construction: for a unit-norm polynomial f and a boundary
point x with ``alpha = f(x)``, build a peaking function ``u_r`` at x such that

    g_plus  = ( alpha/|alpha| - r alpha) u_r + r f
    g_minus = (-alpha/|alpha| - r alpha) u_r + r f

both have norm one and take the values ``+-alpha/|alpha|`` at x.

The level sets ``F_n`` of ``y -> r|alpha - f(y)|`` are kept away from x by a
Lipschitz bound on f, so each ``u_n`` only needs to be small off an explicit
arc around x. The infinite series ``sum u_n / 2**n`` is cut after N terms and
closed with the constant ``2**-N``; on the omitted level sets this costs at
most ``eps / 2**(N+2)`` in norm, which is folded into the certified bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import AnalyticFunction, CircleGrid, grid_values, sharp_sup_norm
from .conformal import ConformalMap, PinchError, build_rhombus_map
from .peaking import (
    TAIL_SLACK,
    Arc,
    BoundaryFunction,
    LocalizedPeak,
    localized_peak,
    sample_angles,
)
from .polygon import HEXAGON

UNIT_NORM_TOL = 1e-6
NORM_TOL = 1e-6
DISTANCE_SLACK = 1e-5
MIN_TERMS = 10
MAX_TERMS = 64
# slack for rounding in the composed evaluations
EVAL_SLACK = 1e-12


class BishopError(RuntimeError):
    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


def unit_direction(alpha: complex) -> complex:
    """``alpha/|alpha|``, read as 1 when alpha is 0."""
    return 1.0 + 0j if alpha == 0 else alpha / abs(alpha)


@dataclass(frozen=True, eq=False)
class BishopOutput:
    u_r: BoundaryFunction
    g_plus: BoundaryFunction
    g_minus: BoundaryFunction
    r: float
    epsilon: float
    alpha: complex
    x: complex
    norms: dict
    level_set_count: int
    terms: int
    f_norm_upper: float
    peaks: tuple = field(repr=False, default=())

    @property
    def angle(self) -> float:
        return float(np.angle(self.x))

    @property
    def unit(self) -> complex:
        return unit_direction(self.alpha)

    @property
    def passed(self) -> bool:
        n = self.norms
        return (
            n["g_plus_upper"] <= 1 + NORM_TOL
            and n["g_minus_upper"] <= 1 + NORM_TOL
            and n["g_plus_lower"] >= 1 - NORM_TOL
            and n["g_minus_lower"] >= 1 - NORM_TOL
            and n["peak_value_residual"] <= 1e-8
            and n["one_minus_2u_sampled"] <= 1 + NORM_TOL
        )

    def to_json(self) -> dict:
        return {
            "x": [self.x.real, self.x.imag],
            "alpha": [self.alpha.real, self.alpha.imag],
            "r": self.r,
            "epsilon": self.epsilon,
            "terms": self.terms,
            "level_set_count": self.level_set_count,
            "norms": dict(self.norms),
            "peaks": [p.to_json() for p in self.peaks],
            "pass": self.passed,
        }


def random_unit_polynomial(degree: int, rng=None) -> AnalyticFunction:
    """Complex Gaussian coefficients scaled by the certified upper norm bound."""
    rng = np.random.default_rng(rng)
    c = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
    f = AnalyticFunction(c)
    return AnalyticFunction(c / sharp_sup_norm(f)[1])


def level_set_indices(f: AnalyticFunction, x_angle: float, r: float, eps: float, grid=None):
    """Indices n of the nonempty level sets F_n on the working grid, each fattened by
    one cell; F_0 is ``{r|alpha - f| >= eps/4}`` and F_n is
    ``{eps/2**(n+2) <= r|alpha - f| <= eps/2**(n+1)}``."""
    grid = grid or CircleGrid.default_for(f.degree_bound)
    alpha = complex(f.on_circle([x_angle])[0])
    d = r * np.abs(alpha - grid_values(f, grid))
    found = []
    if np.any(d >= eps / 4):
        found.append(0)
    # nodes that hit x up to rounding count as x itself
    pos = d[d > 1e-12]
    if pos.size == 0:
        return found
    n_max = int(np.ceil(np.log2(eps / pos.min()))) + 1
    for n in range(1, n_max + 1):
        hit = (d >= eps / 2 ** (n + 2)) & (d <= eps / 2 ** (n + 1))
        hit = hit | np.roll(hit, 1) | np.roll(hit, -1)
        if np.any(hit):
            found.append(n)
    return found


def additive_bishop(
    f: AnalyticFunction,
    x,
    r: float,
    eps: float | None = None,
    cmap: ConformalMap | None = None,
    theta=None,
) -> BishopOutput:
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    x = complex(x)
    if abs(abs(x) - 1) > 1e-12:
        raise ValueError("x must be unimodular")
    x = x / abs(x)
    lo, up = sharp_sup_norm(f)
    if abs(lo - 1) > UNIT_NORM_TOL or abs(up - 1) > UNIT_NORM_TOL:
        raise ValueError(f"f must have unit norm, certified [{lo}, {up}]")
    xa = float(np.angle(x))
    alpha = complex(f.on_circle([xa])[0])
    unit = unit_direction(alpha)
    if eps is None:
        eps = 0.5 * (1 - r * abs(alpha))
    if not 0 < eps < 1 - r * abs(alpha):
        raise ValueError("eps must lie in (0, 1 - r|alpha|)")
    cmap = cmap or build_rhombus_map()

    levels = level_set_indices(f, xa, r, eps)
    last = max(levels) if levels else 0
    tail_terms = int(np.ceil(np.log2(eps / TAIL_SLACK))) - 2
    terms = max(MIN_TERMS, last + 5, tail_terms)
    if terms > MAX_TERMS:
        raise BishopError(f"{terms} series terms needed", level=terms)

    lip = sharp_sup_norm(f.derivative())[1] if f.degree_bound else 0.0

    def half_width(level_value):
        # r|alpha - f(y)| <= r * lip * |angle - xa| < level_value inside the arc
        return np.inf if lip == 0 else level_value / (r * lip)

    def peak(n, width, delta) -> LocalizedPeak:
        arc = Arc.around(xa, min(width, 4 * np.pi))
        try:
            return localized_peak(x, arc, delta, cmap, certify=False)
        except PinchError as exc:
            raise BishopError(f"cannot localize the peak for level set {n}: {exc}", n) from exc

    peaks = [peak(0, half_width(eps / 4), (1 - r) / (1 + r * abs(alpha)))]
    for n in range(1, terms + 1):
        peaks.append(peak(n, half_width(eps / 2 ** (n + 2)), 2.0 ** -(n + 1)))

    # every factor lies in R, so the convex combination does too
    def series(t):
        acc = np.full(np.shape(t), 2.0**-terms, dtype=complex)
        for n in range(1, terms + 1):
            acc += peaks[n](t) / 2.0**n
        return acc

    u0 = peaks[0]
    u_r = BoundaryFunction(lambda t: u0(t) * series(t), (xa,))
    c_plus = unit - r * alpha
    c_minus = -unit - r * alpha
    fb = BoundaryFunction.lift(f)
    g_plus = c_plus * u_r + r * fb
    g_minus = c_minus * u_r + r * fb

    if theta is None:
        theta = sample_angles([xa], base=max(4096, 32 * f.degree_bound))
    ur_vals = u_r(theta)
    f_vals = f.on_circle(theta)
    gp = c_plus * ur_vals + r * f_vals
    gm = c_minus * ur_vals + r * f_vals
    at_x = u_r(np.array([xa]))[0]
    gp_x = c_plus * at_x + r * alpha
    gm_x = c_minus * at_x + r * alpha

    range_violation = max(0.0, -float(HEXAGON.signed_distance(ur_vals).min()))
    bound = 1 + eps * 2.0 ** -(terms + 2) + r * max(0.0, up - 1) + range_violation + EVAL_SLACK
    norms = {
        "g_plus_upper": bound,
        "g_minus_upper": bound,
        "g_plus_lower": float(abs(gp_x)),
        "g_minus_lower": float(abs(gm_x)),
        "g_plus_sampled": float(np.abs(gp).max()),
        "g_minus_sampled": float(np.abs(gm).max()),
        "u_r_sampled": float(np.abs(ur_vals).max()),
        "u_r_value_at_x": [float(at_x.real), float(at_x.imag)],
        "one_minus_2u_sampled": float(np.abs(1 - 2 * ur_vals).max()),
        "u_r_range_violation": range_violation,
        "peak_value_residual": float(max(abs(gp_x - unit), abs(gm_x + unit))),
    }
    out = BishopOutput(
        u_r=u_r,
        g_plus=g_plus,
        g_minus=g_minus,
        r=float(r),
        epsilon=float(eps),
        alpha=alpha,
        x=x,
        norms=norms,
        level_set_count=len(levels),
        terms=terms,
        f_norm_upper=float(up),
        peaks=tuple(peaks),
    )
    if norms["g_plus_sampled"] > bound or norms["g_minus_sampled"] > bound:
        raise BishopError(f"sampled norm exceeds the certified bound: {norms}")
    return out


def verify_distance_bounds(out: BishopOutput, f: AnalyticFunction, theta=None) -> dict:
    """Check ``||g_plus - f|| <= (1 - r|a|) + (1 - r)`` and
    ``||g_minus - f|| <= (1 + r|a|) + (1 - r)``, sampled and by the triangle inequality."""
    if theta is None:
        theta = sample_angles([out.angle], base=max(4096, 32 * f.degree_bound))
    fv = f.on_circle(theta)
    a = abs(out.alpha)
    r = out.r
    u_upper = 1.0 + out.norms["u_r_range_violation"]
    eta = max(0.0, out.f_norm_upper - 1)
    rows = {}
    ok = True
    for name, g, coef in (("plus", out.g_plus, 1 - r * a), ("minus", out.g_minus, 1 + r * a)):
        target = coef + (1 - r)
        sampled = float(np.abs(g(theta) - fv).max())
        structural = coef * u_upper + (1 - r) * (1 + eta)
        passed = sampled <= target + DISTANCE_SLACK and structural <= target + DISTANCE_SLACK
        ok &= passed
        rows[name] = {
            "bound": target,
            "sampled": sampled,
            "structural": structural,
            "pass": passed,
        }
    return {"check": "bishop_distance_bounds", "pass": bool(ok), **rows}
