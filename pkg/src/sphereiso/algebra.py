"""Concrete uniform algebras: the disk algebra (truncated Taylor series) and C(X)
for finite X, with evaluation, arithmetic, analytic projection and certified
sup-norm bounds on the unit circle."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DOMAIN_TOL = 1e-12
MAX_COEFFS = 4096


class DomainError(ValueError):
    pass


class GridTooCoarse(ValueError):
    pass


class ProjectionError(ValueError):
    pass


def _as_coeffs(coeffs) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("coefficients must be a non-empty 1-d sequence")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class AnalyticFunction:
    """Polynomial element of the disk algebra, ``f(z) = sum c_k z**k``."""

    coeffs: np.ndarray = field()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))

    @property
    def degree_bound(self) -> int:
        return self.coeffs.size - 1

    @classmethod
    def constant(cls, c) -> "AnalyticFunction":
        return cls([c])

    @classmethod
    def identity(cls) -> "AnalyticFunction":
        return cls([0.0, 1.0])

    def __call__(self, z):
        return evaluate(self, z)

    def __add__(self, other):
        return add(self, _lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, scale(_lift(other), -1.0))

    def __rsub__(self, other):
        return add(_lift(other), scale(self, -1.0))

    def __mul__(self, other):
        if isinstance(other, AnalyticFunction):
            return multiply(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return scale(self, -1.0)

    def derivative(self) -> "AnalyticFunction":
        if self.degree_bound == 0:
            return AnalyticFunction([0.0])
        k = np.arange(1, self.coeffs.size)
        return AnalyticFunction(k * self.coeffs[1:])

    def on_circle(self, theta) -> np.ndarray:
        """Boundary values at angles ``theta`` (no domain check needed)."""
        z = np.exp(1j * np.asarray(theta, dtype=float))
        return np.polyval(self.coeffs[::-1], z)

    def allclose(self, other: "AnalyticFunction", atol: float = 1e-12) -> bool:
        n = max(self.coeffs.size, other.coeffs.size)
        a = np.zeros(n, complex)
        b = np.zeros(n, complex)
        a[: self.coeffs.size] = self.coeffs
        b[: other.coeffs.size] = other.coeffs
        return bool(np.max(np.abs(a - b)) <= atol)

    def to_json(self) -> dict:
        return {"coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "AnalyticFunction":
        if isinstance(obj, (str, bytes)):
            obj = json.loads(obj)
        return cls([complex(re, im) for re, im in obj["coeffs"]])

    def __repr__(self):
        return f"AnalyticFunction(degree={self.degree_bound})"


def _lift(g) -> AnalyticFunction:
    if isinstance(g, AnalyticFunction):
        return g
    return AnalyticFunction.constant(g)


@dataclass(frozen=True, eq=False)
class FiniteFunction:
    """Element of C(X) for X = {0, ..., n-1}."""

    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.values, dtype=complex)).copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def normalized(self) -> "FiniteFunction":
        return FiniteFunction(self.values / self.sup_norm)


@dataclass(frozen=True)
class CircleGrid:
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("grid size must be positive")

    @property
    def theta(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.size) / self.size

    @property
    def nodes(self) -> np.ndarray:
        return np.exp(1j * self.theta)

    @classmethod
    def default_for(cls, degree: int) -> "CircleGrid":
        return cls(max(256, 32 * degree))


def evaluate(f: AnalyticFunction, z):
    """Horner evaluation of ``f`` at points of the closed unit disk."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1 + DOMAIN_TOL):
        raise DomainError("evaluation point outside the closed unit disk")
    acc = np.zeros_like(z) + f.coeffs[-1]
    for c in f.coeffs[-2::-1]:
        acc = acc * z + c
    return acc[()] if acc.ndim == 0 else acc


def add(f: AnalyticFunction, g: AnalyticFunction) -> AnalyticFunction:
    n = max(f.coeffs.size, g.coeffs.size)
    out = np.zeros(n, complex)
    out[: f.coeffs.size] += f.coeffs
    out[: g.coeffs.size] += g.coeffs
    return AnalyticFunction(out)


def multiply(f: AnalyticFunction, g: AnalyticFunction) -> AnalyticFunction:
    return AnalyticFunction(np.convolve(f.coeffs, g.coeffs))


def scale(f: AnalyticFunction, c) -> AnalyticFunction:
    return AnalyticFunction(complex(c) * f.coeffs)


def grid_values(f: AnalyticFunction, grid: CircleGrid) -> np.ndarray:
    """Values of ``f`` at the grid nodes, via an FFT when the grid is fine enough."""
    m = grid.size
    if f.coeffs.size <= m:
        padded = np.zeros(m, complex)
        padded[: f.coeffs.size] = f.coeffs
        return np.fft.ifft(padded) * m
    folded = np.zeros(m, complex)
    np.add.at(folded, np.arange(f.coeffs.size) % m, f.coeffs)
    return np.fft.ifft(folded) * m


def certified_sup_norm(f: AnalyticFunction, grid: CircleGrid | None = None):
    """Bracket ``||f||`` on the circle by the grid maximum and Bernstein's inequality.

    Between adjacent nodes ``|f|`` can exceed the grid maximum by at most
    ``(pi/M) ||f'|| <= (pi N / M) ||f||``, hence ``upper = lower / (1 - pi N / M)``.
    """
    n = f.degree_bound
    grid = grid or CircleGrid.default_for(n)
    m = grid.size
    if n > 0 and m <= np.pi * n:
        raise GridTooCoarse(f"grid of {m} nodes too coarse for degree {n}")
    lower = float(np.max(np.abs(grid_values(f, grid))))
    upper = lower / (1.0 - np.pi * n / m)
    return lower, upper


def sharp_sup_norm(f: AnalyticFunction, rtol: float = 1e-10, max_rounds: int = 6):
    """Tighter certified bracket ``(lower, upper)`` with ``upper <= lower*(1+rtol)``.

    Works with ``T = |f|**2``, a real trigonometric polynomial of degree N with
    ``||T''|| <= N**2 ||T||``. On a cell of width h, T exceeds the larger
    endpoint value by at most ``h**2/8 * ||T''||``. Cells whose bound is not
    yet below the target are subdivided and re-evaluated.
    """
    n = f.degree_bound
    if n == 0:
        v = abs(complex(f.coeffs[0]))
        return v, v
    grid = CircleGrid(1 << int(np.ceil(np.log2(max(256, 32 * n)))))
    m = grid.size
    lower0, upper0 = certified_sup_norm(f, grid)
    t_bound = upper0**2
    curv = n**2 * t_bound

    h = 2 * np.pi / m
    starts = grid.theta
    vals = np.abs(grid_values(f, grid)) ** 2
    left, right = vals, np.roll(vals, -1)
    best = float(vals.max())
    upper_sq = t_bound
    cleared = 0.0
    for _ in range(max_rounds):
        cell_bound = np.maximum(left, right) + h * h / 8 * curv
        upper_sq = min(t_bound, max(cleared, float(cell_bound.max())))
        target = best * (1 + rtol) ** 2
        if upper_sq <= target:
            break
        hot = cell_bound > target
        if not hot.all():
            cleared = max(cleared, float(cell_bound[~hot].max()))
        k = 64
        sub = starts[hot][:, None] + h * np.arange(k + 1)[None, :] / k
        sv = np.abs(f.on_circle(sub)) ** 2
        best = max(best, float(sv.max()))
        starts = sub[:, :-1].ravel()
        left = sv[:, :-1].ravel()
        right = sv[:, 1:].ravel()
        h = h / k
    lower = float(np.sqrt(best))
    upper = float(np.sqrt(max(upper_sq, best)))
    return lower, max(upper, lower)


def analytic_projection(samples, tail_tol: float = 1e-9, max_coeffs: int = MAX_COEFFS):
    """Taylor coefficients of a function from its values on the M-th roots of unity.

    DFT indices ``[0, 3M/4)`` are read as nonnegative frequencies (the upper
    part absorbs aliasing from the decaying tail); indices ``[3M/4, M)`` must
    carry less than ``tail_tol`` in total, otherwise the data has genuine
    negative-frequency content. Coefficients are kept through the last one of
    magnitude ``>= tail_tol``. Returns ``(f, error)`` where ``error`` is the
    sum of discarded magnitudes.
    """
    samples = np.asarray(samples, dtype=complex)
    m = samples.size
    c = np.fft.fft(samples) / m
    band = (3 * m) // 4
    negative = float(np.sum(np.abs(c[band:])))
    if negative > tail_tol:
        raise ProjectionError(
            f"negative-frequency energy {negative:.3e} exceeds tail_tol {tail_tol:.1e}"
        )
    big = np.nonzero(np.abs(c[:band]) >= tail_tol)[0]
    keep = int(big[-1]) + 1 if big.size else 1
    if big.size and keep >= band:
        raise ProjectionError("coefficients do not decay below tail_tol within the grid")
    if keep > max_coeffs:
        raise ProjectionError(f"projection needs {keep} coefficients (cap {max_coeffs})")
    error = float(np.sum(np.abs(c[keep:])))
    return AnalyticFunction(c[:keep]), error


def write_grid_csv(path, theta, values) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        for k, (t, v) in enumerate(zip(theta, values)):
            w.writerow([k, f"{t:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"])


def read_grid_csv(path):
    theta, values = [], []
    with open(Path(path), newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            theta.append(float(row[1]))
            values.append(complex(float(row[2]), float(row[3])))
    return np.array(theta), np.array(values)
