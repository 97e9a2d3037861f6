"""
Functions sampled on weighted grids, with discrete L_p norms.

Every function in the package is a vector of values on a fixed set of
grid points. The norm is the weighted quadrature

    ||f||_p = (sum_i w_i |f_i|^p)^(1/p),

so that torus grids with Lebesgue weights 2*pi/m reproduce integrals over
[0, 2*pi) and Monte Carlo grids with weights 1/m give L_p(P) norms for an
empirical input distribution P.
"""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainMismatchError

PROBABILITY = "probability"
LEBESGUE = "lebesgue"

DEFAULT_TORUS_POINTS = 4096
DEFAULT_MC_POINTS = 2000


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Sample points with nonnegative quadrature or probability weights.

    Parameters
    ----------
    points : array_like, shape (m, d) or (m,)
        Grid coordinates. One-dimensional input is treated as d = 1.
    weights : array_like, shape (m,)
        Nonnegative weights. They must sum to one when ``measure_kind`` is
        ``"probability"``.
    measure_kind : {"probability", "lebesgue"}
    """

    points: np.ndarray
    weights: np.ndarray
    measure_kind: str = PROBABILITY
    seed: int | None = field(default=None)

    def __post_init__(self):
        points = _frozen(self.points)
        if points.ndim == 1:
            points = _frozen(points[:, None])
        weights = _frozen(self.weights)
        if points.ndim != 2 or weights.ndim != 1:
            raise ValueError("points must be (m, d) and weights (m,)")
        if len(weights) != len(points):
            raise ValueError(
                f"{len(points)} points but {len(weights)} weights")
        if len(weights) == 0:
            raise ValueError("empty domain")
        if not np.all(np.isfinite(points)) or not np.all(np.isfinite(weights)):
            raise ValueError("non-finite points or weights")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        if self.measure_kind not in (PROBABILITY, LEBESGUE):
            raise ValueError(f"unknown measure_kind {self.measure_kind!r}")
        if self.measure_kind == PROBABILITY and abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(
                f"probability weights sum to {weights.sum()!r}, not 1")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self):
        return len(self.weights)

    @property
    def dim(self):
        return self.points.shape[1]

    def same_as(self, other):
        if self is other:
            return True
        return (self.measure_kind == other.measure_kind
                and self.points.shape == other.points.shape
                and np.array_equal(self.points, other.points)
                and np.array_equal(self.weights, other.weights))


def torus_domain(m=DEFAULT_TORUS_POINTS):
    """Uniform grid on [0, 2*pi) with Lebesgue weights 2*pi/m."""
    t = 2.0 * np.pi * np.arange(m) / m
    return GridDomain(t, np.full(m, 2.0 * np.pi / m), LEBESGUE)


def monte_carlo_domain(d, m=DEFAULT_MC_POINTS, seed=0, low=-1.0, high=1.0):
    """``m`` i.i.d. uniform points in the cube [low, high]^d, weights 1/m."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(low, high, size=(m, d))
    return GridDomain(pts, np.full(m, 1.0 / m), PROBABILITY, seed=seed)


def discrete_domain(weights, measure_kind=PROBABILITY):
    """A domain of ``len(weights)`` abstract points 0, 1, ... ."""
    weights = np.asarray(weights, dtype=float)
    return GridDomain(np.arange(len(weights), dtype=float), weights,
                      measure_kind)


@dataclass(frozen=True, eq=False)
class NormSpec:
    """The discrete L_p norm on ``domain``; 1 <= p < inf."""

    p: float
    domain: GridDomain

    def __post_init__(self):
        if not (1.0 <= self.p < np.inf):
            raise ValueError(f"p must lie in [1, inf), got {self.p!r}")


@dataclass(frozen=True, eq=False)
class FunctionVector:
    """Values of a function at the points of ``domain``."""

    values: np.ndarray
    domain: GridDomain

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (self.domain.size,):
            raise ValueError(
                f"expected {self.domain.size} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("function values must be finite")
        object.__setattr__(self, "values", values)

    def __add__(self, other):
        _check_same(self.domain, other.domain)
        return FunctionVector(self.values + other.values, self.domain)

    def __sub__(self, other):
        _check_same(self.domain, other.domain)
        return FunctionVector(self.values - other.values, self.domain)

    def __mul__(self, c):
        return FunctionVector(float(c) * self.values, self.domain)

    __rmul__ = __mul__

    def __neg__(self):
        return FunctionVector(-self.values, self.domain)


def function_from_callable(fn, domain):
    """Evaluate ``fn`` at every grid point; 1-d domains pass a flat array."""
    x = domain.points[:, 0] if domain.dim == 1 else domain.points
    return FunctionVector(np.broadcast_to(fn(x), (domain.size,)), domain)


def zero(domain):
    return FunctionVector(np.zeros(domain.size), domain)


def _check_same(a, b):
    if not a.same_as(b):
        raise DomainMismatchError("functions are sampled on different domains")


def lp_norms(values, weights, p):
    """Row-wise weighted l_p norms of a (..., m) array."""
    a = np.abs(values)
    if p == 2:
        return np.sqrt((a * a) @ weights)
    if p == 1:
        return a @ weights
    return (a ** p @ weights) ** (1.0 / p)


def norm(f, spec):
    """Discrete L_p(P) norm of ``f``."""
    _check_same(f.domain, spec.domain)
    return float(lp_norms(f.values, spec.domain.weights, spec.p))


def distances_to(values, target, spec):
    """Distances from each row of ``values`` (n, m) to ``target`` (m,)."""
    return lp_norms(values - target, spec.domain.weights, spec.p)


def dist_to_set(f, members: Sequence[FunctionVector], spec):
    """Distance from ``f`` to the nearest member and its index.

    Ties go to the lowest index.
    """
    if len(members) == 0:
        raise ValueError("distance to an empty set is undefined")
    _check_same(f.domain, spec.domain)
    for s in members:
        _check_same(s.domain, spec.domain)
    d = distances_to(np.stack([s.values for s in members]), f.values, spec)
    i = int(np.argmin(d))
    return float(d[i]), i


def combine(members: Sequence[FunctionVector], coeffs):
    """Pointwise linear combination sum_i coeffs[i] * members[i]."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 1 or len(coeffs) != len(members):
        raise ValueError(
            f"{len(members)} members but {coeffs.size} coefficients")
    if len(members) == 0:
        raise ValueError("cannot combine an empty sequence")
    domain = members[0].domain
    for s in members[1:]:
        _check_same(s.domain, domain)
    return FunctionVector(coeffs @ np.stack([s.values for s in members]),
                          domain)


def inner(f_values, g_values, weights):
    """Weighted inner product; broadcasts over leading axes of either input."""
    return (f_values * g_values) @ weights
