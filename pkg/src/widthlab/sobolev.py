"""
Periodic Sobolev balls on the circle and their trigonometric widths.

A function on [0, 2*pi) is held by its Fourier coefficients

    f(t) = a0 + sum_k (a_k cos kt + b_k sin kt),

so that ||f^(r)||_2^2 = pi * sum_k k^(2r) (a_k^2 + b_k^2) and every width
statement can be checked exactly in coefficient space. Grid quadrature is
used only as an independent cross-check.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .convex_approx import convex_fit, linear_fit
from .errors import InvariantViolation, UnsupportedError
from .function_space import FunctionVector, NormSpec, torus_domain

DEFAULT_M = 256
DEFAULT_SERIES_M = 10_000
CLAIMED_EXTREMAL_MASS = math.pi / math.sqrt(3)


@dataclass(frozen=True, eq=False)
class FourierFunction:
    a0: float
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("cosine and sine coefficients must match in length")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))
                and math.isfinite(self.a0)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a0", float(self.a0))

    @property
    def cutoff(self):
        return len(self.a)

    @classmethod
    def single(cls, freq, kind, amplitude, cutoff=None):
        """amplitude * sin(freq t) or amplitude * cos(freq t)."""
        size = max(freq, cutoff or 0)
        a, b = np.zeros(size), np.zeros(size)
        if freq == 0:
            return cls(amplitude, a, b)
        (b if kind == "sin" else a)[freq - 1] = amplitude
        return cls(0.0, a, b)

    def evaluate(self, domain):
        t = domain.points[:, 0]
        k = np.arange(1, self.cutoff + 1)
        kt = np.outer(t, k)
        vals = self.a0 + np.cos(kt) @ self.a + np.sin(kt) @ self.b
        return FunctionVector(vals, domain)

    def l2_norm(self):
        """Exact L2 norm over one period (Parseval)."""
        return math.sqrt(2 * math.pi * self.a0 ** 2
                         + math.pi * float(self.a @ self.a + self.b @ self.b))

    def truncate(self, below):
        """Keep the mean and frequencies < ``below``."""
        a, b = self.a.copy(), self.b.copy()
        a[max(below - 1, 0):] = 0.0
        b[max(below - 1, 0):] = 0.0
        return FourierFunction(self.a0, a, b)


@dataclass(frozen=True)
class SobolevBallSpec:
    """B_2^r(T, C): ||f^(r)||_2 <= 1 and |integral of f| <= C."""

    r: int
    C: float

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if not self.C > 2 * math.pi:
            raise ValueError("C must exceed 2*pi")

    @property
    def mean_bound(self):
        return self.C / (2 * math.pi)


def sobolev_seminorm(f, r):
    if r < 1:
        raise ValueError("r must be >= 1")
    k = np.arange(1, f.cutoff + 1, dtype=float)
    return math.sqrt(math.pi * float(k ** (2 * r) @ (f.a ** 2 + f.b ** 2)))


def ball_membership(f, spec, domain=None, tol=1e-12):
    """Seminorm <= 1 and |integral f| <= C, up to ``tol``.

    The integral is 2*pi*a0; if ``domain`` is given it is taken by quadrature
    on that grid instead.
    """
    if domain is None:
        integral = 2 * math.pi * f.a0
    else:
        integral = float(f.evaluate(domain).values @ domain.weights)
    return (sobolev_seminorm(f, spec.r) <= 1.0 + tol
            and abs(integral) <= spec.C + tol)


def trig_basis(n_atoms, domain, scale=1.0):
    """The first ``n_atoms`` of 1, sin t, cos t, sin 2t, cos 2t, ... ."""
    t = domain.points[:, 0]
    out = []
    for i in range(n_atoms):
        freq = (i + 1) // 2
        vals = np.ones_like(t) if i == 0 else (
            np.sin(freq * t) if i % 2 == 1 else np.cos(freq * t))
        out.append(FunctionVector(scale * vals, domain))
    return out


def witness(spec, n_atoms):
    """Ball member farthest from span of the first ``n_atoms`` trig atoms.

    The span holds every frequency below m = ceil(n_atoms / 2), plus sin(mt)
    when n_atoms is even, so the witness is the next unused atom scaled to
    seminorm one: error m^(-r).
    """
    m = (n_atoms + 1) // 2
    if n_atoms % 2 == 1:
        kind = "sin"
    else:
        m = n_atoms // 2
        kind = "cos"
    amp = 1.0 / (math.sqrt(math.pi) * m ** spec.r)
    return FourierFunction.single(m, kind, amp)


@dataclass(frozen=True, eq=False)
class TruncationWidth:
    n: int
    analytic: float
    coefficient_error: float
    quadrature_error: float
    worst_case: FourierFunction


def truncation_width(spec, n, domain=None):
    """Worst-case error of projecting the ball onto the (2n-1)-dim trig span.

    The span is {1, sin t, cos t, ..., sin (n-1)t, cos (n-1)t}; the error is
    n^(-r), attained by sin(nt) / (sqrt(pi) n^r). Returns the analytic value,
    the witness's residual computed from its coefficients, and the same
    residual from a least-squares projection on ``domain``'s grid.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    domain = domain or torus_domain()
    f = witness(spec, 2 * n - 1)
    tail = f.truncate(n)
    coeff_err = FourierFunction(0.0, f.a - tail.a, f.b - tail.b).l2_norm()
    norm = NormSpec(2, domain)
    quad_err = linear_fit(f.evaluate(domain), trig_basis(2 * n - 1, domain),
                          norm).error
    return TruncationWidth(n, float(n) ** (-spec.r), coeff_err, quad_err, f)


def staircase_error(spec, n, domain=None):
    """Residual of cos(nt)/(sqrt(pi) n^r) after projecting onto the 2n-dim span.

    Adding sin(nt) to the optimal (2n-1)-dim subspace does not help this
    ball member, so the error stays n^(-r).
    """
    domain = domain or torus_domain()
    f = witness(spec, 2 * n)
    return linear_fit(f.evaluate(domain), trig_basis(2 * n, domain),
                      NormSpec(2, domain)).error


# -- extremal l1 coefficient mass --------------------------------------------

@dataclass(frozen=True)
class ExtremalMass:
    cutoff: int
    t: float
    mass: float
    oracle_mass: float
    limit_mass: float
    claimed_mass: float
    claimed_constraint_value: float

    def coefficient(self, k):
        """a_k = b_k = t / k^2 for 1 <= k <= cutoff."""
        return self.t / k ** 2

    def to_dict(self):
        return {
            "cutoff": self.cutoff, "t": self.t, "mass": self.mass,
            "oracle_mass": self.oracle_mass, "limit_mass": self.limit_mass,
            "claimed_mass": self.claimed_mass,
            "claimed_constraint_value": self.claimed_constraint_value,
            "claimed_value_feasible": self.claimed_constraint_value <= 1.0,
        }


def _project_ellipsoid(y, q):
    """Euclidean projection onto {x : sum q x^2 <= 1}."""
    if float(q @ (y * y)) <= 1.0:
        return y
    g = lambda mu: float(q @ (y / (1 + mu * q)) ** 2) - 1.0
    hi = 1.0
    while g(hi) > 0:
        hi *= 2.0
    mu = brentq(g, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                maxiter=500)
    return y / (1 + mu * q)


def projected_gradient_mass(cutoff, step=1.0, max_iter=10_000, tol=1e-15):
    """Maximize sum |a_k| + |b_k| over pi sum k^2 (a_k^2 + b_k^2) <= 1.

    Projected gradient ascent on the nonnegative orthant (the objective is
    symmetric under sign flips), started from a flat feasible point.
    """
    k = np.arange(1, cutoff + 1, dtype=float)
    q = np.concatenate([math.pi * k ** 2, math.pi * k ** 2])
    x = _project_ellipsoid(np.full(2 * cutoff, 1e-3), q)
    for _ in range(max_iter):
        x_new = _project_ellipsoid(np.maximum(x + step, 0.0), q)
        if np.abs(x_new - x).max() < tol:
            x = x_new
            break
        x = x_new
    return float(x.sum()), x


def extremal_l1_mass(r=1, cutoff=DEFAULT_SERIES_M, check_tol=1e-6):
    """Largest coefficient l1 mass in the r = 1 seminorm ball, frequencies <= cutoff.

    Stationarity of the Lagrangian gives a_k = b_k = t / k^2 with t fixed by
    saturating the constraint: t = 1 / sqrt(2 pi H) and mass 2 t H where
    H = sum 1/k^2. An independent projected-gradient solve must agree to
    ``check_tol``. The candidate coefficients sqrt(3)/(pi k^2), with mass
    pi/sqrt(3), are evaluated too: ``claimed_constraint_value`` is their
    seminorm squared, which exceeds 1, so that candidate is infeasible.
    """
    if r != 1:
        raise UnsupportedError("extremal_l1_mass is implemented for r = 1")
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    k = np.arange(1, cutoff + 1, dtype=float)
    H = float(np.sum(1.0 / k ** 2))
    t = 1.0 / math.sqrt(2 * math.pi * H)
    mass = 2 * t * H
    oracle, _ = projected_gradient_mass(cutoff)
    if abs(oracle - mass) > check_tol:
        raise InvariantViolation(
            f"Lagrange mass {mass!r} and projected-gradient mass {oracle!r} "
            f"disagree")
    claimed_coef = math.sqrt(3) / (math.pi * k ** 2)
    claimed_seminorm_sq = math.pi * float(k ** 2 @ (2 * claimed_coef ** 2))
    return ExtremalMass(cutoff, t, mass, oracle, math.sqrt(math.pi / 3),
                        CLAIMED_EXTREMAL_MASS, claimed_seminorm_sq)


def extremal_function(spec, cutoff=DEFAULT_M, mean_sign=1.0):
    """Ball member with maximal mean and maximal coefficient mass up to ``cutoff``."""
    k = np.arange(1, cutoff + 1, dtype=float)
    H = float(np.sum(1.0 / k ** 2))
    t = 1.0 / math.sqrt(2 * math.pi * H)
    coef = t / k ** 2
    if spec.r != 1:
        coef = coef / math.sqrt(float(k ** (2 * spec.r) @ (2 * coef ** 2)) * math.pi)
    return FourierFunction(mean_sign * spec.mean_bound, coef, coef)


def default_lambda(spec):
    """Smallest scale satisfying the width_comparison precondition."""
    return math.sqrt(math.pi / 3) + spec.mean_bound


def random_ball_member(spec, rng, cutoff=64):
    """A random member of the ball: random phases, random decay, random radius."""
    k = np.arange(1, cutoff + 1, dtype=float)
    decay = k ** -rng.uniform(0.5, 3.0)
    a = rng.normal(size=cutoff) * decay
    b = rng.normal(size=cutoff) * decay
    f = FourierFunction(0.0, a, b)
    s = sobolev_seminorm(f, spec.r)
    radius = rng.uniform(0.0, 1.0)
    a0 = rng.uniform(-1.0, 1.0) * spec.mean_bound
    return FourierFunction(a0, a * radius / s, b * radius / s)


@dataclass(frozen=True, eq=False)
class WidthComparison:
    n: int
    Lambda: float
    convex_error: float
    linear_error: float
    convex_errors: np.ndarray
    linear_errors: np.ndarray
    precondition_met: bool


def comparison_targets(spec, n, n_random=12, seed=0, cutoff=64):
    """Witness, both extremal-mass members and random members of the ball."""
    rng = np.random.default_rng([int(seed), int(n)])
    targets = [witness(spec, n),
               extremal_function(spec, cutoff, 1.0),
               extremal_function(spec, cutoff, -1.0)]
    targets += [random_ball_member(spec, rng, cutoff) for _ in range(n_random)]
    return targets


def width_comparison(spec, n, Lambda, domain=None, targets=None, n_random=12,
                     seed=0, tol=1e-12):
    """Convex versus linear approximation with the first ``n`` trig atoms.

    The convex fit uses the atoms scaled by ``Lambda``, i.e. combinations
    with coefficient l1 mass at most ``Lambda``. Errors are maxima over the
    targets; per-target errors are kept as well.
    """
    if Lambda <= 0:
        raise ValueError("Lambda must be positive")
    domain = domain or torus_domain()
    norm = NormSpec(2, domain)
    if targets is None:
        targets = comparison_targets(spec, n, n_random, seed)
    lin_basis = trig_basis(n, domain)
    cvx_basis = trig_basis(n, domain, Lambda)
    lin, cvx = [], []
    for f in targets:
        fv = f.evaluate(domain)
        lin.append(linear_fit(fv, lin_basis, norm).error)
        cvx.append(convex_fit(fv, cvx_basis, n, norm, tol=tol).error)
    lin, cvx = np.array(lin), np.array(cvx)
    return WidthComparison(n, float(Lambda), float(cvx.max()), float(lin.max()),
                           cvx, lin, Lambda >= default_lambda(spec))
