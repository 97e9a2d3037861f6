"""
Approximation by absolutely convex and by linear combinations.

``convex_fit`` approximates a target from the symmetric l1 ball
{sum c_i phi_i : sum |c_i| <= 1} with at most ``n_budget`` active atoms;
``linear_fit`` projects onto the span. The two proof constructions
``part1_shifted_core`` and ``part2_collapse`` turn an n-term approximation
into an (n+1)-element core that represents the target exactly, and collapse
a combination of dictionary members onto the centers of a cover.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import linprog, minimize

from .errors import DomainMismatchError, InvariantViolation, UnsupportedError
from .function_space import FunctionVector, lp_norms
from .covering import assign_to_centers, member_values

L1_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class Combination:
    """Indices into a basis and the coefficients attached to them."""

    indices: tuple
    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        if coeffs.shape != (len(self.indices),):
            raise ValueError("one coefficient per index is required")
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("indices must be distinct")
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def l1_mass(self):
        return float(np.abs(self.coefficients).sum())

    def dense(self, size):
        out = np.zeros(size)
        out[list(self.indices)] = self.coefficients
        return out

    def evaluate(self, values):
        """sum_i c_i values[indices[i]] for a (N, m) member array."""
        if not self.indices:
            return np.zeros(values.shape[1])
        return self.coefficients @ values[list(self.indices)]


class ConvexCombination(Combination):
    """A combination with l1 mass at most one (signed coefficients allowed)."""

    def __post_init__(self):
        super().__post_init__()
        if self.l1_mass > 1.0 + L1_SLACK:
            raise ValueError(f"l1 mass {self.l1_mass!r} exceeds 1")


@dataclass(frozen=True, eq=False)
class ApproxResult:
    combination: Combination
    error: float
    iterations: int
    converged: bool


def _stack(basis: Sequence[FunctionVector], spec):
    if len(basis) == 0:
        raise ValueError("basis is empty")
    for phi in basis:
        if not phi.domain.same_as(spec.domain):
            raise DomainMismatchError("basis and norm live on different domains")
    return np.stack([phi.values for phi in basis])


def _residual_norm(f_values, values, comb, spec):
    return float(lp_norms(f_values - comb.evaluate(values),
                          spec.domain.weights, spec.p))


# -- l1-ball constrained least squares ---------------------------------------

def project_l1_ball(v, radius=1.0):
    """Euclidean projection of ``v`` onto {x : ||x||_1 <= radius} (sort based)."""
    if np.abs(v).sum() <= radius:
        return v.copy()
    u = np.sort(np.abs(v))[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, len(u) + 1)
    rho = np.nonzero(u * ks > css - radius)[0][-1]
    theta = (css[rho] - radius) / (rho + 1.0)
    return np.sign(v) * np.maximum(np.abs(v) - theta, 0.0)


def _kkt_violation(G, b, c, radius):
    g = b - G @ c
    scale = max(1.0, float(np.abs(b).max()), float(np.abs(np.diag(G)).max()))
    mass = np.abs(c).sum()
    if mass < radius * (1 - 1e-9):
        return float(np.abs(g).max()) / scale
    mu = float(np.abs(g).max())
    on = np.abs(c) > 0
    # active coordinates must carry correlation mu * sign(c)
    viol = np.abs(g[on] - mu * np.sign(c[on])).max() if np.any(on) else 0.0
    return float(viol) / scale


def _homotopy(G, b, radius):
    k = len(b)
    c = np.zeros(k)
    usable = np.diag(G) > 0
    if radius <= 0 or not np.any(usable):
        return c
    rho = b.copy()
    cand = np.nonzero(usable)[0]
    j = int(cand[np.argmax(np.abs(rho[cand]))])
    mu = abs(rho[j])
    if mu == 0.0:
        return c
    tiny = 1e-14 * mu
    active = [j]
    signs = {j: np.sign(rho[j])}
    excluded = set(np.nonzero(~usable)[0].tolist())
    just_dropped = None
    for _ in range(20 * k + 20):
        A = np.array(active)
        s = np.array([signs[i] for i in active])
        dA = np.linalg.solve(G[np.ix_(A, A)], s)
        a = G[:, A] @ dA
        sd = float(s @ dA)
        mass = float(np.abs(c).sum())
        best = (mu, "mu", None)
        if sd > 0:
            g = (radius - mass) / sd
            if g < best[0]:
                best = (max(g, 0.0), "l1", None)
        for i in range(k):
            if i in signs or i in excluded:
                continue
            # ties join at a zero-length step, but a just-dropped atom may not
            floor = tiny if i == just_dropped else -tiny
            for num, den, sgn in ((mu - rho[i], 1.0 - a[i], 1.0),
                                  (mu + rho[i], 1.0 + a[i], -1.0)):
                if den > 1e-12 and num / den > floor:
                    g = max(num / den, 0.0)
                    if g < best[0]:
                        best = (g, "join", (i, sgn))
        for pos, i in enumerate(active):
            if dA[pos] != 0.0:
                g = -c[i] / dA[pos]
                if tiny < g < best[0]:
                    best = (g, "drop", i)
        gamma, kind, arg = best
        just_dropped = None
        c[A] += gamma * dA
        mu -= gamma
        rho = b - G @ c
        if kind in ("l1", "mu"):
            return c
        if kind == "join":
            i, sgn = arg
            trial = active + [i]
            sub = G[np.ix_(trial, trial)]
            if np.linalg.matrix_rank(sub) < len(trial):
                excluded.add(i)
                continue
            active = trial
            signs[i] = sgn
        else:
            c[arg] = 0.0
            just_dropped = arg
            active.remove(arg)
            del signs[arg]
            if not active:
                return c
    raise RuntimeError("homotopy did not terminate")


def _projected_gradient(G, b, radius, c0, iters=20_000):
    L = float(np.linalg.eigvalsh(G).max())
    if L <= 0:
        return c0
    x = c0.copy()
    y = x.copy()
    t = 1.0
    obj = lambda z: 0.5 * z @ G @ z - b @ z
    best, best_obj = x.copy(), obj(x)
    for _ in range(iters):
        x_new = project_l1_ball(y - (G @ y - b) / L, radius)
        t_new = 0.5 * (1 + math.sqrt(1 + 4 * t * t))
        y = x_new + (t - 1) / t_new * (x_new - x)
        x, t = x_new, t_new
        o = obj(x)
        if o < best_obj - 1e-18 * (1 + abs(best_obj)):
            best, best_obj = x.copy(), o
        elif o > best_obj:
            # restart momentum
            y, t = best.copy(), 1.0
    return best


def l1_ball_lstsq(G, b, radius=1.0):
    """Minimize 1/2 c'Gc - b'c subject to ||c||_1 <= radius.

    ``G`` is a positive semidefinite Gram matrix. The Lasso homotopy follows
    the piecewise-linear solution path from c = 0 until the l1 budget or the
    unconstrained optimum is reached; accelerated projected gradient takes
    over if the path breaks down on a degenerate Gram matrix.
    """
    G = np.asarray(G, dtype=float)
    b = np.asarray(b, dtype=float)
    try:
        c = _homotopy(G, b, radius)
        mass = np.abs(c).sum()
        if mass > radius:
            c *= radius / mass
        if _kkt_violation(G, b, c, radius) < 1e-9:
            return c
    except (np.linalg.LinAlgError, RuntimeError):
        c = np.zeros(len(b))
    return _projected_gradient(G, b, radius, c)


# -- fitting -----------------------------------------------------------------

def convex_fit(f, basis, n_budget, spec, tol=1e-10, max_iter=1000):
    """Best approximation of ``f`` from the symmetric l1 hull of ``basis``.

    Conditional gradient over {+phi_i, -phi_i}: each step adds the signed atom
    most aligned with the residual. For p = 2 every step re-solves the
    l1-constrained least squares over the active atoms exactly (fully
    corrective). Other p use the same greedy atom choice with the p-norm
    derivative of the residual, followed by an exact re-solve over the
    active atoms (a linear program for p = 1). At most ``n_budget`` atoms
    carry nonzero coefficients.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if n_budget < 1:
        raise ValueError("n_budget must be >= 1")
    Phi = _stack(basis, spec)
    if not f.domain.same_as(spec.domain):
        raise DomainMismatchError("target and norm live on different domains")
    if spec.p == 2:
        res = _fit_l2(f.values, Phi, spec, n_budget, tol, max_iter)
    else:
        res = _fit_lp(f.values, Phi, spec, n_budget, tol, max_iter)
    return res


def _polish(fv, Phi_A, sw, c):
    """Re-solve on the support of ``c`` with QR least squares.

    Keeps the support and sign pattern; on the l1 boundary the mass
    constraint becomes the equality sign(c).c = 1. Gram-matrix solves lose
    half the digits of the residual, this recovers them.
    """
    A = (Phi_A * sw).T
    y = fv * sw
    s = np.sign(c)
    if np.abs(c).sum() < 1.0 - 1e-9:
        cand, *_ = np.linalg.lstsq(A, y, rcond=None)
    else:
        k = len(c)
        c0 = s / k
        if k == 1:
            cand = c0
        else:
            # orthonormal basis of the null space of s^T
            q, _ = np.linalg.qr(np.column_stack([s, np.eye(k)[:, :k - 1]]))
            Z = q[:, 1:]
            z, *_ = np.linalg.lstsq(A @ Z, y - A @ c0, rcond=None)
            cand = c0 + Z @ z
    if np.any(np.sign(cand) != s) or np.abs(cand).sum() > 1.0 + L1_SLACK:
        return c
    before = np.linalg.norm(y - A @ c)
    return cand if np.linalg.norm(y - A @ cand) < before else c


def _fit_l2(fv, Phi, spec, n_budget, tol, max_iter):
    w = spec.domain.weights
    Pw = Phi * w
    G = Pw @ Phi.T
    b = Pw @ fv
    ff = float(fv * fv @ w)
    k = len(Phi)
    active, coef = [], np.zeros(0)
    error = math.sqrt(ff)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        rho = b - G[:, active] @ coef if active else b.copy()
        gap = float(np.abs(rho).max() - rho[active] @ coef) if active else float(np.abs(rho).max())
        if gap <= 0.5 * tol * error + 1e-13 * ff:
            converged = True
            break
        if len(active) >= n_budget:
            # the active set is already solved exactly
            converged = True
            break
        free = np.ones(k, dtype=bool)
        free[active] = False
        cand = np.nonzero(free)[0]
        j = int(cand[np.argmax(np.abs(rho[cand]))])
        trial = active + [j]
        c = l1_ball_lstsq(G[np.ix_(trial, trial)], b[trial])
        keep = c != 0.0
        new_active = [a for a, kp in zip(trial, keep) if kp]
        new_coef = c[keep]
        comb = Combination(tuple(new_active), new_coef)
        new_error = _residual_norm(fv, Phi, comb, spec)
        improvement = error - new_error
        if improvement < 0:
            break
        active, coef, error = new_active, new_coef, new_error
        if improvement < tol:
            converged = True
            break
    if active:
        coef = _polish(fv, Phi[active], np.sqrt(w), coef)
    comb = ConvexCombination(tuple(active), coef)
    return ApproxResult(comb, _residual_norm(fv, Phi, comb, spec), it, converged)


def _restricted_lp(fv, Phi_A, spec, c0):
    """Exact minimizer of the weighted p-norm residual over the l1 ball.

    p = 1 is a linear program in (u, v, e) with c = u - v and |r| <= e;
    p > 1 is smooth and goes to SLSQP on (u, v) >= 0, sum(u + v) <= 1,
    warm-started at ``c0``.
    """
    w = spec.domain.weights
    p = spec.p
    a, m = Phi_A.shape
    if p == 1:
        At = sparse.csr_matrix(Phi_A.T)
        I = sparse.identity(m, format="csr")
        A_ub = sparse.vstack([
            sparse.hstack([At, -At, -I]),
            sparse.hstack([-At, At, -I]),
            sparse.hstack([sparse.csr_matrix(np.ones((1, 2 * a))),
                           sparse.csr_matrix((1, m))]),
        ], format="csr")
        out = linprog(np.concatenate([np.zeros(2 * a), w]), A_ub=A_ub,
                      b_ub=np.concatenate([fv, -fv, [1.0]]), bounds=(0, None),
                      method="highs")
        if out.status != 0:
            return c0
        z = out.x[:2 * a]
        return z[:a] - z[a:]
    A = np.vstack([Phi_A, -Phi_A])
    scale = max(float(lp_norms(fv, w, p)) ** p, 1e-300)

    def obj(z):
        r = fv - z @ A
        ar = np.abs(r)
        val = float(w @ ar ** p) / scale
        grad = -p * (A @ (w * np.sign(r) * ar ** (p - 1))) / scale
        return val, grad

    z0 = np.concatenate([np.maximum(c0, 0.0), np.maximum(-c0, 0.0)])
    cons = [{"type": "ineq", "fun": lambda z: 1.0 - z.sum(),
             "jac": lambda z: -np.ones_like(z)}]
    out = minimize(obj, z0, jac=True, method="SLSQP",
                   bounds=[(0.0, None)] * (2 * a), constraints=cons,
                   options={"ftol": 1e-14, "maxiter": 500})
    z = np.maximum(out.x, 0.0)
    c = z[:a] - z[a:]
    c = project_l1_ball(c)
    return c if obj(np.concatenate([np.maximum(c, 0), np.maximum(-c, 0)]))[0] \
        <= obj(z0)[0] else c0


def _fit_lp(fv, Phi, spec, n_budget, tol, max_iter):
    """Fully corrective greedy for p != 2.

    With budget for every atom the whole problem is solved at once. Otherwise
    atoms join one at a time (largest |<psi(r), phi>|, psi the p-norm
    derivative of the residual) and after each join the coefficients are
    re-solved exactly over the active set.
    """
    w = spec.domain.weights
    p = spec.p
    k = len(Phi)

    def err(x):
        return float(lp_norms(fv - x @ Phi, w, p))

    c = np.zeros(k)
    error = err(c)
    it = 0
    converged = True
    if n_budget >= k:
        it = 1
        c = _restricted_lp(fv, Phi, spec, c)
        error = err(c)
    else:
        active = []
        for it in range(1, min(max_iter, n_budget) + 1):
            r = fv - c @ Phi
            psi = np.sign(r) * np.abs(r) ** (p - 1)
            scores = np.abs((Phi * w) @ psi)
            scores[active] = -np.inf
            j = int(np.argmax(scores))
            trial_active = active + [j]
            sub = _restricted_lp(fv, Phi[trial_active], spec,
                                 c[trial_active])
            trial = np.zeros(k)
            trial[trial_active] = sub
            new_error = err(trial)
            if new_error > error - tol:
                break
            active, c, error = trial_active, trial, new_error
    idx = np.nonzero(c)[0]
    mass = np.abs(c[idx]).sum()
    coef = c[idx] / mass if mass > 1.0 else c[idx]
    comb = ConvexCombination(tuple(idx.tolist()), coef)
    return ApproxResult(comb, _residual_norm(fv, Phi, comb, spec), it, converged)


def linear_fit(f, basis, spec):
    """Orthogonal projection of ``f`` onto span(basis); p = 2 only."""
    if spec.p != 2:
        raise UnsupportedError("linear_fit supports p = 2 only")
    Phi = _stack(basis, spec)
    if not f.domain.same_as(spec.domain):
        raise DomainMismatchError("target and norm live on different domains")
    sw = np.sqrt(spec.domain.weights)
    coef, *_ = np.linalg.lstsq((Phi * sw).T, f.values * sw, rcond=None)
    comb = Combination(tuple(range(len(Phi))), coef)
    return ApproxResult(comb, _residual_norm(f.values, Phi, comb, spec), 1, True)


# -- proof constructions -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class ShiftedCore:
    """phi'_0..phi'_n and lambda_0..lambda_n with f = sum lambda_i phi'_i."""

    core: list
    coefficients: np.ndarray
    alpha: float


def part1_shifted_core(f, basis, coeffs, spec):
    """Shift an n-term approximation of ``f`` into an exact (n+1)-term one.

    With phi_0 = 0, lambda_0 = 1 - sum |lambda_j| and r = f - sum lambda_j
    phi_j, each element moves to phi'_i = phi_i + sign(lambda_i) r, a
    distance of at most alpha = ||r|| from phi_i, and sum lambda_i phi'_i = f.
    sign(0) is taken to be 0.
    """
    Phi = _stack(basis, spec)
    lam = np.asarray(coeffs, dtype=float)
    if lam.shape != (len(Phi),):
        raise ValueError("one coefficient per basis element is required")
    mass = float(np.abs(lam).sum())
    if mass > 1.0 + L1_SLACK:
        raise ValueError(f"l1 mass {mass!r} exceeds 1")
    resid = f.values - lam @ Phi
    alpha = float(lp_norms(resid, spec.domain.weights, spec.p))
    lam_all = np.concatenate([[max(0.0, 1.0 - mass)], lam])
    phi_all = np.vstack([np.zeros(f.domain.size), Phi])
    shifted = phi_all + np.sign(lam_all)[:, None] * resid
    core = [FunctionVector(v, f.domain) for v in shifted]
    return ShiftedCore(core, lam_all, alpha)


@dataclass(frozen=True, eq=False)
class CollapseResult:
    result: ApproxResult
    delta: float
    epsilon: float
    input_mass: float


def part2_collapse(f, dictionary, member_indices, coeffs, cover, spec,
                   check=True):
    """Move every term of sum lambda_j f_j onto its nearest cover center.

    Coefficients landing on the same center are summed, so the l1 mass cannot
    grow, and the error is at most delta + epsilon where delta is the error
    of the input combination. The returned combination indexes dictionary
    members (the centers).
    """
    if not cover.certified:
        raise ValueError("cover is not certified")
    lam = np.asarray(coeffs, dtype=float)
    idx = np.asarray(member_indices, dtype=int)
    if lam.shape != idx.shape:
        raise ValueError("one coefficient per member is required")
    mass = float(np.abs(lam).sum())
    if mass > 1.0 + L1_SLACK:
        raise ValueError(f"l1 mass {mass!r} exceeds 1")
    values = member_values(dictionary)
    delta = float(lp_norms(f.values - lam @ values[idx], spec.domain.weights,
                           spec.p))
    centers = np.asarray(cover.center_indices, dtype=int)
    sub = np.vstack([values[idx], values[centers]])
    pos, _ = assign_to_centers(sub, list(range(len(idx), len(sub))), spec)
    pos = pos[:len(idx)]
    collapsed = np.zeros(len(centers))
    np.add.at(collapsed, pos, lam)
    used = np.unique(pos)
    comb = Combination(tuple(centers[used].tolist()), collapsed[used])
    error = _residual_norm(f.values, values, comb, spec)
    if check:
        if error > delta + cover.epsilon + 1e-10:
            raise InvariantViolation(
                f"collapse error {error!r} exceeds delta + eps = "
                f"{delta + cover.epsilon!r}")
        if comb.l1_mass > mass + 1e-12:
            raise InvariantViolation("collapse increased the l1 mass")
    if comb.l1_mass <= 1.0 + L1_SLACK:
        comb = ConvexCombination(comb.indices, comb.coefficients)
    return CollapseResult(ApproxResult(comb, error, 1, True), delta,
                          cover.epsilon, mass)


# -- width estimation --------------------------------------------------------

def trial_rng(seed, index):
    """Independent generator for trial ``index`` of a run seeded with ``seed``.

    ``seed`` may be an int or a sequence of ints (a seed plus stream tags).
    """
    keys = [int(s) for s in np.atleast_1d(seed)]
    return np.random.default_rng(keys + [int(index)])


def width_errors(class_sampler, basis, n, spec, trials, seed=0, tol=1e-10,
                 max_iter=1000, jobs=1):
    """convex_fit errors for ``trials`` targets drawn by ``class_sampler(rng)``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")

    def one(t):
        f = class_sampler(trial_rng(seed, t))
        return convex_fit(f, basis, n, spec, tol, max_iter).error

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return np.array(list(pool.map(one, range(trials))))
    return np.array([one(t) for t in range(trials)])


def width_upper_estimate(class_sampler, basis, n, spec, trials, seed=0,
                         tol=1e-10, max_iter=1000, jobs=1):
    """Largest convex_fit error over sampled members of a class.

    The basis is fixed, so this estimates sup_f ||f - co_n(basis)|| for that
    basis only: an upper-style estimate of the convex n-width.
    """
    return float(width_errors(class_sampler, basis, n, spec, trials, seed,
                              tol, max_iter, jobs).max())
