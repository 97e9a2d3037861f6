"""Independent reference solvers used only by the tests."""

import numpy as np
from scipy.optimize import linprog, minimize


def grid_l1_ball_error(Phi, f, w, step=1e-3):
    """min ||f - c @ Phi||_{2,w} over ||c||_1 <= 1 for three atoms.

    (c1, c2) range over a lattice of the given step; for each pair the best
    c3 in [-s, s], s = 1 - |c1| - |c2|, is found in closed form.
    """
    assert Phi.shape[0] == 3
    grid = np.arange(-1.0, 1.0 + step / 2, step)
    p3 = Phi[2]
    q = float(w @ (p3 * p3))
    best = np.inf
    for c1 in grid:
        c2 = grid[np.abs(grid) <= 1.0 - abs(c1) + 1e-12]
        s = np.maximum(1.0 - abs(c1) - np.abs(c2), 0.0)
        r = f - c1 * Phi[0] - c2[:, None] * Phi[1]
        c3 = np.clip((r * w) @ p3 / q if q > 0 else 0.0, -s, s)
        res = r - c3[:, None] * p3
        best = min(best, float(np.sqrt(((res * res) @ w).min())))
    return best


def slsqp_l1_ball_error(Phi, f, w):
    """Same problem for any number of atoms, via c = u - v with u, v >= 0."""
    k = len(Phi)
    A = np.vstack([Phi, -Phi])
    sw = np.sqrt(w)

    def obj(z):
        r = (f - z @ A) * sw
        return float(r @ r), -2.0 * (A * sw) @ r

    cons = [{"type": "ineq", "fun": lambda z: 1.0 - z.sum(),
             "jac": lambda z: -np.ones_like(z)}]
    out = minimize(obj, np.zeros(2 * k), jac=True, method="SLSQP",
                   bounds=[(0, None)] * (2 * k), constraints=cons,
                   options={"ftol": 1e-15, "maxiter": 1000})
    return float(np.sqrt(max(out.fun, 0.0)))


def lp_l1_error(Phi, f, w):
    """min sum w |f - c @ Phi| over ||c||_1 <= 1, solved as a linear program."""
    k, m = Phi.shape
    # variables: u (k), v (k), e (m)
    cost = np.concatenate([np.zeros(2 * k), w])
    A_ub = np.block([
        [Phi.T, -Phi.T, -np.eye(m)],
        [-Phi.T, Phi.T, -np.eye(m)],
        [np.ones((1, k)), np.ones((1, k)), np.zeros((1, m))],
    ])
    b_ub = np.concatenate([f, -f, [1.0]])
    out = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=(0, None), method="highs")
    return float(out.fun)
