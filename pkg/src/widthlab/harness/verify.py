"""Randomized checks of the two constructive steps behind the core theorem."""

import numpy as np

from ..convex_approx import (convex_fit, part1_shifted_core, part2_collapse,
                             trial_rng)
from ..covering import farthest_point_order, greedy_cover
from ..function_space import FunctionVector, GridDomain, NormSpec, lp_norms
from .sweep import _TARGETS, build_setting, knn_target

PART1_TOL = 1e-10
SHIFT_TOL = 1e-12
MASS_TOL = 1e-12
PART2_TOL = 1e-10
REPORT_TOL = 1e-8

_PART1, _PART2 = 11, 12


def _random_domain(rng, m, p):
    if rng.random() < 0.5:
        w = rng.dirichlet(np.ones(m))
        w /= w.sum()
        kind = "probability"
        if abs(w.sum() - 1.0) > 1e-12:
            w = np.full(m, 1.0 / m)
    else:
        w = rng.uniform(0.1, 2.0, size=m)
        kind = "lebesgue"
    dom = GridDomain(np.arange(m, dtype=float), w, kind)
    return dom, NormSpec(p, dom)


def _random_coeffs(rng, n, exact_unit=False):
    lam = rng.dirichlet(np.ones(n)) * rng.choice([-1.0, 1.0], size=n)
    if exact_unit:
        return lam / np.abs(lam).sum()
    return lam * rng.uniform(0.0, 1.0)


def part1_instance(rng, max_dim, max_n, p):
    """One randomized run of the shifted-core construction; returns its defects."""
    m = int(rng.integers(1, max_dim + 1))
    n = int(rng.integers(1, max_n + 1))
    dom, spec = _random_domain(rng, m, p)
    basis = rng.normal(size=(n, m))
    if n > 1 and rng.random() < 0.2:
        basis[-1] = basis[0]
    lam = _random_coeffs(rng, n, exact_unit=rng.random() < 0.2)
    f = FunctionVector(rng.normal(size=m) * rng.uniform(0.1, 3.0), dom)
    phis = [FunctionVector(v, dom) for v in basis]
    core = part1_shifted_core(f, phis, lam, spec)
    shifted = np.stack([c.values for c in core.core])
    recon = core.coefficients @ shifted
    residual = float(lp_norms(f.values - recon, dom.weights, spec.p))
    phi_all = np.vstack([np.zeros(m), basis])
    shifts = lp_norms(phi_all - shifted, dom.weights, spec.p)
    return {
        "residual": residual,
        "shift_excess": float(np.max(shifts) - core.alpha),
        "mass_deviation": float(abs(np.abs(core.coefficients).sum() - 1.0)),
        "n": n,
        "alpha": core.alpha,
    }


def part2_instance(rng, max_dim, p):
    """One randomized cover-and-collapse run; returns its defects."""
    m = int(rng.integers(1, max_dim + 1))
    dom, spec = _random_domain(rng, m, p)
    N = int(rng.integers(2, 25))
    values = rng.normal(size=(N, m))
    if rng.random() < 0.3:
        values[N // 2:] = values[:N - N // 2]
    diam = max(float(lp_norms(values - v, dom.weights, p).max()) for v in values)
    eps = rng.uniform(0.05, 1.0) * max(diam, 1e-3)
    cover = greedy_cover(values, eps, spec)
    count = int(rng.integers(1, 2 * N))
    idx = rng.integers(0, N, size=count)
    lam = _random_coeffs(rng, count, exact_unit=rng.random() < 0.2)
    noise = rng.normal(size=m) * rng.uniform(0.0, 0.5)
    f = FunctionVector(lam @ values[idx] + noise, dom)
    out = part2_collapse(f, values, idx, lam, cover, spec, check=False)
    return {
        "excess": out.result.error - (out.delta + out.epsilon),
        "mass_increase": out.result.combination.l1_mass - out.input_mass,
    }


def certificates(cfg):
    """Conditional statements N_co(eps, K_sampled) <= n + 1 for swept n.

    The basis is the first n greedy centers, eps the largest convex_fit error
    over sampled co(S) targets. Conditional because the sampled targets stand
    in for the class.
    """
    if cfg.family is None or not cfg.sweep.n:
        return []
    _, spec, dictionary = build_setting(cfg)
    order, _ = farthest_point_order(dictionary.values, spec,
                                    max_centers=max(cfg.sweep.n))
    sol = cfg.solver
    targets = [knn_target(dictionary, trial_rng([cfg.seed, _TARGETS], t),
                          sol.members_per_target)[0] for t in range(sol.trials)]
    out = []
    for n in cfg.sweep.n:
        size = min(n, len(order))
        basis = [dictionary.member(c) for c in order[:size]]
        alpha = max(convex_fit(f, basis, size, spec, sol.tol,
                               sol.max_iter).error for f in targets)
        out.append({"n": size, "epsilon": alpha,
                    "statement": f"N_co({alpha:.9g}, K_sampled) <= {size + 1}",
                    "conditional": True})
    return out


def verify_theorem1(cfg):
    """Run both constructions on ``cfg.verify.instances`` random instances each."""
    vc = cfg.verify
    p = cfg.norm.p
    p1 = [part1_instance(trial_rng([cfg.seed, _PART1], i), vc.max_dim,
                         vc.max_n, p) for i in range(vc.instances)]
    p2 = [part2_instance(trial_rng([cfg.seed, _PART2], i), vc.max_dim, p)
          for i in range(vc.instances)]
    part1_ok = [r["residual"] <= PART1_TOL and r["shift_excess"] <= SHIFT_TOL
                and r["mass_deviation"] <= MASS_TOL for r in p1]
    part2_ok = [r["excess"] <= PART2_TOL and r["mass_increase"] <= 1e-12
                for r in p2]
    report = {
        "instances": vc.instances,
        "part1_passes": int(sum(part1_ok)),
        "part1_max_residual": max(r["residual"] for r in p1),
        "part1_max_shift_excess": max(r["shift_excess"] for r in p1),
        "part1_max_mass_deviation": max(r["mass_deviation"] for r in p1),
        "part2_passes": int(sum(part2_ok)),
        "part2_max_excess": max(r["excess"] for r in p2),
        "part2_max_mass_increase": max(r["mass_increase"] for r in p2),
    }
    report["passed"] = (
        all(part1_ok) and all(part2_ok)
        and report["part1_max_residual"] <= REPORT_TOL
        and report["part2_max_excess"] <= REPORT_TOL)
    report["certificates"] = certificates(cfg)
    return report
