"""
Rate sweeps: cover a node dictionary, use the centers as a basis, measure.

For each target basis size n the first n centers of one farthest-point
traversal form the basis, so bases are nested across the sweep. The class
being approximated is K_nn = co(S): random combinations of dictionary
members with l1 mass at most one. Each measured error is checked against
the collapse guarantee error <= eps_used + delta with delta = 0.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..convex_approx import convex_fit, linear_fit, part2_collapse, trial_rng
from ..covering import (EpsCover, bound_consistency, farthest_point_order,
                        greedy_cover, greedy_packing)
from ..errors import ConfigError, InvariantViolation
from ..function_space import (FunctionVector, NormSpec, lp_norms, monte_carlo_domain,
                              torus_domain)
from ..node_classes import (FOURIER_ATOM, LINEAR_THRESHOLD, SMOOTH_MOTHER,
                            lipschitz_check, sample_dictionary)
from ..sobolev import (comparison_targets, default_lambda, extremal_l1_mass,
                       width_comparison)

# stream tags mixed into the master seed
_DOMAIN, _DICTIONARY, _TARGETS, _LIPSCHITZ = 1, 2, 3, 4


@dataclass(frozen=True)
class RateRecord:
    n: int
    epsilon_used: float
    measured_error: float
    bound_error: float
    cover_size: int
    wall_time: float = 0.0

    def __post_init__(self):
        if self.measured_error < 0:
            raise ValueError("measured_error must be nonnegative")


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    theoretical_exponent: float
    points: int
    notes: tuple = ()

    def to_dict(self):
        return {"slope": self.slope, "intercept": self.intercept,
                "r_squared": self.r_squared,
                "theoretical_exponent": self.theoretical_exponent,
                "points": self.points, "notes": list(self.notes)}


@dataclass
class SweepResult:
    records: list
    fits: dict
    meta: dict = field(default_factory=dict)


def fit_rate(records, theoretical_exponent=float("nan"), field_name="measured_error",
             tol=0.0):
    """Least-squares line through (log n, log error).

    Points with zero error are dropped with a note, as are points below
    10 * tol where solver tolerance dominates. At least four points must
    remain.
    """
    notes = []
    xs, ys = [], []
    for rec in sorted(records, key=lambda r: r.n):
        err = getattr(rec, field_name)
        if err <= 0:
            notes.append(f"n={rec.n}: zero {field_name} excluded")
            continue
        if err < 10 * tol:
            notes.append(f"n={rec.n}: {field_name} below 10*tol excluded")
            continue
        xs.append(math.log(rec.n))
        ys.append(math.log(err))
    if len(xs) < 4:
        raise ValueError(f"need at least 4 usable points, have {len(xs)}")
    x, y = np.array(xs), np.array(ys)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(slope), float(intercept), min(max(r2, 0.0), 1.0),
                   float(theoretical_exponent), len(xs), tuple(notes))


def bound_error_at(family, n, p, K_const=1.0):
    """The closed-form covering bound solved for the radius at cover size n."""
    if family.kind == SMOOTH_MOTHER:
        return float(n) ** (-1.0 / family.k)
    if family.kind == LINEAR_THRESHOLD:
        V = family.d + 1
        lead = K_const * V * (4 * math.e) ** V
        return (lead / n) ** (1.0 / (p * (V - 1)))
    raise ConfigError(f"no rate bound for {family.kind} families")


def theoretical_exponent(family, p):
    if family.kind == SMOOTH_MOTHER:
        return -1.0 / family.k
    if family.kind == LINEAR_THRESHOLD:
        return -1.0 / (p * family.d)
    return float("nan")


def build_setting(cfg):
    """Domain, norm and dictionary described by a config."""
    if cfg.family is None:
        raise ConfigError("this command needs a 'family' section")
    family = cfg.family.build()
    if family.kind == FOURIER_ATOM:
        domain = torus_domain(cfg.norm.domain_size)
    else:
        domain = monte_carlo_domain(family.d, cfg.norm.domain_size,
                                    seed=[cfg.seed, _DOMAIN])
    spec = NormSpec(cfg.norm.p, domain)
    dc = cfg.dictionary
    if dc.mode == "grid":
        if dc.resolution is None and family.kind != FOURIER_ATOM:
            raise ConfigError("grid dictionaries need dictionary.resolution")
        dictionary = sample_dictionary(family, domain, resolution=dc.resolution or 1,
                                       scale=dc.scale)
    else:
        if dc.count is None:
            raise ConfigError("random dictionaries need dictionary.count")
        dictionary = sample_dictionary(family, domain, count=dc.count,
                                       seed=[cfg.seed, _DICTIONARY],
                                       scale=dc.scale)
    return family, spec, dictionary


def knn_target(dictionary, rng, members_per_target):
    """A random element of co(S): random members, coefficients on a scaled l1 sphere."""
    N = len(dictionary)
    size = min(members_per_target, N)
    idx = rng.choice(N, size=size, replace=False)
    coeffs = rng.dirichlet(np.ones(size)) * rng.choice([-1.0, 1.0], size=size)
    coeffs *= rng.uniform(0.0, 1.0)
    f = FunctionVector(coeffs @ dictionary.values[idx], dictionary.domain)
    return f, idx, coeffs


def _norm(f, spec):
    return float(lp_norms(f.values, spec.domain.weights, spec.p))


def _check_lipschitz(family, dictionary, spec, seed):
    if family.kind != SMOOTH_MOTHER:
        return None
    ratio = lipschitz_check(dictionary, spec, trials=10_000,
                            seed=[seed, _LIPSCHITZ])
    if ratio > dictionary.scale * family.lipschitz_constant * (1 + 1e-9):
        raise InvariantViolation(
            f"mother {family.mother_id!r} has observed Lipschitz ratio "
            f"{ratio:.6g} > declared {family.lipschitz_constant}")
    return ratio


def _map(fn, items, jobs):
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def run_sweep(cfg, jobs=1):
    """One RateRecord per n in ``cfg.sweep.n``; see the module docstring."""
    if not cfg.sweep.n:
        raise ConfigError("sweep needs sweep.n")
    family, spec, dictionary = build_setting(cfg)
    if family.kind == FOURIER_ATOM:
        raise ConfigError("use the sobolev command for Fourier atoms")
    ratio = _check_lipschitz(family, dictionary, spec, cfg.seed)
    ns = list(cfg.sweep.n)
    order, radii = farthest_point_order(dictionary.values, spec,
                                        max_centers=max(ns))
    sol = cfg.solver
    targets = [knn_target(dictionary, trial_rng([cfg.seed, _TARGETS], t),
                          sol.members_per_target) for t in range(sol.trials)]

    def cell(n):
        start = time.perf_counter()
        size = min(n, len(order))
        centers = order[:size]
        eps_used = radii[size - 1]
        basis = [dictionary.member(c) for c in centers]
        cover = EpsCover(eps_used, tuple(centers), True, eps_used)
        worst, worst_collapse = 0.0, 0.0
        for f, idx, coeffs in targets:
            fit = convex_fit(f, basis, size, spec, sol.tol, sol.max_iter).error
            col = part2_collapse(f, dictionary, idx, coeffs, cover, spec).result.error
            worst = max(worst, min(fit, col))
            worst_collapse = max(worst_collapse, col)
        rec = RateRecord(n, eps_used, worst,
                         bound_error_at(family, n, spec.p, cfg.bound.K_const),
                         size, time.perf_counter() - start)
        return rec, worst_collapse

    out = sorted(_map(cell, ns, jobs), key=lambda rc: rc[0].n)
    records = [r for r, _ in out]
    for rec in records:
        if rec.measured_error > rec.epsilon_used + 10 * sol.tol + 1e-8:
            raise InvariantViolation(
                f"n={rec.n}: error {rec.measured_error!r} exceeds "
                f"eps_used {rec.epsilon_used!r}")
    # squared-objective solves cannot order errors below ~sqrt(eps) * ||f||
    resolution = 1e-7 * max(_norm(f, spec) for f, _, _ in targets)
    for a, b in zip(records, records[1:]):
        if b.measured_error > a.measured_error + sol.tol + resolution:
            raise InvariantViolation(
                f"measured error increased from n={a.n} to n={b.n}")
    exponent = theoretical_exponent(family, spec.p)
    fits = {}
    for name in ("measured_error", "epsilon_used"):
        try:
            fits[name] = fit_rate(records, exponent, name, sol.tol)
        except ValueError as exc:
            fits[name] = None
            fits[name + "_note"] = str(exc)
    meta = {
        "family": family.to_dict(),
        "dictionary_size": len(dictionary),
        "domain_size": spec.domain.size,
        "p": spec.p,
        "lipschitz_ratio": ratio,
        "collapse_errors": [c for _, c in out],
        "monotone_resolution": resolution,
        "labels": "empirical, on the sampled subclass; errors are upper "
                  "estimates of c_n for cover-center bases",
    }
    return SweepResult(records, fits, meta)


def approx_table(cfg, jobs=1):
    """Convex and linear (p = 2) errors of cover-center bases on K_nn targets."""
    if not cfg.sweep.n:
        raise ConfigError("approx needs sweep.n")
    family, spec, dictionary = build_setting(cfg)
    ns = list(cfg.sweep.n)
    order, radii = farthest_point_order(dictionary.values, spec,
                                        max_centers=max(ns))
    sol = cfg.solver
    targets = [knn_target(dictionary, trial_rng([cfg.seed, _TARGETS], t),
                          sol.members_per_target)[0] for t in range(sol.trials)]

    def cell(n):
        size = min(n, len(order))
        basis = [dictionary.member(c) for c in order[:size]]
        cvx = max(convex_fit(f, basis, size, spec, sol.tol, sol.max_iter).error
                  for f in targets)
        lin = (max(linear_fit(f, basis, spec).error for f in targets)
               if spec.p == 2 else float("nan"))
        return {"n": n, "epsilon_used": radii[size - 1], "convex_error": cvx,
                "linear_error": lin}

    return sorted(_map(cell, ns, jobs), key=lambda row: row["n"])


def cover_table(cfg):
    """Greedy cover, packings and closed-form bound at every swept epsilon."""
    if not cfg.sweep.epsilon:
        raise ConfigError("cover needs sweep.epsilon")
    family, spec, dictionary = build_setting(cfg)
    rows = []
    for eps in cfg.sweep.epsilon:
        cover = greedy_cover(dictionary, eps, spec)
        pack = greedy_packing(dictionary, eps, spec)
        pack2 = greedy_packing(dictionary, 2 * eps, spec)
        row = cover.to_dict()
        try:
            report = bound_consistency(dictionary, eps, spec, cfg.bound.K_const)
            row["bound_value"] = report.bound_value
            row["bound_satisfied"] = report.satisfied
        except ValueError:
            row["bound_value"] = float("nan")
            row["bound_satisfied"] = None
        row["packing_size"] = pack.size
        row["packing_2eps_size"] = pack2.size
        row["sandwich_ok"] = pack2.size <= cover.size <= pack.size
        rows.append(row)
    return rows


def sobolev_table(cfg, jobs=1):
    """Convex versus linear errors of trig bases on a Sobolev ball.

    ``n`` counts atoms; the analytic width of the first n atoms is
    ceil(n/2)^(-r).
    """
    if cfg.sobolev is None:
        raise ConfigError("sobolev needs a 'sobolev' section")
    if not cfg.sweep.n:
        raise ConfigError("sobolev needs sweep.n")
    sc = cfg.sobolev
    spec = sc.build()
    domain = torus_domain(sc.grid)
    Lambda = sc.Lambda if sc.Lambda is not None else default_lambda(spec)
    extremal = extremal_l1_mass(1, sc.extremal_cutoff) if spec.r == 1 else None

    def cell(n):
        targets = comparison_targets(spec, n, sc.targets, cfg.seed, sc.cutoff)
        wc = width_comparison(spec, n, Lambda, domain, targets)
        return {
            "n": n, "r": spec.r,
            "analytic_width": float((n + 1) // 2) ** (-spec.r),
            "linear_error": wc.linear_error,
            "convex_error": wc.convex_error,
            "extremal_mass": extremal.mass if extremal else float("nan"),
            "Lambda": Lambda,
            "precondition_met": wc.precondition_met,
        }

    rows = sorted(_map(cell, cfg.sweep.n, jobs), key=lambda row: row["n"])
    for row in rows:
        if row["convex_error"] < row["linear_error"] - 1e-9:
            raise InvariantViolation(
                f"n={row['n']}: convex error below linear error")
    return rows, extremal


def sobolev_records(rows):
    """RateRecords from a sobolev table, for rate fitting.

    The abscissa is the top frequency ceil(n/2) of the n-atom trig basis, the
    quantity the width is a power of. Rows sharing a frequency keep the first.
    """
    out = {}
    for row in rows:
        m = (row["n"] + 1) // 2
        out.setdefault(m, RateRecord(m, row["analytic_width"], row["convex_error"],
                                     row["analytic_width"], row["n"]))
    return [out[m] for m in sorted(out)]
