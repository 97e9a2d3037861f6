"""
Covers, packings and closed-form covering-number bounds.

Covers here are internal: their centers are dictionary members, chosen by
farthest-point traversal. A certified cover of size N witnesses an upper
bound N on the covering number of the sampled class (with centers anywhere
in the space the radius could shrink by up to a factor of two).
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .function_space import distances_to
from .node_classes import FOURIER_ATOM, LINEAR_THRESHOLD, SMOOTH_MOTHER, evaluate_nodes


def member_values(dictionary):
    """The (N, m) member array of a Dictionary, or the array itself."""
    return np.asarray(getattr(dictionary, "values", dictionary), dtype=float)


@dataclass(frozen=True)
class EpsCover:
    epsilon: float
    center_indices: tuple
    certified: bool
    max_residual: float

    @property
    def size(self):
        return len(self.center_indices)

    def to_dict(self):
        return {"epsilon": self.epsilon, "size": self.size,
                "certified": self.certified, "max_residual": self.max_residual}


@dataclass(frozen=True)
class EpsPacking:
    epsilon: float
    point_indices: tuple
    min_pairwise: float

    @property
    def size(self):
        return len(self.point_indices)


def farthest_point_order(values, spec, max_centers=None, stop_radius=None):
    """Farthest-point traversal of the rows of ``values``.

    Starts at row 0 and repeatedly adds the row farthest from the chosen
    set, ties to the lowest index. Returns ``(order, radii)`` where
    ``radii[j]`` is the largest distance from any row to its nearest center
    among ``order[:j + 1]``. Stops after ``max_centers`` centers or once the
    radius is <= ``stop_radius``.
    """
    n = len(values)
    if n == 0:
        raise ValueError("empty dictionary")
    limit = n if max_centers is None else min(max_centers, n)
    order = [0]
    nearest = distances_to(values, values[0], spec)
    radii = [float(nearest.max())]
    while len(order) < limit:
        if stop_radius is not None and radii[-1] <= stop_radius:
            break
        nxt = int(np.argmax(nearest))
        if nearest[nxt] == 0.0:
            break
        order.append(nxt)
        nearest = np.minimum(nearest, distances_to(values, values[nxt], spec))
        radii.append(float(nearest.max()))
    return order, radii


def assign_to_centers(values, centers, spec):
    """Nearest center (position in ``centers``) and distance for each row."""
    dist = np.stack([distances_to(values, values[c], spec) for c in centers])
    pos = np.argmin(dist, axis=0)
    return pos, dist[pos, np.arange(len(values))]


def greedy_cover(dictionary, epsilon, spec):
    """Farthest-point internal cover of ``dictionary`` at radius ``epsilon``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    order, radii = farthest_point_order(member_values(dictionary), spec,
                                        stop_radius=epsilon)
    r = radii[-1]
    return EpsCover(float(epsilon), tuple(order), r <= epsilon, r)


def greedy_packing(dictionary, epsilon, spec):
    """Maximal epsilon-separated subset built by farthest-point traversal.

    A row joins only while its distance to every chosen row exceeds
    ``epsilon``; the result is maximal because the traversal stops once all
    rows lie within ``epsilon`` of the chosen set.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    values = member_values(dictionary)
    order, _ = farthest_point_order(values, spec, stop_radius=epsilon)
    # the traversal only adds a row while the current radius exceeds epsilon
    keep = list(order)
    pts = values[keep]
    if len(keep) > 1:
        dmin = min(float(np.min(np.delete(distances_to(pts, pts[i], spec), i)))
                   for i in range(len(keep)))
    else:
        dmin = math.inf
    return EpsPacking(float(epsilon), tuple(keep), dmin)


def haussler_bound(V, p, epsilon, K_const=1.0):
    """Covering bound K V (4e)^V (1/eps)^(p (V - 1)) for a class of VC dimension V."""
    if V < 2:
        raise ValueError("V must be >= 2")
    if p < 1:
        raise ValueError("p must be >= 1")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if K_const <= 0:
        raise ValueError("K_const must be positive")
    if epsilon > 1:
        warnings.warn(f"epsilon={epsilon} > 1: bound is outside its regime",
                      stacklevel=2)
    return K_const * V * (4 * math.e) ** V * (1.0 / epsilon) ** (p * (V - 1))


def lipschitz_bound(k, epsilon):
    """(1/eps)^k, the cover size of a class Lipschitz-parameterized by [0,1]^k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    return (1.0 / epsilon) ** k


def parameter_lattice_cover(dictionary, epsilon, spec):
    """Cover of a smooth_mother dictionary by a lattice in parameter space.

    Cell centers of a cubic lattice with side 2 eps / sqrt(k) lie within
    ``epsilon`` of every point of [0,1]^k, so with a 1-Lipschitz
    parameterization their node functions cover S at radius ``epsilon``.
    Returns ``(size, max_residual)``; the residual is measured, not assumed.
    """
    fam = dictionary.family
    if fam.kind != SMOOTH_MOTHER:
        raise ValueError("parameter lattice covers need a smooth_mother family")
    per_axis = math.ceil(math.sqrt(fam.k) / (2.0 * epsilon) - 1e-12)
    axis = (np.arange(per_axis) + 0.5) / per_axis
    mesh = np.meshgrid(*([axis] * fam.k), indexing="ij")
    centers = np.stack([m.ravel() for m in mesh], axis=1)
    cvals = evaluate_nodes(fam, centers, dictionary.domain, dictionary.scale)
    nearest = np.full(len(dictionary), np.inf)
    for c in cvals:
        nearest = np.minimum(nearest, distances_to(dictionary.values, c, spec))
    return len(centers), float(nearest.max())


@dataclass(frozen=True)
class BoundReport:
    family: str
    epsilon: float
    empirical_size: int
    bound_value: float
    satisfied: bool
    max_residual: float
    extra: dict

    def to_dict(self):
        out = {"family": self.family, "epsilon": self.epsilon,
               "empirical_size": self.empirical_size,
               "bound_value": self.bound_value, "satisfied": self.satisfied,
               "max_residual": self.max_residual}
        out.update(self.extra)
        return out


def bound_for(family, epsilon, p, K_const=1.0):
    """Closed-form covering bound applicable to ``family`` at radius ``epsilon``."""
    if family.kind == LINEAR_THRESHOLD:
        return haussler_bound(family.d + 1, p, epsilon, K_const)
    if family.kind == SMOOTH_MOTHER:
        return lipschitz_bound(family.k, min(epsilon, 1.0))
    raise ValueError(f"no covering bound for {family.kind} families")


def bound_consistency(dictionary, epsilon, spec, K_const=1.0):
    """Compare the greedy cover size with the family's closed-form bound.

    Sizes are empirical, on the sampled subclass. For smooth_mother families
    the report also carries the parameter-lattice cover and the bound with
    the radius divided by the family's Lipschitz constant.
    """
    fam = dictionary.family
    if fam.kind == FOURIER_ATOM:
        raise ValueError("no covering bound for fourier_atom families")
    cover = greedy_cover(dictionary, epsilon, spec)
    bound = bound_for(fam, epsilon, spec.p, K_const)
    extra = {}
    if fam.kind == SMOOTH_MOTHER:
        size, resid = parameter_lattice_cover(dictionary, epsilon, spec)
        extra = {
            "lattice_size": size,
            "lattice_max_residual": resid,
            "lattice_certified": resid <= epsilon,
            "bound_value_eps_over_L": (
                (fam.lipschitz_constant / epsilon) ** fam.k),
        }
    elif fam.kind == LINEAR_THRESHOLD:
        extra = {"vc_dimension": fam.d + 1, "K_const": K_const}
    return BoundReport(fam.kind, float(epsilon), cover.size, float(bound),
                       cover.size <= bound, cover.max_residual, extra)


def diameter(values, spec):
    """Largest pairwise distance among rows (exact, O(N^2 m))."""
    best = 0.0
    for i in range(len(values)):
        best = max(best, float(distances_to(values[i:], values[i], spec).max()))
    return best


def pairwise_distances(values, spec):
    return np.stack([distances_to(values, v, spec) for v in values])
