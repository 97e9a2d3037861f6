"""
Finite sampled node classes.

A node class S is the set of functions computed by one hidden unit. We
represent it by a finite sample of its parameter box, evaluated on a grid
domain. Three families are built in:

* ``linear_threshold``: x -> 1[w.x + b >= 0] with ||(w, b)||_2 = 1,
* ``smooth_mother``: x -> f(x, y) for a mother function f and y in [0,1]^k,
* ``fourier_atom``: the trigonometric atoms 1, sin t, cos t, sin 2t, ...

All members are multiplied by a scale ``Lambda`` so that combinations with
l1 mass at most one over the scaled class are the same as combinations with
l1 mass at most ``Lambda`` over the unscaled class.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .function_space import FunctionVector, GridDomain, lp_norms

LINEAR_THRESHOLD = "linear_threshold"
SMOOTH_MOTHER = "smooth_mother"
FOURIER_ATOM = "fourier_atom"

LOGISTIC_STEEPNESS = (1.0, 4.0)


def _logistic(z):
    # numerically stable on both tails
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _mother_logistic(x, y):
    """Logistic ridge unit.

    The first d coordinates of y map to w in [-1, 1]^d, the next to the
    bias b in [-1, 1]. When k = d + 2 the last coordinate sets the
    steepness s in [1, 4]; otherwise s = 1.
    """
    d = x.shape[1]
    k = y.shape[1]
    w = 2.0 * y[:, :d] - 1.0
    b = 2.0 * y[:, d] - 1.0
    if k == d + 2:
        lo, hi = LOGISTIC_STEEPNESS
        s = lo + (hi - lo) * y[:, d + 1]
    else:
        s = np.ones(len(y))
    z = s[:, None] * (w @ x.T + b[:, None])
    return _logistic(z)


def _mother_constant(x, y):
    return np.full((len(y), len(x)), 0.5)


def _mother_first_coordinate(x, y):
    return np.repeat(y[:, :1], len(x), axis=1)


MOTHERS = {
    "logistic": _mother_logistic,
    "constant": _mother_constant,
    "first_coordinate": _mother_first_coordinate,
}


def _mother_arity_ok(mother_id, d, k):
    if mother_id == "logistic":
        return k in (d + 1, d + 2)
    return True


@dataclass(frozen=True)
class NodeFamily:
    """Descriptor of a parameterized node class.

    ``parameter_box`` holds one ``(low, high)`` range per parameter; a range
    with ``low == high`` pins that parameter.
    """

    kind: str
    d: int = 1
    k: int = 0
    lipschitz_constant: float = 1.0
    mother_id: str = "logistic"
    max_frequency: int = 0
    parameter_box: tuple = ()

    def __post_init__(self):
        if self.kind not in (LINEAR_THRESHOLD, SMOOTH_MOTHER, FOURIER_ATOM):
            raise ValueError(f"unknown node family {self.kind!r}")
        if self.d < 1:
            raise ValueError("input dimension d must be >= 1")
        if self.kind == SMOOTH_MOTHER:
            if self.k < 1:
                raise ValueError("smooth_mother needs k >= 1 parameters")
            if self.lipschitz_constant <= 0:
                raise ValueError("lipschitz_constant must be positive")
            if self.mother_id not in MOTHERS:
                raise ValueError(f"unknown mother_id {self.mother_id!r}")
            if not _mother_arity_ok(self.mother_id, self.d, self.k):
                raise ValueError(
                    f"mother {self.mother_id!r} cannot take k={self.k} "
                    f"parameters with d={self.d}")
        if self.kind == FOURIER_ATOM and self.max_frequency < 0:
            raise ValueError("max_frequency must be >= 0")
        box = tuple(tuple(float(v) for v in r) for r in self.parameter_box)
        if not box:
            box = self._default_box()
        if len(box) != self.n_params:
            raise ValueError(
                f"parameter_box has {len(box)} ranges, family has "
                f"{self.n_params} parameters")
        for lo, hi in box:
            if not lo <= hi:
                raise ValueError(f"empty parameter range ({lo}, {hi})")
        object.__setattr__(self, "parameter_box", box)

    @property
    def n_params(self):
        if self.kind == LINEAR_THRESHOLD:
            return self.d + 1
        if self.kind == SMOOTH_MOTHER:
            return self.k
        return 2

    def _default_box(self):
        if self.kind == LINEAR_THRESHOLD:
            return ((-1.0, 1.0),) * (self.d + 1)
        if self.kind == SMOOTH_MOTHER:
            return ((0.0, 1.0),) * self.k
        return ((0.0, float(self.max_frequency)), (0.0, 1.0))

    def to_dict(self):
        return {
            "kind": self.kind, "d": self.d, "k": self.k,
            "lipschitz_constant": self.lipschitz_constant,
            "mother_id": self.mother_id,
            "max_frequency": self.max_frequency,
            "parameter_box": [list(r) for r in self.parameter_box],
        }

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data["parameter_box"] = tuple(
            tuple(r) for r in data.get("parameter_box", ()))
        return cls(**data)


def linear_threshold(d, parameter_box=()):
    return NodeFamily(LINEAR_THRESHOLD, d=d, parameter_box=parameter_box)


def smooth_mother(k, d=1, mother_id="logistic", lipschitz_constant=1.0,
                  parameter_box=()):
    return NodeFamily(SMOOTH_MOTHER, d=d, k=k, mother_id=mother_id,
                      lipschitz_constant=lipschitz_constant,
                      parameter_box=parameter_box)


def fourier_atom(max_frequency):
    return NodeFamily(FOURIER_ATOM, max_frequency=max_frequency)


@dataclass(frozen=True, eq=False)
class Dictionary:
    """A finite node class evaluated on a domain.

    ``values[i]`` holds member i at every grid point; ``parameters[i]`` the
    parameter vector that produced it.
    """

    family: NodeFamily
    parameters: np.ndarray
    values: np.ndarray
    domain: GridDomain
    scale: float = 1.0
    seed: int | None = None
    mode: str = "grid"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.parameters) != len(self.values):
            raise ValueError("parameters and members differ in length")
        for a in (self.parameters, self.values):
            a.setflags(write=False)

    def __len__(self):
        return len(self.values)

    def member(self, i):
        return FunctionVector(self.values[i], self.domain)

    @property
    def members(self):
        return [self.member(i) for i in range(len(self))]


def evaluate_nodes(family, parameters, domain, scale=1.0):
    """Evaluate the node rule at every parameter row; returns (N, m)."""
    y = np.atleast_2d(np.asarray(parameters, dtype=float))
    x = domain.points
    if family.kind == LINEAR_THRESHOLD:
        if x.shape[1] != family.d:
            raise ValueError(
                f"domain is {x.shape[1]}-dimensional, family expects d={family.d}")
        act = x @ y[:, :-1].T + y[:, -1]
        base = (act.T >= 0).astype(float)
    elif family.kind == SMOOTH_MOTHER:
        if family.mother_id not in MOTHERS:
            raise ValueError(f"unknown mother_id {family.mother_id!r}")
        if x.shape[1] != family.d:
            raise ValueError(
                f"domain is {x.shape[1]}-dimensional, family expects d={family.d}")
        base = MOTHERS[family.mother_id](x, y)
    else:
        t = x[:, 0]
        freq = y[:, 0][:, None]
        base = np.where(y[:, 1][:, None] == 1.0, np.sin(freq * t), np.cos(freq * t))
    return scale * base


def _lattice(box, resolution):
    axes = [np.linspace(lo, hi, resolution) if hi > lo else np.array([lo])
            for lo, hi in box]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _normalize_thresholds(params):
    nrm = np.linalg.norm(params, axis=1)
    params = params[nrm > 0] / nrm[nrm > 0, None]
    # drop parameterizations that normalize to the same unit vector
    _, first = np.unique(np.round(params, 12), axis=0, return_index=True)
    return params[np.sort(first)]


def _fourier_parameters(max_frequency):
    rows = [(0.0, 0.0)]
    for k in range(1, max_frequency + 1):
        rows += [(float(k), 1.0), (float(k), 0.0)]
    return np.array(rows)


def sample_dictionary(family, domain, count=None, resolution=None, seed=0,
                      scale=1.0):
    """Sample a finite dictionary from ``family``.

    Pass ``resolution`` for a uniform lattice with that many values per
    (non-degenerate) parameter, or ``count`` for i.i.d. uniform draws over
    the parameter box. Fourier atoms ignore both and return all 2M+1 atoms.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    if family.kind == FOURIER_ATOM:
        params = _fourier_parameters(family.max_frequency)
        mode = "all"
    elif resolution is not None:
        if resolution < 1:
            raise ValueError("resolution must be >= 1")
        params = _lattice(family.parameter_box, resolution)
        mode = "grid"
    elif count is not None:
        if count < 1:
            raise ValueError("count must be >= 1")
        rng = np.random.default_rng(seed)
        lo = np.array([r[0] for r in family.parameter_box])
        hi = np.array([r[1] for r in family.parameter_box])
        params = lo + (hi - lo) * rng.random((count, len(lo)))
        mode = "random"
    else:
        raise ValueError("give either count or resolution")
    if family.kind == LINEAR_THRESHOLD:
        params = _normalize_thresholds(params)
        if len(params) == 0:
            raise ValueError("parameter box contains only the zero vector")
    values = evaluate_nodes(family, params, domain, scale)
    return Dictionary(family, params, values, domain, float(scale), seed, mode)


def rescale(dictionary, scale):
    """Same parameters, members multiplied by ``scale`` instead."""
    values = evaluate_nodes(dictionary.family, dictionary.parameters,
                            dictionary.domain, scale)
    return Dictionary(dictionary.family, dictionary.parameters.copy(), values,
                      dictionary.domain, float(scale), dictionary.seed,
                      dictionary.mode)


def lipschitz_check(dictionary, spec, trials=10_000, seed=0):
    """Largest observed ||f(., y) - f(., y')|| / ||y - y'|| over random pairs.

    Only meaningful for ``smooth_mother`` families, whose parameters live in
    [0, 1]^k. Pairs with identical parameters are skipped.
    """
    if dictionary.family.kind != SMOOTH_MOTHER:
        raise ValueError("lipschitz_check applies to smooth_mother families")
    n = len(dictionary)
    if n < 2:
        raise ValueError("need at least two members")
    rng = np.random.default_rng(seed)
    i = rng.integers(0, n, size=trials)
    j = (i + rng.integers(1, n, size=trials)) % n
    dy = np.linalg.norm(dictionary.parameters[i] - dictionary.parameters[j],
                        axis=1)
    keep = dy > 0
    if not np.any(keep):
        return 0.0
    df = lp_norms(dictionary.values[i[keep]] - dictionary.values[j[keep]],
                  spec.domain.weights, spec.p)
    return float(np.max(df / dy[keep]))


def save_dictionary(dictionary, path):
    """Write the family, seed and parameter list; member values are not stored."""
    payload = {
        "family": dictionary.family.to_dict(),
        "seed": dictionary.seed,
        "mode": dictionary.mode,
        "scale": dictionary.scale,
        "parameters": dictionary.parameters.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)


def load_dictionary(path, domain):
    """Rebuild a saved dictionary by re-evaluating its members on ``domain``."""
    with open(path) as fh:
        payload = json.load(fh)
    family = NodeFamily.from_dict(payload["family"])
    params = np.array(payload["parameters"], dtype=float).reshape(
        -1, family.n_params)
    values = evaluate_nodes(family, params, domain, payload["scale"])
    return Dictionary(family, params, values, domain, float(payload["scale"]),
                      payload.get("seed"), payload.get("mode", "grid"))
