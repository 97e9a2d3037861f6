import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from widthlab.errors import DomainMismatchError
from widthlab.function_space import (FunctionVector, GridDomain, NormSpec,
                                     combine, discrete_domain, dist_to_set,
                                     distances_to, function_from_callable,
                                     lp_norms, monte_carlo_domain, norm,
                                     torus_domain, zero)


def test_torus_lebesgue_weights():
    dom = torus_domain(64)
    assert dom.measure_kind == "lebesgue"
    assert dom.weights.sum() == pytest.approx(2 * math.pi)
    assert dom.points.shape == (64, 1)


def test_torus_quadrature_is_exact_for_trig_polys():
    dom = torus_domain(4096)
    f = function_from_callable(lambda t: np.sin(3 * t) + 2.0, dom)
    # ||f||_2^2 = pi + 4 * 2 pi
    assert norm(f, NormSpec(2, dom)) ** 2 == pytest.approx(9 * math.pi, rel=1e-12)


def test_monte_carlo_domain_reproducible():
    a = monte_carlo_domain(3, 50, seed=4)
    b = monte_carlo_domain(3, 50, seed=4)
    c = monte_carlo_domain(3, 50, seed=5)
    assert np.array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)
    assert a.weights.sum() == pytest.approx(1.0)
    assert np.all(np.abs(a.points) <= 1)


def test_domain_arrays_read_only():
    dom = discrete_domain([0.5, 0.5])
    with pytest.raises(ValueError):
        dom.weights[0] = 1.0


def test_bad_domains_rejected():
    with pytest.raises(ValueError):
        discrete_domain([0.5, 0.6])
    with pytest.raises(ValueError):
        discrete_domain([-1.0, 2.0], "lebesgue")
    with pytest.raises(ValueError):
        GridDomain(np.zeros((3, 1)), np.ones(2) / 2)


def test_norm_spec_rejects_p_below_one():
    with pytest.raises(ValueError):
        NormSpec(0.5, discrete_domain([1.0]))
    with pytest.raises(ValueError):
        NormSpec(math.inf, discrete_domain([1.0]))


def test_nonfinite_values_rejected():
    dom = discrete_domain([0.5, 0.5])
    with pytest.raises(ValueError):
        FunctionVector([1.0, np.nan], dom)


def test_domain_mismatch():
    a, b = discrete_domain([0.5, 0.5]), discrete_domain([0.25, 0.75])
    with pytest.raises(DomainMismatchError):
        FunctionVector([1, 2], a) + FunctionVector([1, 2], b)


def test_weighted_norm_hand_values():
    dom = discrete_domain([0.25, 0.75])
    f = FunctionVector([2.0, -1.0], dom)
    assert norm(f, NormSpec(1, dom)) == pytest.approx(0.5 + 0.75)
    assert norm(f, NormSpec(2, dom)) == pytest.approx(math.sqrt(1.0 + 0.75))
    assert norm(f, NormSpec(3, dom)) == pytest.approx((2.0 + 0.75) ** (1 / 3))


def test_dist_to_set_ties_lowest_index():
    dom = discrete_domain([0.5, 0.5])
    spec = NormSpec(2, dom)
    members = [FunctionVector([1.0, 0.0], dom), FunctionVector([-1.0, 0.0], dom),
               FunctionVector([1.0, 0.0], dom)]
    d, i = dist_to_set(zero(dom), members, spec)
    assert i == 0 and d == pytest.approx(math.sqrt(0.5))


def test_combine_matches_manual():
    dom = discrete_domain([0.5, 0.5])
    members = [FunctionVector([1.0, 2.0], dom), FunctionVector([0.0, 1.0], dom)]
    g = combine(members, [0.5, -2.0])
    assert np.allclose(g.values, [0.5, -1.0])


vectors = st.lists(st.floats(-10, 10), min_size=1, max_size=8)


@given(vectors, st.floats(1.0, 6.0), st.integers(0, 2 ** 32 - 1))
def test_lp_triangle_inequality(v, p, seed):
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(len(v)))
    x = np.array(v)
    y = rng.normal(size=len(v))
    nx, ny, nxy = (lp_norms(a, w, p) for a in (x, y, x + y))
    assert nxy <= nx + ny + 1e-9 * (1 + nx + ny)


@given(vectors, st.floats(1.0, 6.0), st.floats(-5, 5))
def test_lp_homogeneous(v, p, a):
    w = np.full(len(v), 1.0 / len(v))
    x = np.array(v)
    assert lp_norms(a * x, w, p) == pytest.approx(abs(a) * lp_norms(x, w, p),
                                                  rel=1e-9, abs=1e-12)


def test_distances_rowwise():
    dom = discrete_domain(np.full(3, 1 / 3))
    spec = NormSpec(1, dom)
    vals = np.array([[0.0, 0, 0], [3.0, 0, 0], [1.0, 1, 1]])
    assert np.allclose(distances_to(vals, vals[0], spec), [0.0, 1.0, 1.0])
