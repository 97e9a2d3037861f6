import math
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from widthlab.function_space import NormSpec, discrete_domain, monte_carlo_domain, torus_domain
from widthlab.node_classes import (NodeFamily, evaluate_nodes, fourier_atom,
                                   linear_threshold, lipschitz_check,
                                   load_dictionary, rescale, sample_dictionary,
                                   save_dictionary, smooth_mother)


def test_family_validation():
    with pytest.raises(ValueError):
        NodeFamily("relu")
    with pytest.raises(ValueError):
        smooth_mother(0)
    with pytest.raises(ValueError):
        smooth_mother(5, d=1)  # logistic takes d+1 or d+2 parameters
    with pytest.raises(ValueError):
        smooth_mother(2, mother_id="nope")
    with pytest.raises(ValueError):
        linear_threshold(2, parameter_box=((-1, 1),))


def test_family_round_trip():
    fam = smooth_mother(3, d=1, lipschitz_constant=2.0)
    assert NodeFamily.from_dict(fam.to_dict()) == fam


def test_threshold_values_are_indicators():
    dom = monte_carlo_domain(2, 200, seed=1)
    D = sample_dictionary(linear_threshold(2), dom, count=50, seed=3)
    assert set(np.unique(D.values)) <= {0.0, 1.0}
    # normalized parameters
    assert np.allclose(np.linalg.norm(D.parameters, axis=1), 1.0)


def test_threshold_hand_value():
    dom = discrete_domain([0.5, 0.5])
    dom = type(dom)(np.array([[-0.5], [0.5]]), dom.weights)
    v = evaluate_nodes(linear_threshold(1), [[1.0, 0.0], [-1.0, 0.25]], dom)
    assert np.array_equal(v, [[0.0, 1.0], [1.0, 0.0]])


def test_threshold_duplicates_removed():
    dom = monte_carlo_domain(1, 20, seed=0)
    fam = linear_threshold(1)
    D = sample_dictionary(fam, dom, resolution=5)
    # (w, b) and (2w, 2b) coincide after normalization; the zero vector is gone
    assert len(D) == len(np.unique(np.round(D.parameters, 12), axis=0))
    assert len(D) < 25


@given(st.integers(1, 2), st.integers(3, 12), st.integers(0, 10 ** 6))
def test_threshold_patterns_obey_sauer(d, m, seed):
    """Distinct dichotomies on m points never exceed sum_{i<=d+1} C(m, i)."""
    dom = monte_carlo_domain(d, m, seed=seed)
    D = sample_dictionary(linear_threshold(d), dom, count=400, seed=seed)
    patterns = len({row.tobytes() for row in D.values})
    assert patterns <= sum(comb(m, i) for i in range(d + 2))


def test_fourier_atom_ordering():
    dom = torus_domain(16)
    D = sample_dictionary(fourier_atom(2), dom)
    t = dom.points[:, 0]
    expect = [np.ones_like(t), np.sin(t), np.cos(t), np.sin(2 * t), np.cos(2 * t)]
    assert np.allclose(D.values, expect)


def test_logistic_lipschitz_below_analytic_bound():
    # |d/dy sigma(w x + b)| <= (1/4) * 2 * sqrt(x^2 + 1) <= 1/sqrt(2) on [-1, 1]
    dom = monte_carlo_domain(1, 500, seed=2)
    D = sample_dictionary(smooth_mother(2), dom, resolution=15)
    ratio = lipschitz_check(D, NormSpec(2, dom), trials=3000)
    assert 0 < ratio <= 1 / math.sqrt(2)


def test_logistic_tails_are_finite():
    dom = monte_carlo_domain(1, 10, seed=0)
    fam = smooth_mother(3, d=1)
    v = evaluate_nodes(fam, np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 1.0]]), dom)
    assert np.all(np.isfinite(v)) and np.all((v > 0) & (v < 1))


def test_lattice_size_and_rescale():
    dom = monte_carlo_domain(1, 30, seed=0)
    D = sample_dictionary(smooth_mother(2), dom, resolution=7)
    assert len(D) == 49
    E = rescale(D, 3.0)
    assert np.allclose(E.values, 3.0 * D.values)


def test_save_load_round_trip(tmp_path):
    dom = monte_carlo_domain(2, 40, seed=9)
    D = sample_dictionary(linear_threshold(2), dom, count=30, seed=4, scale=0.5)
    path = tmp_path / "dict.json"
    save_dictionary(D, path)
    E = load_dictionary(path, dom)
    assert E.family == D.family
    assert np.array_equal(E.values, D.values)
    assert "values" not in path.read_text()


def test_dimension_mismatch():
    dom = monte_carlo_domain(2, 10, seed=0)
    with pytest.raises(ValueError):
        sample_dictionary(linear_threshold(1), dom, count=3)


def test_sampling_needs_count_or_resolution():
    dom = monte_carlo_domain(1, 10, seed=0)
    with pytest.raises(ValueError):
        sample_dictionary(smooth_mother(2), dom)
