import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sparsephase.appendix import (carlen_bound, conjecture_statistic, conjecture_sweep, cycle_bound,
                                  fourier_matrix, glynn_permanent, haar_random_unitary, naive_permanent,
                                  ryser_permanent, stirling_proxy)
from sparsephase.engine import interference_weights, unitarity_defect
from sparsephase.errors import ValidationError
from sparsephase.photons import Permutation


@pytest.mark.parametrize("M, expected", [
    ([[1, 1], [1, 1]], 2),
    (np.eye(5), 1),
    (np.zeros((3, 3)), 0),
    (np.ones((4, 4)), 24),
])
def test_permanent_examples(M, expected):
    assert ryser_permanent(M) == pytest.approx(expected)
    assert glynn_permanent(M) == pytest.approx(expected)


def test_fourier_permanent():
    assert ryser_permanent(fourier_matrix(3)) == pytest.approx(-1 / math.sqrt(3), abs=1e-14)


@pytest.mark.parametrize("n", range(1, 7))
def test_permanent_oracles_agree(n, rng):
    for _ in range(5):
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        ref = naive_permanent(A)
        for value in (ryser_permanent(A), glynn_permanent(A)):
            assert abs(value - ref) <= 1e-10 * max(1.0, abs(ref))


def test_permanent_errors():
    with pytest.raises(ValidationError):
        ryser_permanent(np.ones((2, 3)))
    with pytest.raises(ValidationError):
        ryser_permanent(np.ones((21, 21)))


def test_fourier_matrix():
    F2 = fourier_matrix(2).entries
    assert np.allclose(F2, np.array([[1, 1], [1, -1]]) / math.sqrt(2), atol=1e-15)
    w = np.exp(-2j * np.pi / 3)
    F3 = np.array([[1, 1, 1], [1, w, w ** 2], [1, w ** 2, w ** 4]]) / math.sqrt(3)
    assert np.allclose(fourier_matrix(3).entries, F3, atol=1e-15)
    assert unitarity_defect(fourier_matrix(4).entries)[0] <= 1e-14
    with pytest.raises(ValidationError):
        fourier_matrix(0)


@pytest.mark.parametrize("n", range(3, 7))
def test_fourier_reaches_bound(n):
    sigma = Permutation.from_cycles(n, [tuple(range(1, n + 1))])
    assert conjecture_statistic(fourier_matrix(n), sigma) == pytest.approx(cycle_bound(n), abs=1e-12)


@pytest.mark.parametrize("n, value", [(3, 2 / 9), (4, 0.09375), (5, 0.0384), (6, math.factorial(6) / 6 ** 6)])
def test_cycle_bound_values(n, value):
    assert cycle_bound(n) == pytest.approx(value, abs=1e-15)


def test_statistic_identity_and_errors():
    assert conjecture_statistic(np.eye(3), (1, 2, 3)) == 0
    with pytest.raises(ValidationError, match="n-cycle"):
        conjecture_statistic(np.eye(4), Permutation((2, 1, 4, 3)))


@pytest.mark.parametrize("n", [3, 4])
def test_statistic_matches_engine_weight(n):
    v = tuple(range(1, n + 1))
    sigma = Permutation.from_cycles(n, [v])
    for seed in range(100):
        U = haar_random_unitary(n, seed)
        w = interference_weights(U, v, v).get(sigma, 0j)
        assert conjecture_statistic(U, sigma) == pytest.approx(abs(w), abs=1e-10)


@pytest.mark.parametrize("V, bound", [(np.ones((3, 3)), 6.0), (np.zeros((3, 3)), 0.0)])
def test_carlen_examples(V, bound):
    assert carlen_bound(V) == pytest.approx(bound)
    assert abs(ryser_permanent(V)) <= carlen_bound(V) + 1e-12


def test_carlen_n3_chain():
    sigma = Permutation.from_cycles(3, [(1, 2, 3)])
    for seed in range(50):
        U = haar_random_unitary(3, seed).entries
        V = U.conj() * U[:, sigma.as_array()]
        assert conjecture_statistic(U, sigma) <= carlen_bound(V) + 1e-12
        assert carlen_bound(V) <= 6 / 27 + 1e-12


@given(st.integers(2, 6), st.integers(0, 2 ** 31))
def test_carlen_dominates(n, seed):
    r = np.random.default_rng(seed)
    V = r.normal(size=(n, n)) + 1j * r.normal(size=(n, n))
    assert abs(ryser_permanent(V)) <= carlen_bound(V) * (1 + 1e-10)


def test_haar_basic():
    u1 = haar_random_unitary(1, 5).entries
    assert abs(abs(u1[0, 0]) - 1) < 1e-14
    assert unitarity_defect(haar_random_unitary(3, 7).entries)[0] <= 1e-12
    assert np.array_equal(haar_random_unitary(4, 9).entries, haar_random_unitary(4, 9).entries)


def test_haar_first_moment():
    vals = np.array([abs(haar_random_unitary(4, s).entries[0, 0]) ** 2 for s in range(10 ** 4)])
    # Var |U11|^2 = (n-1)/(n^2 (n+1)) for Haar U(n)
    sd = math.sqrt(3 / (16 * 5) / len(vals))
    assert abs(vals.mean() - 0.25) <= 5 * sd


def test_sweep_n3_and_workers():
    res = conjecture_sweep(3, 200, seed=1)
    assert res.fourier_value == pytest.approx(2 / 9, abs=1e-15) and res.violations == []
    par = conjecture_sweep(3, 200, seed=1, workers=2)
    assert par.max_random_value == res.max_random_value
    js = res.to_json()
    assert set(js) == {"n", "bound", "fourier_value", "max_random_value", "samples", "seed", "violations"}


@pytest.mark.parametrize("n, samples", [(2, 10), (8, 10), (4, 0)])
def test_sweep_errors(n, samples):
    with pytest.raises(ValidationError):
        conjecture_sweep(n, samples, seed=0)


@pytest.mark.parametrize("n", range(4, 30))
def test_stirling_proxy(n):
    assert 0.9 <= cycle_bound(n) / stirling_proxy(n) <= 1.1
