import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sparsephase.design import (band_pattern, build_sparse_unitary, canonical_cycle, design_from_json,
                                layered_unitary, pattern_unitarity_defect, random_band_matrix,
                                resource_comparison, sparse_matrix)
from sparsephase.engine import unitarity_defect
from sparsephase.errors import ValidationError
from sparsephase.graphs import enhanced_graph_of, pure_cycle_check

REFERENCE_8 = np.array([
    [1, -1, -1, 1, 0, 0, 0, 0],
    [1, -1, 1, -1, 0, 0, 0, 0],
    [1, 1, 0, 0, -1, 1, 0, 0],
    [1, 1, 0, 0, 1, -1, 0, 0],
    [0, 0, 1, 1, 0, 0, -1, 1],
    [0, 0, 1, 1, 0, 0, 1, -1],
    [0, 0, 0, 0, 1, 1, -1, -1],
    [0, 0, 0, 0, 1, 1, 1, 1],
]) / 2


def test_n4_matches_reference_matrix():
    d = build_sparse_unitary(4)
    assert np.array_equal(d.U.entries, REFERENCE_8)
    assert d.v == (1, 3, 5, 7)
    assert d.sigma == (1, 2, 4, 3)
    assert d.rho.cycles == [(1,), (2,), (3, 4)]


@pytest.mark.parametrize("n, sigma", [
    (3, (1, 2, 3)), (4, (1, 2, 4, 3)), (5, (1, 2, 4, 5, 3)), (6, (1, 2, 4, 6, 5, 3)),
    (7, (1, 2, 4, 6, 7, 5, 3)),
])
def test_canonical_cycle(n, sigma):
    s, rho = canonical_cycle(n)
    assert s == sigma and rho.images == sigma


@pytest.mark.parametrize("n", range(3, 17))
def test_sparse_unitary_family(n):
    d = build_sparse_unitary(n)
    U = d.U.entries
    assert unitarity_defect(U)[0] <= 1e-12
    nz = np.abs(U) > 0
    assert (nz.sum(axis=0) == 4).all() and (nz.sum(axis=1) == 4).all()
    assert np.allclose(U, layered_unitary(n), atol=1e-15)
    assert len(d.layers) == 2 * n and {x["layer"] for x in d.layers} == {1, 2}


@pytest.mark.parametrize("n", range(3, 11))
def test_enhanced_graph_is_canonical_cycle(n):
    d = build_sparse_unitary(n)
    verdict = pure_cycle_check(enhanced_graph_of(d.U, d.v))
    assert verdict.cycle == d.sigma


@pytest.mark.parametrize("n", [2, 1, 0])
def test_small_n_rejected(n):
    with pytest.raises(ValidationError):
        build_sparse_unitary(n)
    with pytest.raises(ValidationError):
        canonical_cycle(n)


def test_design_json_round_trip():
    d = build_sparse_unitary(5)
    obj = d.to_json()
    assert obj["o_sets"]["1-2"] == [1, 2]
    assert design_from_json(obj).sigma == d.sigma
    with pytest.raises(ValidationError):
        design_from_json({**obj, "v": [2, 4, 6, 8, 10]})


def test_band_pattern_defect_example():
    W = band_pattern(4) / math.sqrt(2)
    assert pattern_unitarity_defect(W) == pytest.approx(0.5)


def test_band_pattern_errors():
    W = band_pattern(4).astype(complex)
    W[0, 2] = 1
    with pytest.raises(ValidationError, match="off the band"):
        pattern_unitarity_defect(W)
    W = band_pattern(4).astype(complex)
    W[1, 1] = 0
    with pytest.raises(ValidationError, match="zero"):
        pattern_unitarity_defect(W)


@given(st.integers(3, 8), st.integers(0, 2 ** 31))
def test_band_pattern_never_unitary(n, seed):
    W = random_band_matrix(n, np.random.default_rng(seed))
    assert pattern_unitarity_defect(W) > 1e-6


@given(st.lists(st.floats(0, 2 * math.pi), min_size=6, max_size=6))
def test_n3_unit_modulus_phases(phases):
    W = band_pattern(3).astype(complex)
    W[W != 0] = np.exp(1j * np.array(phases)) / math.sqrt(2)
    assert pattern_unitarity_defect(W) >= 0.5 * 0.5 - 1e-12


@pytest.mark.parametrize("n, rival_d, rival_depth", [(3, 0, 2), (4, 1, 2), (20, 17, 5), (100, 97, 7)])
def test_resource_comparison(n, rival_d, rival_depth):
    t = resource_comparison(n)
    assert t["sparse"] == {"depth": 2, "beamsplitters": 2 * n, "modes": 2 * n, "internal_params": 0}
    assert t["all_connected"]["internal_params"] == rival_d
    assert t["all_connected"]["depth"] == rival_depth
    assert t["all_connected"]["modes"] == n


def test_sparse_matrix_is_real_half_integers():
    U = sparse_matrix(6)
    assert set(np.unique(U * 2)) <= {-1.0, 0.0, 1.0}
