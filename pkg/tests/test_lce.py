"""Extraction-stage checks: diffusion, candidate and removal sets, and the
end-to-end extraction on graphs whose answer is known exactly."""

import numpy as np
import pytest

from localcluster import LceParams, build_graph, jaccard, lce, symmetric_sbm
from localcluster.lce import candidate_set, diffuse, removal_set

from conftest import disjoint_cliques

K3 = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]


def test_diffuse_stays_inside_component():
    g, labels = disjoint_cliques([3, 3])
    v = diffuse(g, [0], 3)
    assert np.all(v[labels == 1] == 0.0)
    assert v.sum() == pytest.approx(2.0)


def test_diffuse_depth_zero_is_degree_mass():
    g = build_graph(K3)
    np.testing.assert_array_equal(diffuse(g, [0], 0), [2.0, 0.0, 0.0])


def test_diffuse_one_step_splits_mass():
    g = build_graph(K3)
    np.testing.assert_allclose(diffuse(g, [0], 1), [0.0, 1.0, 1.0])


def test_diffuse_rejects_empty_seeds():
    with pytest.raises(ValueError):
        diffuse(build_graph(K3), [], 3)


def test_candidate_set_examples():
    v = np.array([0.1, 0.9, 0.5, 0.0])
    np.testing.assert_array_equal(candidate_set(v, 1, 0.8), [1])
    np.testing.assert_array_equal(candidate_set(v, 2, 0.8), [0, 1, 2])


def test_candidate_set_breaks_ties_by_index():
    v = np.full(5, 0.3)
    np.testing.assert_array_equal(candidate_set(v, 2, 0.001), [0, 1])


def test_removal_set_zero_scores_fall_back_to_index_order():
    g, labels = disjoint_cliques([6, 6])
    omega = np.flatnonzero(labels == 0)
    got = removal_set(g.laplacian(), omega, 0.5)
    np.testing.assert_array_equal(got, [0, 1, 2])


def test_removal_set_can_be_empty():
    g, _ = disjoint_cliques([6])
    assert removal_set(g.laplacian(), np.array([0, 1]), 0.3).size == 0


def test_removal_set_matches_dense_oracle_on_barbell():
    # two triangles joined by one edge; omega is triangle one plus the far
    # bridge endpoint, so interior triangle nodes must score strictly below it
    g = build_graph(K3 + [(3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, 1.0)])
    omega = np.array([0, 1, 2, 3])
    L = g.laplacian().matrix().toarray()
    dense_scores = np.abs(L.T) @ np.abs(L @ np.isin(np.arange(6), omega).astype(float))
    lap = g.laplacian()
    z = np.abs(lap.apply_to_indicator(omega))
    np.testing.assert_allclose(lap.abs_rmatvec(z)[omega], dense_scores[omega], atol=1e-14)
    assert dense_scores[0] < dense_scores[3]
    assert dense_scores[1] < dense_scores[3]
    got = removal_set(lap, omega, 0.5)
    np.testing.assert_array_equal(got, np.sort(omega[np.argsort(dense_scores[omega], kind="stable")[:2]]))


def test_extraction_recovers_seeded_clique():
    g, labels = disjoint_cliques([20, 20, 20])
    out = lce(g, 20, [3])
    np.testing.assert_array_equal(out.cluster, np.arange(20))
    assert out.residual_norm <= 1e-9


def test_extraction_recovers_second_clique_by_symmetry():
    g, labels = disjoint_cliques([20, 20, 20])
    for seed in (20, 27, 39):
        out = lce(g, 20, [seed])
        np.testing.assert_array_equal(out.cluster, np.arange(20, 40))


def test_extraction_invariants_hold():
    g, _ = disjoint_cliques([20, 20, 20])
    out = lce(g, 20, [5])
    assert set(out.removed) <= set(out.candidates)
    assert set(out.removed) <= set(out.cluster)
    assert out.cluster.size <= 20
    members = np.setdiff1d(out.cluster, out.removed)
    assert np.all(out.x[members] > 0.1)


def test_extraction_exact_across_removal_fractions():
    g, _ = disjoint_cliques([20, 20])
    for gamma in (0.1, 0.3, 0.5):
        out = lce(g, 20, [2], LceParams(gamma=gamma))
        np.testing.assert_array_equal(out.cluster, np.arange(20))


def test_extraction_is_deterministic():
    g, _ = disjoint_cliques([15, 15])
    a = lce(g, 15, [1])
    b = lce(g, 15, [1])
    np.testing.assert_array_equal(a.cluster, b.cluster)
    np.testing.assert_array_equal(a.x, b.x)


def test_extraction_validates_inputs():
    g, _ = disjoint_cliques([10, 10])
    with pytest.raises(ValueError):
        lce(g, 0, [0])
    with pytest.raises(ValueError):
        lce(g, 21, [0])
    with pytest.raises(ValueError):
        lce(g, 10, [99])


def test_params_validate_ranges():
    with pytest.raises(ValueError):
        LceParams(walk_depth=-1)
    with pytest.raises(ValueError):
        LceParams(epsilon=1.0)
    with pytest.raises(ValueError):
        LceParams(gamma=0.05)
    with pytest.raises(ValueError):
        LceParams(rejection=0.95)


def test_sbm_extraction_overlap():
    scores = []
    for trial in range(100):
        rng = np.random.default_rng(trial)
        g, labels = symmetric_sbm(200, 3, rng)
        seed = int(rng.choice(np.flatnonzero(labels == 0)))
        out = lce(g, 200, [seed])
        scores.append(jaccard(out.cluster, np.flatnonzero(labels == 0)))
    assert np.mean(scores) >= 0.75
