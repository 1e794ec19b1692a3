import numpy as np
import pytest

from src.errors import InvalidArgumentError, NoNeighborsError
from src.knn_core import (
    Dataset,
    LatentOrdering,
    _neighbor_matrix,
    all_pointwise_errors,
    dsre,
    embedded_dsre,
    knn_reconstruct,
    latent_neighbors,
    pointwise_error,
)

LINE = Dataset([0.0, 1.0, 2.0, 3.0])


def random_instance(rng, max_n=12, max_d=4, max_k=5):
    n = int(rng.integers(2, max_n + 1))
    d = int(rng.integers(1, max_d + 1))
    k = int(rng.integers(1, max_k + 1))
    data = Dataset(rng.normal(size=(n, d)) * rng.uniform(0.1, 10))
    ordering = LatentOrdering(tuple(int(p) for p in rng.permutation(n)))
    return data, ordering, k


class TestDataModel:

    def test_one_dimensional_input_is_a_column(self):
        assert (LINE.N, LINE.d) == (4, 1)

    def test_patterns_are_read_only(self):
        with pytest.raises(ValueError):
            LINE.patterns[0, 0] = 5.0

    @pytest.mark.parametrize("bad", [[[np.nan, 1.0]], [[np.inf]], np.empty((0, 2)), np.zeros((2, 0))])
    def test_invalid_patterns(self, bad):
        with pytest.raises(InvalidArgumentError):
            Dataset(bad)

    def test_ordering_rejects_duplicates(self):
        with pytest.raises(InvalidArgumentError):
            LatentOrdering((0, 1, 1))

    def test_from_slots_inverts_slot_of(self):
        ordering = LatentOrdering((2, 0, 1))
        assert ordering.slot_of == {2: 0, 0: 1, 1: 2}
        assert LatentOrdering.from_slots(ordering.slot_of) == ordering

    def test_from_slots_rejects_gaps(self):
        with pytest.raises(InvalidArgumentError):
            LatentOrdering.from_slots({0: 0, 1: 2})


class TestLatentNeighbors:

    @pytest.mark.parametrize("slot, m, k, expected", [
        (1, 4, 2, (0, 2)),
        (0, 4, 2, (1, 2)),
        (2, 5, 3, (1, 3, 0)),
        (0, 3, 5, (1, 2)),
        (3, 4, 1, (2,)),
    ])
    def test_examples(self, slot, m, k, expected):
        assert latent_neighbors(slot, m, k).indices == expected

    def test_keys_break_ties(self):
        # slot 3 (key 6) before slot 1 (key 8); slot 4 (key 5) beats slot 0 (key 9)
        assert latent_neighbors(2, 5, 3, keys=(9, 8, 7, 6, 5)).indices == (3, 1, 4)

    def test_self_excluded(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            m = int(rng.integers(1, 20))
            slot = int(rng.integers(0, m))
            k = int(rng.integers(1, 8))
            nbrs = latent_neighbors(slot, m, k).indices
            assert slot not in nbrs
            assert len(nbrs) == min(k, m - 1)

    @pytest.mark.parametrize("slot, m, k", [(0, 0, 1), (4, 4, 2), (-1, 3, 1), (0, 3, 0)])
    def test_invalid(self, slot, m, k):
        with pytest.raises(InvalidArgumentError):
            latent_neighbors(slot, m, k)

    def test_vectorized_neighbors_match(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            m = int(rng.integers(2, 15))
            k_eff = min(int(rng.integers(1, 7)), m - 1)
            seq = rng.permutation(m)
            matrix = _neighbor_matrix(seq, k_eff)
            for s in range(m):
                slots = latent_neighbors(s, m, k_eff, keys=tuple(seq)).indices
                assert sorted(matrix[s]) == sorted(seq[list(slots)])


class TestReconstruction:

    def test_interior_pattern(self):
        assert knn_reconstruct(1, LatentOrdering.identity(4), LINE, 2)[0] == 1.0

    def test_identical_patterns(self):
        v = [1.5, -2.0, 0.25]
        data = Dataset([v] * 6)
        for k in (1, 2, 3, 5):
            for i in range(6):
                np.testing.assert_array_equal(
                    knn_reconstruct(i, LatentOrdering.identity(6), data, k), v)

    def test_k_truncated_to_other_pattern(self):
        data = Dataset([[1.0, 2.0], [3.0, 5.0]])
        ordering = LatentOrdering.identity(2)
        np.testing.assert_array_equal(knn_reconstruct(0, ordering, data, 5), [3.0, 5.0])
        np.testing.assert_array_equal(knn_reconstruct(1, ordering, data, 5), [1.0, 2.0])

    def test_single_embedded_pattern(self):
        with pytest.raises(NoNeighborsError):
            knn_reconstruct(0, LatentOrdering((0,)), LINE, 2)

    def test_pattern_not_embedded(self):
        with pytest.raises(InvalidArgumentError):
            knn_reconstruct(3, LatentOrdering((0, 1)), LINE, 2)

    def test_within_neighbor_range(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            data, ordering, k = random_instance(rng)
            for i in range(data.N):
                slots = latent_neighbors(ordering.slot_of[i], ordering.M, k,
                                         keys=ordering.sequence).indices
                nbrs = data.patterns[ordering.array[list(slots)]]
                rec = knn_reconstruct(i, ordering, data, k)
                slack = 1e-12 * (1 + np.abs(nbrs).max())
                assert np.all(rec >= nbrs.min(axis=0) - slack)
                assert np.all(rec <= nbrs.max(axis=0) + slack)


class TestDsre:

    def test_line_example(self):
        assert dsre(LatentOrdering.identity(4), LINE, 2) == 1.125

    def test_pointwise_example(self):
        assert pointwise_error(0, LatentOrdering.identity(4), LINE, 2) == 2.25

    def test_identical_patterns(self):
        data = Dataset([[0.5, 4.0]] * 5)
        assert dsre(LatentOrdering((3, 1, 4, 0, 2)), data, 3) == 0.0

    def test_needs_two_patterns(self):
        with pytest.raises(NoNeighborsError):
            dsre(LatentOrdering.identity(1), Dataset([[1.0]]), 1)

    def test_needs_complete_ordering(self):
        with pytest.raises(InvalidArgumentError):
            dsre(LatentOrdering((0, 1, 2)), LINE, 2)

    def test_partial_dsre_of_complete_ordering(self):
        rng = np.random.default_rng(8)
        data, ordering, k = random_instance(rng)
        assert embedded_dsre(ordering, data, k) == dsre(ordering, data, k)


class TestInvariance:

    def test_reversal(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            data, ordering, k = random_instance(rng)
            assert dsre(ordering.reversed(), data, k) == dsre(ordering, data, k)

    def test_rigid_motion(self):
        rng = np.random.default_rng(43)
        for _ in range(200):
            data, ordering, k = random_instance(rng)
            q, _ = np.linalg.qr(rng.normal(size=(data.d, data.d)))
            moved = data.transformed(matrix=q, shift=rng.normal(size=data.d) * 5)
            np.testing.assert_allclose(dsre(ordering, moved, k), dsre(ordering, data, k),
                                       rtol=1e-9, atol=1e-12)

    def test_scaling(self):
        rng = np.random.default_rng(44)
        for _ in range(200):
            data, ordering, k = random_instance(rng)
            alpha = rng.uniform(0.1, 10)
            np.testing.assert_allclose(dsre(ordering, data.transformed(scale=alpha), k),
                                       alpha ** 2 * dsre(ordering, data, k), rtol=1e-9, atol=1e-12)

    def test_decomposition(self):
        rng = np.random.default_rng(45)
        for _ in range(200):
            data, ordering, k = random_instance(rng)
            errors = np.array([pointwise_error(i, ordering, data, k) for i in range(data.N)])
            np.testing.assert_array_equal(errors, all_pointwise_errors(ordering, data, k))
            assert dsre(ordering, data, k) == np.mean(errors)
