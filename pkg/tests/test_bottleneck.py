import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renyi_ib.bottleneck import Channel, DeterministicMap, induce, objective, to_channel
from renyi_ib.errors import ValidationError
from renyi_ib.prob import mutual_information, renyi_entropy, shannon_entropy

from helpers import point_by_loops, random_joint

G_TABLE = DeterministicMap((0, 1, 1, 0, 0))  # {1,4,5} -> 1, {2,3} -> 2


def random_channel(rng, nx, M):
    return Channel(rng.dirichlet(np.full(M, 0.5), size=nx))


class TestInduce:
    def test_identity_keeps_all_relevance(self, t1a):
        s = induce(t1a, DeterministicMap.identity(5), 0.3)
        assert s.relevance == pytest.approx(1.5, abs=1e-12)

    def test_constant_map_is_trivial(self, t1a):
        s = induce(t1a, DeterministicMap.constant(5), 0.5, M=3)
        assert s.point == (0.0, 0.0)

    @pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9, 1.0])
    def test_table_two_cluster_pair(self, t1a, alpha):
        s = induce(t1a, G_TABLE, alpha, M=2)
        assert s.renyi_cost == pytest.approx(1.0, abs=1e-12)
        assert s.relevance == pytest.approx(1.0, abs=1e-12)

    def test_dimension_mismatch(self, t1a):
        with pytest.raises(ValidationError, match="rows"):
            induce(t1a, Channel(np.ones((4, 1))), 1.0)

    def test_dead_cluster_conditional_is_masked(self, t1a):
        s = induce(t1a, G_TABLE, 1.0, M=4)
        np.testing.assert_array_equal(s.live, [True, True, False, False])
        assert np.all(np.isnan(s.p_y_given_w[:, 2:]))
        np.testing.assert_allclose(s.p_yw.sum(axis=0), s.p_w.masses, atol=1e-12)

    def test_matches_cluster_loops(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            j = random_joint(rng, int(rng.integers(1, 5)), int(rng.integers(1, 6)), sparsity=0.3)
            M = int(rng.integers(1, 4))
            g = DeterministicMap(tuple(rng.integers(0, M, size=j.x_size)))
            for alpha in (0.3, 1.0):
                s = induce(t := j, to_channel(g, M), alpha)
                h, i = point_by_loops(t.matrix.tolist(), g.assignment, alpha)
                assert s.renyi_cost == pytest.approx(h, abs=1e-12)
                assert s.relevance == pytest.approx(i, abs=1e-12)


class TestObjective:
    def test_zero_beta_constant_map(self, t1a):
        assert objective(induce(t1a, DeterministicMap.constant(5), 0.5), 0.0) == 0.0

    def test_beta_two_at_unit_pair(self, t1a):
        assert objective(induce(t1a, G_TABLE, 0.5), 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_identity_shannon(self, t1a):
        assert objective(induce(t1a, DeterministicMap.identity(5), 1.0), 1.0) == pytest.approx(-0.75, abs=1e-12)


class TestToChannel:
    def test_identity(self):
        np.testing.assert_array_equal(to_channel(DeterministicMap.identity(3), 3).matrix, np.eye(3))

    def test_constant(self):
        np.testing.assert_array_equal(to_channel(DeterministicMap.constant(4), 1).matrix, np.ones((4, 1)))

    def test_table_map(self):
        expected = [[1, 0], [0, 1], [0, 1], [1, 0], [1, 0]]
        np.testing.assert_array_equal(to_channel(G_TABLE, 2).matrix, expected)

    def test_out_of_range(self):
        with pytest.raises(ValidationError, match="outside 1..2"):
            to_channel(DeterministicMap((0, 2)), 2)

    def test_string_round_trip(self):
        assert G_TABLE.to_string() == "12211"
        assert DeterministicMap.from_string("12211") == G_TABLE
        wide = DeterministicMap((0, 11, 3))
        assert wide.to_string() == "1-12-4"
        assert DeterministicMap.from_string(wide.to_string()) == wide


class TestChannelValidation:
    def test_rows_renormalized(self):
        c = Channel([[0.5, 0.5 + 1e-10]])
        assert c.matrix.sum() == pytest.approx(1.0, abs=1e-15)

    def test_bad_row(self):
        with pytest.raises(ValidationError, match="row x=1"):
            Channel([[1.0, 0.0], [0.3, 0.3]])

    def test_negative(self):
        with pytest.raises(ValidationError, match=r"\(0, 1\)"):
            Channel([[1.5, -0.5]])


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.integers(1, 4), st.floats(0.05, 1.0), st.integers(0, 2**32 - 1))
def test_data_processing_and_entropy_chain(ny, nx, M, alpha, seed):
    rng = np.random.default_rng(seed)
    j = random_joint(rng, ny, nx, sparsity=0.3)
    s = induce(j, random_channel(rng, nx, M), alpha)
    assert s.relevance <= mutual_information(j) + 1e-12
    assert s.relevance <= shannon_entropy(s.p_w) + 1e-12
    assert shannon_entropy(s.p_w) <= renyi_entropy(s.p_w, alpha) + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_relabeling_leaves_point_unchanged(ny, nx, M, seed):
    rng = np.random.default_rng(seed)
    j = random_joint(rng, ny, nx)
    c = random_channel(rng, nx, M)
    perm = rng.permutation(M)
    a = induce(j, c, 0.4)
    b = induce(j, Channel(c.matrix[:, np.argsort(perm)]), 0.4)
    assert b.renyi_cost == pytest.approx(a.renyi_cost, abs=1e-12)
    assert b.relevance == pytest.approx(a.relevance, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.integers(1, 4), st.floats(0.0, 1.0), st.integers(0, 2**32 - 1))
def test_output_marginal_is_affine_in_channel(nx, M, lam, seed):
    rng = np.random.default_rng(seed)
    j = random_joint(rng, 3, nx)
    c1, c2 = random_channel(rng, nx, M), random_channel(rng, nx, M)
    mix = Channel(lam * c1.matrix + (1 - lam) * c2.matrix)
    expected = lam * induce(j, c1, 1.0).p_w.masses + (1 - lam) * induce(j, c2, 1.0).p_w.masses
    np.testing.assert_allclose(induce(j, mix, 1.0).p_w.masses, expected, atol=1e-12)
