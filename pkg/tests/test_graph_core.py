import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import nets
import oracles
from collisionlab import (
    DisconnectedGraphError,
    EndpointOutOfRangeError,
    NonpositiveConductanceError,
    ResourceLimitError,
    build_network,
    is_bipartite,
    n_step_kernel,
    network_from_json,
    stationary_distribution,
    transition_prob,
)


class TestBuildNetwork:
    def test_single_edge(self):
        net = build_network(2, [(0, 1, 1.0)])
        assert net.vertex_conductance.tolist() == [1.0, 1.0]

    def test_p3_center_conductance(self):
        net = nets.p3()
        assert net.vertex_conductance[1] == 2.0

    def test_isolated_vertex_rejected(self):
        with pytest.raises(DisconnectedGraphError):
            build_network(3, [(0, 1, 1.0)])

    def test_nonpositive_conductance_rejected(self):
        with pytest.raises(NonpositiveConductanceError):
            build_network(2, [(0, 1, 0.0)])
        with pytest.raises(NonpositiveConductanceError):
            build_network(2, [(0, 1, -2.0)])

    def test_endpoint_out_of_range(self):
        with pytest.raises(EndpointOutOfRangeError):
            build_network(2, [(0, 2, 1.0)])

    def test_parallel_edges_aggregate(self):
        net = nets.two_vertex_multi()
        assert net.conductance_between(0, 1) == 4.0
        assert net.vertex_conductance[0] == 4.0

    def test_self_loop_counts_once(self):
        net = build_network(2, [(0, 1, 1.0), (0, 0, 2.0)])
        assert net.vertex_conductance[0] == 3.0
        assert net.conductance_between(0, 0) == 2.0
        assert transition_prob(net, 0, 0) == pytest.approx(2.0 / 3.0)

    def test_single_vertex_no_edges(self):
        net = build_network(1, [])
        assert net.one_step_matrix().tolist() == [[1.0]]
        assert stationary_distribution(net).tolist() == [1.0]

    def test_json_round_trip(self):
        net = nets.weighted_triangle()
        again = network_from_json(net.to_json_dict())
        assert again.edges == net.edges
        assert again.vertex_count == net.vertex_count


class TestTransitionProb:
    def test_p3_center(self):
        assert transition_prob(nets.p3(), 1, 0) == 0.5

    def test_p3_leaf(self):
        assert transition_prob(nets.p3(), 0, 1) == 1.0

    def test_parallel_edges_all_mass_across(self):
        assert transition_prob(nets.two_vertex_multi(), 0, 1) == 1.0


class TestNStepKernel:
    def test_zero_steps_identity(self):
        K = n_step_kernel(nets.p3(), 0)
        assert np.array_equal(K.matrix, np.eye(3))

    def test_p3_two_step_return(self):
        assert n_step_kernel(nets.p3(), 2).entry(0, 0) == pytest.approx(0.5)

    def test_triangle_two_step_return(self):
        K = n_step_kernel(nets.triangle(), 2)
        for v in range(3):
            assert K.entry(v, v) == pytest.approx(0.5)

    def test_dense_cap(self):
        net = nets.path_n(600)
        with pytest.raises(ResourceLimitError):
            n_step_kernel(net, 1)

    def test_matches_path_enumeration(self):
        net = nets.weighted_triangle()
        for n in range(5):
            dist = oracles.walk_distribution(net, 0, n)
            row = n_step_kernel(net, n).matrix[0]
            for v in range(3):
                assert row[v] == pytest.approx(dist.get(v, 0.0), abs=1e-12)


class TestKernelInvariants:
    @pytest.mark.parametrize("seed", range(6))
    def test_rows_stochastic_up_to_64(self, seed):
        net = nets.random_connected_network(seed, max_vertices=25)
        P = net.one_step_matrix()
        M = np.eye(net.vertex_count)
        for _ in range(64):
            M = M @ P
            assert np.abs(M.sum(axis=1) - 1.0).max() < 1e-12

    @pytest.mark.parametrize("seed", range(6))
    def test_chapman_kolmogorov(self, seed):
        net = nets.random_connected_network(seed, max_vertices=25)
        for a, b in [(1, 1), (2, 3), (5, 7)]:
            lhs = n_step_kernel(net, a + b).matrix
            rhs = n_step_kernel(net, a).matrix @ n_step_kernel(net, b).matrix
            assert np.abs(lhs - rhs).max() < 1e-10

    @pytest.mark.parametrize("seed", range(6))
    def test_detailed_balance_one_step(self, seed):
        net = nets.random_connected_network(seed, max_vertices=25)
        P = net.one_step_matrix()
        flow = net.vertex_conductance[:, None] * P
        assert np.abs(flow - flow.T).max() < 1e-12
        # both sides equal the pairwise conductance
        for u in range(net.vertex_count):
            for v in range(net.vertex_count):
                assert flow[u, v] == pytest.approx(net.conductance_between(u, v), abs=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    def test_stationary_invariance(self, seed):
        net = nets.random_connected_network(seed, max_vertices=25)
        pi = stationary_distribution(net)
        assert pi.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.abs(pi @ net.one_step_matrix() - pi).max() < 1e-12

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=25, deadline=None)
    def test_random_networks_row_stochastic(self, seed):
        net = nets.random_connected_network(seed, max_vertices=12)
        P = net.one_step_matrix()
        assert np.abs(P.sum(axis=1) - 1.0).max() < 1e-12
        assert P.min() >= 0.0


class TestStationaryDistribution:
    def test_p3_degree_proportional(self):
        assert stationary_distribution(nets.p3()).tolist() == [0.25, 0.5, 0.25]

    def test_regular_graph_uniform(self):
        pi = stationary_distribution(nets.cycle(5))
        assert np.allclose(pi, 0.2)

    def test_two_vertex_symmetric(self):
        assert stationary_distribution(nets.two_vertex(3.0)).tolist() == [0.5, 0.5]


class TestBipartite:
    def test_even_cycle(self):
        ok, colors = is_bipartite(nets.cycle(4))
        assert ok
        assert colors[0] != colors[1]

    def test_triangle(self):
        assert is_bipartite(nets.triangle()) == (False, None)

    def test_single_edge_coloring(self):
        ok, colors = is_bipartite(nets.single_edge())
        assert ok
        assert sorted(colors.tolist()) == [0, 1]

    def test_self_loop_is_odd_cycle(self):
        assert is_bipartite(nets.loop_triangle())[0] is False
        assert is_bipartite(build_network(2, [(0, 1, 1.0), (1, 1, 1.0)]))[0] is False
