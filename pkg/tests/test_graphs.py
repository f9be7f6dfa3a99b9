import numpy as np
import pytest

from bombsim.classical import Answer, ConstantGuesser, derive_seed, run_classical
from bombsim.graphs import (AdjacencyOracle, BfsSssp, DinicUnitFlow,
                            GraphSpec, HopcroftKarp, bfs_sssp, blocking_paths,
                            dinic_unit_flow, gen_complete_bipartite,
                            gen_flow_network, gen_gnp, gen_path,
                            gen_random_bipartite, hopcroft_karp,
                            k_source_sssp, load_graph, pair_position,
                            position_pair, reference_bfs_distances,
                            reference_max_flow, reference_max_matching,
                            save_graph)

INF = float("inf")


class TestPositions:
    def test_roundtrip(self):
        n = 7
        for u in range(1, n + 1):
            for v in range(1, n + 1):
                assert position_pair(n, pair_position(n, u, v)) == (u, v)


class TestGraphSpec:
    def test_rejects_self_loop(self):
        adj = np.zeros((2, 2), dtype=bool)
        adj[0, 0] = True
        with pytest.raises(ValueError):
            GraphSpec(n=2, directed=True, adjacency=adj)

    def test_rejects_asymmetric_undirected(self):
        adj = np.zeros((2, 2), dtype=bool)
        adj[0, 1] = True
        with pytest.raises(ValueError):
            GraphSpec(n=2, directed=False, adjacency=adj)

    def test_rejects_edge_inside_one_side(self):
        adj = np.zeros((3, 3), dtype=bool)
        adj[0, 1] = adj[1, 0] = True
        with pytest.raises(ValueError):
            GraphSpec(n=3, directed=False, adjacency=adj, left=(1, 2))

    def test_file_roundtrip(self, tmp_path):
        g = gen_random_bipartite(3, 4, 0.5, 12)
        g.source, g.sink = 1, 7
        path = tmp_path / "g.json"
        save_graph(g, path)
        back = load_graph(path)
        assert back.n == g.n and back.directed == g.directed
        assert np.array_equal(back.adjacency, g.adjacency)
        assert back.left == g.left
        assert (back.source, back.sink) == (1, 7)

    def test_generators_are_seed_deterministic(self):
        a = gen_gnp(10, 0.3, 5, directed=True)
        b = gen_gnp(10, 0.3, 5, directed=True)
        assert np.array_equal(a.adjacency, b.adjacency)
        c = gen_gnp(10, 0.3, 6, directed=True)
        assert not np.array_equal(a.adjacency, c.adjacency)


class TestAdjacencyOracle:
    def test_cache_dedup(self):
        g = gen_complete_bipartite(2, 2)
        oracle = AdjacencyOracle(g)
        assert oracle.query(1, 3) == 1
        assert oracle.query(3, 1) == 1  # canonical pair, cache hit
        assert oracle.distinct_queries == 1
        assert oracle.ledger.count("classical") == 1

    def test_ledger_count_equals_cache_size(self):
        g = gen_gnp(8, 0.4, 3, directed=True)
        oracle = AdjacencyOracle(g)
        rng = np.random.default_rng(0)
        for _ in range(60):
            u, v = rng.integers(1, 9, size=2)
            if u != v:
                oracle.query(int(u), int(v))
        assert oracle.ledger.count("classical") == oracle.distinct_queries

    def test_rejects_self_pair(self):
        oracle = AdjacencyOracle(gen_path(3))
        with pytest.raises(ValueError):
            oracle.query(2, 2)


class TestBfs:
    def test_path_graph(self):
        oracle = AdjacencyOracle(gen_path(3))
        dists, tr = bfs_sssp(oracle, 1)
        assert dists == (0, 1, 2)
        assert len(tr) <= 9

    def test_edgeless(self):
        g = GraphSpec(n=4, directed=True, adjacency=np.zeros((4, 4), bool))
        dists, tr = bfs_sssp(AdjacencyOracle(g), 1)
        assert dists == (0, INF, INF, INF)
        assert tr.wrong_guesses == 0

    def test_200_random_digraphs_match_reference(self):
        rng = np.random.default_rng(42)
        for i in range(200):
            n = int(rng.integers(2, 65))
            g = gen_gnp(n, min(1.0, 3.0 / n), derive_seed(1000, i),
                        directed=True)
            oracle = AdjacencyOracle(g)
            dists, tr = bfs_sssp(oracle, 1)
            assert dists == reference_bfs_distances(g, 1)
            assert tr.wrong_guesses <= n - 1
            assert oracle.distinct_queries <= n * (n - 1)

    def test_machine_runs_against_hidden_string(self):
        g = gen_gnp(12, 0.25, 9, directed=True)
        answer, tr = run_classical(BfsSssp(12, 1), g.to_hidden_string(), 0,
                                   guesser=ConstantGuesser(0))
        assert answer == reference_bfs_distances(g, 1)


class TestKSource:
    def test_k1_equals_bfs(self):
        g = gen_gnp(10, 0.3, 2, directed=True)
        a = k_source_sssp(AdjacencyOracle(g), [1])[0]
        b = bfs_sssp(AdjacencyOracle(g), 1)[0]
        assert a == b

    def test_complete_graph_shared_cache(self):
        n = 6
        adj = ~np.eye(n, dtype=bool)
        g = GraphSpec(n=n, directed=True, adjacency=adj)
        oracle = AdjacencyOracle(g)
        k_source_sssp(oracle, list(range(1, n + 1)))
        assert oracle.distinct_queries <= n * (n - 1)

    def test_wrong_guess_budget(self):
        rng = np.random.default_rng(3)
        for i in range(20):
            n = int(rng.integers(3, 20))
            k = int(rng.integers(1, n + 1))
            g = gen_gnp(n, 0.3, derive_seed(2000, i), directed=True)
            oracle = AdjacencyOracle(g)
            dists = k_source_sssp(oracle, list(range(1, k + 1)))
            for s, d in enumerate(dists, start=1):
                assert d == reference_bfs_distances(g, s)
            wrong = sum(1 for e in oracle.entries if e.actual == 1)
            assert wrong <= k * (n - 1)

    def test_duplicate_sources_rejected(self):
        with pytest.raises(ValueError):
            k_source_sssp(AdjacencyOracle(gen_path(3)), [1, 1])


class TestHopcroftKarp:
    def test_complete_bipartite_2x2(self):
        matching, phases, _ = hopcroft_karp(
            AdjacencyOracle(gen_complete_bipartite(2, 2)))
        assert len(matching) == 2

    def test_empty_graph_one_phase(self):
        g = GraphSpec(n=4, directed=False, adjacency=np.zeros((4, 4), bool),
                      left=(1, 2))
        matching, phases, _ = hopcroft_karp(AdjacencyOracle(g))
        assert matching == ()
        assert phases == 1

    def test_exhaustive_tiny_bipartite(self):
        for nl, nr in ((1, 1), (2, 2), (3, 2), (3, 3)):
            n = nl + nr
            cells = [(x, y) for x in range(nl) for y in range(nr)]
            for mask in range(1 << len(cells)):
                adj = np.zeros((n, n), dtype=bool)
                for b, (x, y) in enumerate(cells):
                    if (mask >> b) & 1:
                        adj[x, nl + y] = adj[nl + y, x] = True
                g = GraphSpec(n=n, directed=False, adjacency=adj,
                              left=tuple(range(1, nl + 1)))
                matching, _, _ = hopcroft_karp(AdjacencyOracle(g))
                assert len(matching) == reference_max_matching(g)

    def test_200_random_instances(self):
        rng = np.random.default_rng(7)
        for i in range(200):
            nl = int(rng.integers(1, 7))
            nr = int(rng.integers(1, 7))
            g = gen_random_bipartite(nl, nr, float(rng.uniform(0.1, 0.9)),
                                     derive_seed(3000, i))
            oracle = AdjacencyOracle(g)
            matching, phases, tr = hopcroft_karp(oracle)
            assert len(matching) == reference_max_matching(g)
            n = nl + nr
            assert tr.wrong_guesses <= phases * 2 * n
            assert oracle.distinct_queries <= nl * nr

    def test_matching_is_vertex_disjoint_and_real(self):
        g = gen_random_bipartite(5, 5, 0.5, 11)
        matching, _, _ = hopcroft_karp(AdjacencyOracle(g))
        seen = set()
        for x, y in matching:
            assert g.edge(x, y)
            assert x not in seen and y not in seen
            seen.update((x, y))


class TestBlockingPaths:
    @staticmethod
    def h_view(g: GraphSpec, matching: dict):
        """Layered residual edges for a bipartite matching instance."""
        left = set(g.left)
        s, t = 0, g.n + 1

        def edge(v, w):
            if v == s:
                return w in left and w not in matching
            if w == t:
                return v not in left and v not in matching
            if v in left and w not in left and w != t:
                return g.edge(v, w) and matching.get(v) != w
            if v not in left and w in left:
                return matching.get(v) == w
            return False

        return edge, [s] + list(range(1, g.n + 1)) + [t], s, t

    @staticmethod
    def bfs_dist(edge, nodes, s):
        from collections import deque
        dist = {s: 0}
        q = deque([s])
        while q:
            v = q.popleft()
            for w in nodes:
                if w not in dist and edge(v, w):
                    dist[w] = dist[v] + 1
                    q.append(w)
        return dist

    def test_no_path_empty(self):
        g = GraphSpec(n=2, directed=False, adjacency=np.zeros((2, 2), bool),
                      left=(1,))
        edge, nodes, s, t = self.h_view(g, {})
        dist = self.bfs_dist(edge, nodes, s)
        assert blocking_paths(edge, nodes, dist, s, t) == []

    def test_k22_two_disjoint_paths(self):
        g = gen_complete_bipartite(2, 2)
        edge, nodes, s, t = self.h_view(g, {})
        dist = self.bfs_dist(edge, nodes, s)
        paths = blocking_paths(edge, nodes, dist, s, t)
        assert len(paths) == 2
        for p in paths:
            assert len(p) == 4  # s, x, y, t
        interior = [v for p in paths for v in p[1:-1]]
        assert len(interior) == len(set(interior))

    def test_maximal_and_disjoint_on_random_instances(self):
        rng = np.random.default_rng(13)
        for i in range(60):
            nl = int(rng.integers(1, 6))
            nr = int(rng.integers(1, 6))
            g = gen_random_bipartite(nl, nr, float(rng.uniform(0.2, 0.9)),
                                     derive_seed(4000, i))
            edge, nodes, s, t = self.h_view(g, {})
            dist = self.bfs_dist(edge, nodes, s)
            paths = blocking_paths(edge, nodes, dist, s, t)
            if t not in dist:
                assert paths == []
                continue
            used = set()
            for p in paths:
                assert len(p) - 1 == dist[t]
                for a, b in zip(p, p[1:]):
                    assert edge(a, b)
                for v in p[1:-1]:
                    assert v not in used
                    used.add(v)
            # maximality: no shortest s-t path survives outside `used`
            def pruned(v, w):
                return v not in used and w not in used and edge(v, w)
            d2 = self.bfs_dist(pruned, nodes, s)
            assert d2.get(t, INF) > dist[t]


class TestDinic:
    def test_single_edge(self):
        adj = np.zeros((2, 2), dtype=bool)
        adj[0, 1] = True
        g = GraphSpec(n=2, directed=True, adjacency=adj)
        value, phases, _ = dinic_unit_flow(AdjacencyOracle(g), 1, 2)
        assert value == 1

    def test_disconnected(self):
        g = GraphSpec(n=3, directed=True, adjacency=np.zeros((3, 3), bool))
        value, phases, _ = dinic_unit_flow(AdjacencyOracle(g), 1, 3)
        assert value == 0
        assert phases == 1

    def test_200_random_digraphs(self):
        rng = np.random.default_rng(21)
        for i in range(200):
            n = int(rng.integers(2, 13))
            g = gen_flow_network(n, float(rng.uniform(0.1, 0.6)),
                                 derive_seed(5000, i))
            value, phases, _ = dinic_unit_flow(AdjacencyOracle(g), 1, n)
            assert value == reference_max_flow(g, 1, n)

    def test_rejects_undirected(self):
        with pytest.raises(ValueError):
            dinic_unit_flow(AdjacencyOracle(gen_complete_bipartite(2, 2)), 1, 4)

    def test_machine_form_agrees(self):
        g = gen_flow_network(8, 0.3, 17)
        value, _, _ = dinic_unit_flow(AdjacencyOracle(g), 1, 8)
        answer, _ = run_classical(DinicUnitFlow(8, 1, 8),
                                  g.to_hidden_string(), 0)
        assert answer == value


class TestHopcroftKarpInternals:
    def test_phase_lengths_strictly_increase(self):
        rng = np.random.default_rng(31)
        for i in range(40):
            nl = int(rng.integers(2, 7))
            nr = int(rng.integers(2, 7))
            g = gen_random_bipartite(nl, nr, float(rng.uniform(0.3, 0.9)),
                                     derive_seed(6000, i))
            machine = HopcroftKarp(g.n, g.left)
            state = machine.start(None)
            x = g.to_hidden_string()
            while True:
                action = machine.peek(state)
                if isinstance(action, Answer):
                    break
                machine.advance(state, x.bit(action.position))
            lengths = state.path_lengths
            assert all(a < b for a, b in zip(lengths, lengths[1:]))
