"""Instrumented graph algorithms over a counted adjacency oracle.

All algorithms are written as resumable query machines (see classical.py)
over the flattened adjacency string, so the same code runs classically,
through the bomb compiler, and through the quantum first-deviation
simulation.  Pair (u, v) of an n-vertex graph sits at position
(u-1)*n + v; undirected graphs store a symmetric string and are queried at
the (min, max) pair.

Every machine remembers each answered pair in its own state, so no pair is
ever charged twice within a run; the shared AdjacencyOracle cache extends
the same discipline across runs (k-source sweeps).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .classical import (Answer, ClassicalQueryAlgorithm, ConstantGuesser,
                        Query, Transcript, TranscriptEntry)
from .oracles import CLASSICAL, HiddenString, QueryLedger

INF = float("inf")


def pair_position(n: int, u: int, v: int) -> int:
    """Flat 1-based position of the ordered pair (u, v)."""
    return (u - 1) * n + v


def position_pair(n: int, position: int) -> tuple[int, int]:
    return (position - 1) // n + 1, (position - 1) % n + 1


@dataclass
class GraphSpec:
    """Adjacency-matrix graph instance, vertices 1..n."""

    n: int
    directed: bool
    adjacency: np.ndarray
    left: tuple[int, ...] | None = None
    source: int | None = None
    sink: int | None = None

    def __post_init__(self):
        self.adjacency = np.asarray(self.adjacency, dtype=bool)
        if self.adjacency.shape != (self.n, self.n):
            raise ValueError(f"adjacency must be {self.n}x{self.n}")
        if self.adjacency.diagonal().any():
            raise ValueError("self-loops are not allowed")
        if not self.directed and not np.array_equal(self.adjacency,
                                                    self.adjacency.T):
            raise ValueError("undirected graph needs a symmetric adjacency")
        if self.left is not None:
            left = set(self.left)
            if not left or not left.issubset(range(1, self.n + 1)):
                raise ValueError("bipartition side out of range")
            for u in range(1, self.n + 1):
                for v in range(u + 1, self.n + 1):
                    if self.adjacency[u - 1, v - 1] and \
                            ((u in left) == (v in left)):
                        raise ValueError(f"edge ({u},{v}) inside one side")
        for label, v in (("source", self.source), ("sink", self.sink)):
            if v is not None and not 1 <= v <= self.n:
                raise ValueError(f"{label} {v} out of range")

    def edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u - 1, v - 1])

    @property
    def edge_count(self) -> int:
        total = int(self.adjacency.sum())
        return total if self.directed else total // 2

    @property
    def right(self) -> tuple[int, ...]:
        if self.left is None:
            raise ValueError("graph has no bipartition")
        left = set(self.left)
        return tuple(v for v in range(1, self.n + 1) if v not in left)

    def to_hidden_string(self) -> HiddenString:
        return HiddenString(tuple(int(b) for b in self.adjacency.reshape(-1)))

    def to_dict(self) -> dict:
        edges = [[u + 1, v + 1] for u in range(self.n) for v in range(self.n)
                 if self.adjacency[u, v] and (self.directed or u < v)]
        doc = {"n": self.n, "directed": self.directed, "edges": edges}
        if self.left is not None:
            doc["left"] = list(self.left)
        if self.source is not None:
            doc["source"] = self.source
        if self.sink is not None:
            doc["sink"] = self.sink
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "GraphSpec":
        n = int(doc["n"])
        directed = bool(doc["directed"])
        adj = np.zeros((n, n), dtype=bool)
        for u, v in doc["edges"]:
            adj[u - 1, v - 1] = True
            if not directed:
                adj[v - 1, u - 1] = True
        return cls(n=n, directed=directed, adjacency=adj,
                   left=tuple(doc["left"]) if "left" in doc else None,
                   source=doc.get("source"), sink=doc.get("sink"))


def load_graph(path) -> GraphSpec:
    with open(path) as fh:
        return GraphSpec.from_dict(json.load(fh))


def save_graph(graph: GraphSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(graph.to_dict(), fh, indent=1)
        fh.write("\n")


# --- generators (all seed-deterministic) -------------------------------------

def gen_gnp(n: int, p: float, seed: int, directed: bool = True) -> GraphSpec:
    rng = np.random.default_rng(seed)
    if directed:
        adj = rng.random((n, n)) < p
        np.fill_diagonal(adj, False)
    else:
        upper = np.triu(rng.random((n, n)) < p, k=1)
        adj = upper | upper.T
    return GraphSpec(n=n, directed=directed, adjacency=adj)


def gen_path(n: int, directed: bool = True) -> GraphSpec:
    adj = np.zeros((n, n), dtype=bool)
    for u in range(n - 1):
        adj[u, u + 1] = True
        if not directed:
            adj[u + 1, u] = True
    return GraphSpec(n=n, directed=directed, adjacency=adj)


def gen_complete_bipartite(nl: int, nr: int) -> GraphSpec:
    n = nl + nr
    adj = np.zeros((n, n), dtype=bool)
    adj[:nl, nl:] = True
    adj[nl:, :nl] = True
    return GraphSpec(n=n, directed=False, adjacency=adj,
                     left=tuple(range(1, nl + 1)))


def gen_random_bipartite(nl: int, nr: int, p: float, seed: int) -> GraphSpec:
    rng = np.random.default_rng(seed)
    n = nl + nr
    adj = np.zeros((n, n), dtype=bool)
    block = rng.random((nl, nr)) < p
    adj[:nl, nl:] = block
    adj[nl:, :nl] = block.T
    return GraphSpec(n=n, directed=False, adjacency=adj,
                     left=tuple(range(1, nl + 1)))


def gen_flow_network(n: int, p: float, seed: int) -> GraphSpec:
    g = gen_gnp(n, p, seed, directed=True)
    g.source, g.sink = 1, n
    return g


# --- counted, cached adjacency access ----------------------------------------

class AdjacencyOracle:
    """Deduplicating counted window onto a graph's adjacency bits.

    Each distinct (canonical) pair is charged once; repeat lookups are free
    cache hits.  The transcript records charged lookups with the attached
    guesser's prediction (default: guess no-edge).
    """

    def __init__(self, graph: GraphSpec, ledger: QueryLedger | None = None,
                 guess_bit=None):
        self.graph = graph
        self.ledger = ledger if ledger is not None else QueryLedger()
        self.guess_bit = guess_bit if guess_bit is not None else (lambda u, v: 0)
        self.cache: dict[tuple[int, int], int] = {}
        self.entries: list[TranscriptEntry] = []

    def canonical(self, u: int, v: int) -> tuple[int, int]:
        if self.graph.directed or u <= v:
            return (u, v)
        return (v, u)

    def query(self, u: int, v: int) -> int:
        if u == v:
            raise ValueError("self-pairs are never queried")
        key = self.canonical(u, v)
        if key in self.cache:
            return self.cache[key]
        bit = int(self.graph.edge(*key))
        self.cache[key] = bit
        self.ledger.charge(CLASSICAL)
        self.entries.append(TranscriptEntry(
            len(self.entries) + 1, pair_position(self.graph.n, *key),
            self.guess_bit(*key), bit))
        return bit

    @property
    def distinct_queries(self) -> int:
        return len(self.cache)

    def transcript(self, start: int = 0) -> Transcript:
        return Transcript(list(self.entries[start:]))


def no_edge_guesser() -> ConstantGuesser:
    return ConstantGuesser(0)


def _drive(machine: ClassicalQueryAlgorithm, oracle: AdjacencyOracle):
    """Run a query machine against an oracle; returns (answer, final state)."""
    state = machine.start(None)
    while True:
        action = machine.peek(state)
        if isinstance(action, Answer):
            return action.value, state
        u, v = position_pair(machine.n, action.position)
        machine.advance(state, oracle.query(u, v))


# --- single-source shortest paths ---------------------------------------------

@dataclass
class _BfsState:
    dist: list[float]
    pending: deque
    current: int | None
    cursor: int
    order: list[int]
    answer: tuple | None = None


class BfsSssp(ClassicalQueryAlgorithm):
    """Layered scan from a start vertex; queries (v, w) only while w is
    undiscovered, so every pair is asked at most once."""

    def __init__(self, n: int, start: int, directed: bool = True):
        if not 1 <= start <= n:
            raise ValueError(f"start vertex {start} out of range")
        self.n = n
        self.start_vertex = start
        self.directed = directed

    @property
    def string_length(self) -> int:
        return self.n * self.n

    @property
    def query_bound(self) -> int:
        return self.n * (self.n - 1)

    def start(self, rng=None):
        dist = [INF] * self.n
        dist[self.start_vertex - 1] = 0
        return _BfsState(dist=dist, pending=deque([self.start_vertex]),
                         current=None, cursor=1, order=[])

    def _settle(self, s: _BfsState) -> None:
        while s.answer is None:
            if s.current is None:
                if not s.pending:
                    s.answer = tuple(s.dist)
                    return
                s.current = s.pending.popleft()
                s.order.append(s.current)
                s.cursor = 1
            v = s.current
            while s.cursor <= self.n and (
                    s.cursor == v or s.dist[s.cursor - 1] != INF):
                s.cursor += 1
            if s.cursor > self.n:
                s.current = None
                continue
            return  # pending query (v, cursor)

    def peek(self, s: _BfsState):
        self._settle(s)
        if s.answer is not None:
            return Answer(s.answer)
        return Query(pair_position(self.n, s.current, s.cursor))

    def advance(self, s: _BfsState, bit: int) -> None:
        v, w = s.current, s.cursor
        if bit:
            s.dist[w - 1] = s.dist[v - 1] + 1
            s.pending.append(w)
        s.cursor += 1


def bfs_sssp(oracle: AdjacencyOracle, v_start: int,
             ) -> tuple[tuple, Transcript]:
    """Distances from v_start plus the charged-query transcript of this run."""
    machine = BfsSssp(oracle.graph.n, v_start, oracle.graph.directed)
    mark = len(oracle.entries)
    distances, state = _drive(machine, oracle)
    if not _nondecreasing([state.dist[v - 1] for v in state.order]):
        raise RuntimeError("processing order violated nondecreasing distances")
    return distances, oracle.transcript(mark)


def _nondecreasing(xs) -> bool:
    return all(a <= b for a, b in zip(xs, xs[1:]))


def k_source_sssp(oracle: AdjacencyOracle, sources) -> list[tuple]:
    """Per-source distances; the shared oracle cache deduplicates pairs."""
    sources = list(sources)
    if len(set(sources)) != len(sources):
        raise ValueError("sources must be distinct")
    return [bfs_sssp(oracle, s)[0] for s in sources]


# --- maximum bipartite matching (Hopcroft-Karp) --------------------------------

_S = 0  # virtual source in the layered graph


@dataclass
class _HkState:
    match: dict[int, int]
    known: dict[tuple[int, int], int]
    phase: int
    mode: str
    dist: dict[int, float]
    queue: deque
    current: int | None
    cursor: int
    stack: list[int]
    in_r: set
    dfs_cursor: dict[int, int]
    paths: list[list[int]]
    path_lengths: list[int]       # shortest augmenting length per phase
    pending: tuple[int, int] | None = None
    answer: tuple | None = None


class HopcroftKarp(ClassicalQueryAlgorithm):
    """Phased maximum bipartite matching over the layered residual digraph.

    Layered edges incident to the virtual endpoints and all matched edges
    are computed from the current matching for free; only unmatched X-to-Y
    probes touch the oracle, and results are remembered across phases.
    """

    def __init__(self, n: int, left):
        self.n = n
        self.left = tuple(sorted(left))
        self._left_set = set(self.left)
        self.right = tuple(v for v in range(1, n + 1)
                           if v not in self._left_set)
        self.t_node = n + 1

    @property
    def string_length(self) -> int:
        return self.n * self.n

    @property
    def query_bound(self) -> int:
        return self.n * self.n

    def start(self, rng=None):
        s = _HkState(match={}, known={}, phase=0, mode="bfs", dist={_S: 0},
                     queue=deque([_S]), current=None, cursor=0, stack=[],
                     in_r=set(), dfs_cursor={}, paths=[], path_lengths=[])
        return s

    def _pair_key(self, x: int, y: int) -> tuple[int, int]:
        return (x, y) if x <= y else (y, x)

    def _lookup(self, s: _HkState, x: int, y: int) -> int | None:
        return s.known.get(self._pair_key(x, y))

    def _begin_bfs(self, s: _HkState) -> None:
        s.mode = "bfs"
        s.dist = {_S: 0}
        s.queue = deque([_S])
        s.current = None
        s.cursor = 0

    def _matching_answer(self, s: _HkState) -> tuple:
        return tuple(sorted((x, s.match[x]) for x in self.left
                            if x in s.match))

    def _settle(self, s: _HkState) -> None:
        while s.answer is None and s.pending is None:
            if s.mode == "bfs":
                self._settle_bfs(s)
            else:
                self._settle_dfs(s)

    def _settle_bfs(self, s: _HkState) -> None:
        if s.current is None:
            if not s.queue:
                s.phase += 1
                if self.t_node in s.dist:
                    s.mode = "dfs"
                    s.stack = [_S]
                    s.in_r = {_S}
                    s.dfs_cursor = {}
                    s.paths = []
                else:
                    s.answer = self._matching_answer(s)
                return
            s.current = s.queue.popleft()
            s.cursor = 0
        v = s.current
        if v == _S:
            while s.cursor < len(self.left):
                x = self.left[s.cursor]
                s.cursor += 1
                if x not in s.match and x not in s.dist:
                    s.dist[x] = 1
                    s.queue.append(x)
            s.current = None
        elif v in self._left_set:
            while s.cursor < len(self.right):
                y = self.right[s.cursor]
                if y in s.dist or s.match.get(v) == y:
                    s.cursor += 1
                    continue
                bit = self._lookup(s, v, y)
                if bit is None:
                    s.pending = self._pair_key(v, y)
                    return  # suspend for the oracle
                s.cursor += 1
                if bit:
                    s.dist[y] = s.dist[v] + 1
                    s.queue.append(y)
            s.current = None
        else:  # v on the right side
            partner = s.match.get(v)
            if partner is not None and partner not in s.dist:
                s.dist[partner] = s.dist[v] + 1
                s.queue.append(partner)
            if partner is None and self.t_node not in s.dist:
                s.dist[self.t_node] = s.dist[v] + 1
            s.current = None

    def _dfs_candidates(self, s: _HkState, v: int):
        """Candidate targets one level deeper than v.

        The list depends only on distances and the matching, both frozen
        during a phase, so per-vertex cursors index it stably; membership in
        the used-vertex set is checked at consumption time.
        """
        if v == _S:
            return [x for x in self.left if s.dist.get(x) == 1]
        if v in self._left_set:
            want = s.dist[v] + 1
            return [y for y in self.right
                    if s.dist.get(y) == want and s.match.get(v) != y]
        want = s.dist[v] + 1
        out = []
        partner = s.match.get(v)
        if partner is not None and s.dist.get(partner) == want:
            out.append(partner)
        if partner is None and s.dist.get(self.t_node) == want:
            out.append(self.t_node)
        return out

    def _settle_dfs(self, s: _HkState) -> None:
        if not s.stack:
            for path in s.paths:
                inner = path[1:-1]
                for i in range(0, len(inner), 2):
                    x, y = inner[i], inner[i + 1]
                    s.match[x] = y
                    s.match[y] = x
            if self.t_node in s.dist:
                s.path_lengths.append(s.dist[self.t_node])
                if not s.paths:
                    raise RuntimeError("reachable sink but no augmenting path")
            self._begin_bfs(s)
            return
        v = s.stack[-1]
        if v == self.t_node:
            popped = []
            while s.stack[-1] != _S:
                popped.append(s.stack.pop())
            s.paths.append([_S] + popped[::-1])
            return
        candidates = self._dfs_candidates(s, v)
        cursor = s.dfs_cursor.get(v, 0)
        while cursor < len(candidates):
            w = candidates[cursor]
            if w in s.in_r:
                cursor += 1
                continue
            if v in self._left_set and w != self.t_node:
                bit = self._lookup(s, v, w)
                if bit is None:
                    s.dfs_cursor[v] = cursor  # stay on w; resolve then retry
                    s.pending = self._pair_key(v, w)
                    return
                if not bit:
                    cursor += 1
                    continue
            s.dfs_cursor[v] = cursor + 1
            s.stack.append(w)
            if w != self.t_node:
                s.in_r.add(w)
            return
        s.dfs_cursor[v] = cursor
        s.stack.pop()

    def peek(self, s: _HkState):
        self._settle(s)
        if s.answer is not None:
            return Answer(s.answer)
        u, v = s.pending
        return Query(pair_position(self.n, u, v))

    def advance(self, s: _HkState, bit: int) -> None:
        s.known[s.pending] = int(bit)
        s.pending = None


def hopcroft_karp(oracle: AdjacencyOracle) -> tuple[tuple, int, Transcript]:
    """Maximum matching, phase count, and this run's charged transcript."""
    graph = oracle.graph
    if graph.left is None:
        raise ValueError("matching requires a bipartition")
    machine = HopcroftKarp(graph.n, graph.left)
    mark = len(oracle.entries)
    matching, state = _drive(machine, oracle)
    if not all(a < b for a, b in zip(state.path_lengths, state.path_lengths[1:])):
        raise RuntimeError("phase path lengths failed to strictly increase")
    return matching, state.phase, oracle.transcript(mark)


def blocking_paths(edge_fn, nodes, dist: dict, s, t) -> list[list]:
    """Maximal set of vertex-disjoint shortest s-to-t paths in a layered graph.

    ``edge_fn(v, w)`` answers adjacency, consulted at most once per pair
    (depth-first with per-vertex cursors, stack front = last pushed).
    Returned paths share no vertices besides s and t.
    """
    order = list(nodes)
    paths: list[list] = []
    stack = [s]
    in_r = {s}
    cursor: dict = {}
    while stack:
        v = stack[-1]
        if v == t:
            popped = []
            while stack[-1] != s:
                popped.append(stack.pop())
            paths.append([s] + popped[::-1])
            continue
        i = cursor.get(v, 0)
        advanced = False
        while i < len(order):
            w = order[i]
            i += 1
            if w in in_r or dist.get(w) != dist.get(v, INF) + 1:
                continue
            if edge_fn(v, w):
                cursor[v] = i
                stack.append(w)
                if w != t:
                    in_r.add(w)
                advanced = True
                break
        if not advanced:
            cursor[v] = i
            stack.pop()
    return paths


# --- unit-capacity maximum flow (phased blocking sets) --------------------------

@dataclass
class _DinicState:
    flow: set
    known: dict[tuple[int, int], int]
    phase: int
    mode: str
    dist: dict[int, float]
    queue: deque
    current: int | None
    cursor: int
    stack: list[int]
    in_r: set
    dfs_cursor: dict[int, int]
    paths: list[list[int]]
    total: int = 0
    pending: tuple[int, int] | None = None
    answer: int | None = None


class DinicUnitFlow(ClassicalQueryAlgorithm):
    """Phased augmentation on the unit-capacity residual digraph.

    Reverse residual edges come from the known flow for free; forward edges
    need one adjacency probe each, remembered across phases.  Each phase
    augments along a maximal vertex-disjoint set of shortest paths.
    """

    def __init__(self, n: int, source: int, sink: int):
        if source == sink:
            raise ValueError("source and sink must differ")
        self.n = n
        self.source = source
        self.sink = sink

    @property
    def string_length(self) -> int:
        return self.n * self.n

    @property
    def query_bound(self) -> int:
        return self.n * self.n

    def start(self, rng=None):
        return _DinicState(flow=set(), known={}, phase=0, mode="bfs",
                           dist={self.source: 0}, queue=deque([self.source]),
                           current=None, cursor=1, stack=[], in_r=set(),
                           dfs_cursor={}, paths=[])

    def _begin_bfs(self, s: _DinicState) -> None:
        s.mode = "bfs"
        s.dist = {self.source: 0}
        s.queue = deque([self.source])
        s.current = None
        s.cursor = 1

    def _residual(self, s: _DinicState, v: int, w: int) -> int | None:
        """1/0 if decidable from flow and known bits, None if a probe is due."""
        if (w, v) in s.flow:
            return 1
        if (v, w) in s.flow:
            return 0
        bit = s.known.get((v, w))
        if bit is None:
            return None
        return bit

    def _settle(self, s: _DinicState) -> None:
        while s.answer is None and s.pending is None:
            if s.mode == "bfs":
                self._settle_bfs(s)
            else:
                self._settle_dfs(s)

    def _settle_bfs(self, s: _DinicState) -> None:
        if s.current is None:
            if not s.queue:
                s.phase += 1
                if self.sink in s.dist:
                    s.mode = "dfs"
                    s.stack = [self.source]
                    s.in_r = {self.source}
                    s.dfs_cursor = {}
                    s.paths = []
                else:
                    s.answer = s.total
                return
            s.current = s.queue.popleft()
            s.cursor = 1
        v = s.current
        while s.cursor <= self.n:
            w = s.cursor
            if w == v or w in s.dist:
                s.cursor += 1
                continue
            bit = self._residual(s, v, w)
            if bit is None:
                s.pending = (v, w)
                return
            s.cursor += 1
            if bit:
                s.dist[w] = s.dist[v] + 1
                s.queue.append(w)
        s.current = None

    def _settle_dfs(self, s: _DinicState) -> None:
        if not s.stack:
            for path in s.paths:
                for a, b in zip(path, path[1:]):
                    if (b, a) in s.flow:
                        s.flow.remove((b, a))
                    else:
                        s.flow.add((a, b))
            s.total += len(s.paths)
            if self.sink in s.dist and not s.paths:
                raise RuntimeError("reachable sink but no augmenting path")
            self._begin_bfs(s)
            return
        v = s.stack[-1]
        if v == self.sink:
            popped = []
            while s.stack[-1] != self.source:
                popped.append(s.stack.pop())
            s.paths.append([self.source] + popped[::-1])
            return
        cursor = s.dfs_cursor.get(v, 1)
        while cursor <= self.n:
            w = cursor
            if w == v or (w in s.in_r) or s.dist.get(w) != s.dist[v] + 1:
                cursor += 1
                continue
            bit = self._residual(s, v, w)
            if bit is None:
                s.dfs_cursor[v] = cursor
                s.pending = (v, w)
                return
            cursor += 1
            if bit:
                s.dfs_cursor[v] = cursor
                s.stack.append(w)
                if w != self.sink:
                    s.in_r.add(w)
                return
        s.dfs_cursor[v] = cursor
        s.stack.pop()

    def peek(self, s: _DinicState):
        self._settle(s)
        if s.answer is not None:
            return Answer(s.answer)
        return Query(pair_position(self.n, *s.pending))

    def advance(self, s: _DinicState, bit: int) -> None:
        s.known[s.pending] = int(bit)
        s.pending = None


def dinic_unit_flow(oracle: AdjacencyOracle, s: int, t: int,
                    ) -> tuple[int, int, Transcript]:
    """Max-flow value, phase count, and this run's charged transcript."""
    if not oracle.graph.directed:
        raise ValueError("unit-capacity flow expects a directed graph")
    machine = DinicUnitFlow(oracle.graph.n, s, t)
    mark = len(oracle.entries)
    value, state = _drive(machine, oracle)
    return value, state.phase, oracle.transcript(mark)


# --- independent reference implementations (test oracles) ----------------------

def reference_bfs_distances(graph: GraphSpec, start: int) -> tuple:
    dist = [INF] * graph.n
    dist[start - 1] = 0
    q = deque([start])
    while q:
        v = q.popleft()
        for w in range(1, graph.n + 1):
            if dist[w - 1] == INF and graph.edge(v, w):
                dist[w - 1] = dist[v - 1] + 1
                q.append(w)
    return tuple(dist)


def reference_max_matching(graph: GraphSpec) -> int:
    """Exhaustive bitmask recursion over the right side."""
    if graph.left is None:
        raise ValueError("matching requires a bipartition")
    left, right = graph.left, graph.right
    masks = []
    for x in left:
        m = 0
        for j, y in enumerate(right):
            if graph.edge(x, y):
                m |= 1 << j
        masks.append(m)
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def best(i: int, used: int) -> int:
        if i == len(masks):
            return 0
        out = best(i + 1, used)
        avail = masks[i] & ~used
        while avail:
            low = avail & (-avail)
            out = max(out, 1 + best(i + 1, used | low))
            avail ^= low
        return out

    result = best(0, 0)
    best.cache_clear()
    return result


def reference_max_flow(graph: GraphSpec, s: int, t: int) -> int:
    """Augmenting-path maximum flow on the raw unit-capacity matrix."""
    n = graph.n
    cap = graph.adjacency.astype(int).copy()
    total = 0
    while True:
        parent = {s: None}
        q = deque([s])
        while q and t not in parent:
            v = q.popleft()
            for w in range(1, n + 1):
                if w not in parent and cap[v - 1, w - 1] > 0:
                    parent[w] = v
                    q.append(w)
        if t not in parent:
            return total
        v = t
        while parent[v] is not None:
            u = parent[v]
            cap[u - 1, v - 1] -= 1
            cap[v - 1, u - 1] += 1
            v = u
        total += 1
