"""Exact existence characterization, exhaustive brute-force oracle over the
reconfiguration state graph, small-diameter scheduling, gadget families, and
the small-graph enumerator used by the equivalence test."""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass

from .errors import InputError, InternalError
from .graph import (
    Graph,
    VertexSet,
    complement_restricted,
    connected_components,
    diameter,
    distances_from,
    is_mis,
)
from .schedule import PropertySpec, ReconfigInstance, Schedule, validate


@dataclass(frozen=True)
class BlockerReport:
    """Verdict of the three-condition existence test.

    A schedule fails to exist exactly when alpha and beta are fully connected,
    every epsilon-node is fully connected to alpha or to beta, and the
    complement graph on those epsilon-nodes has no path from the alpha-only
    side to the beta-only side.
    """

    blocked: bool
    cond1_fully_connected: bool
    cond2_eps_covered: bool
    cond3_no_complement_path: bool
    witness: tuple | None = None


def check_blocker(inst: ReconfigInstance) -> BlockerReport:
    g, alpha, beta = inst.graph, inst.alpha, inst.beta
    if not g.nodes:
        raise InputError("cannot classify the empty graph")

    cond1, witness1 = True, None
    for a in sorted(alpha):
        for b in sorted(beta):
            if not g.has_edge(a, b):
                cond1, witness1 = False, ("non-adjacent-pair", a, b)
                break
        if not cond1:
            break

    eps = g.nodes - alpha - beta
    eps_alpha = frozenset(e for e in eps if alpha <= g.neighbors(e))
    eps_beta = frozenset(e for e in eps if beta <= g.neighbors(e))
    uncovered = sorted(eps - eps_alpha - eps_beta)
    cond2 = not uncovered
    witness2 = ("free-epsilon-node", uncovered[0]) if uncovered else None

    complement = complement_restricted(g, eps_alpha | eps_beta)
    sources = sorted(eps_beta - eps_alpha)
    targets = eps_alpha - eps_beta
    path = _shortest_path(complement, sources, targets)
    cond3 = path is None
    witness3 = ("complement-path", tuple(path)) if path else None

    blocked = cond1 and cond2 and cond3
    witness = None
    if not blocked:
        witness = witness1 if not cond1 else (witness2 if not cond2 else witness3)
    return BlockerReport(blocked, cond1, cond2, cond3, witness)


def _shortest_path(g: Graph, sources: list[int], targets: VertexSet) -> list[int] | None:
    parent: dict[int, int | None] = {s: None for s in sources}
    queue = deque(sources)
    while queue:
        v = queue.popleft()
        if v in targets:
            path = [v]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return list(reversed(path))
        for w in sorted(g.neighbors(v)):
            if w not in parent:
                parent[w] = v
                queue.append(w)
    return None


@dataclass(frozen=True)
class OracleResult:
    """Ground truth from breadth-first search over the state graph.

    ``exists`` is None when the state cap was hit before the search finished;
    that outcome is inconclusive, never a false negative.
    """

    exists: bool | None
    min_length: int | None
    witness: Schedule | None
    states_explored: int


ORACLE_NODE_LIMIT = 20


def brute_force_oracle(
    inst: ReconfigInstance,
    prop: PropertySpec = PropertySpec(4),
    cap_states: int = 1_000_000,
) -> OracleResult:
    """Shortest schedule via BFS over all independent d-dominating sets.

    States are connected when their symmetric difference is independent, which
    permits simultaneous additions and removals in one step.
    """
    g = inst.graph
    nodes = sorted(g.nodes)
    n = len(nodes)
    if n > ORACLE_NODE_LIMIT:
        raise InputError(f"oracle limited to {ORACLE_NODE_LIMIT} nodes, got {n}")
    index = {v: i for i, v in enumerate(nodes)}
    adj = [0] * n
    for v in nodes:
        for w in g.neighbors(v):
            adj[index[v]] |= 1 << index[w]
    balls = []
    for v in nodes:
        dist = distances_from(g, v)
        balls.append(sum(1 << index[w] for w, d in dist.items() if d <= prop.d))

    def independent(mask: int) -> bool:
        rest = mask
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            if adj[i] & mask:
                return False
            rest ^= low
        return True

    full = (1 << n) - 1
    states = [m for m in range(full + 1) if independent(m) and all(b & m for b in balls)]
    alpha_mask = sum(1 << index[v] for v in inst.alpha)
    beta_mask = sum(1 << index[v] for v in inst.beta)

    parent: dict[int, int | None] = {alpha_mask: None}
    queue = deque([alpha_mask])
    explored = 0
    while queue:
        cur = queue.popleft()
        explored += 1
        if cur == beta_mask:
            masks = [cur]
            while parent[masks[-1]] is not None:
                masks.append(parent[masks[-1]])
            masks.reverse()
            steps = tuple(frozenset(nodes[i] for i in range(n) if m >> i & 1) for m in masks)
            return OracleResult(True, len(masks) - 1, Schedule(steps), explored)
        for nxt in states:
            if nxt not in parent and independent(cur ^ nxt):
                if len(parent) >= cap_states:
                    return OracleResult(None, None, None, explored)
                parent[nxt] = cur
                queue.append(nxt)
    return OracleResult(False, None, None, explored)


def small_diameter_fallback(inst: ReconfigInstance) -> Schedule | None:
    """Constructive schedule for diameter <= 3 graphs, or None when blocked.

    At this diameter any nonempty set 4-dominates the whole graph, so the
    three ways a blocking condition can fail each yield a direct template:
    insert a beta-node missing some alpha-node; route through a free
    epsilon-node; or walk a complement path between the epsilon sides.
    """
    g = inst.graph
    diam = diameter(g)
    if diam == math.inf or diam > 3:
        raise InputError("fallback applies to connected graphs of diameter at most 3")
    alpha, beta = inst.alpha, inst.beta
    if alpha == beta:
        return Schedule((alpha,))
    report = check_blocker(inst)
    if report.blocked:
        return None

    steps: list[VertexSet]
    if not report.cond1_fully_connected:
        _, _, b = report.witness
        keep = alpha - g.neighbors(b)
        steps = [alpha, keep, keep | {b}, frozenset({b}), beta]
    elif not report.cond2_eps_covered:
        _, e = report.witness
        a = min(alpha - g.neighbors(e))
        b = min(beta - g.neighbors(e))
        steps = [alpha, {a}, {a, e}, {e}, {e, b}, {b}, beta]
    else:
        _, path = report.witness
        path = list(path)  # runs from the beta-side to the alpha-side
        if not (beta <= g.neighbors(path[0])):
            path.reverse()
        a = min(alpha - g.neighbors(path[0]))
        b = min(beta - g.neighbors(path[-1]))
        steps = [alpha, {a}, {a, path[0]}]
        for prev, nxt in zip(path, path[1:]):
            steps.append(frozenset({prev}))
            steps.append(frozenset({prev, nxt}))
        steps = steps + [{path[-1]}, {path[-1], b}, {b}, beta]
    sched = Schedule(tuple(frozenset(s) for s in steps))
    outcome = validate(inst, sched, PropertySpec(4))
    if not outcome.valid:
        raise InternalError(f"fallback schedule invalid: {outcome.first_violation.describe()}")
    return sched


def greedy_mis(g: Graph, order: list[int]) -> VertexSet:
    chosen: set[int] = set()
    for v in order:
        if not (g.neighbors(v) & chosen):
            chosen.add(v)
    return frozenset(chosen)


def gen_gadget(
    family: str,
    n: int | None = None,
    k: int | None = None,
    p: float | None = None,
    seed: int = 0,
) -> ReconfigInstance:
    """Deterministic instance families used by the impossibility and scaling
    experiments.  Structural properties are verified by tests through the
    oracle, never assumed."""
    if family == "threedom-blocker":
        g = Graph(range(5), [(i, i + 1) for i in range(4)])
        return ReconfigInstance(g, frozenset({0, 2, 4}), frozenset({1, 3}))
    if family == "threedom-linear":
        if n is None or n < 7:
            raise InputError("threedom-linear needs n >= 7")
        return _threedom_linear((n + 2) // 3)
    if family == "logstar":
        if n is None or k is None or k < 3:
            raise InputError("logstar needs n and k >= 3")
        return _logstar_ring(max(3, n // (k + 1)), k)
    if family == "star":
        if k is None or k < 1:
            raise InputError("star needs k >= 1")
        g = Graph(range(k + 1), [(0, i) for i in range(1, k + 1)])
        return ReconfigInstance(g, frozenset({0}), frozenset(range(1, k + 1)))
    if family == "random":
        if n is None:
            raise InputError("random needs n")
        return random_instance(n, p if p is not None else 2.5 / max(n, 2), seed)
    if family == "alt-path":
        if n is None or n < 2:
            raise InputError("alt-path needs n >= 2")
        g = Graph(range(n), [(i, i + 1) for i in range(n - 1)])
        return ReconfigInstance(g, frozenset(range(0, n, 2)), frozenset(range(1, n, 2)))
    if family == "alt-cycle":
        if n is None or n < 4 or n % 2:
            raise InputError("alt-cycle needs even n >= 4")
        g = Graph(range(n), [(i, (i + 1) % n) for i in range(n)])
        return ReconfigInstance(g, frozenset(range(0, n, 2)), frozenset(range(1, n, 2)))
    raise InputError(f"unknown family {family!r}")


def _threedom_linear(k: int) -> ReconfigInstance:
    """Chain of k beta-hubs: the head hub can always start, each later hub can
    only follow its predecessor once 3-domination of its pendant is restored.

    Spine b_0 a_0 b_1 a_1 ... b_{k-1}; every hub except the head carries a
    pendant alpha-node reachable only through it.
    """
    hubs = [2 * i for i in range(k)]
    connectors = [2 * i + 1 for i in range(k - 1)]
    pendants = [2 * k - 1 + i for i in range(1, k)]
    edges = []
    for i in range(k - 1):
        edges.append((hubs[i], connectors[i]))
        edges.append((connectors[i], hubs[i + 1]))
    for i in range(1, k):
        edges.append((hubs[i], pendants[i - 1]))
    g = Graph(hubs + connectors + pendants, edges)
    return ReconfigInstance(g, frozenset(connectors + pendants), frozenset(hubs))


def _logstar_ring(m: int, k: int) -> ReconfigInstance:
    """Ring of m gadgets, each a (k-1)-clique holding one alpha- and one
    beta-node, flanked by two epsilon-nodes; k-regular by construction."""
    alpha, beta = set(), set()
    nodes: list[int] = []
    edges: list[tuple[int, int]] = []
    gadget_size = k + 1  # (k-1)-clique plus two outer epsilon-nodes
    for i in range(m):
        base = i * gadget_size
        clique = list(range(base, base + k - 1))
        left, right = base + k - 1, base + k
        nodes.extend(clique + [left, right])
        alpha.add(clique[0])
        beta.add(clique[1])
        for a, b in itertools.combinations(clique, 2):
            edges.append((a, b))
        for c in clique:
            edges.append((left, c))
            edges.append((right, c))
    for i in range(m):
        right = i * gadget_size + k
        nxt_left = ((i + 1) % m) * gadget_size + k - 1
        edges.append((right, nxt_left))
    g = Graph(nodes, edges)
    return ReconfigInstance(g, frozenset(alpha), frozenset(beta))


def random_graph(n: int, p: float, rng: random.Random) -> Graph:
    """G(n, p) patched to be connected by chaining component representatives."""
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    g = Graph(range(n), edges)
    comps = connected_components(g)
    for first, second in zip(comps, comps[1:]):
        edges.append((min(first), min(second)))
    return Graph(range(n), edges)


def random_instance(n: int, p: float, seed: int) -> ReconfigInstance:
    rng = random.Random(seed)
    g = random_graph(n, p, rng)
    order_a = list(range(n))
    order_b = list(range(n))
    rng.shuffle(order_a)
    rng.shuffle(order_b)
    return ReconfigInstance(g, greedy_mis(g, order_a), greedy_mis(g, order_b))


def random_connected_instance(
    n: int,
    p: float,
    seed: int,
    min_diameter: int = 4,
    tries: int = 400,
) -> ReconfigInstance:
    """Seeded random connected instance whose diameter is at least
    ``min_diameter``; retries derived seeds until one qualifies."""
    for t in range(tries):
        inst = random_instance(n, p, seed * 100_003 + t)
        diam = diameter(inst.graph)
        if diam != math.inf and diam >= min_diameter:
            return inst
    raise InputError(f"no connected instance of diameter >= {min_diameter} after {tries} tries")


# ---------------------------------------------------------------------------
# Isomorph-free enumeration of small graphs, by one-node extensions with
# canonical adjacency-matrix minimization over refinement-respecting
# relabelings.

def _refine_colors(rows: tuple[int, ...]) -> list[int]:
    n = len(rows)
    colors = [bin(r).count("1") for r in rows]
    for _ in range(n):
        sigs = []
        for i in range(n):
            neigh = sorted(colors[j] for j in range(n) if rows[i] >> j & 1)
            sigs.append((colors[i], tuple(neigh)))
        ranking = {sig: rank for rank, sig in enumerate(sorted(set(sigs)))}
        fresh = [ranking[s] for s in sigs]
        if fresh == colors:
            break
        colors = fresh
    return colors


def _canonical_code(rows: tuple[int, ...]) -> int:
    n = len(rows)
    colors = _refine_colors(rows)
    classes: dict[int, list[int]] = {}
    for i, c in enumerate(colors):
        classes.setdefault(c, []).append(i)
    ordered = [classes[c] for c in sorted(classes)]
    best: int | None = None
    for arrangement in itertools.product(*(itertools.permutations(cls) for cls in ordered)):
        perm = [i for cls in arrangement for i in cls]
        code = 0
        for a in range(n):
            row = rows[perm[a]]
            for b in range(a + 1, n):
                code = (code << 1) | (row >> perm[b] & 1)
        if best is None or code < best:
            best = code
    assert best is not None
    return best


def enumerate_graphs(max_n: int) -> dict[int, list[tuple[int, ...]]]:
    """One representative per isomorphism class of graphs on 1..max_n nodes,
    as tuples of adjacency bitmask rows."""
    reps: dict[int, list[tuple[int, ...]]] = {1: [(0,)]}
    for n in range(2, max_n + 1):
        seen: dict[int, tuple[int, ...]] = {}
        for rows in reps[n - 1]:
            for mask in range(1 << (n - 1)):
                new_rows = tuple(
                    rows[i] | ((mask >> i & 1) << (n - 1)) for i in range(n - 1)
                ) + (mask,)
                code = _canonical_code(new_rows)
                if code not in seen:
                    seen[code] = new_rows
        reps[n] = list(seen.values())
    return reps


def rows_to_graph(rows: tuple[int, ...]) -> Graph:
    n = len(rows)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rows[i] >> j & 1]
    return Graph(range(n), edges)


def enumerate_connected_graphs(max_n: int) -> list[Graph]:
    reps = enumerate_graphs(max_n)
    out = []
    for n in range(1, max_n + 1):
        for rows in reps[n]:
            g = rows_to_graph(rows)
            if len(connected_components(g)) == 1:
                out.append(g)
    return out


def all_mis(g: Graph) -> list[VertexSet]:
    """Every maximal independent set, by exhaustive subset filtering."""
    nodes = sorted(g.nodes)
    n = len(nodes)
    if n > ORACLE_NODE_LIMIT:
        raise InputError(f"exhaustive MIS listing limited to {ORACLE_NODE_LIMIT} nodes")
    out = []
    for mask in range(1 << n):
        s = frozenset(nodes[i] for i in range(n) if mask >> i & 1)
        if is_mis(g, s):
            out.append(s)
    return out
