"""Deterministic round-synchronous message-passing engine plus the two
distributed primitives the schedule constructions are parameterized by:
a maximal-independent-set subroutine and a (3,2)-ruling-set subroutine.

Within a round all node steps are logically simultaneous; the engine applies
them in sorted node order, which is unobservable to the programs because
messages are only delivered at the round boundary.  Per-node randomness comes
from a counter-based generator keyed by (seed, node id, counter), so results
do not depend on scheduling order.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import Any, Callable, Mapping

from .errors import InputError, InternalError
from .graph import (
    Graph,
    VertexSet,
    connected_components,
    diameter,
    distances_from,
    is_independent,
    is_mis,
)

Message = Any
Outbox = dict[int, Message]


def counter_rand(seed: int, node: int, counter: int) -> float:
    """Deterministic uniform [0,1) value keyed by (seed, node, counter)."""
    digest = hashlib.sha256(struct.pack(">qqq", seed, node, counter)).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


class NodeProgram:
    """Base class for per-node state machines run by the engine.

    ``init`` may return an outbox (messages delivered in round 1) and may set
    ``self.output`` immediately.  ``on_round`` receives the messages sent to
    this node in the previous round.  Once ``output`` is set the node is never
    invoked again; the outbox returned by the deciding call is still
    delivered, after which the node is silent.
    """

    output: Any = None
    done: bool = False

    def init(self, node_id: int, neighbor_ids: VertexSet, local_input: Any,
             rand: Callable[[int], float]) -> Outbox | None:
        raise NotImplementedError

    def on_round(self, round_no: int, inbox: dict[int, Message]) -> Outbox | None:
        raise NotImplementedError

    def finish(self, value: Any) -> None:
        self.output = value
        self.done = True


@dataclass(frozen=True)
class SimReport:
    """Outcome of one engine run."""

    outputs: dict[int, Any]
    rounds_used: int
    messages_sent: int
    timed_out: bool = False


def run(
    g: Graph,
    program: Callable[[], NodeProgram],
    inputs: Mapping[int, Any],
    round_cap: int = 10_000,
    seed: int = 0,
) -> SimReport:
    """Execute ``program`` on every node until all produce output.

    ``inputs`` must be keyed exactly by the graph's nodes.  Hitting
    ``round_cap`` yields a report with ``timed_out=True`` and partial outputs,
    never a silently truncated result.
    """
    if frozenset(inputs) != g.nodes:
        raise InputError("inputs must be keyed exactly by the graph's nodes")
    order = sorted(g.nodes)
    programs: dict[int, NodeProgram] = {v: program() for v in order}
    messages_sent = 0
    pending: dict[int, dict[int, Message]] = {v: {} for v in order}

    def collect(v: int, outbox: Outbox | None) -> None:
        nonlocal messages_sent
        if not outbox:
            return
        for target, msg in outbox.items():
            if target not in g.neighbors(v):
                raise InputError(f"node {v} addressed non-neighbor {target}")
            pending[target][v] = msg
            messages_sent += 1

    for v in order:
        rand = lambda counter, _v=v: counter_rand(seed, _v, counter)
        collect(v, programs[v].init(v, g.neighbors(v), inputs[v], rand))

    rounds_used = 0
    while not all(p.done for p in programs.values()):
        if rounds_used >= round_cap:
            outputs = {v: programs[v].output for v in order if programs[v].done}
            return SimReport(outputs, rounds_used, messages_sent, timed_out=True)
        rounds_used += 1
        inboxes, pending = pending, {v: {} for v in order}
        for v in order:
            if programs[v].done:
                continue
            collect(v, programs[v].on_round(rounds_used, inboxes[v]))
    outputs = {v: programs[v].output for v in order}
    return SimReport(outputs, rounds_used, messages_sent)


class CollectProgram(NodeProgram):
    """Flood-and-collect: after r rounds each node outputs the edge set it has
    seen, which is exactly its r-hop neighborhood."""

    def __init__(self, radius: int) -> None:
        self.radius = radius
        self.known: set[tuple[int, int]] = set()

    def init(self, node_id, neighbor_ids, local_input, rand):
        self.node = node_id
        self.ports = frozenset(neighbor_ids)
        self.known = {(min(node_id, w), max(node_id, w)) for w in neighbor_ids}
        if self.radius == 0 or not self.ports:
            self.finish(frozenset(self.known))
            return None
        return {w: frozenset(self.known) for w in sorted(self.ports)}

    def on_round(self, round_no, inbox):
        for edges in inbox.values():
            self.known |= edges
        if round_no >= self.radius:
            self.finish(frozenset(self.known))
            return None
        return {w: frozenset(self.known) for w in sorted(self.ports)}


class MisIdProgram(NodeProgram):
    """MIS where a node joins once its id is minimal among undecided neighbors."""

    def init(self, node_id, neighbor_ids, local_input, rand):
        self.node = node_id
        self.undecided = set(neighbor_ids)
        return self._maybe_join()

    def _maybe_join(self) -> Outbox | None:
        if all(self.node < w for w in self.undecided):
            out = {w: "join" for w in sorted(self.undecided)}
            self.finish("in")
            return out
        return None

    def on_round(self, round_no, inbox):
        for sender, msg in inbox.items():
            if msg == "join":
                self.undecided.discard(sender)
                out = {w: "exit" for w in sorted(self.undecided)}
                self.finish("out")
                return out
            if msg == "exit":
                self.undecided.discard(sender)
        return self._maybe_join()


class MisLubyProgram(NodeProgram):
    """Seeded randomized MIS with synchronized two-round iterations.

    Odd rounds deliver iteration values (and exit notices), even rounds
    deliver join announcements.  A node whose (value, id) key is strictly
    minimal among still-undecided neighbors joins; its neighbors exit on the
    following round.  Ties are impossible because ids break them.
    """

    def init(self, node_id, neighbor_ids, local_input, rand):
        self.node = node_id
        self.rand = rand
        self.undecided = set(neighbor_ids)
        self.iteration = 0
        if not self.undecided:
            self.finish("in")
            return None
        return self._vals()

    def _key(self) -> tuple[float, int]:
        return (self.rand(self.iteration), self.node)

    def _vals(self) -> Outbox:
        key = self._key()
        return {w: ("val", key) for w in sorted(self.undecided)}

    def on_round(self, round_no, inbox):
        if round_no % 2 == 1:
            # Iteration comparison: every believed-undecided neighbor sent
            # either its value for this iteration or an exit notice.
            values: dict[int, tuple[float, int]] = {}
            for sender, msg in inbox.items():
                if msg == "exit":
                    self.undecided.discard(sender)
                else:
                    values[sender] = msg[1]
            if not self.undecided:
                self.finish("in")
                return None
            mine = self._key()
            if all(mine < values[w] for w in self.undecided):
                out = {w: "join" for w in sorted(self.undecided)}
                self.finish("in")
                return out
            return None
        # Even round: either a neighbor joined, or this iteration is over.
        if any(msg == "join" for msg in inbox.values()):
            self.undecided -= set(inbox)
            out = {w: "exit" for w in sorted(self.undecided)}
            self.finish("out")
            return out
        self.iteration += 1
        return self._vals()


def dist_mis(
    g: Graph,
    mode: str = "deterministic-id",
    seed: int = 0,
    round_cap: int | None = None,
) -> tuple[VertexSet, SimReport]:
    """Run the pluggable MIS subroutine on g; the result always passes is_mis."""
    if mode == "deterministic-id":
        factory: Callable[[], NodeProgram] = MisIdProgram
    elif mode in ("randomized", "luby"):
        factory = MisLubyProgram
    else:
        raise InputError(f"unknown MIS mode {mode!r}")
    cap = round_cap if round_cap is not None else max(16, 8 * len(g) + 8)
    report = run(g, factory, {v: None for v in g.nodes}, round_cap=cap, seed=seed)
    if report.timed_out:
        raise InternalError(f"MIS subroutine hit the round cap {cap}")
    selected = frozenset(v for v, out in report.outputs.items() if out == "in")
    if not is_mis(g, selected):
        raise InternalError("MIS subroutine produced a non-MIS output")
    return selected, report


def _virtual_graph(g: Graph, y: VertexSet, alpha: VertexSet) -> Graph:
    """Graph on the alpha-nodes of y with an edge between every two that share
    a beta-neighbor inside y (multi-edges collapse to simple edges)."""
    alpha_y = sorted(alpha & y)
    edges = set()
    for b in sorted(y - alpha):
        hub = sorted(g.neighbors(b) & alpha & y)
        for i, u in enumerate(hub):
            for v in hub[i + 1 :]:
                edges.add((u, v))
    return Graph(alpha_y, sorted(edges))


def _square(g: Graph) -> Graph:
    edges = set()
    for v in sorted(g.nodes):
        two_ball = set(g.neighbors(v))
        for w in g.neighbors(v):
            two_ball |= g.neighbors(w)
        two_ball.discard(v)
        for w in two_ball:
            edges.add((min(v, w), max(v, w)))
    return Graph(sorted(g.nodes), sorted(edges))


# One hop of the squared virtual graph spans at most this many real hops:
# two hops per virtual edge, two virtual edges per squared edge.
VIRTUAL_HOP_OVERHEAD = 4
VIRTUAL_SETUP_ROUNDS = 2


def ruling_set_32(
    g: Graph,
    y: VertexSet,
    alpha: VertexSet,
    beta: VertexSet,
    mode: str = "deterministic-id",
    seed: int = 0,
    round_cap: int | None = None,
) -> tuple[VertexSet, SimReport]:
    """A (3,2)-ruling set of the virtual graph on y's alpha-nodes, computed as
    an MIS of the squared virtual graph.

    In the subgraph induced by y the result is a (6,5)-ruling set.  The
    reported rounds account for simulating each virtual hop in g.
    """
    y = frozenset(y)
    alpha_y, beta_y = frozenset(alpha) & y, frozenset(beta) & y
    if alpha_y | beta_y != y or alpha_y & beta_y:
        raise InputError("alpha and beta must partition y")
    if not (is_independent(g, alpha_y) and is_independent(g, beta_y)):
        raise InputError("alpha and beta parts of y must be independent")
    comps = connected_components(g, y)
    if len(comps) != 1:
        raise InputError("y must induce a single connected component")
    diam = diameter(g, y)
    if diam < 5:
        raise InputError(f"component diameter must be at least 5, got {diam}")

    virtual = _virtual_graph(g, y, alpha_y)
    squared = _square(virtual)
    ruling, mis_report = dist_mis(squared, mode=mode, seed=seed, round_cap=round_cap)

    _check_ruling(virtual, ruling, g, y)
    report = SimReport(
        outputs=dict(mis_report.outputs),
        rounds_used=VIRTUAL_SETUP_ROUNDS + VIRTUAL_HOP_OVERHEAD * mis_report.rounds_used,
        messages_sent=mis_report.messages_sent,
    )
    return ruling, report


def _check_ruling(virtual: Graph, ruling: VertexSet, g: Graph, y: VertexSet) -> None:
    """Exhaustively confirm the (3,2) property on the virtual graph and the
    induced (6,5) property on y."""
    for v in sorted(ruling):
        dist = distances_from(virtual, v)
        for w in sorted(ruling):
            if w != v and dist.get(w, 10**9) < 3:
                raise InternalError(f"ruling nodes {v},{w} at virtual distance {dist[w]}")
    for v in sorted(virtual.nodes):
        dist = distances_from(virtual, v)
        if min((dist.get(r, 10**9) for r in ruling), default=10**9) > 2:
            raise InternalError(f"virtual node {v} not 2-covered by the ruling set")
    for v in sorted(y):
        dist = distances_from(g, v, y)
        if min((dist.get(r, 10**9) for r in ruling), default=10**9) > 5:
            raise InternalError(f"node {v} not 5-covered in the induced subgraph")


def format_sim_report(report: SimReport, include_outputs: bool = False) -> str:
    lines = [f"rounds_used: {report.rounds_used}", f"messages_sent: {report.messages_sent}"]
    if report.timed_out:
        lines.append("timed_out: true")
    if include_outputs:
        for v in sorted(report.outputs):
            lines.append(f"output {v} {report.outputs[v]}")
    return "\n".join(lines) + "\n"
