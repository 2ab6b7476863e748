"""The constant-length schedule pipeline: strip the shared core, classify the
components of alpha ∪ beta, and emit a schedule of exactly 28 steps for any
connected graph of diameter greater than 3.

Sub-schedules are budgeted per regime: 8 steps for a single component of
diameter at least 3, 18 for the non-isolated regime, 10 for isolated small
components.  Shorter constructions are right-padded by repeating their final
set, which is always legal because an empty flip is independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError, InternalError
from .graph import (
    ComponentInfo,
    Graph,
    VertexSet,
    components_of,
    diameter,
    distances_from,
)
from .schedule import PropertySpec, ReconfigInstance, Schedule, validate
from .sim import CollectProgram, NodeProgram, SimReport, dist_mis, ruling_set_32, run

NON_ISOLATED_STEPS = 18
ISOLATED_STEPS = 10
TOTAL_STEPS = NON_ISOLATED_STEPS + ISOLATED_STEPS


@dataclass(frozen=True)
class ReductionResult:
    """Outcome of removing alpha ∩ beta and its closed neighborhood.

    Nodes in the shared core stay in every schedule step; their neighbors can
    never enter.  Any schedule for the reduced instance lifts by unioning the
    shared core onto every step.
    """

    kept_nodes: VertexSet
    stripped_always_in: VertexSet
    stripped_never_in: VertexSet
    reduced_instance: ReconfigInstance

    def lift(self, steps: list[VertexSet]) -> list[VertexSet]:
        return [step | self.stripped_always_in for step in steps]


def reduce_instance(inst: ReconfigInstance) -> ReductionResult:
    """Strip alpha ∩ beta and its neighborhood, returning the reduced instance
    on the remaining nodes (whose alpha' and beta' are again MIS there)."""
    g = inst.graph
    core = inst.alpha & inst.beta
    halo = frozenset(w for v in core for w in g.neighbors(v))
    kept = g.nodes - core - halo
    reduced = ReconfigInstance(
        graph=g.induced(kept),
        alpha=inst.alpha & kept,
        beta=inst.beta & kept,
    )
    return ReductionResult(kept, core, halo, reduced)


@dataclass(frozen=True)
class LayeredPartition:
    """Distance layers around the ruling set of one large component.

    Keys run from -2 to 5.  Even layers hold alpha-nodes, odd layers hold
    beta-nodes.  Layer 1 holds the beta-neighbors of the ruling set that
    either lead outward (a distance-2 route to layer 3) or have no neighbors
    outside the ruling set; layer -1 holds the remaining beta-neighbors.
    A distance-2 node adjacent to both layer 1 and layer -1 lands in layer 2:
    it must be gone before layer 1 is added, so the earlier removal wins.
    """

    layers: dict[int, VertexSet]

    def __getitem__(self, i: int) -> VertexSet:
        return self.layers[i]


def layer_component(
    g: Graph,
    comp: VertexSet,
    alpha: VertexSet,
    beta: VertexSet,
    ruling: VertexSet,
) -> LayeredPartition:
    """Partition a diameter >= 5 component into the eight distance layers
    driving the cascade schedule."""
    y = frozenset(comp)
    if not ruling <= (alpha & y):
        raise InputError("ruling set must consist of the component's alpha-nodes")
    dist: dict[int, int] = {}
    for r in sorted(ruling):
        for v, d in distances_from(g, r, y).items():
            if v not in dist or d < dist[v]:
                dist[v] = d
    if frozenset(dist) != y:
        raise InternalError("ruling set does not reach the whole component")
    by_dist: dict[int, set[int]] = {}
    for v, d in dist.items():
        by_dist.setdefault(d, set()).add(v)
    if max(by_dist) > 5:
        raise InternalError("ruling set is not a (6,5)-ruling set of the component")

    r0 = frozenset(ruling)
    d1 = frozenset(by_dist.get(1, set()))
    d2 = frozenset(by_dist.get(2, set()))
    r3 = frozenset(by_dist.get(3, set()))
    r4 = frozenset(by_dist.get(4, set()))
    r5 = frozenset(by_dist.get(5, set()))

    def dist_to(targets: VertexSet, v: int) -> int:
        if not targets:
            return 10**9
        d = distances_from(g, v, y)
        return min((d[t] for t in targets if t in d), default=10**9)

    r1 = frozenset(
        v for v in d1 if dist_to(r3, v) == 2 or (g.neighbors(v) & y) <= r0
    )
    rm1 = d1 - r1
    r2 = frozenset(v for u in r1 for v in g.neighbors(u) & y) - r0
    rm2 = d2 - r2

    layers = {-2: rm2, -1: rm1, 0: r0, 1: r1, 2: r2, 3: r3, 4: r4, 5: r5}
    _check_layers(g, y, alpha, beta, layers)
    return LayeredPartition(layers)


def _check_layers(g, y, alpha, beta, layers) -> None:
    union: set[int] = set()
    for i, layer in layers.items():
        if union & layer:
            raise InternalError("layers overlap")
        union |= layer
        want = alpha if i % 2 == 0 else beta
        if not layer <= want:
            raise InternalError(f"layer {i} contains nodes from the wrong side")
    if union != y:
        raise InternalError("layers do not cover the component")
    # Load-bearing for the cascade: everything next to layer 1 is removed
    # before layer 1 is added.
    for v in layers[1]:
        if not (g.neighbors(v) & y) <= (layers[0] | layers[2]):
            raise InternalError("layer-1 node has a neighbor outside layers 0 and 2")


def schedule_big_component(
    g: Graph,
    comp: ComponentInfo,
    alpha: VertexSet,
    beta: VertexSet,
    mode: str = "deterministic-id",
    seed: int = 0,
    report_sink: list | None = None,
    round_cap: int | None = None,
) -> list[VertexSet]:
    """Eight-step fragment updating one component of diameter at least 3,
    returned as 9 sets from its alpha-part to its beta-part."""
    y = comp.vertices
    alpha_c, beta_c = alpha & y, beta & y
    if alpha_c & beta_c:
        raise InputError("component must have disjoint alpha and beta parts")
    if alpha_c | beta_c != y:
        raise InputError("component vertices must all be alpha- or beta-nodes")
    if comp.diameter < 3:
        raise InputError(f"component diameter must be at least 3, got {comp.diameter}")

    if comp.diameter <= 4:
        steps = _small_diameter_fragment(g, y, alpha_c, beta_c)
    else:
        ruling, report = ruling_set_32(g, y, alpha_c, beta_c, mode=mode, seed=seed, round_cap=round_cap)
        if report_sink is not None:
            report_sink.append(("ruling-set", report))
        layers = layer_component(g, y, alpha_c, beta_c, ruling)
        steps = [alpha_c]
        for i in range(4):
            after_removal = steps[-1] - layers[4 - 2 * i]
            if after_removal != steps[-1] and not (steps[-1] - after_removal) <= alpha_c:
                raise InternalError("odd cascade step removed a non-alpha node")
            steps.append(after_removal)
            after_addition = steps[-1] | layers[5 - 2 * i]
            if not (after_addition - steps[-1]) <= beta_c:
                raise InternalError("even cascade step added a non-beta node")
            steps.append(after_addition)
    while len(steps) < 9:
        steps.append(steps[-1])
    if steps[0] != alpha_c or steps[-1] != beta_c:
        raise InternalError("big-component fragment has wrong endpoints")
    return steps


def _small_diameter_fragment(g, y, alpha_c, beta_c) -> list[VertexSet]:
    """Diameter 3 or 4: anchor on an alpha endpoint of a distance-3 geodesic."""
    candidates = []
    for v in sorted(alpha_c):
        dist = distances_from(g, v, y)
        if any(d == 3 for d in dist.values()):
            candidates.append(v)
    if not candidates:
        raise InternalError("no alpha endpoint of a distance-3 pair in the component")
    v = candidates[0]
    far_beta = beta_c - g.neighbors(v)
    return [alpha_c, frozenset({v}), frozenset({v}) | far_beta, far_beta, beta_c]


def _component_graph(g: Graph, comps: list[ComponentInfo], alpha, beta) -> tuple[Graph, dict[int, ComponentInfo]]:
    """Graph on components (labeled by minimum vertex id) with an edge where
    some epsilon-node has an alpha-neighbor in one and a beta-neighbor in the
    other."""
    label = {}
    for comp in comps:
        for v in comp.vertices:
            label[v] = comp.min_id
    by_label = {comp.min_id: comp for comp in comps}
    edges = set()
    eps = g.nodes - alpha - beta
    for e in sorted(eps):
        alpha_sides = {label[w] for w in g.neighbors(e) & alpha if w in label}
        beta_sides = {label[w] for w in g.neighbors(e) & beta if w in label}
        for i in alpha_sides:
            for j in beta_sides:
                if i != j:
                    edges.add((min(i, j), max(i, j)))
    return Graph(sorted(by_label), sorted(edges)), by_label


def _batch_update(steps: list[VertexSet], comps: list[ComponentInfo], alpha, beta) -> None:
    verts = frozenset().union(*(c.vertices for c in comps)) if comps else frozenset()
    steps.append(steps[-1] - (alpha & verts))
    steps.append(steps[-1] | (beta & verts))


def schedule_non_isolated(
    g: Graph,
    comps: list[ComponentInfo],
    alpha: VertexSet,
    beta: VertexSet,
    mode: str = "deterministic-id",
    seed: int = 0,
    report_sink: list | None = None,
    round_cap: int | None = None,
) -> list[VertexSet]:
    """Eighteen-step fragment updating every component that is non-isolated or
    has diameter at least 3, returned as 19 sets.

    Order of parts: alpha-covered-only components; components alpha-covered by
    the MIS over doubly-covered components; the big-component cascades in
    parallel; the MIS components; remaining doubly-covered; beta-covered-only.
    """
    small = [c for c in comps if c.diameter <= 2]
    big = [c for c in comps if c.diameter >= 3]
    for c in small:
        if c.isolated:
            raise InputError("small isolated component routed to the wrong schedule")
    c_ab = [c for c in small if c.alpha_covered and c.beta_covered]
    c_a = [c for c in small if c.alpha_covered and not c.beta_covered]
    c_b = [c for c in small if c.beta_covered and not c.alpha_covered]
    if len(c_ab) + len(c_a) + len(c_b) != len(small):
        raise InternalError("non-isolated small component with no covering label")

    comp_graph, by_label = _component_graph(g, comps, alpha, beta)
    ab_labels = frozenset(c.min_id for c in c_ab)
    mis_graph = comp_graph.induced(ab_labels)
    m_labels, m_report = dist_mis(mis_graph, mode=mode, seed=seed, round_cap=round_cap)
    if report_sink is not None:
        report_sink.append(("component-mis", m_report))
    m_comps = [by_label[l] for l in sorted(m_labels)]

    universe = frozenset().union(*(c.vertices for c in comps)) if comps else frozenset()
    steps: list[VertexSet] = [alpha & universe]
    updated: set[int] = set()

    def mark(batch: list[ComponentInfo]) -> list[ComponentInfo]:
        fresh = [c for c in batch if c.min_id not in updated]
        updated.update(c.min_id for c in fresh)
        return fresh

    # Part 1: alpha-covered-only components.
    _batch_update(steps, mark(c_a), alpha, beta)

    # Part 2: small components alpha-covered through an MIS component.
    eps = g.nodes - alpha - beta
    m_vertices = frozenset().union(*(c.vertices for c in m_comps)) if m_comps else frozenset()
    part2 = []
    for c in small:
        if c.min_id in updated or c.min_id in m_labels:
            continue
        for e in sorted(eps):
            if (g.neighbors(e) & beta & c.vertices) and (g.neighbors(e) & alpha & (m_vertices - c.vertices)):
                part2.append(c)
                break
    _batch_update(steps, mark(part2), alpha, beta)

    # Part 3: all big components cascade in parallel over eight steps.
    fragments = {
        c.min_id: schedule_big_component(g, c, alpha, beta, mode, seed, report_sink, round_cap)
        for c in big
    }
    updated.update(c.min_id for c in big)
    for j in range(1, 9):
        cur = steps[-1]
        for frag in fragments.values():
            cur = (cur - (frag[j - 1] - frag[j])) | (frag[j] - frag[j - 1])
        steps.append(cur)

    # Part 4: the MIS components themselves.
    _batch_update(steps, mark(m_comps), alpha, beta)
    # Part 5: remaining doubly-covered components.
    _batch_update(steps, mark(c_ab), alpha, beta)
    # Part 6: remaining beta-covered components.
    _batch_update(steps, mark(c_b), alpha, beta)

    if len(steps) != NON_ISOLATED_STEPS + 1:
        raise InternalError("non-isolated fragment has the wrong length")
    if steps[-1] != beta & universe:
        raise InternalError("non-isolated fragment does not end at beta")
    return steps


def _augmented_blobs(g: Graph, comps: list[ComponentInfo], alpha, beta) -> list[dict]:
    """Isolated components absorbed together with their epsilon-neighbors.

    Each epsilon-neighbor of an isolated component belongs to exactly one
    component (its alpha- and beta-neighbors pin it down), so blobs are
    disjoint.  The absorbed diameter is at most the core's plus one.
    """
    eps = g.nodes - alpha - beta
    blobs = []
    claimed: dict[int, int] = {}
    for comp in comps:
        fringe = frozenset(
            e for e in eps if g.neighbors(e) & comp.vertices
        )
        for e in fringe:
            if e in claimed:
                raise InternalError(f"epsilon-node {e} adjacent to two isolated components")
            claimed[e] = comp.min_id
        blob = comp.vertices | fringe
        aug = diameter(g, blob)
        if aug == math.inf or aug > 3:
            raise InternalError("augmented isolated component has diameter above 3")
        blobs.append(
            {"core": comp.vertices, "fringe": fringe, "all": blob, "diameter": int(aug), "label": comp.min_id}
        )
    return blobs


def schedule_isolated(
    g: Graph,
    comps: list[ComponentInfo],
    alpha: VertexSet,
    beta: VertexSet,
    mode: str = "deterministic-id",
    seed: int = 0,
    report_sink: list | None = None,
    round_cap: int | None = None,
) -> list[VertexSet]:
    """Ten-step fragment updating the isolated small components, returned as
    11 sets.

    Components of absorbed diameter at most 2 are updated in two waves around
    an MIS of their contact graph (4 steps).  Components of absorbed diameter
    3 run the six-step gadget through a selected epsilon-node that misses both
    an alpha- and a beta-node of its component.
    """
    for c in comps:
        if not c.isolated or c.diameter > 2:
            raise InputError("component routed to the isolated schedule is not isolated/small")
    blobs = _augmented_blobs(g, comps, alpha, beta)
    shallow = [b for b in blobs if b["diameter"] <= 2]
    deep = [b for b in blobs if b["diameter"] == 3]

    universe = frozenset().union(*(b["core"] for b in blobs)) if blobs else frozenset()
    steps: list[VertexSet] = [alpha & universe]

    # Part 1: contact graph over shallow blobs (edges where their fringes
    # touch), MIS first, then the rest.
    contact_edges = set()
    fringe_owner = {}
    for b in shallow:
        for e in b["fringe"]:
            fringe_owner[e] = b["label"]
    for b in shallow:
        for e in sorted(b["fringe"]):
            for w in sorted(g.neighbors(e)):
                other = fringe_owner.get(w)
                if other is not None and other != b["label"]:
                    contact_edges.add((min(b["label"], other), max(b["label"], other)))
    contact = Graph(sorted(b["label"] for b in shallow), sorted(contact_edges))
    m_labels, m_report = dist_mis(contact, mode=mode, seed=seed, round_cap=round_cap)
    if report_sink is not None:
        report_sink.append(("blob-mis", m_report))

    first_wave = [b for b in shallow if b["label"] in m_labels]
    second_wave = [b for b in shallow if b["label"] not in m_labels]
    for wave in (first_wave, second_wave):
        verts = frozenset().union(*(b["core"] for b in wave)) if wave else frozenset()
        steps.append(steps[-1] - (alpha & verts))
        steps.append(steps[-1] | (beta & verts))

    # Part 2: six-step gadget for the deep blobs.
    gadgets = []
    for b in deep:
        picked = None
        for u in sorted(b["fringe"]):
            misses_alpha = sorted((alpha & b["core"]) - g.neighbors(u))
            misses_beta = sorted((beta & b["core"]) - g.neighbors(u))
            if misses_alpha and misses_beta:
                picked = (u, misses_alpha[0], misses_beta[0])
                break
        if picked is None:
            raise InternalError(
                f"no escape triple in a diameter-3 isolated component {sorted(b['core'])}"
            )
        gadgets.append({"blob": b, "u": picked[0], "a": picked[1], "b": picked[2]})

    u_nodes = sorted(gad["u"] for gad in gadgets)
    u_graph = Graph(u_nodes, [(x, y) for i, x in enumerate(u_nodes) for y in u_nodes[i + 1 :] if g.has_edge(x, y)])
    mprime, mp_report = dist_mis(u_graph, mode=mode, seed=seed, round_cap=round_cap)
    if report_sink is not None:
        report_sink.append(("escape-mis", mp_report))

    if gadgets:
        selected = [gad for gad in gadgets if gad["u"] in mprime]
        skipped = [gad for gad in gadgets if gad["u"] not in mprime]
        deep_cores = frozenset().union(*(gad["blob"]["core"] for gad in gadgets))
        steps.append(steps[-1] - frozenset(w for gad in selected for w in g.neighbors(gad["u"]) & alpha))
        steps.append(steps[-1] | frozenset(gad["u"] for gad in selected))
        steps.append(steps[-1] - (alpha & deep_cores))
        additions = frozenset(gad["b"] for gad in selected) | frozenset(
            w for gad in skipped for w in beta & gad["blob"]["core"]
        )
        steps.append(steps[-1] | additions)
        steps.append(steps[-1] - frozenset(gad["u"] for gad in selected))
        steps.append(steps[-1] | (beta & deep_cores))
    while len(steps) < ISOLATED_STEPS + 1:
        steps.append(steps[-1])

    if len(steps) != ISOLATED_STEPS + 1:
        raise InternalError("isolated fragment has the wrong length")
    if steps[-1] != beta & universe:
        raise InternalError("isolated fragment does not end at beta")
    return steps


def _split_components(comps: list[ComponentInfo]) -> tuple[list[ComponentInfo], list[ComponentInfo]]:
    covered = [c for c in comps if (not c.isolated) or c.diameter >= 3]
    isolated_small = [c for c in comps if c.isolated and c.diameter <= 2]
    return covered, isolated_small


def constant_length_schedule(
    inst: ReconfigInstance,
    mode: str = "deterministic-id",
    seed: int = 0,
    round_cap: int | None = None,
) -> Schedule:
    """A valid 28-step schedule for any connected instance of diameter > 3."""
    sched, _ = _pipeline(inst, mode, seed, report_sink=None, round_cap=round_cap)
    return sched


def constant_length_schedule_distributed(
    inst: ReconfigInstance,
    mode: str = "deterministic-id",
    seed: int = 0,
    round_cap: int | None = None,
) -> tuple[Schedule, SimReport]:
    """Same schedule, with the communication phases actually executed on the
    round engine and their costs aggregated."""
    sink: list = []
    g = inst.graph
    core = inst.alpha & inst.beta
    core_report = run(g, _CoreBroadcast, {v: v in core for v in g.nodes}, round_cap=4)
    sched, reduction = _pipeline(inst, mode, seed, report_sink=sink, round_cap=round_cap)
    rounds = 2  # shared-core broadcast, also run above for its message count
    messages = core_report.messages_sent
    if reduction.reduced_instance.alpha | reduction.reduced_instance.beta:
        collect = run(
            reduction.reduced_instance.graph,
            lambda: CollectProgram(4),
            {v: None for v in reduction.reduced_instance.graph.nodes},
            round_cap=8,
        )
        rounds += collect.rounds_used
        messages += collect.messages_sent
        by_phase: dict[str, int] = {}
        for tag, report in sink:
            by_phase[tag] = max(by_phase.get(tag, 0), report.rounds_used)
            messages += report.messages_sent
        rounds += sum(by_phase.values())
    return sched, SimReport(outputs={}, rounds_used=rounds, messages_sent=messages)


class _CoreBroadcast(NodeProgram):
    """Two rounds: shared-core nodes announce, their neighbors relay."""

    def init(self, node_id, neighbor_ids, local_input, rand):
        self.ports = sorted(neighbor_ids)
        self.in_core = bool(local_input)
        self.near_core = False
        if not self.ports:
            self.finish("core" if self.in_core else "free")
            return None
        return {w: "core" for w in self.ports} if self.in_core else None

    def on_round(self, round_no, inbox):
        if round_no == 1:
            self.near_core = any(msg == "core" for msg in inbox.values())
            if self.near_core and not self.in_core:
                return {w: "halo" for w in self.ports}
            return None
        status = "core" if self.in_core else ("halo" if self.near_core else "free")
        self.finish(status)
        return None


def _pipeline(inst, mode, seed, report_sink, round_cap=None):
    g = inst.graph
    diam = diameter(g)
    if diam == math.inf:
        raise InputError("graph must be connected")
    if diam <= 3:
        raise InputError("diameter must exceed 3; use the small-diameter fallback")
    reduction = reduce_instance(inst)
    red = reduction.reduced_instance
    if not (red.alpha | red.beta):
        steps = [inst.alpha] * (TOTAL_STEPS + 1)
        return Schedule(tuple(steps)), reduction

    comps = components_of(red.graph, red.alpha | red.beta, red.alpha, red.beta)
    covered, isolated_small = _split_components(comps)
    if covered:
        frag_a = schedule_non_isolated(red.graph, covered, red.alpha, red.beta, mode, seed, report_sink, round_cap)
    else:
        frag_a = [frozenset()] * (NON_ISOLATED_STEPS + 1)
    if isolated_small:
        frag_b = schedule_isolated(red.graph, isolated_small, red.alpha, red.beta, mode, seed, report_sink, round_cap)
    else:
        frag_b = [frozenset()] * (ISOLATED_STEPS + 1)

    core = reduction.stripped_always_in
    steps = [frag_b[0] | frag_a[i] | core for i in range(NON_ISOLATED_STEPS + 1)]
    steps += [frag_b[i] | frag_a[NON_ISOLATED_STEPS] | core for i in range(1, ISOLATED_STEPS + 1)]
    sched = Schedule(tuple(steps))
    if sched.length != TOTAL_STEPS:
        raise InternalError("assembled schedule is not 28 steps long")
    report = validate(inst, sched, PropertySpec(4))
    if not report.valid:
        raise InternalError(f"assembled schedule invalid: {report.first_violation.describe()}")
    return sched, reduction
