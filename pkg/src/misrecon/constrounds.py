"""Constant-round scheduling: each beta-node is inserted by a six-step local
gadget computed from its 5-hop neighborhood, and nodes take turns either by
identifier (slots 6k+1..6k+6 for id k) or by a coloring of the 10th power
(equal colors run concurrently, their gadgets cannot interact)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError, InternalError
from .graph import Graph, VertexSet, ball, diameter, distances_from, is_independent, is_mis
from .schedule import PropertySpec, ReconfigInstance, Schedule, validate
from .sim import CollectProgram, SimReport, run

SLOT = 6


@dataclass(frozen=True)
class InsertionPlan:
    """Six-step fragment that brings one beta-node into the running set.

    The fragment's final set keeps everything it did not have to remove: net
    removals are confined to the target's set-neighbors, so nodes of
    alpha ∩ beta never leave and previously inserted beta-nodes survive.
    """

    target: int
    case_tag: str
    six_steps: tuple[VertexSet, ...]
    resulting_mis: VertexSet


def greedy_complete(
    g: Graph,
    partial: VertexSet,
    alpha: VertexSet,
    beta: VertexSet,
    within: VertexSet | None = None,
) -> VertexSet:
    """Extend an independent set to a maximal one, trying beta-nodes first,
    then alpha-nodes, then the rest, each in ascending id order.

    Completing over all nodes keeps every completion a genuine MIS, which the
    insertion cases rely on (every node keeps a set-neighbor within one hop).
    A parked non-target node never survives to the end: its beta-neighbor's
    own insertion evicts it.  ``within`` optionally caps candidates to a
    locality ball."""
    if not is_independent(g, partial):
        raise InputError("partial set must be independent")
    current = set(partial)
    pool = g.nodes if within is None else g.nodes & within
    ordered = sorted(pool & beta) + sorted(pool & alpha - beta) + sorted(pool - alpha - beta)
    for v in ordered:
        if v not in current and not (g.neighbors(v) & current):
            current.add(v)
    return frozenset(current)


def plan_insertion(
    g: Graph,
    current: VertexSet,
    alpha: VertexSet,
    beta: VertexSet,
    v: int,
) -> InsertionPlan:
    """Materialize a six-step fragment that brings v into the running set.

    Candidate constructions are tried in a fixed order (the set-node-at-2
    shortcut, then the four helper cases, then need-driven parking and a
    single-helper sweep), each vetted by a full per-step check before being
    accepted, so an unsafe helper choice falls through to the next rung.
    All witnesses are id-smallest, making plans deterministic and
    recomputable from the 9-hop ball of v alone (changes stay within 4 hops;
    any node a change can endanger lies within 5, its covers within 9).
    """
    if v not in g:
        raise InputError(f"unknown node id {v}")
    if v not in beta:
        raise InputError(f"target {v} is not a beta-node")
    if v in current:
        raise InputError(f"target {v} is already in the set")
    current = frozenset(current)
    blockers = g.neighbors(v) & current
    reach = ball(g, v, 4)
    base = (current - blockers) | {v}
    gamma = greedy_complete(g, base, alpha, beta, within=reach)

    dist = distances_from(g, v)
    sphere2 = sorted(u for u, d in dist.items() if d == 2)
    sphere3 = frozenset(u for u, d in dist.items() if d == 3)
    # Only nodes whose nearest set-member is removed can lose coverage, and
    # removals stay within 4 hops of v, so checks are confined to this ball.
    risk = frozenset(u for u, d in dist.items() if d <= 5)

    if not blockers:
        steps = [gamma] * SLOT
        return _checked_plan(g, current, v, "free", steps, gamma, blockers)

    direct = [current - blockers] + [gamma] * (SLOT - 1)

    def parked_steps(helpers: list[int]) -> list[VertexSet]:
        parked = [c for c in helpers if c not in current]
        helper_blockers = frozenset(w for c in parked for w in g.neighbors(c) & current)
        s1 = current - helper_blockers
        s2 = s1 | frozenset(parked)
        s3 = s2 - blockers
        s4 = s3 | {v}
        s5 = s4 - frozenset(parked)
        return [s1, s2, s3, s4, s5, gamma]

    attempts: list[tuple[str, list[VertexSet]]] = []
    if any(u in current for u in sphere2):
        attempts.append(("alpha-at-2", direct))
    for u in sphere2:
        if not (g.neighbors(u) & blockers):
            attempts.append(("case1", parked_steps([u])))
            break
    for u in sphere2:
        if blockers <= g.neighbors(u):
            partners = sorted(g.neighbors(u) & sphere3)
            if partners:
                attempts.append(("case2", parked_steps([partners[0]])))
                break
    for u in sphere2:
        if not (g.neighbors(u) & sphere3) and (blockers - g.neighbors(u)):
            attempts.append(("case3", parked_steps([u])))
            break
    outward = [u for u in sphere2 if g.neighbors(u) & sphere3]
    if outward:
        partners = _independent_partners(g, current, outward, sphere3)
        attempts.append(("case4", parked_steps(partners)))
    needed = _needed_helpers(g, current, blockers, sphere2, sphere3, risk)
    if needed is not None:
        attempts.append(("case4" if needed else "direct", parked_steps(needed)))
    for c in sphere2 + sorted(sphere3):
        if c not in current:
            attempts.append(("helper", parked_steps([c])))

    for tag, steps in attempts:
        if _fragment_ok(g, current, steps, risk):
            return _checked_plan(g, current, v, tag, steps, gamma, blockers)

    raise InternalError(
        f"no insertion fragment validates for node {v}; 2-sphere {sphere2}, "
        f"3-sphere {sorted(sphere3)}, set-neighbors {sorted(blockers)}"
    )


def _fragment_ok(g: Graph, current: VertexSet, steps: list[VertexSet], risk: VertexSet) -> bool:
    """Full per-step check of a candidate fragment: flip-independence, set
    independence, and 4-domination of every at-risk node."""
    prev = current
    for s in steps:
        flip = s ^ prev
        for w in flip:
            if g.neighbors(w) & flip:
                return False
        if not is_independent(g, s):
            return False
        covered: set[int] = set()
        for m in sorted(s):
            covered.update(w for w, d in distances_from(g, m).items() if d <= 4)
        if risk - covered:
            return False
        prev = s
    return True


def _independent_partners(g, current, outward, sphere3) -> list[int]:
    """One distance-3 partner per outward distance-2 node, chosen greedily so
    the picked partners are pairwise independent.  A node whose candidates all
    conflict is still covered: the conflicting partner sits within two hops."""
    chosen: list[int] = []
    for u in outward:
        cands = sorted(g.neighbors(u) & sphere3)
        if any(c in chosen for c in cands):
            continue
        for c in cands:
            if not any(g.has_edge(c, other) for other in chosen):
                chosen.append(c)
                break
    return chosen


def _needed_helpers(g, current, blockers, sphere2, sphere3, risk) -> list[int] | None:
    """Helpers parked only where the mid-fragment set actually leaves a hole.

    Returns None when some hole admits no helper (the rung is skipped)."""
    base_mid = current - blockers
    covered: set[int] = set()
    for m in sorted(base_mid):
        covered.update(w for w, d in distances_from(g, m).items() if d <= 4)
    holes = [x for x in sorted(risk - covered)]
    chosen: list[int] = []
    candidates = [c for c in sphere2 + sorted(sphere3) if c not in current]
    for x in holes:
        near = frozenset(w for w, d in distances_from(g, x).items() if d <= 4)
        if any(c in near for c in chosen):
            continue
        pick = None
        for c in candidates:
            if c in near and not any(g.has_edge(c, other) for other in chosen):
                pick = c
                break
        if pick is None:
            return None
        chosen.append(pick)
    return chosen


def _checked_plan(g, current, v, tag, steps, gamma, blockers) -> InsertionPlan:
    steps = [frozenset(s) for s in steps]
    if len(steps) != SLOT:
        raise InternalError("insertion fragment must have exactly six steps")
    prev = current
    for s in steps:
        flip = s ^ prev
        for w in flip:
            if g.neighbors(w) & flip:
                raise InternalError(f"insertion fragment flips neighbors {w} together")
        if not is_independent(g, s):
            raise InternalError("insertion fragment produced a dependent set")
        prev = s
    if steps[-1] != gamma:
        raise InternalError("insertion fragment must end at its completion")
    net_removed = current - gamma
    if not net_removed <= blockers:
        raise InternalError(f"insertion fragment removed non-neighbors {sorted(net_removed - blockers)}")
    if v not in gamma:
        raise InternalError("insertion fragment lost its target")
    if not is_mis(g, gamma):
        raise InternalError("insertion fragment did not end at a maximal independent set")
    return InsertionPlan(v, tag, tuple(steps), gamma)


def _require_deep_diameter(g: Graph) -> None:
    diam = diameter(g)
    if diam == math.inf:
        raise InputError("graph must be connected")
    if diam <= 5:
        raise InputError("diameter must exceed 5; use the constant-length pipeline")


def constant_rounds_schedule(inst: ReconfigInstance) -> tuple[Schedule, SimReport]:
    """Identifier-driven schedule: node k owns steps 6k+1..6(k+1); total
    length 6·(max id + 1) regardless of how sparse the ids are.

    Every plan depends only on a 9-hop ball (the changed region spans 4
    hops, the nodes it can endanger 5, their covers 9), so the communication
    cost is the 9-round collection, independent of the graph size.
    """
    g = inst.graph
    _require_deep_diameter(g)
    collect = run(g, lambda: CollectProgram(9), {v: None for v in g.nodes}, round_cap=12)
    current = inst.alpha
    steps: list[VertexSet] = [current]
    for k in range(max(g.nodes) + 1):
        if k in g.nodes and k in inst.beta and k not in current:
            plan = plan_insertion(g, current, inst.alpha, inst.beta, k)
            steps.extend(plan.six_steps)
            current = plan.resulting_mis
        else:
            steps.extend([current] * SLOT)
    sched = Schedule(tuple(steps))
    _assert_valid(inst, sched)
    report = SimReport(outputs={}, rounds_used=collect.rounds_used, messages_sent=collect.messages_sent)
    return sched, report


def coloring_schedule(inst: ReconfigInstance, coloring: dict[int, int]) -> Schedule:
    """Coloring-driven schedule: each color class runs its insertion gadgets
    in one shared six-step window; classes are separated by distance > 10, so
    the gadgets touch disjoint 4-balls and compose by union."""
    g = inst.graph
    _require_deep_diameter(g)
    if frozenset(coloring) != g.nodes:
        raise InputError("coloring must assign a color to every node")
    for v in sorted(g.nodes):
        for w in sorted(ball(g, v, 10) - {v}):
            if coloring[v] == coloring[w]:
                raise InputError(
                    f"coloring not proper on the 10th power: nodes {v} and {w} share color {coloring[v]}"
                )

    current = inst.alpha
    steps: list[VertexSet] = [current]
    for color in sorted(set(coloring.values())):
        active = sorted(
            v for v in g.nodes
            if coloring[v] == color and v in inst.beta and v not in current
        )
        plans = [plan_insertion(g, current, inst.alpha, inst.beta, v) for v in active]
        # Per-step diffs are taken against each plan's previous step, so a
        # node a plan removes and later restores round-trips correctly.
        for j in range(SLOT):
            removed = frozenset(
                w for p in plans
                for w in (p.six_steps[j - 1] if j else current) - p.six_steps[j]
            )
            added = frozenset(
                w for p in plans
                for w in p.six_steps[j] - (p.six_steps[j - 1] if j else current)
            )
            steps.append((steps[-1] - removed) | added)
        current = steps[-1]
        if plans and not is_mis(g, current):
            raise InternalError("merged color window did not end at a maximal independent set")
    sched = Schedule(tuple(steps))
    _assert_valid(inst, sched)
    return sched


def _assert_valid(inst: ReconfigInstance, sched: Schedule) -> None:
    report = validate(inst, sched, PropertySpec(4))
    if not report.valid:
        raise InternalError(f"constructed schedule invalid: {report.first_violation.describe()}")
    if sched.steps[-1] != inst.beta:
        raise InternalError("schedule does not end exactly at beta")


def greedy_power_coloring(g: Graph, radius: int = 10) -> dict[int, int]:
    """Centralized greedy coloring of the ``radius``-th power, ids ascending;
    colors are positive integers."""
    colors: dict[int, int] = {}
    for v in sorted(g.nodes):
        used = {colors[w] for w in ball(g, v, radius) if w in colors and w != v}
        c = 1
        while c in used:
            c += 1
        colors[v] = c
    return colors


def parse_coloring_file(text: str) -> dict[int, int]:
    """Parse ``color <node id> <color int>`` lines; comments and blanks ok."""
    out: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] != "color":
            raise InputError(f"line {lineno}: malformed record {raw!r}")
        try:
            node, color = int(parts[1]), int(parts[2])
        except ValueError:
            raise InputError(f"line {lineno}: malformed record {raw!r}") from None
        if node in out:
            raise InputError(f"line {lineno}: duplicate color for node {node}")
        out[node] = color
    return out


def format_coloring_file(coloring: dict[int, int]) -> str:
    return "".join(f"color {v} {coloring[v]}\n" for v in sorted(coloring))
