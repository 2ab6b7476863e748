"""Acceptance suite: one test per criterion, each printing a pass line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines alongside the pytest verdicts.
"""

import itertools
import time

from misrecon.analysis import (
    all_mis,
    brute_force_oracle,
    check_blocker,
    enumerate_connected_graphs,
    gen_gadget,
    random_connected_instance,
    small_diameter_fallback,
)
from misrecon.constlength import (
    constant_length_schedule,
    schedule_big_component,
    schedule_isolated,
    schedule_non_isolated,
)
from misrecon.constrounds import (
    coloring_schedule,
    constant_rounds_schedule,
    greedy_power_coloring,
    plan_insertion,
)
from misrecon.graph import Graph, components_of, diameter, is_mis
from misrecon.schedule import PropertySpec, ReconfigInstance, Schedule, validate

D4 = PropertySpec(4)
D3 = PropertySpec(3)


def test_criterion_1_constant_length_is_exactly_28():
    """200 seeded random connected instances, n <= 60, diameter > 3: every
    schedule has length exactly 28 and validates at d=4, within 10 seconds."""
    t0 = time.time()
    for i in range(200):
        n = 12 + (i * 7) % 49
        inst = random_connected_instance(n, 2.4 / n, seed=i, min_diameter=4)
        assert len(inst.graph) <= 60 and diameter(inst.graph) > 3
        sched = constant_length_schedule(inst)
        assert sched.length == 28
        assert validate(inst, sched, D4).valid
    elapsed = time.time() - t0
    assert elapsed < 10.0
    print(f"criterion 1: PASS (200 instances, all length 28, {elapsed:.2f}s)")


def test_criterion_2_fragment_budgets():
    """Single-regime instances stay within the 8/18/10 step budgets and are
    validator-clean."""
    # 8-step regime: one component of diameter >= 3 (both diameter cases).
    for n, kind in ((4, "short"), (14, "cascade")):
        g = Graph(range(n), [(i, i + 1) for i in range(n - 1)])
        inst = ReconfigInstance(g, frozenset(range(0, n, 2)), frozenset(range(1, n, 2)))
        comps = components_of(g, g.nodes, inst.alpha, inst.beta)
        frag = schedule_big_component(g, comps[0], inst.alpha, inst.beta)
        assert len(frag) - 1 <= 8
        assert validate(inst, Schedule(tuple(frag)), D4).valid

    # 18-step regime: non-isolated small components.
    g = Graph(range(5), [(0, 1), (2, 3), (4, 0), (4, 3)])
    inst = ReconfigInstance(g, frozenset({0, 2}), frozenset({1, 3}))
    comps = components_of(g, inst.alpha | inst.beta, inst.alpha, inst.beta)
    frag = schedule_non_isolated(g, comps, inst.alpha, inst.beta)
    assert len(frag) - 1 <= 18
    assert validate(inst, Schedule(tuple(frag)), D4).valid

    # 10-step regime: isolated small components, both blob depths.
    shallow = Graph(range(7), [(0, 1), (0, 2), (3, 0), (3, 1), (4, 5), (6, 4), (6, 5), (3, 6)])
    inst_s = ReconfigInstance(shallow, frozenset({0, 4}), frozenset({1, 2, 5}))
    comps_s = components_of(shallow, inst_s.alpha | inst_s.beta, inst_s.alpha, inst_s.beta)
    frag_s = schedule_isolated(shallow, comps_s, inst_s.alpha, inst_s.beta)
    assert len(frag_s) - 1 <= 10
    assert validate(inst_s, Schedule(tuple(frag_s)), D4).valid

    deep = Graph(range(6), [(0, 2), (0, 3), (1, 2), (1, 3), (4, 0), (4, 2), (5, 1), (5, 3)])
    inst_d = ReconfigInstance(deep, frozenset({0, 1}), frozenset({2, 3}))
    comps_d = components_of(deep, inst_d.alpha | inst_d.beta, inst_d.alpha, inst_d.beta)
    frag_d = schedule_isolated(deep, comps_d, inst_d.alpha, inst_d.beta)
    assert len(frag_d) - 1 <= 10
    assert validate(inst_d, Schedule(tuple(frag_d)), D4).valid
    print("criterion 2: PASS (fragments within 8/18/10 budgets, validator-clean)")


def test_criterion_3_characterization_equivalence():
    """Over every connected graph with at most 7 nodes and every ordered pair
    of distinct MISes, the blocker test agrees exactly with oracle
    non-existence at d=4."""
    t0 = time.time()
    graphs = enumerate_connected_graphs(7)
    assert len(graphs) == 996
    pairs = 0
    for g in graphs:
        mises = all_mis(g)
        if len(mises) < 2:
            continue
        for a, b in itertools.permutations(mises, 2):
            inst = ReconfigInstance(g, a, b)
            blocked = check_blocker(inst).blocked
            exists = brute_force_oracle(inst, D4).exists
            assert exists is not None
            assert blocked == (not exists), (
                f"mismatch on edges={g.edges()} alpha={sorted(a)} beta={sorted(b)}"
            )
            pairs += 1
    elapsed = time.time() - t0
    assert elapsed < 300.0
    print(f"criterion 3: PASS ({pairs} ordered MIS pairs, 0 mismatches, {elapsed:.1f}s)")


def test_criterion_4_three_domination_impossibility():
    """The blocker gadget admits no 3-dominating schedule but admits a
    4-dominating one."""
    inst = gen_gadget("threedom-blocker")
    assert brute_force_oracle(inst, D3).exists is False
    assert brute_force_oracle(inst, D4).exists is True
    print("criterion 4: PASS (3-domination blocked, 4-domination feasible)")


def test_criterion_5_linear_three_domination_cost():
    """The chained gadget's minimum 3-dominating schedule length grows
    strictly and stays above n/4.  (The n/4 floor is a desk-scale proxy; the
    source construction only asserts growth proportional to n.)"""
    lengths = []
    for n in (8, 12, 16):
        inst = gen_gadget("threedom-linear", n=n)
        res = brute_force_oracle(inst, D3)
        assert res.exists
        assert res.min_length >= n / 4
        lengths.append(res.min_length)
    assert lengths[0] < lengths[1] < lengths[2]
    print(f"criterion 5: PASS (min lengths {lengths} strictly increasing, >= n/4)")


def test_criterion_6_constant_round_property():
    """Identifier-slotted schedules take the same number of simulated rounds
    at n = 20, 40, 80, and stay within the identifier-driven length bound."""
    rounds = set()
    for n in (20, 40, 80):
        inst = gen_gadget("alt-path", n=n)
        sched, report = constant_rounds_schedule(inst)
        rounds.add(report.rounds_used)
        assert sched.length <= 6 * (max(inst.graph.nodes) + 1) + 6
        assert validate(inst, sched, D4).valid
    assert len(rounds) == 1
    print(f"criterion 6: PASS (rounds_used constant at {rounds.pop()} across n=20,40,80)")


def test_criterion_7_coloring_driven_schedule():
    """A greedy 10th-power coloring of the 60-cycle yields a schedule of
    length at most 6c+6 that validates."""
    inst = gen_gadget("alt-cycle", n=60)
    coloring = greedy_power_coloring(inst.graph, 10)
    c = len(set(coloring.values()))
    sched = coloring_schedule(inst, coloring)
    assert sched.length <= 6 * c + 6
    assert validate(inst, sched, D4).valid
    print(f"criterion 7: PASS ({c} colors, length {sched.length} <= {6 * c + 6})")


def test_criterion_8_insertion_net_removal_property():
    """Across 100 random diameter > 5 instances, every insertion fragment's
    net removals are confined to the target's set-neighbors (its
    alpha-neighbors, reading alpha as the running maximal independent set)
    and the resulting set keeps alpha ∩ beta plus the target."""
    fragments = 0
    for i in range(100):
        n = 12 + (i % 10)
        inst = random_connected_instance(n, 1.9 / n, seed=2000 + i, min_diameter=6)
        shared = inst.alpha & inst.beta
        current = inst.alpha
        for k in sorted(inst.graph.nodes):
            if k in inst.beta and k not in current:
                plan = plan_insertion(inst.graph, current, inst.alpha, inst.beta, k)
                net_removed = current - plan.resulting_mis
                assert net_removed <= (inst.graph.neighbors(k) & current)
                assert shared <= plan.resulting_mis and k in plan.resulting_mis
                current = plan.resulting_mis
                fragments += 1
        assert current == inst.beta
    assert fragments >= 100
    print(f"criterion 8: PASS ({fragments} fragments over 100 instances)")


def test_criterion_9_oracle_confirms_constructive_schedules():
    """For instances with n <= 12, the oracle confirms existence and its
    minimum never exceeds any constructed schedule's length."""
    checked = 0

    def confirm(inst, sched):
        nonlocal checked
        res = brute_force_oracle(inst, D4)
        assert res.exists is True
        assert res.min_length <= sched.length
        checked += 1

    for n in (8, 10, 12):
        inst = gen_gadget("alt-path", n=n)
        confirm(inst, constant_length_schedule(inst))
        if diameter(inst.graph) > 5:
            sched, _ = constant_rounds_schedule(inst)
            confirm(inst, sched)

    for i in range(12):
        inst = random_connected_instance(9 + (i % 4), 0.25, seed=600 + i, min_diameter=4)
        confirm(inst, constant_length_schedule(inst))

    # coloring-driven schedule on a small cycle
    ring = gen_gadget("alt-cycle", n=12)
    confirm(ring, coloring_schedule(ring, greedy_power_coloring(ring.graph, 10)))

    # small-diameter constructions
    p4 = ReconfigInstance(Graph(range(4), [(0, 1), (1, 2), (2, 3)]), frozenset({0, 2}), frozenset({1, 3}))
    confirm(p4, small_diameter_fallback(p4))
    escape = ReconfigInstance(
        Graph(range(5), [(0, 2), (0, 3), (1, 2), (1, 3), (4, 1), (4, 3)]),
        frozenset({0, 1}),
        frozenset({2, 3}),
    )
    confirm(escape, small_diameter_fallback(escape))
    print(f"criterion 9: PASS ({checked} schedules confirmed by the oracle)")


def test_criterion_10_substituted_asymptotics_documented():
    """The round lower bound and state-of-the-art MIS subroutines are not
    reproducible at desk scale; the suite substitutes the constant-round
    measurement (criterion 6) and the invariant suites, and ships the
    k-regular ring family the lower bound is stated on."""
    inst = gen_gadget("logstar", n=30, k=3)
    assert all(inst.graph.degree(v) == 3 for v in inst.graph.nodes)
    assert is_mis(inst.graph, inst.alpha) and is_mis(inst.graph, inst.beta)
    print(
        "criterion 10: PASS (asymptotic round bounds substituted by the "
        "constant-round measurement; k-regular family generated and checked)"
    )
