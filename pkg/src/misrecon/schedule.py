"""Reconfiguration instances, schedules, and the validator every algorithm's
output must pass.

A schedule is a sequence of vertex sets from alpha to beta.  Each intermediate
set must be a (2, d)-ruling set (independent and d-dominating), and the
symmetric difference of consecutive sets must be independent, so no two
neighbors flip membership in the same step.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .graph import (
    ComponentInfo,
    Graph,
    VertexSet,
    distances_from,
    is_d_dominating,
    is_mis,
)


@dataclass(frozen=True)
class ReconfigInstance:
    """A graph plus the two maximal independent sets to reconfigure between."""

    graph: Graph
    alpha: VertexSet
    beta: VertexSet

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", frozenset(self.alpha))
        object.__setattr__(self, "beta", frozenset(self.beta))
        if not is_mis(self.graph, self.alpha):
            raise InputError("alpha is not a maximal independent set")
        if not is_mis(self.graph, self.beta):
            raise InputError("beta is not a maximal independent set")


@dataclass(frozen=True)
class Schedule:
    """A materialized sequence of vertex sets; length is steps, not sets."""

    steps: tuple[VertexSet, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(frozenset(s) for s in self.steps))

    @property
    def length(self) -> int:
        return len(self.steps) - 1

    def __len__(self) -> int:
        return len(self.steps)

    def __getitem__(self, i: int) -> VertexSet:
        return self.steps[i]


@dataclass(frozen=True)
class PropertySpec:
    """The target property of intermediate sets: a (2, d)-ruling set."""

    d: int = 4

    def __post_init__(self) -> None:
        if self.d < 1:
            raise InputError(f"domination radius must be positive, got {self.d}")


@dataclass(frozen=True)
class Violation:
    step: int
    condition: str  # endpoints | independence | domination | flip-independence
    witness: tuple[int, int] | int | None

    def describe(self) -> str:
        if isinstance(self.witness, tuple):
            what = f"edge {self.witness[0]}-{self.witness[1]}"
        elif self.witness is None:
            what = "no witness"
        else:
            what = f"node {self.witness}"
        return f"{self.condition} violated at step {self.step}: {what}"


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    first_violation: Violation | None = None


def _find_edge_inside(g: Graph, s: VertexSet) -> tuple[int, int] | None:
    for v in sorted(s):
        hits = g.neighbors(v) & s
        if hits:
            return (min(v, min(hits)), max(v, min(hits)))
    return None


def _find_undominated(g: Graph, s: VertexSet, d: int) -> int | None:
    if not s:
        return min(g.nodes) if g.nodes else None
    covered: set[int] = set()
    for v in sorted(s):
        covered.update(w for w, dist in distances_from(g, v).items() if dist <= d)
    missing = g.nodes - covered
    return min(missing) if missing else None


def validate(inst: ReconfigInstance, sched: Schedule, prop: PropertySpec = PropertySpec()) -> ValidationReport:
    """Check all three schedule conditions, reporting the earliest violation.

    Endpoints must equal alpha and beta; every strictly intermediate set must
    be independent and d-dominating; every consecutive pair must differ by an
    independent set.  Sets may repeat (an empty flip is independent).
    """
    if not sched.steps:
        raise InputError("empty schedule")
    g = inst.graph
    for step in sched.steps:
        unknown = step - g.nodes
        if unknown:
            raise InputError(f"schedule step contains unknown node ids {sorted(unknown)}")

    def fail(step: int, condition: str, witness) -> ValidationReport:
        return ValidationReport(False, Violation(step, condition, witness))

    if sched.steps[0] != inst.alpha:
        diff = sched.steps[0] ^ inst.alpha
        return fail(0, "endpoints", min(diff) if diff else None)
    last = len(sched.steps) - 1
    for i in range(1, len(sched.steps)):
        flip = sched.steps[i] ^ sched.steps[i - 1]
        edge = _find_edge_inside(g, flip)
        if edge is not None:
            return fail(i, "flip-independence", edge)
        if i < last:
            edge = _find_edge_inside(g, sched.steps[i])
            if edge is not None:
                return fail(i, "independence", edge)
            if not is_d_dominating(g, sched.steps[i], prop.d):
                return fail(i, "domination", _find_undominated(g, sched.steps[i], prop.d))
    if sched.steps[last] != inst.beta:
        diff = sched.steps[last] ^ inst.beta
        return fail(last, "endpoints", min(diff) if diff else None)
    return ValidationReport(True)


def update_component(
    current: VertexSet,
    comp: ComponentInfo | VertexSet,
    alpha: VertexSet,
    beta: VertexSet,
) -> tuple[VertexSet, VertexSet]:
    """The two-step update of a component (or batched union of components):
    first remove its alpha-part, then add its beta-part."""
    vertices = comp.vertices if isinstance(comp, ComponentInfo) else frozenset(comp)
    if not (vertices & alpha) <= current:
        raise InputError("component alpha-part not contained in current set")
    removed = frozenset(current) - (frozenset(alpha) & vertices)
    added = removed | (frozenset(beta) & vertices)
    return removed, added


def parse_vertex_set_file(text: str) -> VertexSet:
    """Parse a vertex-set file: whitespace-separated ids, ``#`` comments allowed."""
    ids: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for tok in line.split():
            try:
                ids.add(int(tok))
            except ValueError:
                raise InputError(f"line {lineno}: bad node id {tok!r}") from None
    return frozenset(ids)


def format_vertex_set_file(s: VertexSet) -> str:
    return " ".join(str(v) for v in sorted(s)) + "\n"


def parse_schedule_file(text: str) -> Schedule:
    """Parse the schedule format: one line per step, sorted ids, single spaces.

    Every line is a step; an empty line is the empty set.  A trailing newline
    terminates the last step and is required on write.
    """
    lines = text.splitlines()
    if not lines:
        raise InputError("empty schedule file")
    steps = []
    for lineno, line in enumerate(lines, start=1):
        try:
            steps.append(frozenset(int(tok) for tok in line.split()))
        except ValueError:
            raise InputError(f"line {lineno}: bad node id in {line!r}") from None
    return Schedule(tuple(steps))


def format_schedule_file(sched: Schedule) -> str:
    return "".join(" ".join(str(v) for v in sorted(step)) + "\n" for step in sched.steps)
