"""Deterministic safety analyses over a system model.

Fault propagation evaluates gates in topological order, the critical path
is a unit-weight shortest-path search between start and end markers, and
single points of failure are components whose lone failure reaches an end
node.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import NoStartOrEndError, UnknownNodeRefError
from .model import GATE_AND, GATE_KOON, GATE_OR, FaultGate, SystemModel


@dataclass(frozen=True)
class FaultState:
    """Fault assignment split into seeded and derived components."""

    seeded: frozenset[str]
    derived: frozenset[str]

    @property
    def faulty(self) -> frozenset[str]:
        return self.seeded | self.derived

    def to_json_dict(self) -> dict:
        return {
            "faulty": sorted(self.faulty),
            "seeded": sorted(self.seeded),
            "derived": sorted(self.derived),
        }


@dataclass(frozen=True)
class PathResult:
    paths: tuple[tuple[str, ...], ...]
    node_union: frozenset[str]
    excluded_faults: frozenset[str]

    @property
    def blocked(self) -> bool:
        """True when no start can reach any end after exclusions."""
        return not self.paths

    def to_json_dict(self) -> dict:
        return {
            "paths": [list(p) for p in self.paths],
            "node_union": sorted(self.node_union),
            "excluded_faults": sorted(self.excluded_faults),
            "blocked": self.blocked,
        }


@dataclass(frozen=True)
class SpofReport:
    spofs: frozenset[str]
    witness: dict[str, str]

    def to_json_dict(self) -> dict:
        return {
            "spofs": sorted(self.spofs),
            "witness": {k: self.witness[k] for k in sorted(self.witness)},
        }


def eval_gate(gate: FaultGate, faulty) -> bool:
    """Evaluate a gate against a set of faulty component names."""
    faulty = set(faulty)
    hits = sum(1 for op in gate.operands if _operand_faulty(op, faulty))
    if gate.kind == GATE_AND:
        return hits == len(gate.operands)
    if gate.kind == GATE_OR:
        return hits > 0
    if gate.kind == GATE_KOON:
        return hits >= (gate.k or 0)
    raise ValueError(f"unknown gate kind {gate.kind!r}")


def _operand_faulty(op, faulty: set[str]) -> bool:
    if isinstance(op, FaultGate):
        return eval_gate(op, faulty)
    return op in faulty


def propagate(model: SystemModel, seeds) -> FaultState:
    """Derive the full faulty set from seeded failures in one topological pass.

    Components without in-edges only fail when seeded; everything else fails
    when its effective gate fires over the already-determined states.
    """
    seeds = set(seeds)
    unknown = sorted(s for s in seeds if not model.has_node(s))
    if unknown:
        raise UnknownNodeRefError(f"unknown seed nodes: {', '.join(unknown)}")

    faulty = set(seeds)
    derived: set[str] = set()
    for name in model.topological_order:
        if name in faulty:
            continue
        gate = model.effective_gate(name)
        if gate is not None and eval_gate(gate, faulty):
            faulty.add(name)
            derived.add(name)
    return FaultState(frozenset(seeds), frozenset(derived))


def critical_path(model: SystemModel, exclude=()) -> PathResult:
    """Minimal start-to-end paths after removing the excluded components.

    Runs a unit-weight shortest-path search (Dijkstra degenerates to BFS
    here) for every start/end pair. For each end node, every path whose
    length equals the global minimum for that end is kept; the path list is
    sorted lexicographically. An end no start can reach contributes nothing;
    if nothing is reachable the result is empty and flagged blocked.
    """
    exclude = set(exclude)
    unknown = sorted(x for x in exclude if not model.has_node(x))
    if unknown:
        raise UnknownNodeRefError(f"unknown excluded nodes: {', '.join(unknown)}")
    if not model.start_nodes() or not model.end_nodes():
        raise NoStartOrEndError("model needs at least one start and one end node")

    alive = [n for n in model.node_names() if n not in exclude]
    alive_set = set(alive)
    starts = [n for n in model.start_nodes() if n in alive_set]
    ends = [n for n in model.end_nodes() if n in alive_set]

    fwd: dict[str, list[str]] = {n: [] for n in alive}
    rev: dict[str, list[str]] = {n: [] for n in alive}
    for src, dst in model.edges:
        if src in alive_set and dst in alive_set:
            fwd[src].append(dst)
            rev[dst].append(src)

    all_paths: list[tuple[str, ...]] = []
    for end in ends:
        dist = _bfs_distances(rev, end)
        reachable_starts = [s for s in starts if s in dist]
        if not reachable_starts:
            continue
        best = min(dist[s] for s in reachable_starts)
        for start in reachable_starts:
            if dist[start] != best:
                continue
            all_paths.extend(_tight_paths(fwd, dist, start, end))

    all_paths.sort()
    union = frozenset(n for p in all_paths for n in p)
    return PathResult(tuple(all_paths), union, frozenset(exclude))


def _bfs_distances(adj: dict[str, list[str]], source: str) -> dict[str, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        cur = queue.popleft()
        for nxt in adj[cur]:
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                queue.append(nxt)
    return dist


def _tight_paths(
    fwd: dict[str, list[str]], dist_to_end: dict[str, int], start: str, end: str
) -> list[tuple[str, ...]]:
    """All paths start..end that shrink the remaining distance every hop."""
    paths: list[tuple[str, ...]] = []
    stack: list[tuple[str, tuple[str, ...]]] = [(start, (start,))]
    while stack:
        cur, path = stack.pop()
        if cur == end:
            paths.append(path)
            continue
        for nxt in fwd[cur]:
            if dist_to_end.get(nxt, -1) == dist_to_end[cur] - 1:
                stack.append((nxt, path + (nxt,)))
    return paths


def find_spofs(model: SystemModel) -> SpofReport:
    """Components whose single seeded failure faults at least one end node."""
    ends = model.end_nodes()
    if not ends:
        raise NoStartOrEndError("model has no end node")
    spofs: set[str] = set()
    witness: dict[str, str] = {}
    for name in model.node_names():
        state = propagate(model, {name})
        hit = sorted(e for e in ends if e in state.faulty)
        if hit:
            spofs.add(name)
            witness[name] = hit[0]
    return SpofReport(frozenset(spofs), witness)
