"""Fault-tolerance mutations: node replication and candidate selection.

Replicating a component splits it into a group of replicas. Consumers are
rewired so the group only counts as faulty when every replica is faulty,
which is what removes the original single point of failure.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ModelError, NameCollisionError, NoStartOrEndError, UnknownNodeRefError
from .model import GATE_AND, GATE_KOON, ComponentNode, FaultGate, SystemModel
from .analysis import find_spofs


@dataclass(frozen=True)
class MutationPlan:
    kind: str
    target: str
    replica_names: tuple[str, ...]
    rationale: str

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "target": self.target,
            "replicas": list(self.replica_names),
            "rationale": self.rationale,
        }


def replica_names(target: str, copies: int) -> list[str]:
    return [f"{target}_{i}" for i in range(1, copies + 1)]


def replicate_node(model: SystemModel, target: str, copies: int = 2) -> SystemModel:
    """Replace ``target`` with ``copies`` replicas and rewire consumers.

    Each replica inherits the target's in-edges, out-edges, gate and
    start/end flags. In every consumer's gate the occurrence of the target
    is replaced by an all-replicas-faulty subterm; a consumer that relied on
    the implicit AND gate gains an explicit one so the group semantics stay
    visible in the model.
    """
    if copies < 2:
        raise ValueError("copies must be at least 2")
    node = model.node(target)
    if len(model.nodes) == 1 and node.is_start and node.is_end:
        raise ModelError("cannot replicate the only node of a one-node model")
    names = replica_names(target, copies)
    existing = set(model.node_names())
    clash = sorted(n for n in names if n in existing)
    if clash:
        raise NameCollisionError(f"replica name already exists: {', '.join(clash)}")

    group = FaultGate(GATE_KOON, tuple(names), k=copies)
    consumers = set(model.out_neighbors(target))

    new_nodes: list[ComponentNode] = []
    for cur in model.nodes:
        if cur.name == target:
            for name in names:
                new_nodes.append(replace(cur, name=name))
        elif cur.name in consumers:
            new_nodes.append(replace(cur, gate=_consumer_gate(model, cur, target, group)))
        else:
            new_nodes.append(cur)

    new_edges: list[tuple[str, str]] = []
    for src, dst in model.edges:
        if src == target:
            new_edges.extend((name, dst) for name in names)
        elif dst == target:
            new_edges.extend((src, name) for name in names)
        else:
            new_edges.append((src, dst))

    return SystemModel(
        tuple(new_nodes),
        tuple(new_edges),
        revision=model.revision + 1,
        source_path=model.source_path,
    )


def _consumer_gate(
    model: SystemModel, consumer: ComponentNode, target: str, group: FaultGate
) -> FaultGate:
    if consumer.gate is not None:
        return _substitute(consumer.gate, target, group)
    # implicit AND over in-neighbours becomes explicit with the group subterm
    operands = tuple(
        group if name == target else name for name in model.in_neighbors(consumer.name)
    )
    return FaultGate(GATE_AND, operands)


def _substitute(gate: FaultGate, target: str, group: FaultGate) -> FaultGate:
    operands = tuple(
        _substitute(op, target, group)
        if isinstance(op, FaultGate)
        else (group if op == target else op)
        for op in gate.operands
    )
    return replace(gate, operands=operands)


def suggest_redundancy(model: SystemModel, copies: int = 2) -> MutationPlan:
    """Pick the best replication candidate among the single points of failure.

    The candidate with the most inputs wins (ties break lexicographically):
    a component that aggregates many inputs is where redundancy pays off.
    Without end markers or without SPOFs there is nothing to suggest.
    """
    try:
        report = find_spofs(model)
    except NoStartOrEndError:
        report = None
    if report is None or not report.spofs:
        return MutationPlan("ReplicateNode", "", (), "no single points of failure")

    candidates = sorted(
        report.spofs, key=lambda name: (-len(model.in_neighbors(name)), name)
    )
    target = candidates[0]
    names = tuple(replica_names(target, copies))
    inputs = list(model.in_neighbors(target))
    consumers = list(model.out_neighbors(target))
    rationale = (
        f"{target} is a single point of failure: its lone failure reaches "
        f"{report.witness[target]}. "
    )
    if inputs:
        rationale += f"It combines inputs from {', '.join(inputs)}"
    else:
        rationale += "It has no upstream inputs"
    if consumers:
        rationale += f" and feeds {', '.join(consumers)}. "
    else:
        rationale += " and feeds no downstream components. "
    rationale += (
        f"Replicating it into {', '.join(names)} lets the system keep working "
        f"unless every replica fails."
    )
    return MutationPlan("ReplicateNode", target, names, rationale)
