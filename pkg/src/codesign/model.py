"""System model graph: XML parsing, validation, DOT export and write-back.

The model is a DAG of named components. Each component may carry a fault
gate describing how faults on its inputs combine; components without an
explicit gate default to AND over all in-neighbours. Models are immutable
values: mutations produce a new model with a bumped revision.
"""

from __future__ import annotations

import os
import re
import tempfile
import threading
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path

from .errors import (
    BadAttributeError,
    BadGateExprError,
    CycleDetectedError,
    DuplicateEdgeError,
    DuplicateNodeError,
    InvalidNodeNameError,
    KOutOfRangeError,
    ModelError,
    UnknownNodeRefError,
    XmlSyntaxError,
)

GATE_AND = "AND"
GATE_OR = "OR"
GATE_KOON = "KOON"

# Attribute keys consumed by the schema itself; everything else is preserved
# as an extra attribute and round-tripped.
RESERVED_NODE_ATTRS = ("name", "gate", "start", "end")

# Characters that would make a name unrepresentable in the gate grammar,
# the IR listing, or DOT output.
_NAME_FORBIDDEN = set("(),:=\"'")
_EDGE_TOKEN = "-->"

_KOON_TOKEN = re.compile(r"^(\d+)[oO][oO](\d+)$")
_ATTR_KEY = re.compile(r"^[^\s:=]+$")


def valid_node_name(name: str) -> bool:
    if not name:
        return False
    if _EDGE_TOKEN in name:
        return False
    if any(ch.isspace() or ch in _NAME_FORBIDDEN for ch in name):
        return False
    return True


@dataclass(frozen=True)
class FaultGate:
    """Boolean fault condition over a component's inputs.

    Operands are input component names or nested gates; a nested gate
    counts as a single input which is faulty when its own condition holds.
    Nested operands arise from node replication, where a replica group
    contributes to the consumer's gate as an all-replicas-faulty subterm.
    """

    kind: str
    operands: tuple["FaultGate | str", ...]
    k: int | None = None

    def leaf_names(self) -> list[str]:
        """All component names referenced by this gate, in operand order."""
        names: list[str] = []
        for op in self.operands:
            if isinstance(op, FaultGate):
                names.extend(op.leaf_names())
            else:
                names.append(op)
        return names

    def to_expr(self) -> str:
        head = f"{self.k}OO{len(self.operands)}" if self.kind == GATE_KOON else self.kind
        parts = [op.to_expr() if isinstance(op, FaultGate) else op for op in self.operands]
        return f"{head}({','.join(parts)})"

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.to_expr()


def _validate_gate(gate: FaultGate, in_neighbors: set[str], owner: str) -> None:
    if gate.kind not in (GATE_AND, GATE_OR, GATE_KOON):
        raise BadGateExprError(f"{owner}: unknown gate kind {gate.kind!r}")
    if not gate.operands:
        raise BadGateExprError(f"{owner}: gate has no inputs")
    if gate.kind == GATE_KOON:
        if gate.k is None:
            raise BadGateExprError(f"{owner}: KOON gate without k")
        if gate.k < 1 or gate.k > len(gate.operands):
            raise KOutOfRangeError(
                f"{owner}: k={gate.k} out of range for {len(gate.operands)} inputs"
            )
    elif gate.k is not None:
        raise BadGateExprError(f"{owner}: k only allowed on KOON gates")
    leaves = gate.leaf_names()
    seen: set[str] = set()
    for name in leaves:
        if name in seen:
            raise BadGateExprError(f"{owner}: duplicate gate input {name!r}")
        seen.add(name)
        if name not in in_neighbors:
            raise UnknownNodeRefError(
                f"{owner}: gate input {name!r} is not an in-neighbour"
            )
    for op in gate.operands:
        if isinstance(op, FaultGate):
            _validate_gate(op, in_neighbors, owner)


def parse_gate(expr: str, owner_in_neighbors, owner: str = "gate") -> FaultGate:
    """Parse a gate expression like ``2OO3(Camera1,Camera2,Camera3)``.

    Keywords are case-insensitive, whitespace is optional, and operands may
    themselves be gate expressions.
    """
    gate, pos = _parse_gate_expr(expr, 0, owner)
    if expr[pos:].strip():
        raise BadGateExprError(f"{owner}: trailing text after gate expression: {expr[pos:]!r}")
    _validate_gate(gate, set(owner_in_neighbors), owner)
    return gate


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i].isspace():
        i += 1
    return i


def _read_token(text: str, i: int, owner: str) -> tuple[str, int]:
    start = i
    while i < len(text) and not text[i].isspace() and text[i] not in "(),":
        i += 1
    if i == start:
        raise BadGateExprError(f"{owner}: expected a name at position {start} in {text!r}")
    return text[start:i], i


def _parse_gate_expr(text: str, i: int, owner: str) -> tuple[FaultGate, int]:
    i = _skip_ws(text, i)
    head, i = _read_token(text, i, owner)
    i = _skip_ws(text, i)
    if i >= len(text) or text[i] != "(":
        raise BadGateExprError(f"{owner}: expected '(' after {head!r} in {text!r}")
    i += 1
    operands: list[FaultGate | str] = []
    while True:
        i = _skip_ws(text, i)
        if i >= len(text):
            raise BadGateExprError(f"{owner}: unterminated gate expression in {text!r}")
        op_start = i
        token, j = _read_token(text, i, owner)
        j_ws = _skip_ws(text, j)
        if j_ws < len(text) and text[j_ws] == "(":
            sub, i = _parse_gate_expr(text, op_start, owner)
            operands.append(sub)
        else:
            operands.append(token)
            i = j
        i = _skip_ws(text, i)
        if i < len(text) and text[i] == ",":
            i += 1
            continue
        if i < len(text) and text[i] == ")":
            i += 1
            break
        raise BadGateExprError(f"{owner}: expected ',' or ')' at position {i} in {text!r}")
    return _make_gate(head, operands, owner), i


def _make_gate(head: str, operands: list[FaultGate | str], owner: str) -> FaultGate:
    upper = head.upper()
    if upper == GATE_AND:
        return FaultGate(GATE_AND, tuple(operands))
    if upper == GATE_OR:
        return FaultGate(GATE_OR, tuple(operands))
    m = _KOON_TOKEN.match(head)
    if m:
        k, n = int(m.group(1)), int(m.group(2))
        if n != len(operands):
            raise BadGateExprError(
                f"{owner}: {head} declares {n} inputs but {len(operands)} given"
            )
        if k < 1 or k > n:
            raise KOutOfRangeError(f"{owner}: k={k} out of range for {n} inputs")
        return FaultGate(GATE_KOON, tuple(operands), k=k)
    raise BadGateExprError(f"{owner}: unknown gate keyword {head!r}")


@dataclass(frozen=True)
class ComponentNode:
    name: str
    gate: FaultGate | None = None
    is_start: bool = False
    is_end: bool = False
    extra_attributes: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class SystemModel:
    """Immutable DAG of components with fault gates and start/end markers."""

    nodes: tuple[ComponentNode, ...]
    edges: tuple[tuple[str, str], ...]
    revision: int = 0
    source_path: str | None = None

    def __post_init__(self):
        names: set[str] = set()
        for node in self.nodes:
            if not valid_node_name(node.name):
                raise InvalidNodeNameError(f"invalid node name {node.name!r}")
            if node.name in names:
                raise DuplicateNodeError(f"duplicate node {node.name!r}")
            names.add(node.name)
            for key, value in node.extra_attributes:
                if key in RESERVED_NODE_ATTRS or not _ATTR_KEY.match(key):
                    raise BadAttributeError(f"{node.name}: bad attribute key {key!r}")
                if "\n" in value or "\r" in value:
                    raise BadAttributeError(f"{node.name}: attribute {key!r} spans lines")
        seen_edges: set[tuple[str, str]] = set()
        for src, dst in self.edges:
            if src not in names:
                raise UnknownNodeRefError(f"edge references unknown node {src!r}")
            if dst not in names:
                raise UnknownNodeRefError(f"edge references unknown node {dst!r}")
            if (src, dst) in seen_edges:
                raise DuplicateEdgeError(f"duplicate edge {src} --> {dst}")
            seen_edges.add((src, dst))
        cycle = _find_cycle(self.nodes, self.edges)
        if cycle is not None:
            raise CycleDetectedError(cycle)
        for node in self.nodes:
            if node.gate is not None:
                ins = set(self.in_neighbors(node.name))
                if not ins:
                    raise UnknownNodeRefError(
                        f"{node.name}: gate on a node with no inputs"
                    )
                _validate_gate(node.gate, ins, node.name)

    @cached_property
    def _by_name(self) -> dict[str, ComponentNode]:
        return {n.name: n for n in self.nodes}

    @cached_property
    def _in_edges(self) -> dict[str, tuple[str, ...]]:
        ins: dict[str, list[str]] = {n.name: [] for n in self.nodes}
        for src, dst in self.edges:
            ins[dst].append(src)
        return {k: tuple(v) for k, v in ins.items()}

    @cached_property
    def _out_edges(self) -> dict[str, tuple[str, ...]]:
        outs: dict[str, list[str]] = {n.name: [] for n in self.nodes}
        for src, dst in self.edges:
            outs[src].append(dst)
        return {k: tuple(v) for k, v in outs.items()}

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        indeg = {n.name: len(self._in_edges[n.name]) for n in self.nodes}
        order: list[str] = []
        ready = [n.name for n in self.nodes if indeg[n.name] == 0]
        while ready:
            name = ready.pop(0)
            order.append(name)
            added = []
            for succ in self._out_edges[name]:
                indeg[succ] -= 1
                if indeg[succ] == 0:
                    added.append(succ)
            if added:
                # keep document order among newly ready nodes
                position = {n.name: i for i, n in enumerate(self.nodes)}
                ready.extend(added)
                ready.sort(key=lambda n: position[n])
        return tuple(order)

    def node(self, name: str) -> ComponentNode:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownNodeRefError(f"unknown node {name!r}") from None

    def has_node(self, name: str) -> bool:
        return name in self._by_name

    def node_names(self) -> list[str]:
        return [n.name for n in self.nodes]

    def in_neighbors(self, name: str) -> tuple[str, ...]:
        self.node(name)
        return self._in_edges[name]

    def out_neighbors(self, name: str) -> tuple[str, ...]:
        self.node(name)
        return self._out_edges[name]

    def start_nodes(self) -> list[str]:
        return [n.name for n in self.nodes if n.is_start]

    def end_nodes(self) -> list[str]:
        return [n.name for n in self.nodes if n.is_end]

    def effective_gate(self, name: str) -> FaultGate | None:
        """Explicit gate, or the implied AND over all in-neighbours."""
        node = self.node(name)
        if node.gate is not None:
            return node.gate
        ins = self._in_edges[name]
        if not ins:
            return None
        return FaultGate(GATE_AND, tuple(ins))

    def structurally_equal(self, other: "SystemModel") -> bool:
        """Equality up to revision and source path."""
        return self.nodes == other.nodes and self.edges == other.edges

    def to_json_dict(self) -> dict:
        return {
            "revision": self.revision,
            "nodes": [
                {
                    "name": n.name,
                    "gate": n.gate.to_expr() if n.gate else None,
                    "start": n.is_start,
                    "end": n.is_end,
                    "attributes": [[k, v] for k, v in n.extra_attributes],
                }
                for n in self.nodes
            ],
            "edges": [{"from": src, "to": dst} for src, dst in self.edges],
        }


def _find_cycle(nodes, edges) -> list[str] | None:
    adj: dict[str, list[str]] = {n.name: [] for n in nodes}
    for src, dst in edges:
        adj.setdefault(src, []).append(dst)
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n.name: WHITE for n in nodes}
    parent: dict[str, str | None] = {}

    for root in [n.name for n in nodes]:
        if color[root] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(root, 0)]
        parent[root] = None
        color[root] = GREY
        while stack:
            name, idx = stack[-1]
            if idx < len(adj.get(name, [])):
                stack[-1] = (name, idx + 1)
                succ = adj[name][idx]
                if color.get(succ, WHITE) == GREY:
                    # back edge: walk parents from name to succ
                    cycle = [name]
                    cur = name
                    while cur != succ:
                        cur = parent[cur]
                        cycle.append(cur)
                    cycle.reverse()
                    return cycle
                if color.get(succ, WHITE) == WHITE:
                    color[succ] = GREY
                    parent[succ] = name
                    stack.append((succ, 0))
            else:
                color[name] = BLACK
                stack.pop()
    return None


def parse_model(xml_text: str, source_path: str | None = None) -> SystemModel:
    """Parse the XML model schema into a validated SystemModel."""
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise XmlSyntaxError(f"malformed XML: {exc}") from exc
    if root.tag != "system":
        raise XmlSyntaxError(f"expected <system> root element, got <{root.tag}>")

    raw_nodes: list[tuple[str, str | None, bool, bool, tuple[tuple[str, str], ...]]] = []
    edges: list[tuple[str, str]] = []
    for child in root:
        if child.tag == "node":
            name = child.get("name")
            if name is None:
                raise XmlSyntaxError("<node> without a name attribute")
            gate_expr = child.get("gate")
            is_start = _parse_flag(child.get("start"), name, "start")
            is_end = _parse_flag(child.get("end"), name, "end")
            extras = tuple(
                (k, v) for k, v in child.attrib.items() if k not in RESERVED_NODE_ATTRS
            )
            raw_nodes.append((name, gate_expr, is_start, is_end, extras))
        elif child.tag == "edge":
            src, dst = child.get("from"), child.get("to")
            if src is None or dst is None:
                raise XmlSyntaxError("<edge> needs both from and to attributes")
            edges.append((src, dst))
        else:
            raise XmlSyntaxError(f"unexpected element <{child.tag}>")

    declared = [name for name, *_ in raw_nodes]
    declared_set = set(declared)
    if len(declared_set) != len(declared):
        dupes = sorted({n for n in declared if declared.count(n) > 1})
        raise DuplicateNodeError(f"duplicate node {dupes[0]!r}")
    for src, dst in edges:
        if src not in declared_set:
            raise UnknownNodeRefError(f"edge references unknown node {src!r}")
        if dst not in declared_set:
            raise UnknownNodeRefError(f"edge references unknown node {dst!r}")

    in_map: dict[str, list[str]] = {name: [] for name in declared}
    for src, dst in edges:
        in_map[dst].append(src)

    nodes: list[ComponentNode] = []
    for name, gate_expr, is_start, is_end, extras in raw_nodes:
        gate = parse_gate(gate_expr, in_map[name], owner=name) if gate_expr else None
        nodes.append(ComponentNode(name, gate, is_start, is_end, extras))

    return SystemModel(tuple(nodes), tuple(edges), revision=0, source_path=source_path)


def _parse_flag(value: str | None, owner: str, key: str) -> bool:
    if value is None:
        return False
    lowered = value.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no", ""):
        return False
    raise XmlSyntaxError(f"{owner}: bad boolean value {value!r} for {key!r}")


def load_model(path: str | Path) -> SystemModel:
    text = Path(path).read_text(encoding="utf-8")
    return parse_model(text, source_path=str(path))


def model_to_xml(model: SystemModel, system_name: str = "system") -> str:
    root = ET.Element("system", {"name": system_name})
    for node in model.nodes:
        attrs: dict[str, str] = {"name": node.name}
        if node.gate is not None:
            attrs["gate"] = node.gate.to_expr()
        if node.is_start:
            attrs["start"] = "true"
        if node.is_end:
            attrs["end"] = "true"
        for key, value in node.extra_attributes:
            attrs[key] = value
        ET.SubElement(root, "node", attrs)
    for src, dst in model.edges:
        ET.SubElement(root, "edge", {"from": src, "to": dst})
    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="unicode") + "\n"


def write_model(model: SystemModel, path: str | Path) -> None:
    """Atomically write the model as XML (temp file then rename)."""
    path = Path(path)
    text = model_to_xml(model)
    fd, tmp_name = tempfile.mkstemp(dir=str(path.parent), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


_DOT_SEEDED_STYLE = 'style=filled, fillcolor="#e57373"'
_DOT_DERIVED_STYLE = 'style=filled, fillcolor="#ffb74d"'


def to_dot(model: SystemModel, highlight=None) -> str:
    """Render the model as a deterministic DOT digraph.

    ``highlight`` may be a FaultState-like object (``seeded``/``derived``
    attributes) or a plain set of names; highlighted nodes get a filled style.
    """
    seeded: set[str] = set()
    derived: set[str] = set()
    if highlight is not None:
        if hasattr(highlight, "seeded"):
            seeded = set(highlight.seeded)
            derived = set(getattr(highlight, "derived", ()))
        else:
            seeded = set(highlight)

    lines = ["digraph system {", "  rankdir=LR;"]
    for node in model.nodes:
        label_parts = [node.name]
        if node.gate is not None:
            label_parts.append(node.gate.to_expr())
        if node.is_start:
            label_parts.append("START")
        if node.is_end:
            label_parts.append("END")
        label = "\\n".join(label_parts)
        attrs = [f'label="{label}"']
        if node.name in seeded:
            attrs.append(_DOT_SEEDED_STYLE)
        elif node.name in derived:
            attrs.append(_DOT_DERIVED_STYLE)
        lines.append(f'  "{node.name}" [{", ".join(attrs)}];')
    for src, dst in model.edges:
        lines.append(f'  "{src}" -> "{dst}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


class ModelDocument:
    """Holder for the live model of one XML document.

    Reads are lock-free on an immutable snapshot; commits are serialized and
    persist to the source file atomically before swapping the snapshot in.
    """

    def __init__(self, model: SystemModel):
        self._model = model
        self._lock = threading.RLock()

    @classmethod
    def load(cls, path: str | Path) -> "ModelDocument":
        return cls(load_model(path))

    @property
    def model(self) -> SystemModel:
        return self._model

    @property
    def lock(self) -> threading.RLock:
        return self._lock

    def commit(self, new_model: SystemModel) -> SystemModel:
        with self._lock:
            if new_model.revision <= self._model.revision:
                raise ModelError(
                    f"stale commit: revision {new_model.revision} "
                    f"<= current {self._model.revision}"
                )
            if self._model.source_path:
                new_model = replace(new_model, source_path=self._model.source_path)
                write_model(new_model, self._model.source_path)
            self._model = new_model
            return new_model
