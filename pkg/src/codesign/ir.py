"""Verbalized intermediate representation of the system model.

The IR is the list-structured text handed to the language model in place
of raw XML. It has exactly three sections (Nodes, Edges, Attributes) and a
frozen surface form, so it can double as a lossless serialization: parsing
the IR of a model yields back an equal model.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IrSyntaxError, UnknownNodeRefError
from .model import ComponentNode, SystemModel, parse_gate

_BULLET = "    - "
_ARROW = " --> "
_SECTIONS = ("Nodes:", "Edges:", "Attributes:")


@dataclass(frozen=True)
class IrDocument:
    text: str
    # 1-based line number -> ("node", name) | ("edge", (src, dst)) | ("attr", (name, key))
    line_map: dict[int, tuple]


def verbalize(model: SystemModel) -> IrDocument:
    """Render the model as IR text, in model order."""
    lines: list[str] = []
    line_map: dict[int, tuple] = {}

    lines.append("Nodes:")
    for node in model.nodes:
        lines.append(f"{_BULLET}{node.name}")
        line_map[len(lines)] = ("node", node.name)

    lines.append("Edges:")
    for src, dst in model.edges:
        lines.append(f"{_BULLET}{src}{_ARROW}{dst}")
        line_map[len(lines)] = ("edge", (src, dst))

    lines.append("Attributes:")
    for node in model.nodes:
        for key, value in _node_attributes(node):
            lines.append(f"{_BULLET}{node.name}: {key} = {value}")
            line_map[len(lines)] = ("attr", (node.name, key))

    return IrDocument("\n".join(lines) + "\n", line_map)


def _node_attributes(node: ComponentNode) -> list[tuple[str, str]]:
    attrs: list[tuple[str, str]] = []
    if node.gate is not None:
        attrs.append(("gate", node.gate.to_expr()))
    if node.is_start:
        attrs.append(("start", "true"))
    if node.is_end:
        attrs.append(("end", "true"))
    attrs.extend(node.extra_attributes)
    return attrs


def parse_ir(text: str) -> SystemModel:
    """Parse IR text back into a SystemModel."""
    node_order: list[str] = []
    node_lines: dict[str, int] = {}
    edges: list[tuple[str, str]] = []
    # name -> list of (key, value, line)
    attrs: dict[str, list[tuple[str, str, int]]] = {}

    section = None
    seen_sections: list[str] = []
    lines = text.split("\n")
    # a single trailing newline leaves one empty tail element
    if lines and lines[-1] == "":
        lines.pop()

    for lineno, line in enumerate(lines, start=1):
        if line in _SECTIONS:
            expected = _SECTIONS[len(seen_sections)] if len(seen_sections) < 3 else None
            if line != expected:
                raise IrSyntaxError(f"unexpected section {line!r}", lineno)
            seen_sections.append(line)
            section = line
            continue
        if not line.strip():
            raise IrSyntaxError("blank lines are not part of the IR grammar", lineno)
        if section is None:
            raise IrSyntaxError("content before the Nodes: section", lineno)
        if not line.startswith(_BULLET):
            raise IrSyntaxError(f"expected a {_BULLET.strip()!r} item line", lineno)
        body = line[len(_BULLET):]

        if section == "Nodes:":
            name = body
            if name in node_lines:
                raise IrSyntaxError(f"duplicate node {name!r}", lineno)
            node_order.append(name)
            node_lines[name] = lineno
        elif section == "Edges:":
            parts = body.split(_ARROW)
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise IrSyntaxError(f"bad edge line {body!r}", lineno)
            src, dst = parts
            for endpoint in (src, dst):
                if endpoint not in node_lines:
                    raise UnknownNodeRefError(
                        f"line {lineno}: edge references undeclared node {endpoint!r}"
                    )
            edges.append((src, dst))
        else:
            name, sep, rest = body.partition(": ")
            if not sep:
                raise IrSyntaxError(f"bad attribute line {body!r}", lineno)
            if name not in node_lines:
                raise UnknownNodeRefError(
                    f"line {lineno}: attribute for undeclared node {name!r}"
                )
            key, sep, value = rest.partition(" = ")
            if not sep:
                raise IrSyntaxError(f"attribute line without ' = ' {body!r}", lineno)
            attrs.setdefault(name, []).append((key, value, lineno))

    if len(seen_sections) != 3:
        raise IrSyntaxError(
            f"missing section {_SECTIONS[len(seen_sections)]!r}", len(lines) + 1
        )

    in_map: dict[str, list[str]] = {name: [] for name in node_order}
    for src, dst in edges:
        in_map[dst].append(src)

    nodes: list[ComponentNode] = []
    for name in node_order:
        gate = None
        is_start = False
        is_end = False
        extras: list[tuple[str, str]] = []
        seen_keys: set[str] = set()
        for key, value, lineno in attrs.get(name, []):
            if key in seen_keys:
                raise IrSyntaxError(f"duplicate attribute {key!r} for {name!r}", lineno)
            seen_keys.add(key)
            if key == "gate":
                gate = parse_gate(value, in_map[name], owner=name)
            elif key in ("start", "end"):
                if value not in ("true", "false"):
                    raise IrSyntaxError(f"bad boolean {value!r} for {key!r}", lineno)
                if key == "start":
                    is_start = value == "true"
                else:
                    is_end = value == "true"
            else:
                extras.append((key, value))
        nodes.append(ComponentNode(name, gate, is_start, is_end, tuple(extras)))

    return SystemModel(tuple(nodes), tuple(edges))
