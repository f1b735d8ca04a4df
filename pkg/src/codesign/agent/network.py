"""The decision network: a finite tree of micro-decisions.

Every inner node asks the backend to pick one of 2-4 concepts, each
concept carrying a description and a handful of example triggers used as
few-shot context. Every leaf names the tool to run. The shipped network is
loaded from an XML file in the same schema family as the model file.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..errors import ConfigError

TOOLS = (
    "AnswerSafetyQuestion",
    "PropagateFaults",
    "CriticalPath",
    "FindSpofs",
    "SuggestRedundancy",
    "ReplicateNode",
    "Fallback",
)

MIN_OPTIONS = 2
MAX_OPTIONS = 4


@dataclass(frozen=True)
class LeafSpec:
    tool: str


@dataclass(frozen=True)
class ConceptOption:
    concept_id: str
    description: str
    triggers: tuple[str, ...]
    child: "DecisionNode | LeafSpec"


@dataclass(frozen=True)
class DecisionNode:
    node_id: str
    question: str
    options: tuple[ConceptOption, ...]

    def __post_init__(self):
        if not (MIN_OPTIONS <= len(self.options) <= MAX_OPTIONS):
            raise ConfigError(
                f"decision {self.node_id!r} has {len(self.options)} options, "
                f"expected {MIN_OPTIONS}-{MAX_OPTIONS}"
            )
        seen: set[str] = set()
        for opt in self.options:
            if opt.concept_id in seen:
                raise ConfigError(
                    f"decision {self.node_id!r}: duplicate concept {opt.concept_id!r}"
                )
            seen.add(opt.concept_id)
            if not opt.triggers:
                raise ConfigError(
                    f"concept {opt.concept_id!r} has no trigger examples"
                )

    def option(self, concept_id: str) -> ConceptOption:
        for opt in self.options:
            if opt.concept_id == concept_id:
                return opt
        raise KeyError(concept_id)

    def leaves(self) -> set[str]:
        tools: set[str] = set()
        for opt in self.options:
            if isinstance(opt.child, LeafSpec):
                tools.add(opt.child.tool)
            else:
                tools |= opt.child.leaves()
        return tools


def load_network(source: str | Path) -> DecisionNode:
    """Load a decision network from an XML file or XML text."""
    text = source if str(source).lstrip().startswith("<") else Path(source).read_text(
        encoding="utf-8"
    )
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ConfigError(f"malformed decision network XML: {exc}") from exc
    if root.tag != "decision-network":
        raise ConfigError(f"expected <decision-network> root, got <{root.tag}>")
    decisions = [child for child in root if child.tag == "decision"]
    if len(decisions) != 1:
        raise ConfigError("decision network needs exactly one top-level <decision>")
    return _parse_decision(decisions[0])


def _parse_decision(elem: ET.Element) -> DecisionNode:
    node_id = elem.get("id")
    question = elem.get("question", "")
    if not node_id:
        raise ConfigError("<decision> without an id")
    options: list[ConceptOption] = []
    for child in elem:
        if child.tag != "option":
            raise ConfigError(f"decision {node_id!r}: unexpected <{child.tag}>")
        options.append(_parse_option(child, node_id))
    return DecisionNode(node_id, question, tuple(options))


def _parse_option(elem: ET.Element, node_id: str) -> ConceptOption:
    concept = elem.get("concept")
    if not concept:
        raise ConfigError(f"decision {node_id!r}: <option> without a concept id")
    description = elem.get("description", "")
    triggers: list[str] = []
    child: DecisionNode | LeafSpec | None = None
    for sub in elem:
        if sub.tag == "trigger":
            triggers.append((sub.text or "").strip())
        elif sub.tag == "leaf":
            tool = sub.get("tool", "")
            if tool not in TOOLS:
                raise ConfigError(f"concept {concept!r}: unknown tool {tool!r}")
            if child is not None:
                raise ConfigError(f"concept {concept!r}: more than one child")
            child = LeafSpec(tool)
        elif sub.tag == "decision":
            if child is not None:
                raise ConfigError(f"concept {concept!r}: more than one child")
            child = _parse_decision(sub)
        else:
            raise ConfigError(f"concept {concept!r}: unexpected <{sub.tag}>")
    if child is None:
        raise ConfigError(f"concept {concept!r} has no <leaf> or <decision> child")
    return ConceptOption(concept, description, tuple(triggers), child)


def default_network() -> DecisionNode:
    """The shipped decision network."""
    text = (
        resources.files("codesign.data")
        .joinpath("decision_network.xml")
        .read_text(encoding="utf-8")
    )
    return load_network(text)
