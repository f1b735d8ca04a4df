"""Interactive safety-codesign engine for system model graphs."""

from importlib import resources
from pathlib import Path

from .analysis import FaultState, PathResult, SpofReport, critical_path, eval_gate, find_spofs, propagate
from .errors import CodesignError
from .ir import IrDocument, parse_ir, verbalize
from .knowledge import DocChunk, KnowledgeIndex, build_index, retrieve
from .model import (
    ComponentNode,
    FaultGate,
    ModelDocument,
    SystemModel,
    load_model,
    model_to_xml,
    parse_gate,
    parse_model,
    to_dot,
    write_model,
)
from .mutation import MutationPlan, replicate_node, suggest_redundancy

__version__ = "0.1.0"


def data_path(name: str) -> Path:
    """Path of a bundled data file (fixture model, decision network, corpus)."""
    return Path(str(resources.files("codesign.data").joinpath(name)))


def fixture_model_path() -> Path:
    """The bundled automated-driving example model."""
    return data_path("automated_driving.xml")


def corpus_path() -> Path:
    """The bundled safety-practice documentation corpus."""
    return data_path("corpus")


__all__ = [
    "CodesignError",
    "ComponentNode",
    "DocChunk",
    "FaultGate",
    "FaultState",
    "IrDocument",
    "KnowledgeIndex",
    "ModelDocument",
    "MutationPlan",
    "PathResult",
    "SpofReport",
    "SystemModel",
    "build_index",
    "corpus_path",
    "critical_path",
    "data_path",
    "eval_gate",
    "find_spofs",
    "fixture_model_path",
    "load_model",
    "model_to_xml",
    "parse_gate",
    "parse_ir",
    "parse_model",
    "propagate",
    "retrieve",
    "suggest_redundancy",
    "replicate_node",
    "to_dot",
    "verbalize",
    "write_model",
]
