"""Concept-guided chat agent: decision cascade, task formulation, dispatch."""

from .backends import HttpBackend, LabeledOption, LmBackend, MockBackend
from .engine import Agent, AgentReply, TaskSpec
from .network import DecisionNode, LeafSpec, default_network, load_network
from .session import ChatTurn, Session, SessionMemory

__all__ = [
    "Agent",
    "AgentReply",
    "ChatTurn",
    "DecisionNode",
    "HttpBackend",
    "LabeledOption",
    "LeafSpec",
    "LmBackend",
    "MockBackend",
    "Session",
    "SessionMemory",
    "TaskSpec",
    "default_network",
    "load_network",
]
