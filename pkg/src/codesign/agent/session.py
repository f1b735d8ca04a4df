"""Chat session state: history plus structured memory."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..analysis import FaultState


@dataclass
class SessionMemory:
    last_fault: FaultState | None = None
    last_result: dict | None = None
    model_revision: int = 0

    def forget_removed_nodes(self, removed: set[str]) -> None:
        """Drop the remembered fault set if a mutation removed any of its nodes."""
        if self.last_fault is not None and self.last_fault.faulty & removed:
            self.last_fault = None


@dataclass
class ChatTurn:
    role: str
    text: str
    result: dict | None = None
    trace: list[dict] | None = None

    def to_json_dict(self) -> dict:
        out: dict = {"role": self.role, "text": self.text}
        if self.result is not None:
            out["result"] = self.result
        if self.trace is not None:
            out["trace"] = self.trace
        return out


@dataclass
class Session:
    session_id: str = "default"
    history: list[ChatTurn] = field(default_factory=list)
    memory: SessionMemory = field(default_factory=SessionMemory)
