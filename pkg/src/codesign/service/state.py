"""Service configuration and shared state."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from ..agent import Agent, HttpBackend, MockBackend, Session, default_network, load_network
from ..errors import ConfigError
from ..knowledge import KnowledgeIndex, build_index
from ..model import ModelDocument


@dataclass
class ServiceConfig:
    model_path: Path
    corpus_dir: Path | None = None
    network_path: Path | None = None
    backend: str = "mock"
    llm_model: str = "gpt-3.5-turbo"
    static_dir: Path | None = None

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "ServiceConfig":
        """Load a JSON config file; keyword overrides win over file values."""
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {
            "model_path",
            "corpus_dir",
            "network_path",
            "backend",
            "llm_model",
            "static_dir",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        merged = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
        if "model_path" not in merged:
            raise ConfigError("config needs a model_path")
        return cls(
            model_path=Path(merged["model_path"]),
            corpus_dir=Path(merged["corpus_dir"]) if merged.get("corpus_dir") else None,
            network_path=Path(merged["network_path"]) if merged.get("network_path") else None,
            backend=merged.get("backend", "mock"),
            llm_model=merged.get("llm_model", "gpt-3.5-turbo"),
            static_dir=Path(merged["static_dir"]) if merged.get("static_dir") else None,
        )


def make_backend(config: ServiceConfig):
    if config.backend == "mock":
        return MockBackend()
    if config.backend == "http":
        return HttpBackend(model=config.llm_model)
    raise ConfigError(f"unknown backend {config.backend!r} (expected mock or http)")


class ServiceState:
    """One model document, one agent, many independent sessions."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.document = ModelDocument.load(config.model_path)
        self.index: KnowledgeIndex | None = (
            build_index(config.corpus_dir) if config.corpus_dir else None
        )
        network = (
            load_network(config.network_path) if config.network_path else default_network()
        )
        self.agent = Agent(
            self.document, make_backend(config), network=network, index=self.index
        )
        self._sessions: dict[str, Session] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def session(self, session_id: str) -> tuple[Session, threading.Lock]:
        with self._registry_lock:
            if session_id not in self._sessions:
                self._sessions[session_id] = Session(session_id)
                self._session_locks[session_id] = threading.Lock()
            return self._sessions[session_id], self._session_locks[session_id]

    def existing_session(self, session_id: str) -> Session | None:
        with self._registry_lock:
            return self._sessions.get(session_id)
