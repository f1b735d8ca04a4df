"""HTTP service exposing the engine, sessions and the web UI."""

from .app import create_app
from .state import ServiceConfig, ServiceState

__all__ = ["ServiceConfig", "ServiceState", "create_app"]
