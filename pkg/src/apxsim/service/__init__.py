"""Local HTTP + WebSocket server exposing the authoring workflow."""

from .app import DEFAULT_PORT, create_app
from .sessions import Session, SessionManager
from .storage import ProjectStore

__all__ = ["DEFAULT_PORT", "ProjectStore", "Session", "SessionManager", "create_app"]
