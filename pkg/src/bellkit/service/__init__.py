"""HTTP facade: request/response models, handlers, and the app factory."""

from .app import create_app

__all__ = ["create_app"]
