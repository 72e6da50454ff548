"""HTTP service exposing the range-hashing library."""

from .app import app, create_app

__all__ = ["app", "create_app"]
