"""Request/response models, computation handlers, and the FastAPI app."""

from .app import create_app

__all__ = ["create_app"]
