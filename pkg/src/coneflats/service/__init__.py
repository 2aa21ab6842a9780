"""HTTP service wrapping the pipeline: build, verify and export as endpoints."""

from .app import create_app

__all__ = ["create_app"]
