"""HTTP service wrapping the analysis pipeline.

``schemas`` defines the request/response models (the wire format shared
with the CLI thin client), ``pipeline`` runs the computations, and
``app`` exposes them as FastAPI endpoints.
"""

from .app import create_app

__all__ = ["create_app"]
