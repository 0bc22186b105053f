"""HTTP service exposing the mean-test pipeline."""

from .app import app

__all__ = ["app"]
