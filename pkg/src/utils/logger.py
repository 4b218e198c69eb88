"""Logging setup for the CLI and scripts.

Library modules only do ``logger = logging.getLogger(__name__)``; the entry
point calls :func:`configure_logging` once. Logs go to stderr so CSV written
to stdout stays clean.
"""
from __future__ import annotations

import logging
import os
import sys
from typing import Optional

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _debug_enabled() -> bool:
    val = os.getenv("APP_DEBUG", "").lower().strip()
    return val in {"1", "true", "yes", "on"}


def configure_logging(debug: Optional[bool] = None) -> logging.Logger:
    """Install a single stderr handler on the ``src`` logger tree.

    ``debug=None`` defers to the ``APP_DEBUG`` environment variable.
    Calling it twice does not stack handlers.
    """
    if debug is None:
        debug = _debug_enabled()
    root = logging.getLogger("src")
    root.setLevel(logging.DEBUG if debug else logging.INFO)
    if not any(getattr(h, "_axikernel", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._axikernel = True  # type: ignore[attr-defined]
        root.addHandler(handler)
    root.propagate = False
    return root
