"""Backend selection for the per-edge recursion kernel.

The compiled Cython extension is used when importable; the pure-numpy
implementation is the fallback.  Set ESHELBY_BACKEND=python or
ESHELBY_BACKEND=cython to force a choice (forcing cython raises if the
extension is missing).
"""

from __future__ import annotations

import os

from . import _moments_py

_FORCED = os.environ.get("ESHELBY_BACKEND", "").strip().lower()

if _FORCED == "python":
    BACKEND_NAME = "python"
    edge_term_table = _moments_py.edge_term_table
else:
    try:
        from . import _moments_cy  # type: ignore[attr-defined]

        BACKEND_NAME = "cython"
        edge_term_table = _moments_cy.edge_term_table
    except ImportError:
        if _FORCED == "cython":
            raise
        BACKEND_NAME = "python"
        edge_term_table = _moments_py.edge_term_table
