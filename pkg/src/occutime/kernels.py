"""Backend selection for the path-simulation kernel.

The compiled extension is preferred when importable; otherwise the numpy
lockstep fallback is used. Set ``OCCUTIME_BACKEND=python`` (or ``compiled``)
before import to force a choice; forcing ``compiled`` on an install without
the extension raises immediately rather than silently degrading.
"""

from __future__ import annotations

import importlib
import os

_FORCED = os.environ.get("OCCUTIME_BACKEND", "").strip().lower()

if _FORCED in ("python", "py", "pure"):
    from . import _kernels_py as _impl
elif _FORCED in ("compiled", "c", "cython"):
    from . import _kernels as _impl  # noqa: F401  (ImportError is the contract)
elif _FORCED == "":
    try:
        from . import _kernels as _impl
    except ImportError:
        from . import _kernels_py as _impl
else:
    raise ValueError(f"OCCUTIME_BACKEND={_FORCED!r}: expected 'compiled' or 'python'")

BACKEND = _impl.NAME
simulate_paths = _impl.simulate_paths


def available_backends() -> dict:
    """Map of importable kernel implementations (for benchmarks/tests)."""
    found = {"python": importlib.import_module("occutime._kernels_py")}
    try:
        found["compiled"] = importlib.import_module("occutime._kernels")
    except ImportError:
        pass
    return found
