"""Backend selection: compiled extension when available, NumPy otherwise.

Set ``KPSCA_BACKEND=python`` or ``KPSCA_BACKEND=compiled`` to force a choice
(the latter raises if the extension was not built). Results are deterministic
within a backend; across backends they agree up to floating-point roundoff.
"""

import os

_forced = os.environ.get("KPSCA_BACKEND", "").strip().lower()
if _forced not in ("", "python", "compiled"):
    raise ImportError(f"KPSCA_BACKEND must be 'python' or 'compiled', got {_forced!r}")

if _forced == "python":
    from . import _pykernels as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _forced == "compiled":
            raise
        from . import _pykernels as _impl

sum_squares_rows = _impl.sum_squares_rows
lloyd = _impl.lloyd
jacobi_eigh = _impl.jacobi_eigh


def backend_name() -> str:
    return _impl.BACKEND_NAME
