"""Kernel backend selection.

The hot numeric kernels exist twice: a Cython extension (``_fastcore``) and
a pure-numpy reference (``_ref``).  The compiled module is preferred when it
imported successfully; set ``FISHERFLOW_BACKEND=python`` or
``FISHERFLOW_BACKEND=c`` to force a choice (forcing ``c`` raises if the
extension is not built).  Both expose the same functions and agree to
floating-point roundoff; ``benchmarks/bench_backends.py`` compares them.
"""

import os

from . import _ref

_requested = os.environ.get("FISHERFLOW_BACKEND", "").strip().lower()
if _requested not in ("", "c", "python"):
    raise ImportError(
        f"FISHERFLOW_BACKEND must be 'c' or 'python', got {_requested!r}"
    )

if _requested == "python":
    _impl = _ref
    BACKEND = "python"
else:
    try:
        from . import _fastcore as _impl  # type: ignore[attr-defined]

        BACKEND = "c"
    except ImportError:
        if _requested == "c":
            raise
        _impl = _ref
        BACKEND = "python"

fisher_inner = _impl.fisher_inner
kl_div = _impl.kl_div
xlogx_sum = _impl.xlogx_sum
row_sums = _impl.row_sums
conditional_rows = _impl.conditional_rows
horizontal_lift = _impl.horizontal_lift
elbo_sum = _impl.elbo_sum
ambient_descent = _impl.ambient_descent


def backend_name():
    """Name of the active kernel implementation: 'c' or 'python'."""
    return BACKEND
