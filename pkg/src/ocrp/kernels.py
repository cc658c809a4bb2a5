"""Backend selection for the simulation kernels.

The compiled extension is used when it imports; setting ``OCRP_PURE_PYTHON=1``
forces the pure-Python fallback.
"""

import os

from . import _pykernels

python_backend = _pykernels

if os.environ.get("OCRP_PURE_PYTHON", "") not in ("", "0"):
    compiled_backend = None
else:
    try:
        from . import _kernels as compiled_backend
    except ImportError:
        compiled_backend = None

backend = compiled_backend or python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

grow = backend.grow
updown_path = backend.updown_path
q_path = backend.q_path
