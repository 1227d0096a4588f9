"""Backend selection for the hot scan kernels.

The compiled extension is preferred; the pure-Python fallback gives
bit-identical results and is chosen when the extension is missing or when
CONSLAW_FORCE_FALLBACK is set to a non-empty value.
"""

import os

from . import _fallback

if os.environ.get("CONSLAW_FORCE_FALLBACK"):
    _backend = _fallback
else:
    try:
        from . import _core as _backend
    except ImportError:
        _backend = _fallback

BACKEND = _backend.NAME
hopf_lax_scan = _backend.hopf_lax_scan
rightmost_argmax = _backend.rightmost_argmax

__all__ = ["BACKEND", "hopf_lax_scan", "rightmost_argmax"]
