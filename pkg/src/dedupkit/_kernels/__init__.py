"""Hot-loop kernels: compiled extension when available, numpy fallback otherwise.

The two implementations are behaviorally identical (tested against each
other); the compiled core only changes speed. Selection happens once at
import time. Set DEDUPKIT_PURE_PYTHON=1 to force the fallback.
"""

import os

from . import fallback

if os.environ.get("DEDUPKIT_PURE_PYTHON") == "1":
    _impl = fallback
    HAVE_COMPILED = False
else:
    try:
        from . import _core as _impl

        HAVE_COMPILED = True
    except ImportError:
        _impl = fallback
        HAVE_COMPILED = False

box_resize = _impl.box_resize
neighbor_counts = _impl.neighbor_counts
distance_histograms = _impl.distance_histograms
dedup_scan = _impl.dedup_scan


def backend_name() -> str:
    return "compiled" if HAVE_COMPILED else "fallback"
