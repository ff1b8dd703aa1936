"""Kernel dispatch: compiled backend when available, pure Python otherwise.

Set VALIM_PURE=1 to force the pure backend.  The compiled backend is only
used when masks fit in 64 bits and scaled values fit in an int64 with room
to add; anything bigger silently takes the pure path, which handles
arbitrary-precision ints.
"""

import os

from . import pure

try:
    from . import _fastcore
except ImportError:
    _fastcore = None

_FORCE_PURE = os.environ.get("VALIM_PURE", "") not in ("", "0")

BACKEND = "pure" if (_fastcore is None or _FORCE_PURE) else "compiled"

# headroom: int64 sums of two values must not overflow
_MAX_FAST_VALUE = 1 << 61
# sums over at most 64 weights must not overflow
_MAX_FAST_WEIGHT = 1 << 55
# keep compiled enumeration buffers modest (8 bytes per up-set)
_MAX_FAST_LIMIT = 1 << 24


def enumerate_upsets(up, n, limit):
    if BACKEND == "compiled" and n <= 64 and limit <= _MAX_FAST_LIMIT:
        return _fastcore.enumerate_upsets(list(up), n, limit)
    return pure.enumerate_upsets(up, n, limit)


def scan_axioms(opens, values, n):
    if (
        BACKEND == "compiled"
        and n <= 64
        and all(v < _MAX_FAST_VALUE for v in values)
    ):
        return _fastcore.scan_axioms(opens, values, n)
    return pure.scan_axioms(opens, values)


def eval_weights(weights, opens, n):
    if (
        BACKEND == "compiled"
        and n <= 64
        and all(w < _MAX_FAST_WEIGHT for w in weights)
    ):
        return _fastcore.eval_weights(weights, opens)
    return pure.eval_weights(weights, opens)
