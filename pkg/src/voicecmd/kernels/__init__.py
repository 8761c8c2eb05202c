"""Hot dynamic-programming loops with two interchangeable lanes.

`_hot` is a compiled extension built at install time; `_ref` is the
pure-Python/NumPy reference. The compiled lane is selected when available
unless VOICECMD_PURE=1 forces the reference lane. Both lanes implement
identical semantics (same merge order, same tie rules) and must produce
identical outputs.
"""

import os

from . import _ref

if os.environ.get("VOICECMD_PURE") == "1":
    _impl = _ref
    COMPILED = False
else:
    try:
        from . import _hot as _impl  # type: ignore[attr-defined]
        COMPILED = True
    except ImportError:
        _impl = _ref
        COMPILED = False

BACKEND = "compiled" if COMPILED else "pure"

chain_viterbi = _impl.chain_viterbi
decode_frames = _impl.decode_frames
