"""Consistent range hashing: FlipHash with a JumpHash baseline.

Both hashers map 64-bit keys to integer ranges [0, n) evenly and
monotonically; FlipHash does it in constant time regardless of n.  The
package also ships a statistical verification lab (`fliphash.statlab`), a
wall-time benchmark harness (`fliphash.bench`), an HTTP service
(`fliphash.service`), and a CLI (`fliphash.cli`).
"""

from .algorithms import ALGORITHMS, make_hasher
from .core import EvalTrace, FlipHash, Pow2Trace, ceil_log2
from .jumphash import JumpHash, jump_hash
from .keystream import key_at, key_stream
from .mixing import TableFamily, family_seed, mix64

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "EvalTrace",
    "FlipHash",
    "JumpHash",
    "Pow2Trace",
    "TableFamily",
    "ceil_log2",
    "family_seed",
    "jump_hash",
    "key_at",
    "key_stream",
    "make_hasher",
    "mix64",
    "__version__",
]
