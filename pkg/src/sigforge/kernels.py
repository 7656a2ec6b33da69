"""Hot-loop kernels: the compiled core when importable, else pure Python.

Set ``SIGFORGE_PURE=1`` to force the Python fallback.
"""
import os

from sigforge import _pykernels

BIRTHDAY, RHO, FLOYD = _pykernels.BIRTHDAY, _pykernels.RHO, _pykernels.FLOYD

if os.environ.get("SIGFORGE_PURE", "").strip() not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from sigforge import _core as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

COMPILED = _impl.COMPILED
BACKEND = "compiled" if COMPILED else "python"

# Largest modulus the compiled group walks accept.
COMPILED_MODULUS_LIMIT = 1 << 31

birthday_walk = _impl.birthday_walk
rho_walk = _impl.rho_walk
uniform_gamma_walk = _impl.uniform_gamma_walk
gamma_n_walk = _impl.gamma_n_walk
dlog_walk_zp = _impl.dlog_walk_zp
dlog_walk_ec = _impl.dlog_walk_ec
count_points = _impl.count_points


def load_compiled():
    """The compiled module, or None when it was not built."""
    try:
        from sigforge import _core
    except ImportError:
        return None
    return _core
