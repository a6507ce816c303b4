"""Hot loops of the Monte-Carlo sweeps.

Two interchangeable backends exist: a Cython extension (``_fast``) and a
numpy implementation (``_reference``). The compiled one is used when it has
been built, unless ``LINKSTAB_PURE_PYTHON`` is set to a non-empty value.

Kernels
-------
ncfsk_prr(gamma_db, frame_bits)
    Frame reception probability ``(1 - 0.5 exp(-gamma/2)) ** f`` for an
    array of SNR values in dB.
count_attempts(prr, uniforms, fail_value)
    Number of transmissions until the first success, one row of uniforms
    per trial; ``fail_value`` when every attempt fails.
"""
import os

import numpy as np

from . import _reference

try:
    from . import _fast
except ImportError:
    _fast = None

if _fast is not None and not os.environ.get("LINKSTAB_PURE_PYTHON"):
    _impl = _fast
    BACKEND = "cython"
else:
    _impl = _reference
    BACKEND = "numpy"


def available_backends():
    names = {"numpy": _reference}
    if _fast is not None:
        names["cython"] = _fast
    return names


def ncfsk_prr(gamma_db, frame_bits):
    gamma_db = np.asarray(gamma_db, dtype=np.float64)
    flat = np.ascontiguousarray(gamma_db.ravel())
    return _impl.ncfsk_prr(flat, int(frame_bits)).reshape(gamma_db.shape)


def count_attempts(prr, uniforms, fail_value):
    prr = np.ascontiguousarray(prr, dtype=np.float64)
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    return _impl.count_attempts(prr, uniforms, int(fail_value))
