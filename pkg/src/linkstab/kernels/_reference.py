"""Pure numpy versions of the compiled kernels."""
import numpy as np


def ncfsk_prr(gamma_db, frame_bits):
    gamma_db = np.asarray(gamma_db, dtype=np.float64)
    beta = 0.5 * np.exp(-0.5 * np.power(10.0, gamma_db / 10.0))
    return np.exp(frame_bits * np.log1p(-beta))


def count_attempts(prr, uniforms, fail_value):
    prr = np.asarray(prr, dtype=np.float64)
    uniforms = np.asarray(uniforms, dtype=np.float64)
    if prr.shape[0] != uniforms.shape[0]:
        raise ValueError("prr and uniforms disagree on the number of trials")
    hits = uniforms < prr[:, None]
    first = hits.argmax(axis=1).astype(np.int64) + 1
    return np.where(hits.any(axis=1), first, np.int64(fail_value))
