"""Decibel conversions. All dB/linear round trips in the package go through here."""
import numpy as np


def db_to_linear(value_db):
    return np.power(10.0, np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    value = np.asarray(value, dtype=float)
    if np.any(value < 0):
        raise ValueError("linear power ratio must be non-negative")
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(value)
