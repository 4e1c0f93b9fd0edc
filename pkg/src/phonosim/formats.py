"""Shared float formatting for exported artifacts.

Every CSV/JSON/SVG writer renders floats through fmt_float: 12 significant
digits, shortest form. Rounding to 12 digits absorbs last-bit differences
between BLAS/LAPACK builds, so identical inputs give byte-identical
artifacts across runs and platforms.
"""

FLOAT_FMT = ".12g"


def fmt_float(x):
    s = format(float(x), FLOAT_FMT)
    return "0" if s == "-0" else s


def round_float(x):
    """The float as exported, for embedding in JSON payloads."""
    return float(fmt_float(x))
