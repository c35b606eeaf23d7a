# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend; mirrors ``_pure.py`` exactly.

Plain sequential accumulation (no FMA, no reassociation) so results are
bit-identical to the pure-Python twin.
"""


def dot(double[::1] u, double[::1] v):
    """Sequential dot product of two equal-length float64 buffers."""
    cdef Py_ssize_t i, n = u.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += u[i] * v[i]
    return acc


def scan(double[::1] flat, Py_ssize_t dim, double[::1] q, double[::1] out):
    """Dot every contiguous ``dim``-sized row of ``flat`` with ``q``."""
    cdef Py_ssize_t n = out.shape[0]
    cdef Py_ssize_t i, j, base
    cdef double acc
    with nogil:
        for i in range(n):
            base = i * dim
            acc = 0.0
            for j in range(dim):
                acc += flat[base + j] * q[j]
            out[i] = acc
