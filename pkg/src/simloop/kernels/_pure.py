"""Pure-Python kernel backend; mirrors ``_native.pyx`` exactly.

Inputs are ``array('d')`` buffers. Accumulation is plain left-to-right
64-bit addition, matching the compiled loop bit-for-bit.
"""
from __future__ import annotations

from operator import mul


def dot(u, v) -> float:
    """Sequential dot product of two equal-length float64 buffers."""
    return sum(map(mul, u, v))


def scan(flat, dim: int, q, out) -> None:
    """Dot every contiguous ``dim``-sized row of ``flat`` with ``q``.

    Writes one score per row into ``out`` (length = len(flat) // dim).
    """
    for i in range(len(out)):
        base = i * dim
        out[i] = sum(map(mul, flat[base : base + dim], q))
