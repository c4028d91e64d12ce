"""Shared test helpers."""
from __future__ import annotations


class ForcedRng:
    """Stand-in random stream yielding a preset sequence of uniforms.

    `measure` consumes one uniform per call and compares it against P(1),
    so 0.25 forces outcome 1 and 0.75 forces outcome 0 whenever P(1) = 0.5.
    """

    def __init__(self, values):
        self._values = list(values)

    def random(self, size=None):
        if size is not None:
            raise NotImplementedError("ForcedRng only supports scalar draws")
        return self._values.pop(0)


def force_bits(bits):
    """Uniform sequence that drives fair-coin measurements to `bits`."""
    return ForcedRng([0.25 if b else 0.75 for b in bits])
