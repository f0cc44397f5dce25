"""Programmable N-input voter instance."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from nmrvoter.core import (DEFAULT_WIDTH, InputStateDescriptor, VoterInputSet, build_matrix,
                           row_scan_isd)
from nmrvoter.selfcheck import transitivity_scan

OUTPUT_FIELDS = ("y", "index", "d", "eq", "e", "a", "err")


@dataclass(frozen=True)
class Voter:
    """Exact 1-out-of-N plurality voter with self-report and transitivity self-check.

    The instance holds only its shape; :meth:`vote` is a pure function of
    its arguments, so one voter may be shared freely.
    """

    n: int
    width: int = DEFAULT_WIDTH

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a voter needs at least one input")
        if self.width < 1:
            raise ValueError("word width must be positive")

    def inputs(self, values: Iterable[int], active: Optional[Iterable[bool]] = None) -> VoterInputSet:
        inputs = VoterInputSet(values, active, width=self.width)
        if inputs.n != self.n:
            raise ValueError(f"voter has {self.n} inputs, got {inputs.n}")
        return inputs

    def vote(self, values: Iterable[int], active: Optional[Iterable[bool]] = None) -> InputStateDescriptor:
        """Build the matrix, scan it for the ISD, and self-check it."""
        inputs = values if isinstance(values, VoterInputSet) else self.inputs(values, active)
        matrix = build_matrix(inputs)
        isd = row_scan_isd(matrix, inputs.active, inputs.values)
        if self.n >= 3 and transitivity_scan(matrix).transitivity_err:
            return InputStateDescriptor(isd.y, isd.index, isd.d, isd.eq, isd.e, isd.a, err=True)
        return isd

    def descriptor(self) -> dict:
        n = self.n
        return {
            "n": n,
            "word_width": self.width,
            "outputs": list(OUTPUT_FIELDS),
            "e_width": n,
            "reduced_matrix": None if n < 2 else {"rows": n - 1, "cols": n - 1},
            "data_entries": n * (n - 1) // 2,
            "fill_count": (n - 1) * (n - 2) // 2,
            "transitivity_triples": n * (n - 1) * (n - 2) // 6,
        }
