"""Equality matrix construction and Input State Descriptor (ISD) voting.

Two independent routes to the ISD live here:

* :func:`compute_isd` works from the frequency profile of the active values.
* :func:`row_scan_isd` reads the ISD off the reduced matrix by scanning its
  rows for the smallest zero count, the way a hardware voter would.

They must agree on every input set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from nmrvoter.errors import NotReducibleError, ZeroActiveError

DEFAULT_WIDTH = 64


@dataclass(frozen=True)
class VoterInputSet:
    """N module output words plus the per-input programming flags."""

    values: tuple[int, ...]
    active: tuple[bool, ...]
    width: int = DEFAULT_WIDTH

    def __init__(self, values: Iterable[int], active: Optional[Iterable[bool]] = None,
                 width: int = DEFAULT_WIDTH):
        values = tuple(int(v) for v in values)
        active = tuple(True for _ in values) if active is None else tuple(bool(p) for p in active)
        if not values:
            raise ValueError("a voter needs at least one input")
        if len(active) != len(values):
            raise ValueError(f"{len(values)} values but {len(active)} active flags")
        if width < 1:
            raise ValueError("word width must be positive")
        limit = 1 << width
        for v in values:
            if not 0 <= v < limit:
                raise ValueError(f"value {v} does not fit in {width} bits")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "active", active)
        object.__setattr__(self, "width", width)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def n_active(self) -> int:
        return sum(self.active)

    @classmethod
    def from_dict(cls, record: dict, width: int = DEFAULT_WIDTH) -> "VoterInputSet":
        if not isinstance(record, dict) or "values" not in record:
            raise ValueError("input record must be an object with a 'values' list")
        values = record["values"]
        active = record.get("active")
        if not isinstance(values, list) or any(
                isinstance(v, bool) or not isinstance(v, int) for v in values):
            raise ValueError("'values' must be a list of integers")
        if active is not None and (not isinstance(active, list)
                                   or any(not isinstance(p, bool) for p in active)):
            raise ValueError("'active' must be a list of booleans")
        return cls(values, active, width=width)

    def to_dict(self) -> dict:
        return {"values": list(self.values), "active": list(self.active)}


class EqualityMatrix:
    """Symmetric 0/1 matrix with unit diagonal; ``A[i][j] = 1`` iff inputs i and j agree.

    The bits are stored as a read-only ``int64`` array. Transitivity is *not*
    enforced, so erroneously built matrices can be represented and checked.
    """

    __slots__ = ("_bits",)

    def __init__(self, rows):
        bits = np.array(rows, dtype=np.int64)
        if bits.ndim != 2 or bits.shape[0] != bits.shape[1] or bits.shape[0] < 1:
            raise ValueError("equality matrix must be a non-empty square array")
        if not np.isin(bits, (0, 1)).all():
            raise ValueError("equality matrix entries must be 0 or 1")
        if not (bits == bits.T).all():
            raise ValueError("equality matrix must be symmetric")
        if not (np.diag(bits) == 1).all():
            raise ValueError("equality matrix must have a unit diagonal")
        bits.setflags(write=False)
        self._bits = bits

    @property
    def order(self) -> int:
        return self._bits.shape[0]

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    def __getitem__(self, idx):
        return self._bits[idx]

    def __eq__(self, other):
        if not isinstance(other, EqualityMatrix):
            return NotImplemented
        return np.array_equal(self._bits, other._bits)

    def __hash__(self):
        return hash(self._bits.tobytes())

    def __repr__(self):
        return f"EqualityMatrix({self.tolist()})"

    def __str__(self):
        return format_rows(self._bits)

    def tolist(self) -> list[list[int]]:
        return self._bits.tolist()

    def with_pair(self, j: int, k: int, bit: int) -> "EqualityMatrix":
        """Copy with the symmetric pair (j, k) set to ``bit``."""
        if j == k:
            raise ValueError("diagonal entries are fixed at 1")
        bits = self._bits.copy()
        bits[j, k] = bits[k, j] = bit
        return EqualityMatrix(bits)


def format_rows(bits) -> str:
    """One line of 0/1 characters per row."""
    return "\n".join("".join(str(int(b)) for b in row) for row in bits)


@dataclass(frozen=True)
class ReducedMatrix:
    """Strict upper triangle of an equality matrix packed in (N-1)x(N-1).

    Row ``i`` covers matrix row ``i``; column ``c`` holds ``A[i][c + 1]``.
    Positions with ``c + 1 <= i`` are zero-filled.
    """

    bits: tuple[tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.bits)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.bits]

    def __str__(self):
        return format_rows(self.bits)


@dataclass(frozen=True)
class ValueClass:
    value: int
    frequency: int
    members: tuple[int, ...]


@dataclass(frozen=True)
class FrequencyProfile:
    """Active value classes, ordered by frequency (desc) then first member."""

    classes: tuple[ValueClass, ...]

    @property
    def m(self) -> int:
        return len(self.classes)

    @property
    def frequencies(self) -> tuple[int, ...]:
        return tuple(c.frequency for c in self.classes)

    @property
    def f1(self) -> int:
        return self.classes[0].frequency

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "frequencies": list(self.frequencies),
            "classes": [{"value": c.value, "frequency": c.frequency, "members": list(c.members)}
                        for c in self.classes],
        }


@dataclass(frozen=True)
class InputStateDescriptor:
    y: Optional[int]
    index: Optional[int]
    d: int
    eq: int
    e: tuple[bool, ...]
    a: bool
    err: bool = False

    def to_dict(self) -> dict:
        return {
            "y": self.y,
            "index": self.index,
            "d": self.d,
            "eq": self.eq,
            "e": [int(b) for b in self.e],
            "a": int(self.a),
            "err": int(self.err),
        }

    def counts(self) -> tuple:
        """Everything except the voted value; comparable across routes."""
        return (self.index, self.d, self.eq, self.e, self.a)


def build_matrix(inputs: VoterInputSet) -> EqualityMatrix:
    n = inputs.n
    vals = np.array(inputs.values, dtype=object)
    act = np.array(inputs.active, dtype=bool)
    bits = (vals[:, None] == vals[None, :]) & act[:, None] & act[None, :]
    bits = bits.astype(np.int64)
    np.fill_diagonal(bits, 1)
    return EqualityMatrix(bits.reshape(n, n))


def reduce_matrix(matrix: EqualityMatrix) -> ReducedMatrix:
    n = matrix.order
    if n < 2:
        raise NotReducibleError("a single-input voter has no reduced matrix")
    rows = []
    for i in range(n - 1):
        rows.append(tuple(int(matrix[i, c + 1]) if c + 1 > i else 0 for c in range(n - 1)))
    return ReducedMatrix(tuple(rows))


def frequency_profile(inputs: VoterInputSet) -> FrequencyProfile:
    groups: dict[int, list[int]] = {}
    for pos, (v, p) in enumerate(zip(inputs.values, inputs.active)):
        if p:
            groups.setdefault(v, []).append(pos)
    if not groups:
        raise ZeroActiveError("no active inputs")
    classes = [ValueClass(v, len(members), tuple(members)) for v, members in groups.items()]
    classes.sort(key=lambda c: (-c.frequency, c.members[0]))
    return FrequencyProfile(tuple(classes))


def compute_isd(inputs: VoterInputSet) -> InputStateDescriptor:
    """ISD straight from the frequency profile.

    Ties between classes of maximal frequency are broken toward the class
    whose first member has the lowest index, and ``a`` is raised.
    """
    profile = frequency_profile(inputs)
    top = profile.classes[0]
    tied = sum(1 for c in profile.classes if c.frequency == top.frequency)
    members = set(top.members)
    e = tuple(pos in members for pos in range(inputs.n))
    return InputStateDescriptor(
        y=top.value,
        index=top.members[0],
        d=inputs.n_active - top.frequency,
        eq=top.frequency,
        e=e,
        a=tied > 1,
    )


def row_scan_isd(matrix: EqualityMatrix, active: Sequence[bool],
                 values: Optional[Sequence[int]] = None) -> InputStateDescriptor:
    """ISD from a row scan of the reduced matrix.

    Zeros are counted across the full N-1 columns of each reduced row,
    zero-filled places included, and a virtual all-zero row stands in for
    index N-1. Inactive rows are skipped; their identity-like rows add a
    constant N - N_active to every zero count, which is subtracted out.
    The first occurrence of a value with frequency f has N - f zeros and
    every later occurrence has strictly more, so only first occurrences
    can reach the minimum.
    """
    n = matrix.order
    active = tuple(bool(p) for p in active)
    if len(active) != n:
        raise ValueError("active mask length does not match matrix order")
    n_active = sum(active)
    if n_active == 0:
        raise ZeroActiveError("no active inputs")

    if n == 1:
        zeros = [0]
        reduced_rows: list[tuple[int, ...]] = []
    else:
        reduced_rows = list(reduce_matrix(matrix).bits)
        zeros = [row.count(0) for row in reduced_rows]
        zeros.append(n - 1)  # virtual last row

    best = None
    ties = 0
    for i in range(n):
        if not active[i]:
            continue
        if best is None or zeros[i] < zeros[best]:
            best, ties = i, 1
        elif zeros[i] == zeros[best]:
            ties += 1

    d = zeros[best] - (n - n_active)
    e = [False] * n
    e[best] = True
    if best < n - 1:
        for c in range(best, n - 1):
            e[c + 1] = bool(reduced_rows[best][c])
    return InputStateDescriptor(
        y=None if values is None else int(values[best]),
        index=best,
        d=d,
        eq=n_active - d,
        e=tuple(e),
        a=ties > 1,
    )
