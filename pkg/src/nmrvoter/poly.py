"""Exact integer polynomials and exact determinants / characteristic polynomials."""

from __future__ import annotations

from itertools import permutations
from typing import Iterable, Sequence

import numpy as np


class IntPolynomial:
    """Polynomial with exact integer coefficients, ascending degree order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int]):
        coeffs = [int(c) for c in coeffs]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs: tuple[int, ...] = tuple(coeffs) if coeffs else (0,)

    @classmethod
    def from_roots(cls, roots: Iterable[int]) -> "IntPolynomial":
        p = cls([1])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return self.leading == 1

    def __eq__(self, other):
        if isinstance(other, IntPolynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(x + y for x, y in zip(a, b))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(-c for c in self.coeffs)

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    def __pow__(self, k: int) -> "IntPolynomial":
        p = IntPolynomial([1])
        for _ in range(k):
            p = p * self
        return p

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod_linear(self, r: int) -> tuple["IntPolynomial", int]:
        """Synthetic division by (x - r): returns quotient and remainder."""
        out = []
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * r + c
            out.append(acc)
        rem = out.pop()
        return IntPolynomial(reversed(out)), rem

    def tolist(self) -> list[int]:
        return list(self.coeffs)

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)})"

    def __str__(self):
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                x = "λ" if k == 1 else f"λ^{k}"
                body = x if mag == 1 else f"{mag}{x}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return " ".join([head] + [f"{s} {b}" for s, b in terms[1:]])


def det_cofactor(rows: Sequence[Sequence]) -> object:
    """Determinant by recursive first-row Laplace expansion.

    Exact for int/Fraction entries. Exponential cost; meant as an oracle for
    small matrices.
    """
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = 0
    for col in range(n):
        a = rows[0][col]
        if a == 0:
            continue
        minor = [row[:col] + row[col + 1:] for row in (list(r) for r in rows[1:])]
        term = a * det_cofactor(minor)
        total = total - term if col % 2 else total + term
    return total


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def charpoly_leibniz(matrix) -> IntPolynomial:
    """det(λI - A) by the Leibniz permutation sum, exact. Practical for N <= 7."""
    a = [[int(x) for x in row] for row in np.asarray(matrix).tolist()]
    n = len(a)
    total = IntPolynomial([0])
    for perm in permutations(range(n)):
        term = IntPolynomial([_perm_sign(perm)])
        for i, j in enumerate(perm):
            entry = IntPolynomial([-a[i][j], 1]) if i == j else IntPolynomial([-a[i][j]])
            term = term * entry
            if term.coeffs == (0,):
                break
        total = total + term
    return total


def charpoly_exact(matrix) -> IntPolynomial:
    """det(λI - A) for an integer matrix via Faddeev-LeVerrier in exact integers.

    Each division by k is exact because every coefficient of an integer
    matrix's characteristic polynomial is an integer.
    """
    a = np.array(np.asarray(matrix).tolist(), dtype=object)
    n = a.shape[0]
    ident = np.zeros((n, n), dtype=object)
    for i in range(n):
        ident[i, i] = 1
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    m = np.zeros((n, n), dtype=object)
    c = 1
    for k in range(1, n + 1):
        m = m + c * ident
        am = a.dot(m)
        tr = sum(am[i, i] for i in range(n))
        c, rem = divmod(-tr, k)
        if rem:
            raise ArithmeticError("non-integral Faddeev-LeVerrier step")
        coeffs[n - k] = c
        m = am
    return IntPolynomial(coeffs)
