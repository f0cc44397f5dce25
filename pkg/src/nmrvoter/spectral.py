"""Spectral analysis of equality matrices.

The exact side works in integers: closed-form pattern determinants,
characteristic polynomials built from a frequency profile, and an exact
spectrum obtained by factoring the matrix's own characteristic polynomial.
The numeric side is a cyclic Jacobi eigensolver used as an independent
cross-check and as the spectral self-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from nmrvoter.core import EqualityMatrix, FrequencyProfile, InputStateDescriptor
from nmrvoter.errors import NotTransitiveError, UndefinedError, ZeroActiveError
from nmrvoter.poly import IntPolynomial, charpoly_exact

DEFAULT_TOLERANCE = 1e-6

Number = Union[int, Fraction]


# -- closed-form pattern determinants ---------------------------------------

def det_D(n: int, s: Number) -> Number:
    """Determinant of the n x n matrix with ``s`` on the diagonal and -1 elsewhere."""
    if n < 1:
        raise UndefinedError("n must be >= 1")
    return (s + 1) ** (n - 1) * (s - n + 1)


def det_F(n: int, s: Number) -> Number:
    """Same as :func:`det_D` but with the (0, 0) entry replaced by -1."""
    if n < 1:
        raise UndefinedError("n must be >= 1")
    return -(s + 1) ** (n - 1)


def det_Q(n: int, s: Number) -> Number:
    """Determinant of the D pattern with the (0, 1)/(1, 0) pair set to 0.

    Equals ``s*D(n-1) + (n-2)*s*F(n-2)``, which simplifies to
    ``s (s+1)^(n-3) (s^2 + (3-n) s + 4 - 2n)``.
    """
    if n < 3:
        raise UndefinedError("a zeroed pair needs a class of at least 3 members")
    return s * (s + 1) ** (n - 3) * (s * s + (3 - n) * s + (4 - 2 * n))


def det_Q_recurrence(n: int, s: Number) -> Number:
    if n < 3:
        raise UndefinedError("a zeroed pair needs a class of at least 3 members")
    return s * det_D(n - 1, s) + (n - 2) * s * det_F(n - 2, s)


def pattern_D(n: int, s) -> list[list]:
    return [[s if i == j else -1 for j in range(n)] for i in range(n)]


def pattern_F(n: int, s) -> list[list]:
    rows = pattern_D(n, s)
    rows[0][0] = -1
    return rows


def pattern_Q(n: int, s) -> list[list]:
    rows = pattern_D(n, s)
    rows[0][1] = rows[1][0] = 0
    return rows


# -- characteristic polynomials from a profile --------------------------------

def _all_frequencies(profile: FrequencyProfile, n_total: int) -> list[int]:
    freqs = list(profile.frequencies)
    spare = n_total - sum(freqs)
    if spare < 0:
        raise ValueError(f"profile covers {sum(freqs)} inputs but n_total is {n_total}")
    # inactive inputs behave as singleton classes
    return freqs + [1] * spare


def char_poly_proper(profile: FrequencyProfile, n_total: int) -> IntPolynomial:
    """λ^(N-m) · Π (λ - f_i), with inactive inputs counted as singleton classes."""
    freqs = _all_frequencies(profile, n_total)
    return IntPolynomial.from_roots([0] * (n_total - len(freqs)) + freqs)


def char_poly_erroneous(profile: FrequencyProfile, violated_class_freq: int,
                        n_total: int) -> IntPolynomial:
    """Characteristic polynomial after one zeroed pair inside a class of size f_l."""
    f_l = violated_class_freq
    if f_l < 3:
        raise UndefinedError("the violated class must have frequency >= 3")
    freqs = _all_frequencies(profile, n_total)
    if f_l not in freqs:
        raise ValueError(f"no class with frequency {f_l} in the profile")
    freqs.remove(f_l)
    m = len(freqs) + 1
    quad = IntPolynomial([2 - f_l, 1 - f_l, 1])
    return IntPolynomial.from_roots([0] * (n_total - m - 2) + [1] + freqs) * quad


def quadratic_roots(f_l: int) -> tuple[float, float]:
    disc = math.sqrt(f_l * f_l + 2 * f_l - 7)
    return ((f_l - 1 - disc) / 2, (f_l - 1 + disc) / 2)


# -- block structure --------------------------------------------------------

def components(matrix: EqualityMatrix) -> list[list[int]]:
    """Connected components of the matrix's graph, each sorted, ordered by first member."""
    n = matrix.order
    bits = matrix.bits
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in np.flatnonzero(bits[u]):
                v = int(v)
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def block_permutation(matrix: EqualityMatrix) -> tuple[list[int], list[int]]:
    """Reordering that brings the matrix into block-diagonal form.

    Returns ``(perm, sizes)`` where ``perm[k]`` is the original index placed
    at position k, so ``A[perm][:, perm]`` is block diagonal. Blocks are
    ordered by size (largest first), ties by smallest member. Inside a block
    members are ordered by row sum then index, which puts the endpoints of
    a zeroed pair first and yields the Q pattern for a single violation.
    """
    rowsum = matrix.bits.sum(axis=1)
    comps = sorted(components(matrix), key=lambda c: (-len(c), c[0]))
    perm = []
    for comp in comps:
        perm.extend(sorted(comp, key=lambda i: (int(rowsum[i]), i)))
    return perm, [len(c) for c in comps]


def permute(matrix: EqualityMatrix, perm: Sequence[int]) -> EqualityMatrix:
    p = list(perm)
    return EqualityMatrix(matrix.bits[np.ix_(p, p)])


def is_transitive(matrix: EqualityMatrix) -> bool:
    """Every connected component is a clique."""
    bits = matrix.bits
    for comp in components(matrix):
        if not (bits[np.ix_(comp, comp)] == 1).all():
            return False
    return True


# -- eigenpairs -------------------------------------------------------------

@dataclass(frozen=True)
class Eigenpair:
    eigenvalue: int
    vector: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"eigenvalue": self.eigenvalue, "vector": list(self.vector)}


def eigenpairs_proper(matrix: EqualityMatrix,
                      profile: Optional[FrequencyProfile] = None) -> list[Eigenpair]:
    """A complete integer eigenbasis of a properly built matrix.

    One 0/1 indicator vector per class with its frequency as eigenvalue,
    then for every class of size f >= 2 the f - 1 difference vectors
    (+1 at the first member, -1 at each other member) spanning the null
    space. Classes come from ``profile`` where given; positions it does not
    cover (inactive inputs) become singleton classes.
    """
    if not is_transitive(matrix):
        raise NotTransitiveError("eigenpairs_proper needs a properly built matrix")
    n = matrix.order
    if profile is None:
        classes = [list(c) for c in components(matrix)]
    else:
        classes = [list(c.members) for c in profile.classes]
        covered = {i for c in classes for i in c}
        classes += [[i] for i in range(n) if i not in covered]
    classes.sort(key=lambda c: (-len(c), c[0]))

    pairs = []
    for members in classes:
        vec = [0] * n
        for i in members:
            vec[i] = 1
        pairs.append(Eigenpair(len(members), tuple(vec)))
    for members in classes:
        anchor = members[0]
        for other in members[1:]:
            vec = [0] * n
            vec[anchor] = 1
            vec[other] = -1
            pairs.append(Eigenpair(0, tuple(vec)))
    bits = matrix.bits
    for pair in pairs:
        v = np.array(pair.vector, dtype=np.int64)
        if not np.array_equal(bits @ v, pair.eigenvalue * v):
            raise NotTransitiveError("matrix rows disagree with its block structure")
    return pairs


# -- numeric eigenvalues ----------------------------------------------------

def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm drops below ``tol``
    or after ``max_sweeps``. Works on a private copy.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * float((np.triu(a, 1) ** 2).sum()))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, q] = a[q, p] = 0.0
    return np.sort(np.diag(a))


def numeric_eigenvalues(matrix: EqualityMatrix) -> np.ndarray:
    """All N eigenvalues, ascending. Components are solved independently."""
    bits = matrix.bits
    vals = []
    for comp in components(matrix):
        if len(comp) == 1:
            vals.append(1.0)
        else:
            vals.extend(jacobi_eigenvalues(bits[np.ix_(comp, comp)].astype(np.float64)))
    return np.sort(np.array(vals, dtype=np.float64))


def non_integer_eigenvalues(values: Sequence[float], tolerance: float = DEFAULT_TOLERANCE) -> list[float]:
    return [float(v) for v in values if abs(v - round(v)) > tolerance]


def spectral_selfcheck(matrix: EqualityMatrix, tolerance: float = DEFAULT_TOLERANCE) -> bool:
    """True (err) iff some eigenvalue lies farther than ``tolerance`` from every integer."""
    return bool(non_integer_eigenvalues(numeric_eigenvalues(matrix), tolerance))


# -- exact spectrum ---------------------------------------------------------

@dataclass(frozen=True, order=True)
class QuadraticSurd:
    """The number (p + sign*sqrt(q)) / 2 with q not a perfect square."""

    p: int
    q: int
    sign: int

    def __float__(self):
        return (self.p + self.sign * math.sqrt(self.q)) / 2

    def __str__(self):
        op = "+" if self.sign > 0 else "-"
        return f"({self.p}{op}sqrt({self.q}))/2"


ExactValue = Union[int, QuadraticSurd]


@dataclass(frozen=True)
class Spectrum:
    exact: tuple[tuple[ExactValue, int], ...]
    numeric: tuple[float, ...]
    residual: Optional[IntPolynomial] = None

    @property
    def integrality(self) -> tuple[bool, ...]:
        return tuple(isinstance(v, int) for v, _ in self.exact)

    def multiplicity(self, value: ExactValue) -> int:
        for v, k in self.exact:
            if v == value:
                return k
        return 0

    def exact_multiset(self) -> list[ExactValue]:
        out = []
        for v, k in self.exact:
            out.extend([v] * k)
        return out

    def to_dict(self) -> dict:
        return {
            "exact": [{"value": v if isinstance(v, int) else str(v), "mult": k}
                      for v, k in self.exact],
            "numeric": list(self.numeric),
            "residual": None if self.residual is None else self.residual.tolist(),
        }


def _split_integer_roots(poly: IntPolynomial, bound: int) -> tuple[dict[int, int], IntPolynomial]:
    roots: dict[int, int] = {}
    for r in range(-bound, bound + 1):
        while poly.degree > 0:
            quo, rem = poly.divmod_linear(r)
            if rem:
                break
            roots[r] = roots.get(r, 0) + 1
            poly = quo
    return roots, poly


def exact_spectrum(matrix: EqualityMatrix) -> Spectrum:
    """Factor the characteristic polynomial of every block over the integers.

    Integer roots are bounded by the block size (row sums bound the spectral
    radius). A leftover quadratic becomes a pair of surds; anything larger
    is kept as ``residual`` without exact roots.
    """
    bits = matrix.bits
    roots: dict[ExactValue, int] = {}
    residual = IntPolynomial([1])
    for comp in components(matrix):
        if len(comp) == 1:
            roots[1] = roots.get(1, 0) + 1
            continue
        poly = charpoly_exact(bits[np.ix_(comp, comp)])
        ints, rest = _split_integer_roots(poly, len(comp))
        for r, k in ints.items():
            roots[r] = roots.get(r, 0) + k
        if rest.degree == 2:
            c, b, _ = rest.coeffs
            disc = b * b - 4 * c
            for sign in (-1, 1):
                surd = QuadraticSurd(-b, disc, sign)
                roots[surd] = roots.get(surd, 0) + 1
        elif rest.degree > 0:
            residual = residual * rest
    exact = tuple(sorted(roots.items(), key=lambda kv: float(kv[0])))
    return Spectrum(exact=exact,
                    numeric=tuple(float(v) for v in numeric_eigenvalues(matrix)),
                    residual=None if residual.degree == 0 else residual)


def char_poly_of(matrix: EqualityMatrix) -> IntPolynomial:
    """Characteristic polynomial as the product over blocks."""
    bits = matrix.bits
    poly = IntPolynomial([1])
    for comp in components(matrix):
        poly = poly * charpoly_exact(bits[np.ix_(comp, comp)])
    return poly


# -- voter outputs from the spectrum -----------------------------------------

def isd_from_spectrum(matrix: EqualityMatrix, active: Optional[Sequence[bool]] = None,
                      tolerance: float = DEFAULT_TOLERANCE) -> InputStateDescriptor:
    """Index-level ISD read from eigenvalues and row eigenvectors.

    ``eq`` is the largest integer eigenvalue and ``d = N_active - eq``.
    ``e`` is the lowest-indexed active row that is an exact eigenvector for
    that eigenvalue with matching row sum. ``a`` comes from the eigenvalue's
    multiplicity after discounting the singleton classes of inactive
    inputs. ``err`` is raised by any non-integer eigenvalue; in that case
    the other fields are best effort.
    """
    n = matrix.order
    active = tuple(True for _ in range(n)) if active is None else tuple(bool(p) for p in active)
    if len(active) != n:
        raise ValueError("active mask length does not match matrix order")
    n_active = sum(active)
    if n_active == 0:
        raise ZeroActiveError("no active inputs")
    bits = matrix.bits
    for i in range(n):
        if not active[i] and (bits[i].sum() != 1):
            raise ValueError(f"inactive input {i} must have an identity row")

    values = numeric_eigenvalues(matrix)
    err = bool(non_integer_eigenvalues(values, tolerance))
    integral = [v for v in values if abs(v - round(v)) <= tolerance]
    n_inactive = n - n_active

    index = None
    eq = 0
    for cand in sorted({int(round(v)) for v in integral if round(v) > 0}, reverse=True):
        for i in range(n):
            row = bits[i]
            if active[i] and row.sum() == cand and np.array_equal(bits @ row, cand * row):
                index = i
                break
        if index is not None:
            eq = cand
            break

    if index is None:
        return InputStateDescriptor(y=None, index=None, d=n_active, eq=0,
                                    e=tuple(False for _ in range(n)), a=False, err=True)
    mult = sum(1 for v in integral if round(v) == eq)
    if eq == 1:
        mult -= n_inactive
    return InputStateDescriptor(
        y=None,
        index=index,
        d=n_active - eq,
        eq=eq,
        e=tuple(bool(b) for b in bits[index]),
        a=mult > 1,
        err=err,
    )
