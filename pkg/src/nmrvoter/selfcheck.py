"""Self-checks on the equality matrix and a fault-injection harness.

Injections draw from :class:`random.Random` (Mersenne Twister) seeded with
the campaign seed, so a campaign replays bit-exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from nmrvoter.core import EqualityMatrix, VoterInputSet, build_matrix
from nmrvoter.errors import NoEligibleClassError
from nmrvoter.spectral import (DEFAULT_TOLERANCE, components, non_integer_eigenvalues,
                               numeric_eigenvalues)


@dataclass(frozen=True)
class Violation:
    """One zeroed symmetric pair inside a class.

    ``pair`` is the zeroed (j, k) with j < k; ``pivot`` is the lowest-indexed
    other member of the class, still equal to both.
    """

    pivot: int
    pair: tuple[int, int]
    class_size: int

    @property
    def triple(self) -> tuple[int, int, int]:
        return tuple(sorted((self.pivot,) + self.pair))

    def to_dict(self) -> dict:
        return {"pivot": self.pivot, "pair": list(self.pair), "class_size": self.class_size,
                "triple": list(self.triple)}


@dataclass(frozen=True)
class DetectionReport:
    transitivity_err: bool
    spectral_err: Optional[bool] = None
    triples: tuple[tuple[int, int, int], ...] = ()
    non_integer: tuple[float, ...] = ()

    @property
    def err(self) -> bool:
        return self.transitivity_err or bool(self.spectral_err)

    def to_dict(self) -> dict:
        return {
            "transitivity_err": int(self.transitivity_err),
            "spectral_err": None if self.spectral_err is None else int(self.spectral_err),
            "err": int(self.err),
            "triples": [list(t) for t in self.triples],
            "non_integer": list(self.non_integer),
        }


def violating_triples(matrix: EqualityMatrix) -> list[tuple[int, int, int]]:
    """All i < j < k where exactly two of A[i][j], A[i][k], A[j][k] are 1."""
    rows = matrix.tolist()
    n = len(rows)
    found = []
    for i in range(n - 2):
        ri = rows[i]
        for j in range(i + 1, n - 1):
            rj = rows[j]
            aij = ri[j]
            for k in range(j + 1, n):
                if aij + ri[k] + rj[k] == 2:
                    found.append((i, j, k))
    return found


def transitivity_scan(matrix: EqualityMatrix) -> DetectionReport:
    triples = violating_triples(matrix)
    return DetectionReport(transitivity_err=bool(triples), triples=tuple(triples))


def full_check(matrix: EqualityMatrix, tolerance: float = DEFAULT_TOLERANCE) -> DetectionReport:
    """Run both checks; each verdict is reported separately."""
    triples = violating_triples(matrix)
    odd = non_integer_eigenvalues(numeric_eigenvalues(matrix), tolerance)
    return DetectionReport(
        transitivity_err=bool(triples),
        spectral_err=bool(odd),
        triples=tuple(triples),
        non_integer=tuple(odd),
    )


def eligible_pairs(matrix: EqualityMatrix) -> list[tuple[tuple[int, int], list[int]]]:
    """Every pair inside a fully connected class of three or more members."""
    bits = matrix.bits
    out = []
    for comp in components(matrix):
        if len(comp) < 3:
            continue
        if not all(bits[a, b] for a, b in combinations(comp, 2)):
            continue
        out.extend(((j, k), comp) for j, k in combinations(comp, 2))
    return out


def plant(matrix: EqualityMatrix, j: int, k: int) -> tuple[EqualityMatrix, Violation]:
    """Zero the pair (j, k); both must belong to the same class of size >= 3."""
    j, k = sorted((j, k))
    for pair, comp in eligible_pairs(matrix):
        if pair == (j, k):
            pivot = next(i for i in comp if i not in pair)
            return matrix.with_pair(j, k, 0), Violation(pivot, pair, len(comp))
    raise NoEligibleClassError(f"pair ({j}, {k}) is not inside a class of three or more")


def inject_violation(matrix: EqualityMatrix, seed: int) -> tuple[EqualityMatrix, Violation]:
    """Zero one uniformly chosen eligible pair. The input matrix is untouched."""
    candidates = eligible_pairs(matrix)
    if not candidates:
        raise NoEligibleClassError("no class has three or more members")
    rng = random.Random(seed)
    (j, k), comp = candidates[rng.randrange(len(candidates))]
    pivot = next(i for i in comp if i not in (j, k))
    return matrix.with_pair(j, k, 0), Violation(pivot, (j, k), len(comp))


def inject_faults(matrix: EqualityMatrix, seed: int, count: int) -> tuple[EqualityMatrix, list[tuple[int, int]]]:
    """Zero ``count`` distinct eligible pairs at once.

    Several zeroed pairs can leave a matrix that is again transitive (a
    member cut off from its whole class), so multi-fault runs are graded on
    detection only.
    """
    candidates = [pair for pair, _ in eligible_pairs(matrix)]
    if not candidates:
        raise NoEligibleClassError("no class has three or more members")
    if count > len(candidates):
        raise ValueError(f"only {len(candidates)} eligible pairs, cannot zero {count}")
    rng = random.Random(seed)
    chosen = sorted(rng.sample(candidates, count))
    bits = matrix.bits.copy()
    for j, k in chosen:
        bits[j, k] = bits[k, j] = 0
    return EqualityMatrix(bits), chosen


# -- campaigns --------------------------------------------------------------

@dataclass
class CampaignConfig:
    seeds: list[int]
    n: Optional[int] = None
    classes: Optional[list[int]] = None
    values: Optional[list[int]] = None
    active: Optional[list[bool]] = None
    pair: Optional[tuple[int, int]] = None
    faults: int = 1
    tolerance: float = DEFAULT_TOLERANCE

    @classmethod
    def from_dict(cls, cfg: dict) -> "CampaignConfig":
        if not isinstance(cfg, dict):
            raise ValueError("campaign config must be an object")
        seeds = cfg.get("seeds", [0])
        if not isinstance(seeds, list) or not all(isinstance(s, int) for s in seeds):
            raise ValueError("'seeds' must be a list of integers")
        out = cls(seeds=seeds, n=cfg.get("n"), classes=cfg.get("classes"),
                  values=cfg.get("values"), active=cfg.get("active"),
                  pair=tuple(cfg["pair"]) if cfg.get("pair") is not None else None,
                  faults=int(cfg.get("faults", 1)),
                  tolerance=float(cfg.get("tolerance", DEFAULT_TOLERANCE)))
        if out.values is None and out.classes is None:
            raise ValueError("campaign needs 'classes' or 'values'")
        if out.classes is not None:
            if any(not isinstance(c, int) or c < 1 for c in out.classes):
                raise ValueError("'classes' must be positive integers")
            if out.n is not None and sum(out.classes) > out.n:
                raise ValueError("class sizes exceed n")
        if out.faults < 1:
            raise ValueError("'faults' must be >= 1")
        return out

    def inputs_for(self, seed: int) -> VoterInputSet:
        if self.values is not None:
            return VoterInputSet(self.values, self.active)
        n = self.n if self.n is not None else sum(self.classes)
        labels = []
        for value, size in enumerate(self.classes):
            labels.extend([value] * size)
        # leftover positions get their own distinct values
        labels.extend(range(len(self.classes), len(self.classes) + n - len(labels)))
        random.Random(seed).shuffle(labels)
        return VoterInputSet(labels, self.active)


def run_campaign(config: CampaignConfig) -> dict:
    """Inject into one matrix per seed and grade both checkers."""
    cases = []
    detected_t = detected_s = detected_both = skipped = 0
    for seed in config.seeds:
        inputs = config.inputs_for(seed)
        matrix = build_matrix(inputs)
        case = {"seed": seed, "values": list(inputs.values)}
        try:
            if config.faults > 1:
                bad, flipped = inject_faults(matrix, seed, config.faults)
                case["flipped"] = [list(p) for p in flipped]
            elif config.pair is not None:
                bad, violation = plant(matrix, *config.pair)
                case["violation"] = violation.to_dict()
            else:
                bad, violation = inject_violation(matrix, seed)
                case["violation"] = violation.to_dict()
        except NoEligibleClassError as exc:
            skipped += 1
            case["skipped"] = str(exc)
            cases.append(case)
            continue
        report = full_check(bad, config.tolerance)
        detected_t += report.transitivity_err
        detected_s += bool(report.spectral_err)
        both = report.transitivity_err and bool(report.spectral_err)
        detected_both += both
        # a single zeroed pair must trip both checkers; several may not be
        # detectable at all, so either checker counts there
        case["detected"] = both if config.faults == 1 else report.err
        case["report"] = report.to_dict()
        cases.append(case)
    graded = len(config.seeds) - skipped
    detected = sum(1 for c in cases if c.get("detected"))
    return {
        "cases": len(config.seeds),
        "graded": graded,
        "skipped": skipped,
        "detected_transitivity": detected_t,
        "detected_spectral": detected_s,
        "detected_both": detected_both,
        "undetected": graded - detected,
        "detection_rate": (detected / graded) if graded else None,
        "reports": cases,
    }
