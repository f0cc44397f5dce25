"""Trace-driven simulation of NMR-on-demand (NMROD) with the programmable voter in the loop.

Processor-sensor pairs normally run two at a time (DMR). Any disagreement
raises the redundancy to three (TMR) from the next step on; a burst of
faulty steps inside a sliding window brings in every remaining pair. A
pair that is outvoted ``suspicion_k`` steps in a row is considered
permanently faulty and powered off, and after ``downgrade_streak`` clean
steps the system drops back to DMR.

Randomness comes from one :class:`random.Random` per run. Draw order per
step is: golden word, then for each powered pair in index order a transient
draw followed (if faulty) by corruption masks.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional

from nmrvoter.core import DEFAULT_WIDTH, VoterInputSet, compute_isd
from nmrvoter.errors import AllPairsOffError
from nmrvoter.voter import Voter


@dataclass
class ModuleModel:
    id: int
    transient_rate: float = 0.0
    permanent_at: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.transient_rate <= 1.0:
            raise ValueError(f"module {self.id}: transient_rate must lie in [0, 1]")
        if self.permanent_at is not None and self.permanent_at < 0:
            raise ValueError(f"module {self.id}: permanent_at must be >= 0")


@dataclass
class PolicyConfig:
    base_redundancy: int = 2
    window: int = 20
    critical_threshold: int = 3
    suspicion_k: int = 3
    downgrade_streak: int = 100

    def __post_init__(self):
        if self.base_redundancy < 1:
            raise ValueError("base_redundancy must be >= 1")
        for name in ("window", "critical_threshold", "suspicion_k", "downgrade_streak"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass
class SimConfig:
    modules: list[ModuleModel]
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    width: int = DEFAULT_WIDTH

    def __post_init__(self):
        if not self.modules:
            raise ValueError("at least one processor-sensor pair is required")
        if self.policy.base_redundancy > len(self.modules):
            raise ValueError("base_redundancy exceeds the number of pairs")

    @property
    def n(self) -> int:
        return len(self.modules)

    @classmethod
    def uniform(cls, n: int = 4, transient_rate: float = 0.0, **policy) -> "SimConfig":
        return cls([ModuleModel(i, transient_rate) for i in range(n)], PolicyConfig(**policy))

    @classmethod
    def from_dict(cls, cfg: dict) -> "SimConfig":
        if not isinstance(cfg, dict):
            raise ValueError("simulation config must be an object")
        known = {"n", "modules", "policy", "width", "transient_rate"}
        extra = set(cfg) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        try:
            if "modules" in cfg:
                modules = [ModuleModel(id=i, transient_rate=float(m.get("transient_rate", 0.0)),
                                       permanent_at=m.get("permanent_at"))
                           for i, m in enumerate(cfg["modules"])]
            else:
                rate = float(cfg.get("transient_rate", 0.0))
                modules = [ModuleModel(i, rate) for i in range(int(cfg.get("n", 4)))]
            policy = PolicyConfig(**cfg.get("policy", {}))
        except (TypeError, AttributeError) as exc:
            raise ValueError(f"malformed simulation config: {exc}") from exc
        return cls(modules, policy, int(cfg.get("width", DEFAULT_WIDTH)))

    def to_dict(self) -> dict:
        return {
            "modules": [{"transient_rate": m.transient_rate, "permanent_at": m.permanent_at}
                        for m in self.modules],
            "policy": asdict(self.policy),
            "width": self.width,
        }


@dataclass(frozen=True)
class TraceRecord:
    step: int
    golden: int
    outputs: tuple[Optional[int], ...]
    powered: tuple[bool, ...]
    active: tuple[bool, ...]
    isd: dict
    level: int
    actions: tuple[str, ...]
    restart: bool

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "golden": self.golden,
            "outputs": list(self.outputs),
            "powered": list(self.powered),
            "active": list(self.active),
            "isd": self.isd,
            "level": self.level,
            "actions": list(self.actions),
            "restart": self.restart,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, rec: dict) -> "TraceRecord":
        return cls(rec["step"], rec["golden"], tuple(rec["outputs"]), tuple(rec["powered"]),
                   tuple(rec["active"]), rec["isd"], rec["level"], tuple(rec["actions"]),
                   rec["restart"])

    def voter_inputs(self, width: int = DEFAULT_WIDTH) -> VoterInputSet:
        # unpowered pairs drive 0 into their (inactive) voter input
        return VoterInputSet([0 if v is None else v for v in self.outputs], self.active, width)


class NMRODState:
    """Mutable state of one simulation run."""

    def __init__(self, config: SimConfig):
        self.config = config
        self.step_no = 0
        self.level = config.policy.base_redundancy
        self.retired = [False] * config.n
        self.suspicion = [0] * config.n
        self.fault_window: deque[bool] = deque(maxlen=config.policy.window)
        self.clean_streak = 0
        self.voter = Voter(config.n, config.width)
        self.powered = self._select()

    def _select(self) -> list[bool]:
        available = [i for i in range(self.config.n) if not self.retired[i]]
        chosen = set(available[:self.level])
        return [i in chosen for i in range(self.config.n)]

    def _corrupt(self, golden: int, rng: random.Random) -> int:
        mask = 0
        while mask == 0:
            mask = rng.getrandbits(self.config.width)
        return golden ^ mask

    def _power_off(self, i: int, actions: list[str]) -> None:
        # 0MR is illegal: the last remaining pair stays on whatever it reports
        if sum(1 for r in self.retired if not r) <= 1:
            actions.append(f"refuse_power_off:{i}")
            return
        self.retired[i] = True
        self.suspicion[i] = 0
        actions.append(f"power_off:{i}")

    def step(self, rng: random.Random) -> TraceRecord:
        cfg, policy = self.config, self.config.policy
        if not any(self.powered):
            raise AllPairsOffError("no powered pair left to vote")
        t = self.step_no
        golden = rng.getrandbits(cfg.width)
        outputs: list[Optional[int]] = []
        for mod, on in zip(cfg.modules, self.powered):
            if not on:
                outputs.append(None)
                continue
            permanent = mod.permanent_at is not None and t >= mod.permanent_at
            transient = rng.random() < mod.transient_rate
            outputs.append(self._corrupt(golden, rng) if permanent or transient else golden)

        active = tuple(self.powered)
        isd = self.voter.vote([0 if v is None else v for v in outputs], active)

        actions: list[str] = []
        restart = False
        faulty = isd.d > 0
        self.fault_window.append(faulty)
        self.clean_streak = 0 if faulty else self.clean_streak + 1

        # suspicion only counts when the outvoted pair is identifiable
        for i in range(cfg.n):
            if not active[i]:
                continue
            if isd.a:
                continue
            self.suspicion[i] = 0 if isd.e[i] else self.suspicion[i] + 1

        target = self.level
        if faulty and target < 3:
            target = min(3, cfg.n)
            restart = target > self.level
        if sum(self.fault_window) >= policy.critical_threshold and target >= 3:
            target = cfg.n
        if not faulty and self.clean_streak >= policy.downgrade_streak and target > policy.base_redundancy:
            target = policy.base_redundancy
            self.clean_streak = 0
            self.fault_window.clear()
            actions.append(f"downgrade:{target}")
        if target > self.level:
            actions.append(f"escalate:{target}")
        self.level = target

        for i in range(cfg.n):
            if active[i] and self.suspicion[i] >= policy.suspicion_k:
                self._power_off(i, actions)
        if restart:
            actions.append("restart")

        record = TraceRecord(
            step=t,
            golden=golden,
            outputs=tuple(outputs),
            powered=tuple(self.powered),
            active=active,
            isd=isd.to_dict(),
            level=self.level,
            actions=tuple(actions),
            restart=restart,
        )
        self.powered = self._select()
        self.step_no += 1
        return record


def run(config: SimConfig, horizon: int, seed: int) -> list[TraceRecord]:
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    rng = random.Random(seed)
    state = NMRODState(config)
    return [state.step(rng) for _ in range(horizon)]


def dump_trace(records: Iterable[TraceRecord]) -> str:
    return "".join(r.to_json() + "\n" for r in records)


def load_trace(text: str) -> list[TraceRecord]:
    return [TraceRecord.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]


def replay_mismatches(records: Iterable[TraceRecord], width: int = DEFAULT_WIDTH) -> list[int]:
    """Steps whose recorded ISD differs from a fresh recomputation."""
    bad = []
    for rec in records:
        isd = compute_isd(rec.voter_inputs(width)).to_dict()
        if isd != rec.isd:
            bad.append(rec.step)
    return bad
