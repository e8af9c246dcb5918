"""Run configuration and the JSON report it produces."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Optional

from .errors import InvalidInputError

VERSION = "0.1.0"
REPORT_FORMAT = 1

COMMANDS = ("jordan", "bounds", "reduce", "delta", "density", "grass-density", "kronecker", "duality",
            "invariants", "recipe")


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: Optional[int] = None
    tolerances: dict = field(default_factory=dict)
    K: Optional[int] = None
    eps: Optional[float] = None
    inputs: dict = field(default_factory=dict)
    output: Optional[str] = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidInputError(f"unknown command {self.command!r}")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise InvalidInputError(f"tolerance {k} must be positive, got {v}")
        if self.seed is not None and not 0 <= self.seed < 2 ** 64:
            raise InvalidInputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.K is not None and self.K < 0:
            raise InvalidInputError(f"K must be >= 0, got {self.K}")
        if self.eps is not None and not self.eps > 0:
            raise InvalidInputError(f"eps must be positive, got {self.eps}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunReport:
    config: RunConfig
    verdicts: dict
    payload: dict
    timings: dict = field(default_factory=dict)
    version: str = VERSION

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_dict(self, with_timings: bool = True) -> dict:
        d = {"version": self.version, "report_format": REPORT_FORMAT, "config": self.config.to_dict(),
             "verdicts": dict(self.verdicts), "passed": self.passed, "payload": self.payload}
        if with_timings:
            d["timings"] = dict(self.timings)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_default) + "\n"

    def digest(self) -> str:
        """sha256 of the canonical report with timings removed."""
        text = json.dumps(self.to_dict(with_timings=False), sort_keys=True, separators=(",", ":"),
                          default=_default)
        return hashlib.sha256(text.encode()).hexdigest()


def _default(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")
