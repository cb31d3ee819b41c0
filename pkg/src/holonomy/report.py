"""Suite reports and deterministic seeding."""
from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field

import numpy as np


def suite_code(name: str) -> int:
    return zlib.crc32(name.encode())


def trial_rng(seed: int, suite: str, trial: int) -> np.random.Generator:
    """Counter-based sub-stream: (master seed, suite, trial) fully determines the draws."""
    return np.random.default_rng([seed & (2**64 - 1), suite_code(suite), trial])


@dataclass
class Report:
    suite: str
    seed: int | None = None
    trials: int = 0
    failures: list = field(default_factory=list)
    residuals: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def fail(self, trial: int | None = None, **data) -> None:
        entry = {"trial": trial, "seed": self.seed}
        entry.update(data)
        self.failures.append(entry)

    def check(self, ok: bool, trial: int | None = None, **data) -> bool:
        if not ok:
            self.fail(trial, **data)
        return ok

    def residual(self, name: str, value: float) -> None:
        value = float(value)
        if value > self.residuals.get(name, 0.0) or name not in self.residuals:
            self.residuals[name] = value

    def count(self, name: str, k: int = 1) -> None:
        self.notes[name] = self.notes.get(name, 0) + k

    @property
    def verdict(self) -> str:
        return "pass" if not self.failures else "fail"

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "trials": self.trials,
            "verdict": self.verdict,
            "failures": self.failures,
            "residuals": self.residuals,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        """One stable-ordered line."""
        return json.dumps(self.to_dict(), sort_keys=True, default=_jsonable)

    def to_text(self) -> str:
        lines = [f"{self.suite}: {self.verdict} ({self.trials} trials, {len(self.failures)} failures)"]
        for k in sorted(self.residuals):
            lines.append(f"  residual {k}: {self.residuals[k]:.3e}")
        for k in sorted(self.notes):
            lines.append(f"  {k}: {self.notes[k]}")
        for f in self.failures[:10]:
            lines.append(f"  FAIL {json.dumps(f, sort_keys=True, default=_jsonable)}")
        return "\n".join(lines)

    def merge(self, other: Report, prefix: str = "") -> None:
        self.trials += other.trials
        for f in other.failures:
            self.failures.append(dict(f, suite=other.suite))
        for k, v in other.residuals.items():
            self.residual(prefix + k, v)
        for k, v in other.notes.items():
            if isinstance(v, (int, float)) and not isinstance(v, bool):
                self.notes[prefix + k] = self.notes.get(prefix + k, 0) + v
            else:
                self.notes[prefix + k] = v


def _jsonable(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (set, frozenset, tuple)):
        return sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else list(obj)
    return repr(obj)
