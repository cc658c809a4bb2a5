"""Structured run reports shared by every verification and simulation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from .core import format_scalar


def _plain(value):
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Rational):
        return format_scalar(Fraction(value))
    if isinstance(value, float):
        return value
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):
        return _plain(value.item())
    return str(value)


@dataclass
class SimReport:
    """Outcome of one verification or simulation run.

    ``metrics`` keeps insertion order; ``failures`` holds human-readable
    discrepancy descriptions and is empty when ``ok`` is true.
    """

    command: str
    params: dict = field(default_factory=dict)
    ok: bool = True
    metrics: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def metric(self, name: str, value) -> None:
        self.metrics.append((name, value))

    def fail(self, message: str) -> None:
        self.ok = False
        self.failures.append(message)

    def get(self, name: str):
        for k, v in self.metrics:
            if k == name:
                return v
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "params": _plain(self.params),
            "ok": self.ok,
            "metrics": [[k, _plain(v)] for k, v in self.metrics],
            "failures": list(self.failures),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    def __bool__(self) -> bool:
        return self.ok
