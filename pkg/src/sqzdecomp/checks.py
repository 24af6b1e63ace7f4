from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckReport:
    """Ordered named pass/fail checks."""

    checks: list[tuple[str, bool]] = field(default_factory=list)

    def add(self, name: str, passed: bool) -> bool:
        self.checks.append((name, bool(passed)))
        return bool(passed)

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.checks)

    def __getitem__(self, name: str) -> bool:
        for n, passed in self.checks:
            if n == name:
                return passed
        raise KeyError(name)

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "\n".join(f"{name}: {'pass' if passed else 'fail'}" for name, passed in self.checks)
