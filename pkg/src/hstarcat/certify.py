"""Lightweight certificates shared by the verification routines."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Certificate:
    """Verdict plus named residuals of the checks that produced it."""

    ok: bool
    residuals: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    failed_axiom: str | None = None

    def to_json(self) -> dict:
        out = {
            "verdict": "ACCEPT" if self.ok else "REJECT",
            "residuals": {k: float(v) for k, v in self.residuals.items()},
        }
        if self.failed_axiom:
            out["failed_axiom"] = self.failed_axiom
        if self.details:
            out["details"] = {k: str(v) for k, v in self.details.items()}
        return out
