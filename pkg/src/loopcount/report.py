"""Count reports shared by every counting route."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

METHODS = ("formula", "burnside", "orbit_enumeration", "oracle")


@dataclass
class CountReport:
    q: int
    up_to_isotopy: int | None
    up_to_isomorphism: int | None
    method: str
    breakdown: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        for count in (self.up_to_isotopy, self.up_to_isomorphism):
            if count is not None and count < 1:
                raise ValueError("a count of loops is at least 1")
        if None not in (self.up_to_isotopy, self.up_to_isomorphism) and self.up_to_isotopy > self.up_to_isomorphism:
            raise ValueError("isotopy classes cannot outnumber isomorphism classes")

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "up_to_isotopy": None if self.up_to_isotopy is None else str(self.up_to_isotopy),
            "up_to_isomorphism": None if self.up_to_isomorphism is None else str(self.up_to_isomorphism),
            "method": self.method,
            "breakdown": _stringify(self.breakdown),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "CountReport":
        iso, iso_top = data.get("up_to_isomorphism"), data.get("up_to_isotopy")
        return cls(
            int(data["q"]),
            None if iso_top is None else int(iso_top),
            None if iso is None else int(iso),
            data["method"],
            data.get("breakdown", {}),
        )


def _stringify(obj):
    # big integers travel as decimal strings
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_stringify(v) for v in obj]
    return obj
