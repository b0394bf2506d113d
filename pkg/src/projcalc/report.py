"""Pass/fail reports for identity checks."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field


@dataclass
class Report:
    identity: str
    parameters: dict = field(default_factory=dict)
    status: str = "pass"
    witness: dict | None = None

    @property
    def passed(self):
        return self.status == "pass"

    def to_json(self):
        return asdict(self)

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, indent=2)
