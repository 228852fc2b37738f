"""Structured pass/fail records for identity and property checks."""

import json
import math
from dataclasses import dataclass, field

SCHEMA_VERSION = 1

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


def _jsonable(value):
    if isinstance(value, float):
        return value if math.isfinite(value) else repr(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):  # numpy scalars
        return _jsonable(value.item())
    return value


@dataclass
class CheckRecord:
    """One measured quantity compared against its tolerance.

    ``status`` is ``pass``, ``fail`` or ``inconclusive``; the last is used
    when a conditional statement's hypotheses could not be confirmed.
    """

    name: str
    params: dict
    residual: float
    tolerance: float
    status: str
    witness: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status == PASS

    @classmethod
    def compare(cls, name, params, residual, tolerance, witness=None):
        """Record that passes when ``residual <= tolerance``."""
        status = PASS if residual <= tolerance else FAIL
        return cls(name, dict(params), float(residual), float(tolerance), status, witness or {})

    def as_dict(self):
        return _jsonable(
            {
                "name": self.name,
                "params": self.params,
                "residual": self.residual,
                "tolerance": self.tolerance,
                "passed": self.passed,
                "status": self.status,
                "witness": self.witness,
            }
        )


@dataclass
class VerificationReport:
    """Checks gathered by one suite.

    ``observations`` hold informational records (exploratory numerics for
    open conjectures). They are reported but never affect ``overall_pass``.
    """

    suite: str
    checks: list = field(default_factory=list)
    observations: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)

    @property
    def overall_pass(self):
        return all(c.passed for c in self.checks)

    def add(self, record):
        self.checks.append(record)
        return record

    def extend(self, other):
        self.checks.extend(other.checks)
        self.observations.extend(other.observations)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def as_dict(self):
        return {
            "schema": SCHEMA_VERSION,
            "suite": self.suite,
            "overall_pass": self.overall_pass,
            "tolerances": _jsonable(self.tolerances),
            "checks": [c.as_dict() for c in self.checks],
            "observations": _jsonable(self.observations),
        }

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"
