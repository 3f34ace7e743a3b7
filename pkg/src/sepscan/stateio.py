"""State files and reports.

A state file is JSON::

    {"dims": [2, 2], "re": [...], "im": [...]}

with ``re``/``im`` the row-major real and imaginary parts of the density
matrix (``prod(dims)**2`` numbers each).  Python's shortest-repr float
formatting makes the round trip bit-exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from sepscan.criteria import CriterionVerdict
from sepscan.errors import InputError, NotDensityMatrix
from sepscan.linalg import DensityMatrix

REPORT_SCHEMA_VERSION = 1


def matrix_to_dict(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"shape": list(m.shape), "re": [float(x) for x in m.real.ravel()], "im": [float(x) for x in m.imag.ravel()]}


def matrix_from_dict(data: dict) -> np.ndarray:
    shape = tuple(data["shape"])
    return (np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)).reshape(shape)


def state_to_dict(rho: DensityMatrix) -> dict:
    return {
        "dims": list(rho.dims),
        "re": [float(x) for x in rho.mat.real.ravel()],
        "im": [float(x) for x in rho.mat.imag.ravel()],
    }


def state_from_dict(data: Any) -> DensityMatrix:
    if not isinstance(data, dict) or not {"dims", "re", "im"} <= data.keys():
        raise NotDensityMatrix("state file needs 'dims', 're' and 'im' fields")
    try:
        dims = [int(d) for d in data["dims"]]
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise NotDensityMatrix(f"malformed state file: {exc}") from exc
    total = int(np.prod(dims)) if dims else 0
    if re.shape != (total * total,) or im.shape != (total * total,):
        raise NotDensityMatrix(f"expected {total * total} entries per part for dims {dims}")
    return DensityMatrix(tuple(dims), (re + 1j * im).reshape(total, total))


def read_state(path) -> DensityMatrix:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    return state_from_dict(data)


def write_state(rho: DensityMatrix, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(rho)) + "\n")


@dataclass
class Report:
    command: str
    input: dict
    verdicts: list[CriterionVerdict] = field(default_factory=list)
    normal_form: dict | None = None
    witness: dict | None = None
    threshold: dict | None = None
    error: dict | None = None
    version: str = ""
    policy: dict = field(default_factory=dict)
    schema_version: int = REPORT_SCHEMA_VERSION

    @property
    def detected(self) -> bool | None:
        if not self.verdicts:
            return None
        return any(v.detected for v in self.verdicts)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "tool": "sepscan",
            "version": self.version,
            "command": self.command,
            "input": self.input,
            "detected": self.detected,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "normal_form": self.normal_form,
            "witness": self.witness,
            "threshold": self.threshold,
            "error": self.error,
            "policy": self.policy,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        verdicts = [
            CriterionVerdict(
                v["criterion"],
                v["statistic"],
                v["bound"],
                v["used_normal_form"],
                None if v["subset"] is None else tuple(v["subset"]),
            )
            for v in data.get("verdicts", [])
        ]
        return cls(
            command=data["command"],
            input=data["input"],
            verdicts=verdicts,
            normal_form=data.get("normal_form"),
            witness=data.get("witness"),
            threshold=data.get("threshold"),
            error=data.get("error"),
            version=data.get("version", ""),
            policy=data.get("policy", {}),
            schema_version=data.get("schema_version", REPORT_SCHEMA_VERSION),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)
