"""File formats: POVM and calibration JSON, report JSON, figure CSV.

All JSON floats are serialized by Python's shortest-roundtrip repr, so
write-then-read reproduces every value bit for bit.  Reports carry
provenance (tool version, seed, SHA-256 of each input file) so a run can
be reproduced from the report alone.  Outcome bitstrings put qubit 0
leftmost, i.e. qubit 0 is the most significant bit of the outcome index.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__
from .distances import DistanceBound
from .errors import DimensionMismatchError
from .fixtures import fixture_path
from .mitigation import MitigationReport
from .povm import validate_povm
from .simulate import FractionReport
from .tomography import CalibrationRecord

FORMAT_VERSION = 1
FIXTURE_SCHEME = "fixture:"


def resolve_input_path(arg: str) -> Path:
    """Map a CLI path argument to a real file, expanding ``fixture:<name>``."""
    if arg.startswith(FIXTURE_SCHEME):
        return Path(str(fixture_path(arg[len(FIXTURE_SCHEME):])))
    return Path(arg)


def sha256_digest(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def provenance(inputs: dict | None = None, seed: int | None = None,
               **extra) -> dict:
    prov = {"tool": "qreadout", "tool_version": __version__}
    if inputs:
        prov["inputs"] = {str(name): sha256_digest(p) for name, p in inputs.items()}
    if seed is not None:
        prov["seed"] = int(seed)
    prov.update(extra)
    return prov


# ---------------------------------------------------------------------------
# matrices <-> nested [re, im] arrays
# ---------------------------------------------------------------------------

def matrix_to_pairs(matrix: np.ndarray) -> list:
    m = np.asarray(matrix, dtype=np.complex128)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def pairs_to_matrix(rows) -> np.ndarray:
    return np.array(
        [[complex(entry[0], entry[1]) for entry in row] for row in rows],
        dtype=np.complex128,
    )


def save_povm(path, effects, extra: dict | None = None) -> None:
    effects = validate_povm(effects)
    payload = {
        "format_version": FORMAT_VERSION,
        "dim": int(effects.shape[1]),
        "effects": [matrix_to_pairs(e) for e in effects],
    }
    if extra:
        payload.update(extra)
    _write_json(path, payload)


def load_povm(path) -> np.ndarray:
    data = _read_json(path)
    effects = np.stack([pairs_to_matrix(e) for e in data["effects"]])
    if effects.shape[1] != data["dim"]:
        raise DimensionMismatchError(
            f"{path}: declared dim {data['dim']} but effects have dim {effects.shape[1]}"
        )
    return validate_povm(effects)


# ---------------------------------------------------------------------------
# calibration files
# ---------------------------------------------------------------------------

def bitstring(index: int, num_qubits: int) -> str:
    return format(index, f"0{num_qubits}b")


def save_calibration(path, records, num_qubits: int, extra: dict | None = None) -> None:
    payload = {
        "format_version": FORMAT_VERSION,
        "qubits": [f"q{i}" for i in range(num_qubits)],
        "records": [
            {
                "state_label": r.label,
                "shots": int(r.shots),
                "counts": {
                    bitstring(i, num_qubits): int(c)
                    for i, c in enumerate(r.counts) if c
                },
            }
            for r in records
        ],
    }
    if extra:
        payload.update(extra)
    _write_json(path, payload)


def load_calibration(path) -> tuple[list[CalibrationRecord], int]:
    data = _read_json(path)
    num_qubits = len(data["qubits"])
    n = 2**num_qubits
    records = []
    for rec in data["records"]:
        label = rec["state_label"]
        counts = np.zeros(n, dtype=np.int64)
        for key, value in rec["counts"].items():
            if len(key) != num_qubits or set(key) - {"0", "1"}:
                raise ValueError(
                    f"{path}: record {label!r} has bad outcome key {key!r} "
                    f"for {num_qubits} qubit(s)"
                )
            counts[int(key, 2)] = int(value)
        try:
            records.append(
                CalibrationRecord(label=label, shots=int(rec["shots"]), counts=counts)
            )
        except ValueError as exc:
            raise ValueError(f"{path}: {exc}") from None
    return records, num_qubits


# ---------------------------------------------------------------------------
# experiment counts (the statistics to be corrected)
# ---------------------------------------------------------------------------

def save_counts(path, counts, num_qubits: int, extra: dict | None = None) -> None:
    counts = np.asarray(counts, dtype=np.int64)
    payload = {
        "format_version": FORMAT_VERSION,
        "qubits": [f"q{i}" for i in range(num_qubits)],
        "shots": int(counts.sum()),
        "counts": {
            bitstring(i, num_qubits): int(c) for i, c in enumerate(counts) if c
        },
    }
    if extra:
        payload.update(extra)
    _write_json(path, payload)


def load_counts(path) -> tuple[np.ndarray, int]:
    """Read a counts file; returns (counts vector, num_qubits)."""
    data = _read_json(path)
    num_qubits = len(data["qubits"])
    n = 2**num_qubits
    counts = np.zeros(n, dtype=np.int64)
    for key, value in data["counts"].items():
        if len(key) != num_qubits or set(key) - {"0", "1"}:
            raise ValueError(
                f"{path}: bad outcome key {key!r} for {num_qubits} qubit(s)"
            )
        counts[int(key, 2)] = int(value)
    declared = int(data["shots"])
    if int(counts.sum()) != declared:
        raise ValueError(
            f"{path}: counts sum to {int(counts.sum())}, declared shots {declared}"
        )
    return counts, num_qubits


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def _jsonable(value):
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return matrix_to_pairs(value)
        return value.tolist()
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(value).items()}
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def bound_to_dict(bound: DistanceBound) -> dict:
    return {"lower": bound.lower, "upper": bound.upper, "method": bound.method}


def mitigation_report_to_dict(report: MitigationReport) -> dict:
    return {
        "corrected": report.corrected.tolist(),
        "raw_corrected": report.raw.tolist(),
        "budget": _jsonable(report.budget),
        "distance_reference": bound_to_dict(report.distance_reference),
        "rhs_bound": report.rhs_bound,
        "successful": report.successful,
        "projection_applied": report.projection_applied,
        "margin": report.margin,
    }


def fraction_report_to_dict(report: FractionReport) -> dict:
    out = _jsonable(report)
    out["distance_reference"] = bound_to_dict(report.distance_reference)
    return out


def save_report(path, kind: str, payload: dict, prov: dict | None = None) -> None:
    document = {"format_version": FORMAT_VERSION, "kind": kind}
    document.update(_jsonable(payload))
    if prov is not None:
        document["provenance"] = _jsonable(prov)
    _write_json(path, document)


def load_report(path) -> dict:
    return _read_json(path)


# ---------------------------------------------------------------------------
# CSV + JSON plumbing
# ---------------------------------------------------------------------------

def write_csv(path, header, rows) -> None:
    """Figure data: header row, '.' decimal separator, LF line endings."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join("" if v is None else repr(float(v)) for v in row) + "\n")


def _write_json(path, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text + "\n")


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
