"""JSON operator documents and CSV curves.

Complex numbers are stored as ``[re, im]`` pairs. A code document::

    {"format": "autoqec.code/1", "name": "...",
     "codewords": [[[re, im], ...], ...],   # d vectors of length n
     "errors":    [[[[re, im], ...], ...]]} # N matrices n x n, row-major

An engineered-dissipation document::

    {"format": "autoqec.engineered/1", "dim": n, "m": m, "L": L,
     "phi_policy": "...", "phi_targets": [vector, ...],
     "corrective": [matrix, ...], "preventive": [matrix, ...]}
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .codes import CodeSpace, ErrorSet
from .synthesis import EngineeredDissipation

CODE_FORMAT = "autoqec.code/1"
ENGINEERED_FORMAT = "autoqec.engineered/1"


class FormatError(ValueError):
    pass


def to_pairs(a):
    """Nested lists of ``[re, im]`` from a complex array of any rank."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [to_pairs(x) for x in a]


def from_pairs(data, ndim: int) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise FormatError(f"expected a rank-{ndim} array of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def code_to_dict(code: CodeSpace, errors: ErrorSet) -> dict:
    return {
        "format": CODE_FORMAT,
        "name": code.name,
        "codewords": to_pairs(code.codewords),
        "errors": [to_pairs(f) for f in errors.jumps],
    }


def code_from_dict(doc: dict) -> tuple[CodeSpace, ErrorSet]:
    if doc.get("format") != CODE_FORMAT:
        raise FormatError(f"not a code document (format={doc.get('format')!r})")
    try:
        words = from_pairs(doc["codewords"], 2)
        errs = tuple(from_pairs(f, 2) for f in doc.get("errors", []))
        return CodeSpace(words, doc.get("name", "custom")), ErrorSet(errs)
    except KeyError as exc:
        raise FormatError(f"missing key {exc}") from None


def engineered_to_dict(eng: EngineeredDissipation, m: int) -> dict:
    return {
        "format": ENGINEERED_FORMAT,
        "dim": eng.dim or (len(eng.phi_targets[0]) if eng.phi_targets else 0),
        "m": int(m),
        "L": int(eng.L),
        "phi_policy": eng.phi_policy,
        "phi_targets": [to_pairs(t) for t in eng.phi_targets],
        "corrective": [to_pairs(f) for f in eng.corrective],
        "preventive": [to_pairs(f) for f in eng.preventive],
    }


def engineered_from_dict(doc: dict) -> tuple[EngineeredDissipation, int]:
    if doc.get("format") != ENGINEERED_FORMAT:
        raise FormatError(f"not an engineered-dissipation document (format={doc.get('format')!r})")
    eng = EngineeredDissipation(
        corrective=tuple(from_pairs(f, 2) for f in doc["corrective"]),
        preventive=tuple(from_pairs(f, 2) for f in doc["preventive"]),
        phi_targets=tuple(from_pairs(t, 1) for t in doc["phi_targets"]),
        phi_policy=doc["phi_policy"],
    )
    return eng, int(doc["m"])


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None


def csv_text(header: list[str], rows, comments: list[str] = ()) -> str:
    """RFC-4180 CSV with optional leading ``#`` comment lines."""
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\r\n")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()
