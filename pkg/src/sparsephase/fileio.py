"""Reading and writing the pipeline's JSON/CSV artifacts.

Complex matrices are stored as ``{"m"|"n": size, "entries": [[re, im], ...]}``
in row-major order; nested row lists are accepted on read. JSON output is
written with sorted keys so identical inputs give byte-identical files.
Every output can carry a sidecar ``<file>.manifest.json``.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .engine import CoincidenceReport, CountsReport, format_config, output_config, parse_config
from .errors import ValidationError

MANIFEST_SUFFIX = ".manifest.json"


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None


def encode_matrix(A, size_key: str) -> dict:
    A = np.asarray(A, dtype=complex)
    flat = [[float(z.real), float(z.imag)] for z in A.ravel()]
    return {size_key: int(A.shape[0]), "entries": flat}


def decode_matrix(obj: dict, size_key: str) -> np.ndarray:
    if size_key not in obj or "entries" not in obj:
        raise ValidationError(f"matrix record needs '{size_key}' and 'entries'")
    k = int(obj[size_key])
    raw = obj["entries"]
    if raw and isinstance(raw[0], list) and raw[0] and isinstance(raw[0][0], list):
        raw = [z for row in raw for z in row]
    if len(raw) != k * k:
        raise ValidationError(f"expected {k * k} entries for a {k}x{k} matrix, got {len(raw)}")
    try:
        vals = [complex(float(re), float(im)) for re, im in raw]
    except (TypeError, ValueError):
        raise ValidationError("matrix entries must be [re, im] pairs") from None
    return np.array(vals, dtype=complex).reshape(k, k)


def write_unitary(path, U) -> None:
    A = U.entries if hasattr(U, "entries") else U
    write_json(path, encode_matrix(A, "m"))


def read_unitary(path) -> np.ndarray:
    return decode_matrix(read_json(path), "m")


def write_gram(path, G) -> None:
    A = G.entries if hasattr(G, "entries") else G
    write_json(path, encode_matrix(A, "n"))


def read_gram(path) -> np.ndarray:
    return decode_matrix(read_json(path), "n")


def rates_csv(report: CoincidenceReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, quoting=csv.QUOTE_NONNUMERIC, lineterminator="\n")
    w.writerow(["config", "rate", "im_residual"])
    for eta in report.configs():
        w.writerow([format_config(eta), float(report.rates[eta]),
                    float(report.im_residuals.get(eta, 0.0))])
    return buf.getvalue()


def write_rates(path, report: CoincidenceReport) -> None:
    Path(path).write_text(rates_csv(report))


def read_rates(path) -> CoincidenceReport:
    """Rates CSV back to a report; the discard mass is ``1 − Σ rates``."""
    rates, residuals = {}, {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "config" not in reader.fieldnames or "rate" not in reader.fieldnames:
            raise ValidationError(f"{path}: rates CSV needs 'config' and 'rate' columns")
        for row in reader:
            try:
                eta = output_config(parse_config(row["config"]))
                rates[eta] = float(row["rate"])
                residuals[eta] = float(row.get("im_residual") or 0.0)
            except ValueError as exc:
                raise ValidationError(f"{path}: bad row {row} ({exc})") from None
    if any(r < 0 or r > 1 for r in rates.values()):
        raise ValidationError(f"{path}: rates must lie in [0, 1]")
    discard = 1.0 - math.fsum(rates.values())
    return CoincidenceReport(rates, max(discard, 0.0), residuals)


def counts_to_json(counts: CountsReport) -> dict:
    return {
        "shots": counts.shots,
        "seed": counts.seed,
        "counts": {format_config(e): int(k) for e, k in sorted(counts.counts.items())},
        "discard": counts.discard,
    }


def counts_from_json(obj: dict) -> CountsReport:
    try:
        counts = {output_config(parse_config(k)): int(v) for k, v in obj["counts"].items()}
        shots, discard = int(obj["shots"]), int(obj["discard"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed counts record ({exc})") from None
    if sum(counts.values()) + discard != shots:
        raise ValidationError("counts plus discard do not add up to shots")
    return CountsReport(counts, discard, shots, obj.get("seed"))


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def manifest(command: str, inputs, params: dict, seed=None, version: str = "") -> dict:
    return {
        "command": command,
        "inputs": {os.path.basename(str(p)): sha256_file(p) for p in inputs},
        "params": params,
        "seed": seed,
        "version": version,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def write_manifest(output_path, record: dict) -> Path:
    path = Path(str(output_path) + MANIFEST_SUFFIX)
    outputs = {Path(output_path).name: sha256_file(output_path)}
    write_json(path, {**record, "outputs": outputs})
    return path
