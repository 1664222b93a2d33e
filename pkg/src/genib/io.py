"""Problem files and tradeoff-curve CSV.

Problem files hold a joint p(x, y), rows indexed by x and columns by y, as

* a CSV matrix of decimal reals (``#`` comment lines and blank lines are
  skipped), or
* a JSON document ``{"x_labels": [...], "y_labels": [...],
  "y_values": [...], "matrix": [[...], ...]}`` where only ``matrix`` is
  required.

When ``y_values`` is absent and every y label parses as a number, the labels
double as numeric values (so a plain CSV gets Y = 1, 2, ..., m).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ParseError, SimplexViolation
from .prob import Alphabet, Joint

FILE_RENORM_TOL = 1e-6

CSV_HEADER = ["beta", "compression", "utility", "iterations", "converged", "restart", "objective", "best"]
CSV_COMMENT = "# compression = I(X;T) in nats; utility = I_H(Y;T) in nats (shannon) or loss units"


def _numeric_labels(labels):
    try:
        return tuple(float(s) for s in labels)
    except ValueError:
        return None


def _parse_csv(text: str):
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        row = []
        for col, field in enumerate(stripped.split(","), start=1):
            try:
                row.append(float(field))
            except ValueError:
                raise ParseError(f"not a number: {field.strip()!r}", line=lineno, column=col) from None
        if rows and len(row) != len(rows[0][1]):
            raise ParseError(
                f"expected {len(rows[0][1])} columns, found {len(row)}", line=lineno
            )
        rows.append((lineno, row))
    if not rows:
        raise ParseError("no matrix rows found")
    return {"matrix": [r for _, r in rows]}


def _parse_json(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise ParseError("JSON problem file needs a 'matrix' field")
    matrix = doc["matrix"]
    if not isinstance(matrix, list) or not matrix or not all(isinstance(r, list) for r in matrix):
        raise ParseError("'matrix' must be a non-empty list of rows")
    width = len(matrix[0])
    for i, r in enumerate(matrix):
        if len(r) != width:
            raise ParseError(f"matrix row {i} has {len(r)} entries, expected {width}")
        for j, v in enumerate(r):
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ParseError(f"matrix[{i}][{j}] is not a number: {v!r}")
    return doc


def joint_from_document(doc: dict, renormalize_tol: float = FILE_RENORM_TOL) -> Joint:
    mass = np.asarray(doc["matrix"], dtype=float)
    nx, ny = mass.shape
    for i in range(nx):
        neg = np.flatnonzero(mass[i] < 0)
        if neg.size:
            raise SimplexViolation(
                f"negative probability in row {i}, column {int(neg[0])}: {mass[i, neg[0]]}", row=i
            )
    total = mass.sum()
    dev = abs(total - 1.0)
    if dev > renormalize_tol:
        sums = ", ".join(f"{s:.9g}" for s in mass.sum(axis=1))
        raise SimplexViolation(
            f"joint sums to {total:.12g} (deviation {dev:.3g}); row sums: {sums}", deviation=dev
        )
    mass = mass / total

    x_labels = doc.get("x_labels") or [str(i + 1) for i in range(nx)]
    y_labels = doc.get("y_labels") or [str(j + 1) for j in range(ny)]
    y_values = doc.get("y_values")
    if y_values is None:
        y_values = _numeric_labels(y_labels)
    return Joint(Alphabet(tuple(x_labels)), Alphabet(tuple(y_labels), y_values), mass)


def load_problem(path, renormalize_tol: float = FILE_RENORM_TOL) -> Joint:
    """Read a joint distribution from a CSV or JSON problem file.

    Total mass within ``renormalize_tol`` of one is rescaled, which absorbs
    rounding in files with printed decimals; anything further off raises
    :class:`SimplexViolation`.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        doc = _parse_json(text)
    else:
        doc = _parse_csv(text)
    return joint_from_document(doc, renormalize_tol)


def save_problem(joint: Joint, path) -> None:
    doc = {
        "x_labels": list(joint.alphabet_x.labels),
        "y_labels": list(joint.alphabet_y.labels),
        "matrix": joint.mass.tolist(),
    }
    if joint.alphabet_y.numeric_values is not None:
        doc["y_values"] = list(joint.alphabet_y.numeric_values)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def emit_csv(points, path) -> None:
    """Write tradeoff points, one per line, after a ``#`` units comment and the header."""
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            fh.write(CSV_COMMENT + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for pt in points:
                w.writerow([
                    _fmt(pt.beta), _fmt(pt.compression), _fmt(pt.utility), pt.iterations,
                    int(pt.converged), pt.restart_index, _fmt(pt.objective), int(pt.best),
                ])
    except OSError as exc:
        raise OSError(f"cannot write tradeoff CSV to {path}: {exc}") from exc


def read_csv(path):
    """Inverse of :func:`emit_csv`."""
    from .sweep import TradeoffPoint

    points = []
    with Path(path).open(encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    for row in reader:
        points.append(TradeoffPoint(
            beta=float(row["beta"]),
            compression=float(row["compression"]),
            utility=float(row["utility"]),
            iterations=int(row["iterations"]),
            converged=bool(int(row["converged"])),
            restart_index=int(row["restart"]),
            objective=float(row["objective"]),
            best=bool(int(row["best"])),
        ))
    return points
