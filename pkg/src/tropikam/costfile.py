"""Reading and writing cost kernels.

Canonical format: UTF-8 JSON with fields ``version`` (1), ``labels``,
optional ``coords`` and the row-major dense ``matrix``.  A CSV
alternative carries the labels in the first row and the matrix below,
with '.' decimal separator and no locale formatting.  Floats are
written with 17 significant digits so save/load round-trips are
bit-exact.  Non-square, non-finite or malformed inputs are rejected
with the offending location.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .errors import KernelFormatError
from .minplus import CostKernel

FORMAT_VERSION = 1


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _number_rows(rows) -> str:
    # The document is assembled by hand so matrix entries are emitted at
    # 17 significant digits instead of whatever a JSON encoder chooses.
    formatted = [
        "  [" + ", ".join(_fmt(v) for v in row) + "]" for row in rows
    ]
    return "[\n" + ",\n".join(formatted) + "\n ]"


def kernel_to_json(kernel: CostKernel) -> str:
    parts = [
        f'"version": {FORMAT_VERSION}',
        f'"labels": {json.dumps(list(kernel.labels))}',
    ]
    if kernel.coords is not None:
        parts.append(f'"coords": {_number_rows(kernel.coords)}')
    parts.append(f'"matrix": {_number_rows(kernel.matrix)}')
    return "{\n " + ",\n ".join(parts) + "\n}\n"


def kernel_to_csv(kernel: CostKernel) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(kernel.labels)
    for row in kernel.matrix:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def save_cost(kernel: CostKernel, path, fmt: str | None = None) -> None:
    """Write a kernel to ``path`` as JSON (default) or CSV."""
    target = Path(path)
    chosen = fmt or ("csv" if target.suffix.lower() == ".csv" else "json")
    if chosen == "json":
        target.write_text(kernel_to_json(kernel), encoding="utf-8")
    elif chosen == "csv":
        target.write_text(kernel_to_csv(kernel), encoding="utf-8")
    else:
        raise ValueError(f"unknown cost file format {chosen!r}")


def _parse_float(raw, where: str) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise KernelFormatError(f"{where}: {raw!r} is not a number") from None
    if not math.isfinite(value):
        raise KernelFormatError(f"{where}: entries must be finite, got {raw!r}")
    return value


def kernel_from_json(text: str) -> CostKernel:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise KernelFormatError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(payload, dict):
        raise KernelFormatError("cost file must be a JSON object")
    version = payload.get("version")
    if version != FORMAT_VERSION:
        raise KernelFormatError(f"unsupported cost file version {version!r}")
    labels = payload.get("labels")
    matrix = payload.get("matrix")
    if not isinstance(labels, list) or not labels:
        raise KernelFormatError("'labels' must be a nonempty list")
    if not isinstance(matrix, list) or not matrix:
        raise KernelFormatError("'matrix' must be a nonempty list of rows")
    n = len(labels)
    parsed = []
    for i, row in enumerate(matrix):
        if not isinstance(row, list) or len(row) != n:
            raise KernelFormatError(
                f"matrix row {i}: expected {n} entries, got "
                f"{len(row) if isinstance(row, list) else type(row).__name__}"
            )
        parsed.append([_parse_float(v, f"matrix row {i}, column {j}") for j, v in enumerate(row)])
    if len(parsed) != n:
        raise KernelFormatError(f"matrix has {len(parsed)} rows for {n} labels")
    coords = payload.get("coords")
    if coords is not None:
        if not isinstance(coords, list) or len(coords) != n:
            raise KernelFormatError("'coords' must list one coordinate row per point")
        coords = tuple(
            tuple(_parse_float(v, f"coords row {i}, column {j}") for j, v in enumerate(row))
            for i, row in enumerate(coords)
        )
    try:
        return CostKernel(labels=tuple(str(x) for x in labels), matrix=parsed, coords=coords)
    except ValueError as exc:
        raise KernelFormatError(str(exc)) from None


def kernel_from_csv(text: str) -> CostKernel:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if len(rows) < 2:
        raise KernelFormatError("CSV cost file needs a label row and matrix rows")
    labels = [cell.strip() for cell in rows[0]]
    n = len(labels)
    if len(rows) - 1 != n:
        raise KernelFormatError(
            f"CSV matrix has {len(rows) - 1} rows for {n} labels"
        )
    matrix = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != n:
            raise KernelFormatError(f"line {i}: expected {n} columns, got {len(row)}")
        matrix.append(
            [_parse_float(cell.strip(), f"line {i}, column {j + 1}") for j, cell in enumerate(row)]
        )
    try:
        return CostKernel(labels=tuple(labels), matrix=matrix)
    except ValueError as exc:
        raise KernelFormatError(str(exc)) from None


def load_cost(path, fmt: str | None = None) -> CostKernel:
    """Read a kernel from a JSON or CSV cost file.

    The format is taken from ``fmt`` or the file extension; without
    either, JSON is tried first and CSV second.
    """
    source = Path(path)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as exc:
        raise KernelFormatError(f"cannot read {source}: {exc}") from None
    chosen = fmt
    if chosen is None:
        suffix = source.suffix.lower()
        if suffix == ".csv":
            chosen = "csv"
        elif suffix == ".json":
            chosen = "json"
    if chosen == "json":
        return kernel_from_json(text)
    if chosen == "csv":
        return kernel_from_csv(text)
    if chosen is None:
        try:
            return kernel_from_json(text)
        except KernelFormatError:
            return kernel_from_csv(text)
    raise ValueError(f"unknown cost file format {chosen!r}")
