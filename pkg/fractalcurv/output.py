"""CSV, PBM and field writers. Every file is written to ``*.tmp`` and renamed."""
import csv
import io
import math
import os
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence

import numpy as np


def fmt(x: Optional[float]) -> str:
    """12 significant digits, printed as the shortest round-trip decimal; blank for missing."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return repr(float(format(x, ".12g")))


def render_csv(fieldnames: Sequence[str], rows: Iterable[Dict[str, object]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fieldnames), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _write_text_atomic(path: Path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.with_suffix(path.suffix + ".tmp")
    with open(tmp_path, "w", newline="", encoding="utf-8") as f:
        f.write(text)
    os.replace(tmp_path, path)


def write_csv_atomic(path, fieldnames: Sequence[str], rows: Iterable[Dict[str, object]]):
    _write_text_atomic(Path(path), render_csv(fieldnames, rows))


def write_pbm(path, mask: np.ndarray):
    """Plain PBM (P1); the top image row is the highest grid row."""
    height, width = mask.shape
    lines = ["P1", f"{width} {height}"]
    for row in mask[::-1]:
        lines.append(" ".join("1" if v else "0" for v in row))
    _write_text_atomic(Path(path), "\n".join(lines) + "\n")


def write_field_csv(path, values: np.ndarray, origin, h: float):
    """One row per cell: ix, iy, x, y, d."""
    iy, ix = np.indices(values.shape)
    rows = (
        {"ix": int(i), "iy": int(j), "x": fmt(origin[0] + (i + 0.5) * h),
         "y": fmt(origin[1] + (j + 0.5) * h), "d": fmt(d)}
        for i, j, d in zip(ix.ravel(), iy.ravel(), values.ravel())
    )
    write_csv_atomic(path, ["ix", "iy", "x", "y", "d"], rows)
