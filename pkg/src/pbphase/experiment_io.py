"""Experimental overlay tables and figure-table serialisation.

Overlay CSV dialect: UTF-8, comma separated, ``.`` decimal point, lines
starting with ``#`` are comments, and a header row is mandatory::

    # GBL data, digitised by hand
    n_bar,value,value_err,n_bar_err
    1.5,0.62,0.05,
    4.0,0.31,0.04,2.0

``n_bar`` and ``value`` are required; ``value_err`` and ``n_bar_err`` are
optional columns and may be left empty. A missing ``n_bar_err`` becomes
``sqrt(n_bar)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from types import MappingProxyType

import numpy as np

from .errors import DoubleAdjustError, ExperimentParseError, ExperimentValidationError

REQUIRED_COLUMNS = ("n_bar", "value")
OPTIONAL_COLUMNS = ("value_err", "n_bar_err")
GBL_ADJUST = "gbl_adjust"
FIGURE_IDS = ("fig1", "fig2", "fig3", "fig5", "fig6", "fig7", "fig8")


@dataclass(frozen=True)
class ExperimentPoint:
    n_bar: float
    value: float
    value_err: float | None
    n_bar_err: float


@dataclass(frozen=True)
class ExperimentTable:
    points: tuple[ExperimentPoint, ...]
    label: str
    adjustments: tuple[str, ...] = ()
    source: str | None = None

    def __len__(self):
        return len(self.points)

    @property
    def kind(self) -> str | None:
        """``"gbl"``, ``"nfm"`` or None, from the label."""
        low = self.label.lower()
        if "gbl" in low:
            return "gbl"
        if "nfm" in low:
            return "nfm"
        return None

    def column(self, name: str) -> np.ndarray:
        vals = [getattr(p, name) for p in self.points]
        return np.array([math.nan if v is None else v for v in vals], dtype=float)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "adjustments": list(self.adjustments),
            "source": self.source,
            "points": [
                {"n_bar": p.n_bar, "value": p.value, "value_err": p.value_err,
                 "n_bar_err": p.n_bar_err}
                for p in self.points
            ],
        }


def _number(text: str, col: str, line: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ExperimentValidationError(f"line {line}: column {col!r} is not numeric: {text!r}") from None
    if not math.isfinite(v):
        raise ExperimentValidationError(f"line {line}: column {col!r} is not finite: {text!r}")
    return v


def parse_experiment(text: str, label: str = "experiment", source: str | None = None) -> ExperimentTable:
    """Parse overlay CSV text; see the module docstring for the dialect."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        try:
            fields = next(csv.reader([raw], strict=True))
        except csv.Error as exc:
            raise ExperimentParseError(str(exc), line=lineno) from None
        rows.append((lineno, [f.strip() for f in fields]))
    if not rows:
        raise ExperimentParseError("missing header row")
    head_line, header = rows[0]
    known = REQUIRED_COLUMNS + OPTIONAL_COLUMNS
    for col in header:
        if col not in known:
            raise ExperimentParseError(f"unknown column {col!r}; expected {', '.join(known)}",
                                       line=head_line)
    if len(set(header)) != len(header):
        raise ExperimentParseError("duplicate column in header", line=head_line)
    for col in REQUIRED_COLUMNS:
        if col not in header:
            raise ExperimentParseError(f"header lacks required column {col!r}", line=head_line)

    points = []
    for lineno, fields in rows[1:]:
        if len(fields) != len(header):
            raise ExperimentParseError(f"expected {len(header)} fields, got {len(fields)}", line=lineno)
        rec = dict(zip(header, fields))
        n_bar = _number(rec["n_bar"], "n_bar", lineno)
        if n_bar <= 0.0:
            raise ExperimentValidationError(f"line {lineno}: n_bar must be > 0, got {n_bar!r}")
        value = _number(rec["value"], "value", lineno)
        value_err = None
        if rec.get("value_err"):
            value_err = _number(rec["value_err"], "value_err", lineno)
        if rec.get("n_bar_err"):
            n_bar_err = _number(rec["n_bar_err"], "n_bar_err", lineno)
        else:
            n_bar_err = math.sqrt(n_bar)
        for name, v in (("value_err", value_err), ("n_bar_err", n_bar_err)):
            if v is not None and v < 0.0:
                raise ExperimentValidationError(f"line {lineno}: {name} must be >= 0, got {v!r}")
        points.append(ExperimentPoint(n_bar, value, value_err, n_bar_err))
    points.sort(key=lambda p: p.n_bar)
    return ExperimentTable(tuple(points), label, (), source)


def load_experiment(path, format: str = "csv", label: str | None = None) -> ExperimentTable:
    """Load an overlay table; ``label`` defaults to the file stem."""
    if format != "csv":
        raise ValueError(f"unsupported format {format!r}")
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_experiment(text, label or path.stem, str(path))


def gbl_adjust(table: ExperimentTable) -> ExperimentTable:
    """Rescale two-measurement GBL data to a single measurement.

    Values are halved and quoted errors divided by ``sqrt(2)``. Returns a
    new table; raises DoubleAdjustError if already applied.
    """
    if table.kind != "gbl":
        raise ExperimentValidationError(f"table {table.label!r} is not labelled as GBL data")
    if GBL_ADJUST in table.adjustments:
        raise DoubleAdjustError(f"{GBL_ADJUST} already applied to {table.label!r}")
    root2 = math.sqrt(2.0)
    pts = tuple(
        replace(p, value=p.value / 2.0,
                value_err=None if p.value_err is None else p.value_err / root2)
        for p in table.points
    )
    return replace(table, points=pts, adjustments=table.adjustments + (GBL_ADJUST,))


@dataclass(frozen=True)
class FigureTable:
    """Figure data: an abscissa plus equal-length series, and a metadata record."""

    figure_id: str
    columns: MappingProxyType
    metadata: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))
    overlays: tuple[ExperimentTable, ...] = ()

    def __post_init__(self):
        cols = {}
        length = None
        for name, values in dict(self.columns).items():
            arr = np.array(values, dtype=float)
            arr.setflags(write=False)
            if arr.ndim != 1:
                raise ValueError(f"column {name!r} is not one-dimensional")
            if length is None:
                length = arr.size
            elif arr.size != length:
                raise ValueError(f"column {name!r} has {arr.size} rows, expected {length}")
            cols[name] = arr
        object.__setattr__(self, "columns", MappingProxyType(cols))
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))
        object.__setattr__(self, "overlays", tuple(self.overlays))

    def __getitem__(self, name):
        return self.columns[name]

    @property
    def column_names(self) -> list[str]:
        return list(self.columns)

    def __len__(self):
        return len(next(iter(self.columns.values()))) if self.columns else 0


def _g17(v: float) -> str:
    return format(float(v), ".17g")


def figure_to_csv(table: FigureTable) -> str:
    buf = io.StringIO()
    buf.write(f"# figure: {table.figure_id}\n")
    buf.write(f"# metadata: {json.dumps(dict(table.metadata))}\n")
    for ov in table.overlays:
        buf.write(f"# overlay: {json.dumps(ov.to_dict())}\n")
    names = table.column_names
    buf.write(",".join(names) + "\n")
    for row in zip(*(table.columns[n] for n in names)):
        buf.write(",".join(_g17(v) for v in row) + "\n")
    return buf.getvalue()


def figure_to_json(table: FigureTable) -> str:
    doc = {
        "figure_id": table.figure_id,
        "columns": {k: [float(v) for v in arr] for k, arr in table.columns.items()},
        "metadata": dict(table.metadata),
        "overlays": [ov.to_dict() for ov in table.overlays],
    }
    return json.dumps(doc, indent=1) + "\n"


def _overlay_from_dict(d: dict) -> ExperimentTable:
    pts = tuple(ExperimentPoint(p["n_bar"], p["value"], p["value_err"], p["n_bar_err"])
                for p in d["points"])
    return ExperimentTable(pts, d["label"], tuple(d["adjustments"]), d.get("source"))


def figure_from_csv(text: str) -> FigureTable:
    figure_id = None
    metadata = {}
    overlays = []
    body = []
    for raw in text.splitlines():
        if raw.startswith("# figure:"):
            figure_id = raw.split(":", 1)[1].strip()
        elif raw.startswith("# metadata:"):
            metadata = json.loads(raw.split(":", 1)[1])
        elif raw.startswith("# overlay:"):
            overlays.append(_overlay_from_dict(json.loads(raw.split(":", 1)[1])))
        elif raw.strip() and not raw.startswith("#"):
            body.append(raw)
    if not body:
        raise ExperimentParseError("figure CSV has no header row")
    names = body[0].split(",")
    data = [[float(x) for x in line.split(",")] for line in body[1:]]
    cols = {n: [r[i] for r in data] for i, n in enumerate(names)}
    return FigureTable(figure_id, cols, metadata, tuple(overlays))


def figure_from_json(text: str) -> FigureTable:
    doc = json.loads(text)
    return FigureTable(doc["figure_id"], doc["columns"], doc["metadata"],
                       tuple(_overlay_from_dict(o) for o in doc.get("overlays", [])))


def write_figure(table: FigureTable, path, format: str = "csv") -> None:
    text = figure_to_csv(table) if format == "csv" else figure_to_json(table)
    Path(path).write_text(text, encoding="utf-8")


def read_figure(path) -> FigureTable:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        return figure_from_json(text)
    return figure_from_csv(text)
