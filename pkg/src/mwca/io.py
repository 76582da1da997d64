"""Reading and writing contingency tables and analysis outputs.

Two table formats are supported:

``long-csv``
    Header row with the ``d`` mode names followed by a ``count`` column; one
    row per cell. Cells not listed are zero. Category labels are collected in
    order of first appearance unless a label-order sidecar is given.

``dense-json``
    ``{"shape", "mode_names", "labels", "values"}`` where ``values`` is the
    flat count array with the *first* index varying fastest (the same
    ordering the unfoldings use for their columns).
"""

import csv
import json
import logging
from importlib import resources
from pathlib import Path

import numpy as np

from .table import ContingencyTable

log = logging.getLogger(__name__)

FORMATS = ("long-csv", "dense-json")
NUMBER_FORMAT = "{:.17g}"


class TableFormatError(ValueError):
    pass


def infer_format(path):
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "long-csv"
    if suffix == ".json":
        return "dense-json"
    raise TableFormatError(f"cannot infer table format from {str(path)!r}; pass format=")


def load_table(path, format=None, label_order=None):
    """Load a :class:`ContingencyTable` from ``path``.

    ``label_order`` optionally fixes category order for long-csv input: a
    mapping ``{mode_name: [label, ...]}`` or the path of a JSON file holding
    one. Modes not mentioned keep first-appearance order.
    """
    format = format or infer_format(path)
    if format == "long-csv":
        with open(path, newline="", encoding="utf-8") as fh:
            return read_long_csv(fh, label_order)
    if format == "dense-json":
        with open(path, encoding="utf-8") as fh:
            return read_dense_json(fh)
    raise TableFormatError(f"unknown format {format!r}; expected one of {FORMATS}")


def load_health_survey():
    """The bundled 2 x 7 x 5 gender/age/self-rated-health survey table."""
    ref = resources.files("mwca") / "data" / "health.csv"
    with ref.open("r", encoding="utf-8", newline="") as fh:
        return read_long_csv(fh)


def _parse_count(raw, lineno):
    try:
        value = float(raw)
    except ValueError:
        raise TableFormatError(f"line {lineno}: count {raw!r} is not a number") from None
    if value != int(value):
        raise TableFormatError(f"line {lineno}: count {raw!r} is not an integer")
    if value < 0:
        raise TableFormatError(f"line {lineno}: negative count {raw!r}")
    return int(value)


def read_long_csv(fh, label_order=None):
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None:
        raise TableFormatError("no data rows")
    header = [h.strip() for h in header]
    if len(header) < 2 or header[-1] != "count":
        raise TableFormatError("header must list the mode columns followed by 'count'")
    names = header[:-1]
    d = len(names)

    if isinstance(label_order, (str, Path)):
        with open(label_order, encoding="utf-8") as lf:
            label_order = json.load(lf)
    label_order = label_order or {}
    unknown = set(label_order) - set(names)
    if unknown:
        raise TableFormatError(f"label order given for unknown modes {sorted(unknown)}")

    labels = [list(label_order.get(n, [])) for n in names]
    fixed = [n in label_order for n in names]
    index = [{lab: i for i, lab in enumerate(labs)} for labs in labels]
    cells = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != d + 1:
            raise TableFormatError(f"line {lineno}: expected {d + 1} fields, got {len(row)}")
        key = []
        for k, raw in enumerate(row[:-1]):
            lab = raw.strip()
            if lab not in index[k]:
                if fixed[k]:
                    raise TableFormatError(
                        f"line {lineno}: label {lab!r} missing from the order for {names[k]!r}"
                    )
                index[k][lab] = len(labels[k])
                labels[k].append(lab)
            key.append(index[k][lab])
        key = tuple(key)
        if key in cells:
            cell = ", ".join(f"{n}={row[k].strip()}" for k, n in enumerate(names))
            raise TableFormatError(f"line {lineno}: duplicate cell ({cell})")
        cells[key] = _parse_count(row[-1].strip(), lineno)
    if not cells:
        raise TableFormatError("no data rows")

    counts = np.zeros(tuple(len(lab) for lab in labels), dtype=np.int64)
    for key, value in cells.items():
        counts[key] = value
    return ContingencyTable(counts, tuple(names), tuple(tuple(lab) for lab in labels))


def read_dense_json(fh):
    try:
        doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise TableFormatError(f"invalid JSON: {exc}") from None
    missing = {"shape", "mode_names", "labels", "values"} - set(doc)
    if missing:
        raise TableFormatError(f"missing keys {sorted(missing)}")
    shape = tuple(int(n) for n in doc["shape"])
    values = doc["values"]
    if len(values) != int(np.prod(shape)):
        raise TableFormatError(f"{len(values)} values do not fill shape {shape}")
    if any(len(lab) != n for lab, n in zip(doc["labels"], shape)) or len(doc["labels"]) != len(shape):
        raise TableFormatError("ragged labels: label lists do not match the shape")
    arr = np.asarray(values, dtype=np.float64)
    if (arr < 0).any():
        raise TableFormatError("negative counts")
    if not np.array_equal(arr, np.rint(arr)):
        raise TableFormatError("counts must be integers")
    counts = arr.astype(np.int64).reshape(shape, order="F")
    return ContingencyTable(counts, tuple(doc["mode_names"]),
                            tuple(tuple(lab) for lab in doc["labels"]))


def write_long_csv(table, fh, include_zeros=True):
    """Write one row per cell, last mode varying fastest.

    Zero cells are written by default so every label survives a round trip.
    """
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(list(table.mode_names) + ["count"])
    for idx in np.ndindex(*table.shape):
        value = int(table.tensor[idx])
        if value == 0 and not include_zeros:
            continue
        writer.writerow([table.labels[k][i] for k, i in enumerate(idx)] + [value])


def write_dense_json(table, fh):
    doc = {
        "shape": list(table.shape),
        "mode_names": list(table.mode_names),
        "labels": [list(lab) for lab in table.labels],
        "values": [int(v) for v in table.tensor.reshape(-1, order="F")],
    }
    json.dump(doc, fh, indent=1)
    fh.write("\n")


def save_table(table, path, format=None):
    format = format or infer_format(path)
    if format == "long-csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            write_long_csv(table, fh)
    elif format == "dense-json":
        with open(path, "w", encoding="utf-8") as fh:
            write_dense_json(table, fh)
    else:
        raise TableFormatError(f"unknown format {format!r}; expected one of {FORMATS}")


def drop_zero_slices(table):
    """Remove categories whose slice sums to zero, repeating until none remain.

    Returns the filtered table and ``{mode_name: [dropped labels]}`` (only
    modes that lost something appear).
    """
    counts = table.tensor
    labels = [list(lab) for lab in table.labels]
    dropped = {}
    changed = True
    while changed:
        changed = False
        for axis in range(counts.ndim):
            others = tuple(k for k in range(counts.ndim) if k != axis)
            sums = counts.sum(axis=others) if others else counts
            keep = sums > 0
            if keep.all():
                continue
            if not keep.any():
                raise ValueError("table is empty after dropping zero slices")
            name = table.mode_names[axis]
            gone = [lab for lab, k in zip(labels[axis], keep) if not k]
            dropped.setdefault(name, []).extend(gone)
            labels[axis] = [lab for lab, k in zip(labels[axis], keep) if k]
            counts = np.compress(keep, counts, axis=axis)
            changed = True
    for name, gone in dropped.items():
        log.info("dropped zero slices of mode %s: %s", name, ", ".join(gone))
    filtered = ContingencyTable(counts, table.mode_names, tuple(tuple(lab) for lab in labels))
    return filtered, dropped


def fmt(value):
    return NUMBER_FORMAT.format(float(value))


def write_coordinates(path, labels, coords):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label"] + [f"c{k}" for k in range(1, coords.shape[1] + 1)])
        for lab, row in zip(labels, coords):
            writer.writerow([lab] + [fmt(v) for v in row])


def write_sigma(path, sigma):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["component", "sigma", "inertia"])
        for k, s in enumerate(sigma, start=1):
            writer.writerow([k, fmt(s), fmt(s * s)])


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _round_floats(obj):
    # 17 significant digits, matching the CSV outputs
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def write_report(path, report):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_round_floats(report), fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
