"""
Storage backends for experiment reports, and the JSON codec for collections.

A backend is set up from a report, receives its rows one by one through
store_row(), and writes the file on close(). Output is a pure function of
the report contents: floats are printed with 15 significant digits in CSV,
JSON keeps a fixed key order, and the runtime is never written.
"""

import csv
import io
import json
import math
import os
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from .collections import (LaminarViolation, MartingaleCollection, SetFamily, SparseCollection,
                          verify_laminar)
from .errors import DomainError
from .space import MeasSet, build_space


def _plain(value: Any) -> Any:
    """Turn numpy scalars and fractions into JSON-friendly Python values"""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating, Fraction)):
        return float(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    return value


def format_cell(value: Any) -> str:
    """CSV text of one report value"""
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".15g")
    if isinstance(value, list):
        return ";".join(format_cell(v) for v in value)
    return str(value)


class ReportStorage(ABC):
    """Abstract base class for report storage backends"""

    def __init__(self, path: Optional[str] = None):
        """
        Args:
            path: file to write on close(). With None the rendered text is
                  only kept in `self.text`.
        """
        self.path = path
        self.text: Optional[str] = None
        self.columns: List[str] = []
        self.stored = 0

    def setup(self, report):
        """Called by write_report() before any row is stored"""
        self.columns = list(report.columns)
        self.stored = 0

    @abstractmethod
    def store_row(self, row: Sequence[Any]) -> bool:
        """Store one report row. Returns True if successful."""
        pass

    @abstractmethod
    def describe(self) -> str:
        pass

    @abstractmethod
    def render(self) -> str:
        """The complete file contents for the rows stored so far"""
        pass

    def close(self):
        self.text = self.render()
        if self.path:
            parent = os.path.dirname(self.path)
            if parent:
                os.makedirs(parent, exist_ok=True)
            with open(self.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(self.text)


class CsvReportStorage(ReportStorage):
    """Comma separated, header row first, LF line endings"""

    def setup(self, report):
        super().setup(report)
        self._buffer = io.StringIO()
        self._writer = csv.writer(self._buffer, lineterminator="\n")
        self._writer.writerow(self.columns)

    def store_row(self, row):
        if len(row) != len(self.columns):
            return False
        self._writer.writerow([format_cell(v) for v in row])
        self.stored += 1
        return True

    def render(self):
        return self._buffer.getvalue()

    def describe(self):
        return f"CSV report storage ({self.path or 'in memory'})"


class JsonReportStorage(ReportStorage):
    """
    One JSON object: experiment, seed, params, columns, rows (as objects
    keyed by column), summary. Keys keep this order.
    """

    def setup(self, report):
        super().setup(report)
        self._head = {
            "experiment": report.experiment,
            "seed": _plain(report.seed),
            "params": _plain(report.params),
            "columns": self.columns,
        }
        self._summary = _plain(report.summary)
        self._rows: List[Dict[str, Any]] = []

    def store_row(self, row):
        if len(row) != len(self.columns):
            return False
        self._rows.append({c: _plain(v) for c, v in zip(self.columns, row)})
        self.stored += 1
        return True

    def render(self):
        data = dict(self._head, rows=self._rows, summary=self._summary)
        return json.dumps(data, indent=2, ensure_ascii=False) + "\n"

    def describe(self):
        return f"JSON report storage ({self.path or 'in memory'})"


BACKENDS = {
    "csv": CsvReportStorage,
    "json": JsonReportStorage,
}


def storage_for(format: str, path: Optional[str] = None) -> ReportStorage:
    if format not in BACKENDS:
        raise DomainError(f"Unknown report format '{format}'. Expected one of {', '.join(BACKENDS)}")
    return BACKENDS[format](path)


def write_report(report, storage: ReportStorage) -> ReportStorage:
    """Store every row of `report` with `storage` and close it"""
    storage.setup(report)
    for row in report.rows:
        if not storage.store_row(row):
            raise DomainError(f"{storage.describe()} rejected row {row!r}")
    storage.close()
    return storage


# Collections

CollectionLike = Union[SetFamily, MartingaleCollection, SparseCollection]


def collection_to_json(collection: SetFamily, portions: bool = False,
                       metadata: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    {space: {d, L}, sets: [[[start, stop], ...], ...]} plus, for sparse
    collections, gamma as an exact "num/den" string and optionally the
    portions as [[cell, "num/den"], ...] per set.
    """
    space = collection.space
    data: Dict[str, Any] = {
        "space": {"d": space.dimension, "L": space.depth},
        "sets": [s.ranges() for s in collection],
    }
    if isinstance(collection, SparseCollection):
        data["gamma"] = str(collection.gamma)
        if portions:
            data["portions"] = [
                [[int(c), str(m)] for c, m in sorted(collection.portions[s].items())]
                for s in collection
            ]
    if metadata:
        data["metadata"] = _plain(metadata)
    return data


def collection_from_json(data: Dict[str, Any]) -> CollectionLike:
    """
    Inverse of collection_to_json. Laminar families come back as
    collections (sparse when gamma is present), anything else as a
    SetFamily. Stored portions must match the ones recomputed from gamma.
    """
    try:
        space = build_space(int(data["space"]["d"]), int(data["space"]["L"]))
        sets = [MeasSet.from_ranges(space, r) for r in data["sets"]]
    except (KeyError, TypeError) as e:
        raise DomainError(f"Malformed collection JSON: {e}") from e

    checked = verify_laminar(sets, space)
    if isinstance(checked, LaminarViolation):
        if "gamma" in data:
            raise DomainError(f"Sparse collection JSON is not laminar: {checked}")
        return SetFamily(sets, space)
    if "gamma" not in data:
        return checked
    collection = SparseCollection.from_collection(checked, Fraction(data["gamma"]))
    if "portions" in data:
        stored = {s: {int(c): Fraction(m) for c, m in p} for s, p in zip(sets, data["portions"])}
        if stored != collection.portions:
            raise DomainError("Stored portions differ from the ones certified by gamma")
    return collection


def dump_collection(collection: SetFamily, path: str, **kwargs) -> str:
    text = json.dumps(collection_to_json(collection, **kwargs), indent=2) + "\n"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return text


def load_collection(path: str) -> CollectionLike:
    """
    Read a collection written by dump_collection.

    Args:
        path: JSON file path

    Returns:
        SparseCollection when the file carries gamma, MartingaleCollection
        when it is laminar, SetFamily otherwise
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise DomainError(f"{path} is not valid JSON: {e}") from e
    return collection_from_json(data)


def shear_family_to_json(family, portions: bool = False) -> Dict[str, Any]:
    """A ShearRectangleFamily: its union collection plus slope and band metadata"""
    return collection_to_json(family.collection, portions, family.metadata())
