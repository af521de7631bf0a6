"""Column-store observation tables with exact empirical frequencies and conditioning.

A table is declared by a JSON metadata file (column names, range kinds, layer
tags) and populated from CSV or from the ``BITP1`` binary format.  All
frequencies are exact integer-count ratios (``fractions.Fraction``); floats
appear only at reporting boundaries.  Conditioning produces index views over
shared immutable column storage, so repeated filtering is cheap and row
identities are stable.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EvaluationError, LoadError, UndefinedMeasureError

RANGE_KINDS = ("real", "integer", "categorical")

BINARY_MAGIC = b"BITP1"


@dataclass(frozen=True)
class Observable:
    """A named column: its range kind, the layer it belongs to, and its slot there."""

    name: str
    range_kind: str
    layer_tag: str
    index_in_layer: int
    categories: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.range_kind not in RANGE_KINDS:
            raise LoadError(f"observable '{self.name}': unknown range_kind '{self.range_kind}'")
        if self.index_in_layer < 0:
            raise LoadError(f"observable '{self.name}': index_in_layer must be nonnegative")
        if self.range_kind == "categorical":
            if not self.categories:
                raise LoadError(f"observable '{self.name}': categorical column needs declared categories")
            if len(set(self.categories)) != len(self.categories):
                raise LoadError(f"observable '{self.name}': duplicate categories")
        elif self.categories is not None:
            raise LoadError(f"observable '{self.name}': categories only allowed on categorical columns")

    @property
    def is_numeric(self) -> bool:
        return self.range_kind != "categorical"


class Observation:
    """One row, decoded: numeric values as float/int, categoricals as their labels."""

    __slots__ = ("values", "_positions")

    def __init__(self, values: tuple, positions: Mapping[str, int]):
        self.values = values
        self._positions = positions

    def value(self, name: str):
        try:
            return self.values[self._positions[name]]
        except KeyError:
            raise EvaluationError(f"observation has no observable '{name}'") from None

    def __len__(self) -> int:
        return len(self.values)


class Dataset:
    """An indexed family of observations over shared column storage.

    ``indices`` holds the original row ids of this view, in original order.
    Conditioning returns a new view; it never copies column data.  Instances
    are immutable after construction and safe to share across threads; the
    per-view sorted-column cache tolerates concurrent insert-or-read (a lost
    race only recomputes the same array).
    """

    def __init__(
        self,
        observables: Sequence[Observable],
        columns: Mapping[str, np.ndarray],
        indices: np.ndarray | None = None,
        provenance: str = "",
    ):
        names = [o.name for o in observables]
        if len(set(names)) != len(names):
            raise LoadError("duplicate observable names in table")
        self.observables: tuple[Observable, ...] = tuple(observables)
        self._columns = dict(columns)
        for name in names:
            if name not in self._columns:
                raise LoadError(f"missing column data for observable '{name}'")
        n_total = len(next(iter(self._columns.values()))) if self._columns else 0
        if indices is None:
            indices = np.arange(n_total, dtype=np.int64)
        self.indices: np.ndarray = np.asarray(indices, dtype=np.int64)
        self.indices.setflags(write=False)
        self.provenance = provenance
        self._by_name = {o.name: o for o in self.observables}
        self._col_pos = {o.name: i for i, o in enumerate(self.observables)}
        self._sorted_cache: dict[str, np.ndarray] = {}

    # -- structure ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.indices)

    def observable(self, name: str) -> Observable:
        try:
            return self._by_name[name]
        except KeyError:
            raise EvaluationError(f"no observable named '{name}'") from None

    def column_position(self, name: str) -> int:
        self.observable(name)
        return self._col_pos[name]

    def layer(self, layer_tag: str) -> tuple[Observable, ...]:
        return tuple(o for o in self.observables if o.layer_tag == layer_tag)

    def has_row(self, row_index: int) -> bool:
        pos = np.searchsorted(self.indices, row_index)
        return pos < len(self.indices) and self.indices[pos] == row_index

    # -- values ------------------------------------------------------------

    def values(self, name: str) -> np.ndarray:
        """Column restricted to this view, aligned with ``indices``."""
        return self._columns[self.observable(name).name][self.indices]

    def sorted_values(self, name: str) -> np.ndarray:
        """Ascending copy of :meth:`values`, cached per view."""
        cached = self._sorted_cache.get(name)
        if cached is None:
            cached = np.sort(self.values(name), kind="stable")
            cached.setflags(write=False)
            self._sorted_cache[name] = cached
        return cached

    def raw_value(self, row_index: int, name: str):
        """Stored (encoded) value at an original row index."""
        return self._columns[name][row_index]

    def decoded_value(self, row_index: int, name: str):
        obs = self.observable(name)
        stored = self._columns[name][row_index]
        if obs.range_kind == "categorical":
            return obs.categories[int(stored)]
        if obs.range_kind == "integer":
            return int(stored)
        return float(stored)

    def observation(self, row_index: int) -> Observation:
        if not self.has_row(row_index):
            raise EvaluationError(f"row {row_index} is not in this dataset view")
        vals = tuple(self.decoded_value(row_index, o.name) for o in self.observables)
        return Observation(vals, self._col_pos)

    def encode(self, name: str, value):
        """Translate a user-facing value into the stored representation."""
        obs = self.observable(name)
        if obs.range_kind == "categorical":
            if not isinstance(value, str):
                raise EvaluationError(f"observable '{name}' is categorical; got non-string {value!r}")
            try:
                return obs.categories.index(value)
            except ValueError:
                raise EvaluationError(f"'{value}' is not a declared category of '{name}'") from None
        return value

    def _subview(self, mask: np.ndarray) -> "Dataset":
        sub = Dataset.__new__(Dataset)
        sub.observables = self.observables
        sub._columns = self._columns
        sub.indices = self.indices[mask]
        sub.indices.setflags(write=False)
        sub.provenance = self.provenance
        sub._by_name = self._by_name
        sub._col_pos = self._col_pos
        sub._sorted_cache = {}
        return sub


# -- empirical measure -------------------------------------------------------


def frequency(dataset: Dataset, formula) -> Fraction:
    """Fraction of rows of ``dataset`` satisfying ``formula`` (exact count ratio)."""
    n = len(dataset)
    if n == 0:
        raise UndefinedMeasureError("frequency is undefined on an empty dataset")
    count = int(np.count_nonzero(formula.mask(dataset)))
    return Fraction(count, n)


def condition(dataset: Dataset, formula) -> Dataset:
    """Sub-family of rows satisfying ``formula``; original row ids retained."""
    return dataset._subview(formula.mask(dataset))


def conditional(dataset: Dataset, psi, phi) -> Fraction | None:
    """Frequency of ``psi`` among rows satisfying ``phi``; ``None`` when that set is empty."""
    restricted = condition(dataset, phi)
    if len(restricted) == 0:
        return None
    return frequency(restricted, psi)


# -- metadata ----------------------------------------------------------------


def _observable_from_obj(obj, pos: int) -> Observable:
    if not isinstance(obj, dict):
        raise LoadError(f"observable entry {pos} is not an object")
    try:
        name = obj["name"]
        range_kind = obj["range_kind"]
        layer_tag = obj["layer_tag"]
        index_in_layer = obj["index_in_layer"]
    except KeyError as exc:
        raise LoadError(f"observable entry {pos} is missing key {exc}") from None
    if not isinstance(name, str) or not name:
        raise LoadError(f"observable entry {pos}: name must be a nonempty string")
    if not isinstance(index_in_layer, int) or isinstance(index_in_layer, bool):
        raise LoadError(f"observable '{name}': index_in_layer must be an integer")
    categories = obj.get("categories")
    if categories is not None:
        if not isinstance(categories, list) or not all(isinstance(c, str) for c in categories):
            raise LoadError(f"observable '{name}': categories must be a list of strings")
        categories = tuple(categories)
    return Observable(name, range_kind, layer_tag, index_in_layer, categories)


def read_metadata(metadata_path) -> tuple[Observable, ...]:
    path = Path(metadata_path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise LoadError(f"cannot read metadata {path}: {exc}") from exc
    if not isinstance(doc, dict) or "observables" not in doc:
        raise LoadError(f"metadata {path}: expected an object with an 'observables' list")
    entries = doc["observables"]
    if not isinstance(entries, list) or not entries:
        raise LoadError(f"metadata {path}: 'observables' must be a nonempty list")
    return tuple(_observable_from_obj(obj, i) for i, obj in enumerate(entries))


def write_metadata(observables: Sequence[Observable], metadata_path) -> None:
    entries = []
    for o in observables:
        e = {
            "name": o.name,
            "range_kind": o.range_kind,
            "layer_tag": o.layer_tag,
            "index_in_layer": o.index_in_layer,
        }
        if o.categories is not None:
            e["categories"] = list(o.categories)
        entries.append(e)
    Path(metadata_path).write_text(json.dumps({"observables": entries}, indent=1, sort_keys=True) + "\n")


# -- cell parsing --------------------------------------------------------------


def _parse_real(text: str, row: int, name: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise LoadError(f"row {row}, column '{name}': '{text}' is not a real number") from None
    if not math.isfinite(v):
        raise LoadError(f"row {row}, column '{name}': non-finite value '{text}'")
    return v


def _parse_integer(text: str, row: int, name: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise LoadError(f"row {row}, column '{name}': '{text}' is not an integer") from None


def load_table(metadata_path, data_path, provenance: str | None = None) -> Dataset:
    """Load a table: JSON metadata plus CSV (or ``BITP1`` binary) data.

    Rows keep file order.  Every cell must parse under its column's declared
    range kind; violations raise :class:`LoadError` naming the row and column.
    """
    observables = read_metadata(metadata_path)
    data_path = Path(data_path)
    try:
        blob = data_path.read_bytes()
    except OSError as exc:
        raise LoadError(f"cannot read data file {data_path}: {exc}") from exc
    if blob.startswith(BINARY_MAGIC):
        columns = _columns_from_binary(blob, observables, data_path)
    else:
        columns = _columns_from_csv(blob, observables, data_path)
    prov = provenance if provenance is not None else str(data_path)
    return Dataset(observables, columns, provenance=prov)


def _columns_from_csv(blob: bytes, observables, data_path) -> dict[str, np.ndarray]:
    try:
        text = blob.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise LoadError(f"{data_path}: not valid UTF-8 text: {exc}") from exc
    width = len(observables)
    cells: list[list] = [[] for _ in observables]
    for row_i, record in enumerate(csv.reader(text.splitlines())):
        if not record:
            continue
        if len(record) != width:
            raise LoadError(f"{data_path}: row {row_i}: expected {width} values, got {len(record)}")
        for j, (obs, cell) in enumerate(zip(observables, record)):
            cell = cell.strip()
            if obs.range_kind == "real":
                cells[j].append(_parse_real(cell, row_i, obs.name))
            elif obs.range_kind == "integer":
                cells[j].append(_parse_integer(cell, row_i, obs.name))
            else:
                if cell not in obs.categories:
                    raise LoadError(
                        f"{data_path}: row {row_i}, column '{obs.name}': "
                        f"'{cell}' is not a declared category"
                    )
                cells[j].append(obs.categories.index(cell))
    return _finalize_columns(cells, observables)


def _columns_from_binary(blob: bytes, observables, data_path) -> dict[str, np.ndarray]:
    payload = blob[len(BINARY_MAGIC):]
    width = len(observables)
    if len(payload) % 4 != 0:
        raise LoadError(f"{data_path}: binary payload is not a whole number of 32-bit floats")
    n_vals = len(payload) // 4
    if n_vals % width != 0:
        raise LoadError(f"{data_path}: {n_vals} values do not fill rows of width {width}")
    flat = np.frombuffer(payload, dtype="<f4")
    grid = flat.reshape(n_vals // width, width)
    columns: dict[str, np.ndarray] = {}
    for j, obs in enumerate(observables):
        col = grid[:, j].astype(np.float64)
        if obs.range_kind == "real":
            if not np.all(np.isfinite(col)):
                row = int(np.flatnonzero(~np.isfinite(col))[0])
                raise LoadError(f"{data_path}: row {row}, column '{obs.name}': non-finite value")
            # keep the file's float32 values as float32: exact, half the memory
            columns[obs.name] = grid[:, j].copy()
        elif obs.range_kind == "integer":
            rounded = np.rint(col)
            if not np.array_equal(rounded, col):
                row = int(np.flatnonzero(rounded != col)[0])
                raise LoadError(f"{data_path}: row {row}, column '{obs.name}': non-integer value")
            columns[obs.name] = rounded.astype(np.int64)
        else:
            rounded = np.rint(col)
            bad = (rounded != col) | (rounded < 0) | (rounded >= len(obs.categories))
            if np.any(bad):
                row = int(np.flatnonzero(bad)[0])
                raise LoadError(
                    f"{data_path}: row {row}, column '{obs.name}': "
                    f"'{col[row]}' is not a declared category index"
                )
            columns[obs.name] = rounded.astype(np.int32)
    for name, col in columns.items():
        col.setflags(write=False)
    return columns


def _finalize_columns(cells: list[list], observables) -> dict[str, np.ndarray]:
    columns = {}
    for obs, data in zip(observables, cells):
        if obs.range_kind == "real":
            arr = np.asarray(data, dtype=np.float64)
        elif obs.range_kind == "integer":
            arr = np.asarray(data, dtype=np.int64)
        else:
            arr = np.asarray(data, dtype=np.int32)
        arr.setflags(write=False)
        columns[obs.name] = arr
    return columns


# -- writers -------------------------------------------------------------------


def _format_cell(obs: Observable, stored) -> str:
    if obs.range_kind == "categorical":
        return obs.categories[int(stored)]
    if obs.range_kind == "integer":
        return str(int(stored))
    return repr(float(stored))


def write_csv(dataset: Dataset, data_path) -> None:
    with open(data_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row_index in dataset.indices:
            writer.writerow(
                _format_cell(o, dataset.raw_value(int(row_index), o.name))
                for o in dataset.observables
            )


def write_binary(dataset: Dataset, data_path) -> None:
    cols = [dataset.values(o.name).astype("<f4") for o in dataset.observables]
    grid = np.column_stack(cols)
    with open(data_path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(grid.tobytes(order="C"))


def dataset_from_rows(
    observables: Sequence[Observable],
    rows: Iterable[Sequence],
    provenance: str = "",
) -> Dataset:
    """Build a table from decoded row tuples (labels for categoricals)."""
    observables = tuple(observables)
    cells: list[list] = [[] for _ in observables]
    for row_i, row in enumerate(rows):
        if len(row) != len(observables):
            raise LoadError(f"row {row_i}: expected {len(observables)} values, got {len(row)}")
        for j, (obs, value) in enumerate(zip(observables, row)):
            if obs.range_kind == "categorical":
                if value not in obs.categories:
                    raise LoadError(f"row {row_i}, column '{obs.name}': '{value}' is not a declared category")
                cells[j].append(obs.categories.index(value))
            elif obs.range_kind == "integer":
                cells[j].append(int(value))
            else:
                v = float(value)
                if not math.isfinite(v):
                    raise LoadError(f"row {row_i}, column '{obs.name}': non-finite value")
                cells[j].append(v)
    return Dataset(observables, _finalize_columns(cells, observables), provenance=provenance)
