# --- emotion_data.py ---
"""
Loading, validating and describing emotion-labelled CSV corpora.

Files follow the shared-task release layout: a header row with a `text` column,
one 0/1 column per emotion and optional passthrough columns such as `id`.
"""

import csv
import io
import logging
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from constants import (
    EMOTION_LABELS,
    ENGLISH_LANGUAGE,
    ID_COLUMN,
    MIN_SCHEMA_LABELS,
    PASSTHROUGH_COLUMNS,
    SPLITS,
    TEXT_COLUMN,
)
from errors import (
    IoError,
    MissingTextColumn,
    ParseError,
    SchemaMismatch,
    TooFewEmotionColumns,
    UnknownColumn,
)
from utils import safe_read_file, safe_write_file

logger = logging.getLogger(__name__)


def _norm_column(name: str) -> str:
    return name.strip().lower()


# --- Domain Types ---
@dataclass(frozen=True)
class LabelSchema:
    """Ordered emotion labels used by one language's files."""

    language: str
    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) not in (MIN_SCHEMA_LABELS, len(EMOTION_LABELS)):
            raise SchemaMismatch(f"schema must have 5 or 6 labels, got {len(labels)}")
        unknown = [lab for lab in labels if lab not in EMOTION_LABELS]
        if unknown:
            raise SchemaMismatch(f"unknown emotion labels: {unknown}")
        if len(set(labels)) != len(labels):
            raise SchemaMismatch(f"duplicate labels in schema: {labels}")
        canonical = tuple(lab for lab in EMOTION_LABELS if lab in labels)
        if canonical != labels:
            raise SchemaMismatch(f"labels {labels} are not in canonical order {canonical}")

    def __len__(self) -> int:
        return len(self.labels)

    def same_labels(self, other: "LabelSchema") -> bool:
        return self.labels == other.labels

    @classmethod
    def default(cls, language: str) -> "LabelSchema":
        """Six-label schema, or the five-label English one."""
        if language == ENGLISH_LANGUAGE:
            return cls(language, tuple(lab for lab in EMOTION_LABELS if lab != "disgust"))
        return cls(language, EMOTION_LABELS)


@dataclass(frozen=True)
class Sample:
    text: str
    labels: tuple[int, ...]
    key: str
    extras: tuple[tuple[str, str], ...] = ()  # Passthrough columns, header order


@dataclass(frozen=True)
class Dataset:
    schema: LabelSchema
    samples: tuple[Sample, ...]
    split: str
    columns: tuple[str, ...] = field(default=())  # Original header, for saving

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ParseError(0, "split", f"unknown split tag '{self.split}'")
        object.__setattr__(self, "samples", tuple(self.samples))
        width = len(self.schema)
        for i, sample in enumerate(self.samples, start=1):
            if len(sample.labels) != width or any(v not in (0, 1) for v in sample.labels):
                raise SchemaMismatch(f"sample {i} labels {sample.labels} do not fit schema {self.schema.labels}")
        if not self.columns:
            object.__setattr__(self, "columns", (ID_COLUMN, TEXT_COLUMN, *self.schema.labels))

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def keys(self) -> list[str]:
        return [s.key for s in self.samples]

    @property
    def texts(self) -> list[str]:
        return [s.text for s in self.samples]

    def label_matrix(self) -> list[tuple[int, ...]]:
        return [s.labels for s in self.samples]


@dataclass(frozen=True)
class SplitStats:
    """Sample counts per split and positive counts per label."""

    labels: tuple[str, ...]
    split_counts: dict[str, int]
    label_positives: dict[str, dict[str, int]]  # split -> label -> positives

    @property
    def total(self) -> int:
        return sum(self.split_counts.values())

    def positives(self, label: str) -> int:
        return sum(per_label.get(label, 0) for per_label in self.label_positives.values())


# --- Operations ---
def infer_schema(header_columns: Sequence[str], language: str) -> LabelSchema:
    """
    Builds a LabelSchema from a CSV header.

    Args:
        header_columns: Column names as they appear in the file.
        language: Language code attached to the schema.

    Returns:
        Schema whose labels are the recognized emotion columns in canonical order.

    Raises:
        MissingTextColumn, UnknownColumn, TooFewEmotionColumns
    """
    normalized = [_norm_column(c) for c in header_columns]
    if TEXT_COLUMN not in normalized:
        raise MissingTextColumn(f"header {list(header_columns)} has no '{TEXT_COLUMN}' column")
    for raw, col in zip(header_columns, normalized):
        if col != TEXT_COLUMN and col not in EMOTION_LABELS and col not in PASSTHROUGH_COLUMNS:
            raise UnknownColumn(raw)
    present = [lab for lab in EMOTION_LABELS if lab in normalized]
    if len(present) < MIN_SCHEMA_LABELS:
        raise TooFewEmotionColumns(
            f"need at least {MIN_SCHEMA_LABELS} emotion columns, found {len(present)}: {present}"
        )
    return LabelSchema(language, tuple(present))


def read_header(path: Path) -> list[str]:
    """Returns the header row of a CSV file."""
    content, error = safe_read_file(Path(path))
    if error:
        raise IoError(error)
    reader = csv.reader(io.StringIO(content))
    try:
        return next(reader)
    except StopIteration:
        raise ParseError(0, "*", f"{path} is empty") from None


def split_from_path(path: Path, default: str) -> str:
    """Split tag named by a file such as hin_dev.csv, else the default."""
    words = re.split(r"[^a-z]+", Path(path).stem.lower())
    found = [split for split in SPLITS if split in words]
    return found[0] if len(found) == 1 else default


def load_dataset(path: Path, schema: LabelSchema, split: str) -> Dataset:
    """
    Reads one CSV split, validating every row against the schema.

    Without an `id` column a sample is keyed "<split>-<row>" by its 0-based data row,
    so keys from different splits never collide in one embedding store.
    """
    path = Path(path)
    content, error = safe_read_file(path)
    if error:
        raise IoError(error)
    rows = csv.reader(io.StringIO(content))
    try:
        header = next(rows)
    except StopIteration:
        raise ParseError(0, "*", f"{path} has no header row") from None
    except csv.Error as e:
        raise ParseError(0, "*", str(e)) from e

    normalized = [_norm_column(c) for c in header]
    if len(set(normalized)) != len(normalized):
        raise SchemaMismatch(f"{path}: duplicate columns in header {header}")
    if TEXT_COLUMN not in normalized:
        raise MissingTextColumn(f"{path}: header has no '{TEXT_COLUMN}' column")
    emotion_cols = tuple(lab for lab in EMOTION_LABELS if lab in normalized)
    if emotion_cols != schema.labels:
        raise SchemaMismatch(f"{path}: emotion columns {emotion_cols} do not match schema {schema.labels}")

    text_idx = normalized.index(TEXT_COLUMN)
    label_idx = [normalized.index(lab) for lab in schema.labels]
    extra_idx = [i for i, col in enumerate(normalized) if col != TEXT_COLUMN and col not in EMOTION_LABELS]
    id_idx = normalized.index(ID_COLUMN) if ID_COLUMN in normalized else None

    samples = []
    seen_keys = set()
    row_no = 0
    try:
        for row_no, cells in enumerate(rows, start=1):
            if not cells:
                continue  # Blank line
            if len(cells) != len(header):
                raise ParseError(row_no, "*", f"expected {len(header)} cells, got {len(cells)}")
            text = cells[text_idx]
            if not text.strip():
                raise ParseError(row_no, header[text_idx], "empty text")
            labels = []
            for col_i in label_idx:
                cell = cells[col_i].strip()
                if cell not in ("0", "1"):
                    raise ParseError(row_no, header[col_i], f"label must be 0 or 1, got '{cells[col_i]}'")
                labels.append(int(cell))
            key = cells[id_idx] if id_idx is not None else f"{split}-{row_no - 1}"
            if key in seen_keys:
                raise ParseError(row_no, ID_COLUMN, f"duplicate key '{key}'")
            seen_keys.add(key)
            extras = tuple((header[i], cells[i]) for i in extra_idx)
            samples.append(Sample(text=text, labels=tuple(labels), key=key, extras=extras))
    except csv.Error as e:
        raise ParseError(row_no + 1, "*", str(e)) from e

    logger.debug("Loaded %d %s samples from %s", len(samples), split, path)
    return Dataset(schema=schema, samples=tuple(samples), split=split, columns=tuple(header))


def dataset_to_csv(dataset: Dataset) -> str:
    """Serializes a Dataset in RFC 4180 form using its original column order."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(dataset.columns)
    normalized = [_norm_column(c) for c in dataset.columns]
    for sample in dataset.samples:
        by_label = dict(zip(dataset.schema.labels, sample.labels))
        extras = {_norm_column(name): value for name, value in sample.extras}
        row = []
        for col in normalized:
            if col == TEXT_COLUMN:
                row.append(sample.text)
            elif col in by_label:
                row.append(str(by_label[col]))
            elif col == ID_COLUMN and col not in extras:
                row.append(sample.key)
            else:
                row.append(extras.get(col, ""))
        writer.writerow(row)
    return buffer.getvalue()


def save_dataset(dataset: Dataset, path: Path) -> None:
    ok, error = safe_write_file(Path(path), dataset_to_csv(dataset))
    if not ok:
        raise IoError(error)


def load_split_files(paths: dict[str, Path], language: str) -> dict[str, Dataset]:
    """
    Loads train/dev/test files that must share one schema.

    The schema is inferred from the first file's header; later files must match it.
    """
    datasets = {}
    schema = None
    for split, path in paths.items():
        if path is None:
            continue
        header_schema = infer_schema(read_header(path), language)
        if schema is None:
            schema = header_schema
        elif not schema.same_labels(header_schema):
            raise SchemaMismatch(
                f"{split} file {path} has labels {header_schema.labels}, expected {schema.labels}"
            )
        datasets[split] = load_dataset(path, schema, split)
    return datasets


def split_stats(datasets: Iterable[Dataset]) -> SplitStats:
    """Counts samples per split and positives per label across datasets sharing one schema."""
    datasets = list(datasets)
    labels = datasets[0].schema.labels if datasets else EMOTION_LABELS
    split_counts = {split: 0 for split in SPLITS}
    positives = {split: {lab: 0 for lab in labels} for split in SPLITS}
    for ds in datasets:
        if ds.schema.labels != labels:
            raise SchemaMismatch(f"cannot combine schemas {labels} and {ds.schema.labels}")
        split_counts[ds.split] += len(ds)
        for sample in ds.samples:
            for lab, value in zip(labels, sample.labels):
                positives[ds.split][lab] += value
    return SplitStats(labels=tuple(labels), split_counts=split_counts, label_positives=positives)
