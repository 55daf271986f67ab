"""Tabular data files and metadata sidecars."""
import csv
import io
import logging
import os
import pathlib
import shutil
import tempfile
import typing
from dataclasses import dataclass
from dataclasses import field

import numpy as np
import yaml

from .const import SIDECAR_SUFFIX
from .const import TABLE_SUFFIX

_LOGGER: logging.Logger = logging.getLogger(__package__)


def format_value(value) -> str:
    """Shortest decimal text that reads back to the same number."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


@dataclass(frozen=True)
class Table:
    columns: typing.Tuple[str, ...]
    rows: typing.List[typing.Sequence]

    @classmethod
    def from_columns(cls, columns: typing.Dict[str, typing.Sequence]) -> "Table":
        names = tuple(columns)
        return cls(columns=names, rows=list(zip(*(columns[name] for name in names))))

    def column(self, name: str) -> typing.List:
        position = self.columns.index(name)
        return [row[position] for row in self.rows]

    def render(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(value) for value in row])
        return buffer.getvalue()


def plain(value):
    """Convert numpy scalars and containers to YAML-safe builtins."""
    if isinstance(value, dict):
        return {str(key): plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return [plain(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


@dataclass
class OutputBundle:
    """Everything one run writes: tables keyed by file stem plus a sidecar."""

    stem: str
    tables: typing.Dict[str, Table] = field(default_factory=dict)
    sidecar: dict = field(default_factory=dict)

    @property
    def table(self) -> Table:
        return self.tables[self.stem]

    def render(self) -> typing.Dict[str, str]:
        files = {
            f"{stem}{TABLE_SUFFIX}": table.render() for stem, table in self.tables.items()
        }
        files[f"{self.stem}{SIDECAR_SUFFIX}"] = yaml.safe_dump(
            plain(self.sidecar), sort_keys=False, default_flow_style=False
        )
        return files


def read_table(path) -> Table:
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        columns = tuple(next(reader))
        return Table(columns=columns, rows=[tuple(row) for row in reader])


def write_bundle(bundle: OutputBundle, directory) -> typing.List[pathlib.Path]:
    """Write every file of ``bundle`` under ``directory``, all or nothing.

    Files are rendered and written into a staging directory next to the target,
    then moved into place. On any failure the files already moved are removed
    and the error is raised.
    """
    files = bundle.render()
    directory = pathlib.Path(directory)
    directory.parent.mkdir(parents=True, exist_ok=True)
    created = not directory.exists()
    staging = pathlib.Path(
        tempfile.mkdtemp(prefix=f".{directory.name}-", dir=directory.parent)
    )
    written: typing.List[pathlib.Path] = []
    try:
        for name, text in files.items():
            (staging / name).write_text(text)
        directory.mkdir(exist_ok=True)
        for name in files:
            path = directory / name
            os.replace(staging / name, path)
            written.append(path)
    except OSError:
        _LOGGER.debug("Removing %d partially written files", len(written))
        for path in written:
            path.unlink()
        if created and directory.is_dir() and not any(directory.iterdir()):
            directory.rmdir()
        raise
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    for path in written:
        _LOGGER.info("Wrote %s", path)
    return written
