"""Result files: atomic writes, provenance headers and history persistence."""

from __future__ import annotations

import logging
import os
import tempfile
from pathlib import Path
from typing import Any

import pandas as pd
import yaml

from evoact import __version__
from evoact.errors import OutputExistsError
from evoact.evolve.history import SearchHistory, meta_path

logger = logging.getLogger(__name__)


def provenance(config: dict[str, Any] | None = None, **extra: Any) -> dict[str, Any]:
    """Version plus the resolved configuration that produced a result."""
    data: dict[str, Any] = {"evoact_version": __version__}
    data.update(extra)
    if config is not None:
        data["config"] = config
    return data


def provenance_header(meta: dict[str, Any]) -> str:
    """YAML block with every line prefixed by "# "."""
    text = yaml.safe_dump(meta, default_flow_style=False, sort_keys=False)
    return "".join(f"# {line}\n" for line in text.splitlines())


def write_atomic(path: Path, text: str, overwrite: bool = False) -> Path:
    """Write through a temporary file in the same directory, then rename.

    Raises:
        OutputExistsError: if `path` exists and `overwrite` is False
    """
    if path.exists() and not overwrite:
        raise OutputExistsError(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    logger.debug("Wrote %s", path)
    return path


def write_csv(path: Path, frame: pd.DataFrame, meta: dict[str, Any] | None = None, overwrite: bool = False) -> Path:
    body = frame.to_csv(index=False, lineterminator="\n")
    header = provenance_header(meta) if meta is not None else ""
    return write_atomic(path, header + body, overwrite)


def read_csv(path: Path) -> pd.DataFrame:
    """Read a CSV written by write_csv, skipping the provenance header."""
    return pd.read_csv(path, comment="#")


def write_text(path: Path, text: str, meta: dict[str, Any] | None = None, overwrite: bool = False) -> Path:
    header = provenance_header(meta) + "\n" if meta is not None else ""
    return write_atomic(path, header + text, overwrite)


def write_history(
    path: Path,
    history: SearchHistory,
    meta: dict[str, Any] | None = None,
    overwrite: bool = False,
) -> Path:
    """Write history JSONL plus a `<stem>.meta.yaml` sidecar.

    The JSONL holds exactly one evaluation per line; provenance lives in the sidecar.
    """
    if not overwrite:
        for target in (path, meta_path(path)):
            if target.exists():
                raise OutputExistsError(target)
    sidecar = dict(meta or provenance())
    sidecar["population_size"] = history.population_size
    sidecar["evaluations"] = len(history)
    write_atomic(meta_path(path), yaml.safe_dump(sidecar, default_flow_style=False, sort_keys=False), overwrite=True)
    return write_atomic(path, history.to_jsonl(), overwrite=True)

