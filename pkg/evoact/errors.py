"""Exception hierarchy for evoact."""

from __future__ import annotations

from pathlib import Path


class EvoactError(Exception):
    """Base class for all evoact errors."""


class GraphSyntaxError(EvoactError):
    """Error while parsing an activation expression."""

    def __init__(self, message: str, offset: int, text: str = ""):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset
        self.text = text


class GraphStructureError(EvoactError):
    """An activation graph violates a structural invariant."""


class DatasetError(EvoactError):
    """Error while generating or ingesting a dataset."""

    def __init__(self, message: str, line: int | None = None, path: Path | None = None):
        location = ""
        if path is not None:
            location = f"{path}"
        if line is not None:
            location = f"{location}:{line}" if location else f"line {line}"
        super().__init__(f"{location}: {message}" if location else message)
        self.message = message
        self.line = line
        self.path = path


class ConfigError(EvoactError):
    """Invalid configuration file or values."""

    def __init__(self, message: str, path: Path | None = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class ProtocolError(EvoactError):
    """Malformed or incompatible coordinator/worker message."""

    def __init__(self, message: str, kind: str | None = None):
        super().__init__(message)
        self.kind = kind


class OutputExistsError(EvoactError):
    """Refusing to overwrite a complete result."""

    def __init__(self, path: Path):
        super().__init__(f"Output already exists: {path} (use --overwrite to replace it)")
        self.path = path


class UnknownBaselineError(EvoactError):
    """Requested baseline activation function does not exist."""

    def __init__(self, name: str, valid: list[str]):
        super().__init__(f"Unknown baseline: {name}. Valid names: {', '.join(valid)}")
        self.name = name
        self.valid = valid
