"""Newline-delimited JSON messages exchanged by the coordinator and its workers.

One JSON object per line, UTF-8. Every message has a `kind`:

    hello      worker -> coordinator, first line of every connection
    task       coordinator -> worker, one candidate to train
    heartbeat  worker -> coordinator, while a task is running
    result     worker -> coordinator, fitness of a finished task
    shutdown   coordinator -> worker, no more work (or connection rejected)
"""

from __future__ import annotations

from typing import Annotated, Any, Literal

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from evoact.errors import ProtocolError

PROTOCOL_VERSION = "1"


class Message(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Hello(Message):
    kind: Literal["hello"] = "hello"
    worker_id: str = Field(min_length=1)
    protocol_version: str = PROTOCOL_VERSION


class Task(Message):
    kind: Literal["task"] = "task"
    task_id: int = Field(ge=0)
    expr: str
    k: int = Field(ge=0)
    # TrainSpec in its JSON form; workers need no config of their own
    spec: dict[str, Any]
    seed: int = Field(ge=0)


class Result(Message):
    kind: Literal["result"] = "result"
    task_id: int = Field(ge=0)
    fitness: float
    status: Literal["ok", "unstable"]
    runtime_seconds: float = Field(0.0, ge=0)


class Heartbeat(Message):
    kind: Literal["heartbeat"] = "heartbeat"
    worker_id: str
    task_id: int | None = None


class Shutdown(Message):
    kind: Literal["shutdown"] = "shutdown"
    reason: str = ""
    # the coordinator refused this worker; it should not reconnect
    rejected: bool = False


WireMessage = Annotated[Hello | Task | Result | Heartbeat | Shutdown, Field(discriminator="kind")]

_ADAPTER: TypeAdapter[WireMessage] = TypeAdapter(WireMessage)


def encode(message: Message) -> bytes:
    """Serialize one message as a single line."""
    return message.model_dump_json().encode("utf-8") + b"\n"


def decode(line: bytes | str) -> Hello | Task | Result | Heartbeat | Shutdown:
    """Parse one line; anything that is not a known message raises ProtocolError."""
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ProtocolError(f"message is not UTF-8: {e}", kind="malformed") from e
    line = line.strip()
    if not line:
        raise ProtocolError("empty message", kind="malformed")
    try:
        return _ADAPTER.validate_json(line)
    except ValidationError as e:
        raise ProtocolError(f"malformed message: {e.errors()[0]['msg']}", kind="malformed") from e


def parse_address(address: str) -> tuple[str, int]:
    """Split "host:port"; an empty host means 127.0.0.1."""
    host, sep, port = address.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"expected host:port, got {address!r}")
    number = int(port)
    if not 0 <= number <= 65535:
        raise ValueError(f"port out of range: {number}")
    return host or "127.0.0.1", number
