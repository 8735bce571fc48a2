"""Coordinator/worker evaluation service for asynchronous evolution."""

from evoact.distrib.coordinator import Coordinator, serve
from evoact.distrib.protocol import (
    PROTOCOL_VERSION,
    Heartbeat,
    Hello,
    Result,
    Shutdown,
    Task,
    decode,
    encode,
    parse_address,
)
from evoact.distrib.worker import Worker, work

__all__ = [
    "Coordinator",
    "Heartbeat",
    "Hello",
    "PROTOCOL_VERSION",
    "Result",
    "Shutdown",
    "Task",
    "Worker",
    "decode",
    "encode",
    "parse_address",
    "serve",
    "work",
]
