"""Worker: pulls candidates from a coordinator, trains them and reports fitness."""

from __future__ import annotations

import asyncio
import contextlib
import logging
import os
import socket
import time
from collections.abc import Callable

from evoact.config import DistribConfig, TrainSpec
from evoact.distrib.protocol import Heartbeat, Hello, Result, Shutdown, Task, decode, encode, parse_address
from evoact.errors import GraphStructureError, GraphSyntaxError, ProtocolError
from evoact.evolve.search import safe_fitness
from evoact.graph.grammar import parse
from evoact.graph.graph import ActivationGraph
from evoact.trainer.evaluation import fitness_compressed
from evoact.trainer.records import FitnessRecord

logger = logging.getLogger(__name__)

WorkerFitnessFn = Callable[[ActivationGraph, TrainSpec], "FitnessRecord | float"]


def default_worker_id() -> str:
    return f"{socket.gethostname()}-{os.getpid()}"


class Worker:
    """One connection-at-a-time evaluation loop.

    Args:
        address: coordinator "host:port"
        distrib: heartbeat interval and reconnect policy
        fitness_fn: defaults to compressed-schedule training
        worker_id: name reported in the hello message
    """

    def __init__(
        self,
        address: str,
        distrib: DistribConfig | None = None,
        fitness_fn: WorkerFitnessFn | None = None,
        worker_id: str | None = None,
    ):
        self.host, self.port = parse_address(address)
        self.distrib = distrib or DistribConfig()
        self.fitness_fn = fitness_fn or fitness_compressed
        self.worker_id = worker_id or default_worker_id()
        self.completed = 0
        self.shut_down = False

    async def run(self) -> int:
        """Work until shutdown or until the coordinator stays unreachable; returns tasks completed.

        Raises:
            ProtocolError: the coordinator rejected this worker (kind "rejected").
        """
        failures = 0
        while True:
            try:
                reader, writer = await asyncio.open_connection(self.host, self.port)
            except OSError as e:
                if not await self._backoff(failures, e):
                    return self.completed
                failures += 1
                continue

            failures = 0
            try:
                if await self._session(reader, writer):
                    self.shut_down = True
                    return self.completed
            except (ProtocolError, ConnectionError, asyncio.IncompleteReadError) as e:
                if isinstance(e, ProtocolError) and e.kind == "rejected":
                    raise
                logger.warning("Lost coordinator %s:%d: %s", self.host, self.port, e)
                if not await self._backoff(failures, e):
                    return self.completed
                failures += 1
            finally:
                writer.close()
                with contextlib.suppress(ConnectionError):
                    await writer.wait_closed()

    async def _backoff(self, failures: int, error: Exception) -> bool:
        if failures >= self.distrib.connect_retries:
            logger.error("Giving up on coordinator %s:%d after %d retries: %s", self.host, self.port, failures, error)
            return False
        delay = self.distrib.backoff_seconds * 2**failures
        logger.info("Coordinator unreachable (%s); retrying in %.2fs", error, delay)
        await asyncio.sleep(delay)
        return True

    async def _session(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> bool:
        """Serve one connection. True means the coordinator asked us to stop."""
        writer.write(encode(Hello(worker_id=self.worker_id)))
        await writer.drain()
        while True:
            line = await reader.readline()
            if not line:
                raise ConnectionError("coordinator closed the connection")
            message = decode(line)
            if isinstance(message, Shutdown):
                if message.rejected:
                    logger.error("Coordinator %s:%d rejected this worker: %s", self.host, self.port, message.reason)
                    raise ProtocolError(message.reason, kind="rejected")
                logger.info("Coordinator shut us down: %s", message.reason)
                return True
            if not isinstance(message, Task):
                raise ProtocolError(f"unexpected {message.kind} message", kind="unexpected")
            record = await self._train(message, writer)
            writer.write(
                encode(
                    Result(
                        task_id=message.task_id,
                        fitness=record.fitness,
                        status=record.status.value,
                        runtime_seconds=record.runtime_seconds,
                    )
                )
            )
            await writer.drain()
            self.completed += 1

    async def _train(self, task: Task, writer: asyncio.StreamWriter) -> FitnessRecord:
        """Evaluate a task in a thread, heartbeating until it finishes."""
        start = time.perf_counter()
        try:
            graph = parse(task.expr)
        except (GraphSyntaxError, GraphStructureError) as e:
            logger.warning("Task %d has an unparseable expression: %s", task.task_id, e)
            return FitnessRecord.unstable()
        spec = TrainSpec.model_validate(task.spec).model_copy(update={"seed": task.seed})

        training = asyncio.create_task(asyncio.to_thread(safe_fitness, self.fitness_fn, graph, spec))
        heartbeat = encode(Heartbeat(worker_id=self.worker_id, task_id=task.task_id))
        try:
            while True:
                done, _ = await asyncio.wait({training}, timeout=self.distrib.heartbeat_interval)
                if done:
                    break
                writer.write(heartbeat)
                await writer.drain()
        finally:
            # the thread itself cannot be interrupted; stop waiting on it
            training.cancel()
        record = training.result()
        logger.info(
            "Task %d %s: fitness=%.4f status=%s (%.1fs)",
            task.task_id,
            task.expr,
            record.fitness,
            record.status.value,
            time.perf_counter() - start,
        )
        return record


async def work(
    address: str,
    distrib: DistribConfig | None = None,
    fitness_fn: WorkerFitnessFn | None = None,
    worker_id: str | None = None,
) -> int:
    """Run a worker until the coordinator shuts it down; returns tasks completed."""
    return await Worker(address, distrib, fitness_fn, worker_id).run()
