"""Coordinator: hands candidates to workers and runs asynchronous regularized evolution."""

from __future__ import annotations

import asyncio
import contextlib
import itertools
import logging
import time
from collections.abc import Callable
from dataclasses import dataclass

from evoact.config import DistribConfig, EvolutionConfig, SearchMode, TrainSpec
from evoact.distrib.protocol import (
    PROTOCOL_VERSION,
    Heartbeat,
    Hello,
    Message,
    Result,
    Shutdown,
    Task,
    decode,
    encode,
    parse_address,
)
from evoact.errors import ProtocolError
from evoact.evolve.history import Candidate, SearchHistory
from evoact.evolve.search import Proposal, RegularizedEvolution
from evoact.trainer.records import FitnessRecord, Status

logger = logging.getLogger(__name__)


@dataclass
class Assignment:
    """An issued task that has not produced a result yet.

    `worker` is None while the task waits to be reassigned.
    """

    proposal: Proposal
    worker: str | None
    deadline: float


class Coordinator:
    """Serves tasks over TCP until the evaluation budget is spent.

    All strategy state changes happen under one condition lock, so candidates
    are recorded in the order their results arrive.
    """

    def __init__(
        self,
        config: EvolutionConfig,
        spec: TrainSpec,
        distrib: DistribConfig | None = None,
        on_candidate: Callable[[Candidate], None] | None = None,
    ):
        self.config = config.model_copy(update={"mode": SearchMode.ASYNCHRONOUS})
        self.spec = spec
        self.distrib = distrib or DistribConfig()
        self.on_candidate = on_candidate
        self.strategy = RegularizedEvolution(self.config)
        self.outstanding: dict[int, Assignment] = {}
        self.discarded = 0
        self._next_task_id = 0
        self._worker_numbers = itertools.count()
        self._changed = asyncio.Condition()
        self._done = asyncio.Event()
        self._server: asyncio.Server | None = None
        self._writers: set[asyncio.StreamWriter] = set()

    @property
    def history(self) -> SearchHistory:
        return self.strategy.history

    @property
    def unissued(self) -> int:
        return self.config.budget - len(self.history) - len(self.outstanding)

    @property
    def address(self) -> tuple[str, int]:
        if self._server is None:
            raise RuntimeError("coordinator is not running")
        host, port = self._server.sockets[0].getsockname()[:2]
        return host, port

    async def start(self, bind: str | None = None) -> tuple[str, int]:
        """Start listening; port 0 picks a free port. Returns the bound address."""
        host, port = parse_address(bind or self.distrib.bind)
        self._server = await asyncio.start_server(self._handle, host, port)
        logger.info(
            "Coordinator listening on %s:%d (P=%d S=%d C=%d V=%.2f)",
            *self.address,
            self.config.population_size,
            self.config.sample_size,
            self.config.budget,
            self.config.threshold,
        )
        return self.address

    async def wait_finished(self) -> SearchHistory:
        await self._done.wait()
        return self.history

    async def close(self) -> None:
        """Stop accepting work and tell connected workers to shut down."""
        if self._server is None:
            return
        self._server.close()
        for writer in list(self._writers):
            with contextlib.suppress(ConnectionError, RuntimeError):
                writer.write(encode(Shutdown(reason="coordinator closing")))
            writer.close()
        await self._server.wait_closed()
        self._server = None

    # -- task bookkeeping -------------------------------------------------

    def _expire_overdue(self) -> None:
        now = time.monotonic()
        for task_id, assignment in self.outstanding.items():
            if assignment.worker is not None and assignment.deadline < now:
                logger.warning("Task %d missed its deadline on %s; reassigning", task_id, assignment.worker)
                assignment.worker = None

    def _task_message(self, task_id: int, proposal: Proposal) -> Task:
        return Task(
            task_id=task_id,
            expr=str(proposal.graph),
            k=proposal.graph.param_count,
            spec=self.spec.model_dump(mode="json"),
            seed=self.spec.seed,
        )

    async def _next_task(self, worker: str) -> Task | None:
        """Block until there is work for `worker`; None once the budget is spent."""
        async with self._changed:
            while True:
                if self.strategy.finished:
                    return None
                self._expire_overdue()
                deadline = time.monotonic() + self.distrib.task_deadline
                orphan = next((tid for tid, a in self.outstanding.items() if a.worker is None), None)
                if orphan is not None:
                    assignment = self.outstanding[orphan]
                    assignment.worker = worker
                    assignment.deadline = deadline
                    logger.info("Reassigned task %d to %s", orphan, worker)
                    return self._task_message(orphan, assignment.proposal)
                if self.unissued > 0:
                    task_id = self._next_task_id
                    self._next_task_id += 1
                    proposal = self.strategy.propose()
                    self.outstanding[task_id] = Assignment(proposal, worker, deadline)
                    logger.debug("Issued task %d to %s: %s", task_id, worker, proposal.graph)
                    return self._task_message(task_id, proposal)
                # everything is issued; wait for a completion or a failure to reassign
                with contextlib.suppress(TimeoutError):
                    await asyncio.wait_for(self._changed.wait(), timeout=self.distrib.heartbeat_interval)

    async def _heartbeat(self, worker: str, message: Heartbeat) -> None:
        async with self._changed:
            assignment = self.outstanding.get(message.task_id) if message.task_id is not None else None
            if assignment is not None and assignment.worker == worker:
                assignment.deadline = time.monotonic() + self.distrib.task_deadline

    async def _complete(self, worker: str, result: Result) -> None:
        async with self._changed:
            if result.task_id >= self._next_task_id:
                raise ProtocolError(f"result for unknown task {result.task_id}", kind="unknown-task")
            assignment = self.outstanding.pop(result.task_id, None)
            if assignment is None:
                self.discarded += 1
                logger.info("Discarding duplicate result for task %d from %s", result.task_id, worker)
                return
            record = FitnessRecord(
                fitness=result.fitness,
                status=Status(result.status),
                runtime_seconds=result.runtime_seconds,
            )
            candidate = self.strategy.record(assignment.proposal, record)
            if self.on_candidate is not None:
                self.on_candidate(candidate)
            if self.strategy.finished:
                logger.info("Budget of %d evaluations spent", self.config.budget)
                self._done.set()
            self._changed.notify_all()

    async def _release(self, worker: str) -> None:
        """Put the tasks of a lost worker back up for grabs."""
        async with self._changed:
            for task_id, assignment in self.outstanding.items():
                if assignment.worker == worker:
                    logger.warning("Worker %s lost with task %d outstanding; reassigning", worker, task_id)
                    assignment.worker = None
            self._changed.notify_all()

    # -- connections ------------------------------------------------------

    async def _send(self, writer: asyncio.StreamWriter, message: Message) -> None:
        writer.write(encode(message))
        await writer.drain()

    async def _read(self, reader: asyncio.StreamReader):
        line = await reader.readline()
        if not line:
            raise ConnectionError("worker closed the connection")
        return decode(line)

    async def _handle(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        self._writers.add(writer)
        worker: str | None = None
        try:
            hello = await self._read(reader)
            if not isinstance(hello, Hello):
                raise ProtocolError(f"expected hello, got {hello.kind}", kind="unexpected")
            if hello.protocol_version != PROTOCOL_VERSION:
                logger.warning(
                    "Rejecting %s: protocol version %s, expected %s",
                    hello.worker_id,
                    hello.protocol_version,
                    PROTOCOL_VERSION,
                )
                await self._send(
                    writer,
                    Shutdown(
                        reason=f"protocol version {hello.protocol_version} rejected, {PROTOCOL_VERSION} required",
                        rejected=True,
                    ),
                )
                return
            worker = f"{hello.worker_id}#{next(self._worker_numbers)}"
            logger.info("Worker %s connected", worker)

            while True:
                task = await self._next_task(worker)
                if task is None:
                    await self._send(writer, Shutdown(reason="budget exhausted"))
                    return
                await self._send(writer, task)
                while True:
                    message = await self._read(reader)
                    if isinstance(message, Heartbeat):
                        await self._heartbeat(worker, message)
                    elif isinstance(message, Result):
                        await self._complete(worker, message)
                        break
                    else:
                        raise ProtocolError(f"unexpected {message.kind} message", kind="unexpected")
        except ProtocolError as e:
            logger.warning("Dropping connection from %s: %s", worker or "unidentified worker", e)
        except (ConnectionError, asyncio.IncompleteReadError) as e:
            logger.info("Connection from %s ended: %s", worker or "unidentified worker", e)
        finally:
            if worker is not None:
                await self._release(worker)
            self._writers.discard(writer)
            writer.close()
            with contextlib.suppress(ConnectionError):
                await writer.wait_closed()


def serve(
    config: EvolutionConfig,
    spec: TrainSpec,
    distrib: DistribConfig | None = None,
    bind: str | None = None,
    on_candidate: Callable[[Candidate], None] | None = None,
) -> SearchHistory:
    """Run a coordinator until C results are recorded and return the history."""

    async def run() -> SearchHistory:
        coordinator = Coordinator(config, spec, distrib, on_candidate=on_candidate)
        await coordinator.start(bind)
        try:
            return await coordinator.wait_finished()
        finally:
            await coordinator.close()

    return asyncio.run(run())
