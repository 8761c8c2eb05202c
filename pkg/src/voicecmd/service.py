"""Wake-word command service: flag-gated session protocol over a local socket.

The session cycle: the engine sleeps behind a set flag and decodes
incoming audio against the wake grammar only. On a wake-word hit it
notifies the client and keeps sleeping until the client unsets the flag.
While listening, audio is decoded against the command grammar; the N-best
hypotheses are sent and the session enters a transient executing state
that only a flag-set acknowledgment leaves. The client owns confirmation
and execution; the service never auto-executes.

Wire protocol: UTF-8 lines. `AUDIO <nbytes>` is followed by exactly
nbytes of binary payload (WAV, or a CODEWORDS file in test mode); all
other messages are single lines of space-separated fields.
"""

from __future__ import annotations

import enum
import socket
import threading
from dataclasses import dataclass

from .errors import (BindFailure, NoPathSurvived, NoSpeechDetected,
                     ProtocolViolation, VoiceCmdError)


class Mode(enum.Enum):
    SLEEPING = "sleeping"
    LISTENING = "listening"
    EXECUTING = "executing"


@dataclass(frozen=True)
class SessionState:
    mode: Mode
    flag: bool                      # set = engine must sleep

    def __post_init__(self):
        if (self.mode is Mode.SLEEPING) != self.flag:
            raise ProtocolViolation(
                f"mode {self.mode.value} inconsistent with flag={self.flag}")

    @classmethod
    def initial(cls) -> "SessionState":
        return cls(mode=Mode.SLEEPING, flag=True)


@dataclass(frozen=True)
class ServiceMessage:
    kind: str
    args: tuple = ()

    def line(self) -> str:
        return " ".join((self.kind,) + tuple(str(a) for a in self.args))


def state_msg(mode: Mode) -> ServiceMessage:
    return ServiceMessage("STATE", (mode.value,))


def hyp_lines(result) -> list:
    return [ServiceMessage("HYP", (rank, f"{hyp.score:.6f}") + hyp.words)
            for rank, hyp in enumerate(result.nbest, start=1)]


def step(state: SessionState, event, engine,
         n_best: int | None = None) -> tuple:
    """Advance the session state machine by one client event.

    Events are ("HELLO",), ("AUDIO", payload), ("UNSET_FLAG",),
    ("SET_FLAG",). Returns (new state, messages to emit). Pure in
    (state, event, loaded models): replaying an event sequence reproduces
    the identical message trace.
    """
    kind = event[0]
    if kind == "HELLO":
        return state, [state_msg(state.mode)]

    if kind == "UNSET_FLAG":
        if state.mode is not Mode.SLEEPING:
            return state, [ServiceMessage(
                "ERROR", ("protocol", "UNSET_FLAG legal only while sleeping"))]
        new = SessionState(mode=Mode.LISTENING, flag=False)
        return new, [state_msg(new.mode)]

    if kind == "SET_FLAG":
        if state.mode is Mode.SLEEPING:
            return state, [ServiceMessage(
                "ERROR", ("protocol", "flag is already set"))]
        new = SessionState(mode=Mode.SLEEPING, flag=True)
        return new, [state_msg(new.mode)]

    if kind == "AUDIO":
        payload = event[1]
        if state.mode is Mode.SLEEPING:
            # Wake grammar only; non-wake audio is ignored while gated.
            try:
                name = engine.try_wake(payload)
            except VoiceCmdError as exc:
                return state, [ServiceMessage("ERROR", ("audio", exc))]
            if name is None:
                return state, []
            return state, [ServiceMessage("WAKE_DETECTED", (name,))]
        if state.mode is Mode.LISTENING:
            try:
                result = engine.recognize(payload, n_best)
            except (NoSpeechDetected, NoPathSurvived):
                return state, [ServiceMessage("NO_SPEECH")]
            except VoiceCmdError as exc:
                return state, [ServiceMessage("ERROR", ("decode", exc))]
            new = SessionState(mode=Mode.EXECUTING, flag=False)
            return new, hyp_lines(result) + [state_msg(new.mode)]
        return state, [ServiceMessage(
            "ERROR", ("busy", "awaiting SET_FLAG acknowledgment"))]

    return state, [ServiceMessage("ERROR", ("protocol", f"unknown message {kind}"))]


def run_session(reader, writer, engine, n_best: int | None = None) -> None:
    """Drive one client session over binary file-like streams."""
    state = SessionState.initial()

    def send(messages):
        for msg in messages:
            writer.write((msg.line() + "\n").encode("utf-8"))
        writer.flush()

    while True:
        line = reader.readline()
        if not line:
            return
        parts = line.decode("utf-8", errors="replace").strip().split(" ", 1)
        kind = parts[0]
        if not kind:
            continue
        if kind == "BYE":
            return
        if kind == "AUDIO":
            try:
                nbytes = int(parts[1])
            except (IndexError, ValueError):
                send([ServiceMessage("ERROR",
                                     ("protocol", "AUDIO needs a byte count"))])
                continue
            payload = reader.read(nbytes)
            if len(payload) < nbytes:
                return
            event = ("AUDIO", payload)
        elif kind in ("HELLO", "UNSET_FLAG", "SET_FLAG"):
            event = (kind,)
        else:
            event = (kind,)
        state, messages = step(state, event, engine, n_best)
        send(messages)


class CommandService:
    """Single-session TCP server around the step() state machine."""

    def __init__(self, engine, host: str = "127.0.0.1", port: int = 8747,
                 n_best: int | None = None):
        self.engine = engine
        self.host = host
        self.port = port
        self.n_best = n_best
        self._busy = threading.Lock()
        self._server: socket.socket | None = None
        self._shutdown = threading.Event()

    @property
    def address(self) -> tuple:
        return self._server.getsockname() if self._server else (self.host, self.port)

    def start(self) -> None:
        try:
            server = socket.create_server((self.host, self.port))
        except OSError as exc:
            raise BindFailure(
                f"cannot listen on {self.host}:{self.port}: {exc}") from exc
        server.settimeout(0.2)
        self._server = server

    def _handle(self, conn: socket.socket) -> None:
        with conn:
            reader = conn.makefile("rb")
            writer = conn.makefile("wb")
            if not self._busy.acquire(blocking=False):
                writer.write(b"ERROR busy another session is active\n")
                writer.flush()
                return
            try:
                run_session(reader, writer, self.engine, self.n_best)
            except (BrokenPipeError, ConnectionResetError):
                pass
            finally:
                self._busy.release()

    def serve_forever(self) -> None:
        if self._server is None:
            self.start()
        try:
            while not self._shutdown.is_set():
                try:
                    conn, _addr = self._server.accept()
                except socket.timeout:
                    continue
                thread = threading.Thread(target=self._handle, args=(conn,),
                                          daemon=True)
                thread.start()
        finally:
            self._server.close()

    def shutdown(self) -> None:
        self._shutdown.set()
