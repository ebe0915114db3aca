"""Bit-accurate I2C master and slave engines over an abstract open-drain bus.

Both lines are wired-AND: any driver pulling low wins, releases float high
through the pull-ups.  The master is the only clock source (no stretching,
no arbitration); slaves are purely edge-reactive, so the same engines run
against the ideal bus (fast, quarter-bit event stepping) and against the
sampled analog link in the end-to-end simulator.

Each bit period is four quarters: data set while SCL is low (q0), SCL high
(q1, q2 - slaves sample on the rising edge, the master samples mid-high),
SCL low again (q3).  START and STOP are SDA edges during an SCL-high
quarter.  A transaction with ``stop_after=False`` chains into the next one
with a repeated START instead of STOP+START.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Generator, Iterable, Sequence

import numpy as np

from .modem import H, L, LogicTimeline

__all__ = [
    "RESERVED_ADDRESSES",
    "MAX_CLOCK_HZ",
    "QUARTERS_PER_BIT",
    "ProtocolError",
    "resolve_bus",
    "Transaction",
    "SlaveModel",
    "SlaveEngine",
    "MasterEngine",
    "run_ideal_bus",
    "master_run",
    "parse_script",
    "script_line",
]

# 0000xxx and 1111xxx are special-purpose in the addressing scheme
RESERVED_ADDRESSES = frozenset(range(0x00, 0x08)) | frozenset(range(0x78, 0x80))
MAX_CLOCK_HZ = 400_000
QUARTERS_PER_BIT = 4


class ProtocolError(ValueError):
    """Invalid transaction, address, or clock for the bus."""


def resolve_bus(drivers: Iterable[bool]) -> int:
    """Wired-AND line level: L if any driver pulls low, else H."""
    return L if any(drivers) else H


@dataclass(frozen=True)
class Transaction:
    """One addressed transfer; also the decoded result record.

    For writes ``payload`` is the data to send; for reads it is empty on
    input and carries the received bytes on the result.  ``acks`` records
    the observed acknowledge bits (address first).  ``stop_after=False``
    chains the next transaction with a repeated START.
    """

    address: int
    direction: str  # "write" | "read"
    payload: bytes = b""
    read_length: int = 0
    stop_after: bool = True
    acks: tuple[bool, ...] = ()
    completed: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.address <= 0x7F:
            raise ProtocolError(f"address {self.address:#x} is not 7-bit")
        if self.direction not in ("write", "read"):
            raise ProtocolError(f"direction must be 'write' or 'read', got {self.direction!r}")
        if self.direction == "read" and self.read_length < 1 and not self.completed:
            raise ProtocolError("read transactions need read_length >= 1")
        object.__setattr__(self, "payload", bytes(self.payload))

    @staticmethod
    def write(address: int, payload: bytes, stop_after: bool = True) -> "Transaction":
        return Transaction(address, "write", bytes(payload), stop_after=stop_after)

    @staticmethod
    def read(address: int, length: int, stop_after: bool = True) -> "Transaction":
        return Transaction(address, "read", read_length=length, stop_after=stop_after)

    def to_dict(self) -> dict:
        return {
            "address": self.address,
            "direction": self.direction,
            "payload": list(self.payload),
            "read_length": self.read_length,
            "acks": list(self.acks),
            "completed": self.completed,
        }


@dataclass
class SlaveModel:
    """Register-file slave in the style of a pointer-addressed sensor.

    A write sets the pointer register with its first byte; following bytes
    fill the addressed register MSB-first.  Reads stream the register at
    the current pointer MSB-first, wrapping within the register so long
    reads repeat it.  Register width defaults to 16 bits, configurable per
    register.
    """

    address: int
    registers: dict[int, int] = field(default_factory=dict)
    pointer: int = 0
    widths: dict[int, int] = field(default_factory=dict)
    default_width: int = 2

    def __post_init__(self) -> None:
        if not 0 <= self.address <= 0x7F:
            raise ProtocolError(f"slave address {self.address:#x} is not 7-bit")

    def width(self, reg: int) -> int:
        return self.widths.get(reg, self.default_width)

    def read_stream_byte(self, k: int) -> int:
        w = self.width(self.pointer)
        value = self.registers.get(self.pointer, 0)
        shift = 8 * (w - 1 - (k % w))
        return (value >> shift) & 0xFF

    def commit_write(self, data: Sequence[int]) -> None:
        """Apply a full register word written MSB-first."""
        w = self.width(self.pointer)
        value = 0
        for b in data[:w]:
            value = (value << 8) | (b & 0xFF)
        self.registers[self.pointer] = value & ((1 << (8 * w)) - 1)


class SlaveEngine:
    """Edge-driven protocol front end around a :class:`SlaveModel`.

    Call ``on_scl_rise(sda)`` / ``on_scl_fall()`` on clock edges and
    ``on_sda_edge(sda, scl)`` on data-line edges; read back ``sda_drive``
    (True = pulling low).  A START inside a byte resets the engine to
    address hunting, a STOP returns it to idle.
    """

    _IDLE, _ADDR, _ACK_ADDR, _WDATA, _ACK_WDATA, _RDATA, _ACK_RDATA, _BACKOFF = range(8)

    def __init__(self, model: SlaveModel):
        self.model = model
        self.sda_drive = False
        self._state = self._IDLE
        self._shift = 0
        self._nbits = 0
        self._rw = 0
        self._rk = 0
        self._wcount = 0
        self._wbuf: list[int] = []
        self._master_acked = False
        self._byte = 0

    # -- line events ------------------------------------------------------

    def on_sda_edge(self, sda: int, scl: int) -> None:
        if scl != H:
            return
        if sda == L:
            self._start()
        else:
            self._stop()

    def on_scl_rise(self, sda: int) -> None:
        s = self._state
        if s in (self._ADDR, self._WDATA):
            self._shift = ((self._shift << 1) | (1 if sda else 0)) & 0xFF
            self._nbits += 1
        elif s == self._RDATA:
            self._nbits += 1
        elif s == self._ACK_RDATA:
            self._master_acked = sda == L

    def on_scl_fall(self) -> None:
        s = self._state
        if s == self._ADDR:
            if self._nbits == 8:
                if (self._shift >> 1) == self.model.address:
                    self._rw = self._shift & 1
                    self._state = self._ACK_ADDR
                    self.sda_drive = True
                    self._rk = 0
                    self._wcount = 0
                    self._wbuf = []
                else:
                    self._state = self._BACKOFF
        elif s == self._ACK_ADDR:
            self.sda_drive = False
            if self._rw:
                self._enter_rdata()
            else:
                self._state = self._WDATA
                self._shift = 0
                self._nbits = 0
        elif s == self._WDATA:
            if self._nbits == 8:
                self._accept_write_byte(self._shift)
                self._state = self._ACK_WDATA
                self.sda_drive = True
        elif s == self._ACK_WDATA:
            self.sda_drive = False
            self._state = self._WDATA
            self._shift = 0
            self._nbits = 0
        elif s == self._RDATA:
            if self._nbits < 8:
                self.sda_drive = ((self._byte >> (7 - self._nbits)) & 1) == 0
            else:
                self.sda_drive = False
                self._state = self._ACK_RDATA
        elif s == self._ACK_RDATA:
            if self._master_acked:
                self._enter_rdata()
            else:
                self._state = self._BACKOFF
                self.sda_drive = False

    # -- internals --------------------------------------------------------

    def _start(self) -> None:
        self._flush_write()
        self._state = self._ADDR
        self._shift = 0
        self._nbits = 0
        self.sda_drive = False

    def _stop(self) -> None:
        self._flush_write()
        self._state = self._IDLE
        self.sda_drive = False

    def _enter_rdata(self) -> None:
        self._byte = self.model.read_stream_byte(self._rk)
        self._rk += 1
        self._state = self._RDATA
        self._nbits = 0
        self.sda_drive = ((self._byte >> 7) & 1) == 0

    def _accept_write_byte(self, byte: int) -> None:
        if self._wcount == 0:
            self.model.pointer = byte
        else:
            self._wbuf.append(byte)
            if len(self._wbuf) == self.model.width(self.model.pointer):
                self.model.commit_write(self._wbuf)
                self._wbuf = []
        self._wcount += 1

    def _flush_write(self) -> None:
        # a partial register word at STOP/START is discarded
        self._wbuf = []
        self._wcount = 0


class MasterEngine:
    """Clock-owning side: compiles transactions into quarter-bit intents.

    ``generator()`` yields (scl_intent, sda_intent) pairs, one per quarter
    bit, and receives the resolved (scl, sda) of that same quarter back.
    Completed transactions (with observed ACKs and read data) accumulate in
    ``results``.  One engine instance runs one program, once.
    """

    def __init__(
        self,
        transactions: Transaction | Sequence[Transaction],
        clock_hz: float,
        reserved: frozenset[int] = RESERVED_ADDRESSES,
        lead_in_bits: int = 8,
        gap_bits: int = 1,
    ):
        if isinstance(transactions, Transaction):
            transactions = [transactions]
        if not transactions:
            raise ProtocolError("no transactions to run")
        if clock_hz <= 0 or clock_hz > MAX_CLOCK_HZ:
            raise ProtocolError(
                f"clock {clock_hz:.4g} Hz outside (0, {MAX_CLOCK_HZ}] (fast mode ceiling)"
            )
        for t in transactions:
            if t.address in reserved:
                raise ProtocolError(f"address {t.address:#04x} is reserved")
        self.transactions = list(transactions)
        self.clock_hz = float(clock_hz)
        self.lead_in_bits = lead_in_bits
        self.gap_bits = gap_bits
        self.results: list[Transaction] = []

    def quarters_upper_bound(self) -> int:
        """Static bound on program length; aborts only shorten a run."""
        total = (self.lead_in_bits + 2) * QUARTERS_PER_BIT
        for t in self.transactions:
            nbytes = len(t.payload) if t.direction == "write" else t.read_length
            total += 4  # START or repeated START
            total += (1 + nbytes) * 9 * QUARTERS_PER_BIT
            total += 4 + self.gap_bits * QUARTERS_PER_BIT  # STOP + gap
        return total

    # quarter helpers: each yields intents and receives resolved lines

    @staticmethod
    def _idle(quarters: int):
        for _ in range(quarters):
            yield (H, H)

    @staticmethod
    def _start_cond():
        yield (H, H)
        yield (H, L)  # SDA falls while SCL high
        yield (L, L)

    @staticmethod
    def _restart_cond():
        yield (L, H)
        yield (H, H)
        yield (H, L)
        yield (L, L)

    @staticmethod
    def _stop_cond():
        yield (L, L)
        yield (H, L)
        yield (H, H)  # SDA rises while SCL high
        yield (H, H)

    @staticmethod
    def _byte_tx(byte: int):
        """Clock out one byte, release for the ACK slot; returns ack bool."""
        for bit in range(7, -1, -1):
            v = (byte >> bit) & 1
            yield (L, v)
            yield (H, v)
            yield (H, v)
            yield (L, v)
        yield (L, H)
        yield (H, H)
        res = yield (H, H)
        yield (L, H)
        return res[1] == L

    @staticmethod
    def _byte_rx(ack: bool):
        """Clock in one byte, then drive the ACK slot; returns the byte."""
        value = 0
        for _ in range(8):
            yield (L, H)
            yield (H, H)
            res = yield (H, H)
            yield (L, H)
            value = (value << 1) | (1 if res[1] else 0)
        a = L if ack else H
        yield (L, a)
        yield (H, a)
        yield (H, a)
        yield (L, a)
        return value

    def generator(self) -> Generator[tuple[int, int], tuple[int, int], None]:
        yield from self._idle(self.lead_in_bits * QUARTERS_PER_BIT)
        stopped = True
        for t in self.transactions:
            if stopped:
                yield from self._start_cond()
            else:
                yield from self._restart_cond()
            addr_byte = (t.address << 1) | (1 if t.direction == "read" else 0)
            acks = [(yield from self._byte_tx(addr_byte))]
            data = bytearray()
            completed = acks[0]
            if completed and t.direction == "write":
                for b in t.payload:
                    a = yield from self._byte_tx(b)
                    acks.append(a)
                    if not a:
                        completed = False
                        break
            elif completed:
                for k in range(t.read_length):
                    v = yield from self._byte_rx(ack=k < t.read_length - 1)
                    data.append(v)
            stop_now = t.stop_after or not completed
            if stop_now:
                yield from self._stop_cond()
                yield from self._idle(self.gap_bits * QUARTERS_PER_BIT)
            stopped = stop_now
            self.results.append(
                replace(
                    t,
                    payload=bytes(data) if t.direction == "read" else t.payload,
                    acks=tuple(acks),
                    completed=completed,
                )
            )
        yield from self._idle(2 * QUARTERS_PER_BIT)


def run_ideal_bus(
    master: MasterEngine,
    slaves: Sequence[SlaveEngine] = (),
    collect: bool = False,
) -> list[tuple[int, int]] | None:
    """Step master and slaves quarter by quarter over an ideal wired-AND bus.

    Returns the resolved (scl, sda) per quarter when ``collect`` is set.
    """
    gen = master.generator()
    quarters: list[tuple[int, int]] | None = [] if collect else None
    scl_prev, sda_prev = H, H
    intents = next(gen)
    while True:
        scl_i, sda_i = intents
        scl = L if scl_i == L else H
        sda = L if sda_i == L or any(s.sda_drive for s in slaves) else H
        if scl == H and scl_prev == H and sda != sda_prev:
            for s in slaves:
                s.on_sda_edge(sda, scl)
        elif scl != scl_prev:
            if scl == H:
                for s in slaves:
                    s.on_scl_rise(sda)
            else:
                for s in slaves:
                    s.on_scl_fall()
        if quarters is not None:
            quarters.append((scl, sda))
        scl_prev, sda_prev = scl, sda
        try:
            intents = gen.send((scl, sda))
        except StopIteration:
            break
    return quarters


def master_run(
    transactions: Transaction | Sequence[Transaction],
    clock_hz: float,
    slaves: Sequence[SlaveModel] = (),
    sample_rate: float | None = None,
) -> tuple[LogicTimeline, LogicTimeline, list[Transaction]]:
    """Run transactions over the ideal bus and expand sampled timelines.

    The effective sample rate is rounded to a whole number of samples per
    quarter bit, at least 50 per bit.
    """
    master = MasterEngine(transactions, clock_hz)
    engines = [SlaveEngine(m) for m in slaves]
    quarters = run_ideal_bus(master, engines, collect=True)
    assert quarters is not None
    if sample_rate is None:
        sample_rate = 64.0 * clock_hz
    spq = max(13, round(sample_rate / (QUARTERS_PER_BIT * clock_hz)))
    rate_eff = QUARTERS_PER_BIT * clock_hz * spq
    arr = np.asarray(quarters, dtype=np.uint8)
    scl = LogicTimeline(rate_eff, np.repeat(arr[:, 0], spq))
    sda = LogicTimeline(rate_eff, np.repeat(arr[:, 1], spq))
    return scl, sda, master.results


def script_line(t: Transaction) -> str:
    if t.direction == "write":
        return f"W 0x{t.address:02x} " + " ".join(f"0x{b:02x}" for b in t.payload)
    return f"R 0x{t.address:02x} {t.read_length}"


def parse_script(text: str) -> list[Transaction]:
    """Parse a transaction script: ``W <addr> <bytes...>`` / ``R <addr> <count>``.

    Numbers accept 0x-prefixed hex or decimal; ``#`` starts a comment.
    Errors carry the 1-based line number.
    """
    out: list[Transaction] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        op = toks[0].upper()
        try:
            if op == "W":
                if len(toks) < 2:
                    raise ValueError("W needs an address")
                addr = int(toks[1], 0)
                data = bytes(int(x, 0) for x in toks[2:])
                out.append(Transaction.write(addr, data))
            elif op == "R":
                if len(toks) != 3:
                    raise ValueError("R needs an address and a count")
                out.append(Transaction.read(int(toks[1], 0), int(toks[2], 0)))
            else:
                raise ValueError(f"unknown op {toks[0]!r}")
        except (ValueError, ProtocolError) as exc:
            raise ProtocolError(f"script line {lineno}: {exc}") from None
    return out
