"""Cycle-accurate update engines for the three CAM architectures.

Every engine owns a CAM array plus the matching erase store and produces an
:class:`UpdateTrace` per full-table update.  Traces carry exact cycle counts,
phase spans and (optionally) a per-cycle event log; states and schedules are
computed with vectorized passes that are order-equivalent to the per-cycle
semantics because each CAM column is touched exactly once per phase.

s1 (traditional)
    One word per two cycles: read the per-unit erase RAM and clear the old
    cell, then store the new value in both erase RAM and CAM cell.  Beats are
    fetched from the bus on demand (discrete access); the next burst request
    is issued one cycle before the current beat is fully consumed, so an
    ideal bus gives exactly 2N cycles and a calibrated bus adds only the
    per-burst overhead.

s2 (centralized erase RAM, bit-sliced)
    Phase E: each arriving beat is copied into its erase-RAM row while the
    old row contents (read-before-write) clear k words in the same cycle.
    Phase W: after the last erase, one row per cycle writes k new words.
    Ideal total = 2 * beats.

s3 (+ horizontal partitioning)
    The erase pass reads the old table through the P-wide port, one wide row
    per cycle, concurrently with beat arrival; a word group is written in the
    earliest cycle after the erase pass in which all its P beats have landed,
    at most one group per cycle.  Ideal total = beats + 1; the write backlog
    accumulated during the erase pass drains at a net (P-1)/P groups per
    cycle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .bus import IDEAL_BUS, BusModel, StallSequence, stream_schedule
from .erase_store import CentralEraseRam, HPartEraseRam, PerUnitEraseBank
from .geometry import RCU_SLOTS, CamGeometry
from .rcu import RcamArray


class EngineError(ValueError):
    """Raised for payload/geometry/bus mismatches."""


class TraceEvent(NamedTuple):
    cycle: int
    kind: str  # "beat" | "erase" | "write" | "erase_row" | "write_row" | "stall"
    arg: int | None


_EVENT_ARG_NAME = {
    "beat": "beat",
    "erase": "word",
    "write": "word",
    "erase_row": "row",
    "write_row": "row",
    "stall": None,
}


@dataclass
class UpdateTrace:
    """Cycle-level outcome of one full-table update."""

    architecture: str
    depth_n: int
    word_width_w: int
    total_cycles: int
    bus_read_cycles: int
    stall_cycles: int  # total_cycles minus the ideal-bus total
    erase_span: tuple[int, int]
    write_span: tuple[int, int]
    catch_up_cycles: int | None = None
    events: list[TraceEvent] | None = None

    def __post_init__(self) -> None:
        for first, last in (self.erase_span, self.write_span):
            if not (0 <= first <= last < self.total_cycles):
                raise EngineError(
                    f"span ({first}, {last}) outside [0, {self.total_cycles})")

    def summary(self) -> dict:
        return {
            "architecture": self.architecture,
            "depth_n": self.depth_n,
            "word_width_w": self.word_width_w,
            "total_cycles": self.total_cycles,
            "bus_read_cycles": self.bus_read_cycles,
            "stall_cycles": self.stall_cycles,
            "erase_span": list(self.erase_span),
            "write_span": list(self.write_span),
            "catch_up_cycles": self.catch_up_cycles,
        }

    def to_jsonl(self) -> str:
        """Line-delimited records: one summary line, then one line per event."""
        lines = [json.dumps({"kind": "trace_summary", **self.summary()})]
        for ev in self.events or ():
            rec: dict = {"cycle": int(ev.cycle), "kind": ev.kind}
            name = _EVENT_ARG_NAME[ev.kind]
            if name is not None:
                rec[name] = int(ev.arg)
            lines.append(json.dumps(rec))
        return "\n".join(lines) + "\n"


def _as_payload(geometry: CamGeometry, payload) -> np.ndarray:
    arr = np.asarray(payload, dtype=np.uint64)
    if arr.ndim != 1 or arr.size != geometry.depth_n:
        raise EngineError(
            f"payload must hold {geometry.depth_n} words, got shape {arr.shape}")
    if arr.size and int(arr.max()) > geometry.word_mask:
        raise EngineError(f"payload word exceeds {geometry.word_width_w} bits")
    return arr.copy()


class _EngineBase:
    architecture = ""

    def __init__(self, geometry: CamGeometry, bus: BusModel = IDEAL_BUS,
                 record_events: bool = True):
        if geometry.architecture != self.architecture:
            raise EngineError(
                f"geometry is for {geometry.architecture!r}, engine is "
                f"{self.architecture!r}")
        if bus.bus_width_b != geometry.bus_width_b:
            raise EngineError(
                f"bus width {bus.bus_width_b} != geometry bus width "
                f"{geometry.bus_width_b}")
        self.geometry = geometry
        self.bus = bus
        self.record_events = record_events
        self.cam = RcamArray(geometry)
        self.search_cycles = 0
        self.updates_completed = 0

    # Searches are pure reads; one cycle is accounted per key.  They must not
    # run while an update is in flight except from a probe callback.
    def search(self, key: int) -> np.ndarray:
        self._check_key(key)
        self.search_cycles += 1
        return self.cam.search(key)

    def search_batch(self, keys) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.uint64)
        self.search_cycles += keys.size
        return self.cam.search_batch(keys)

    def _check_key(self, key: int) -> None:
        if not 0 <= key <= self.geometry.word_mask:
            raise EngineError(
                f"key {key} does not fit {self.geometry.word_width_w} bits")

    def ideal_total_cycles(self) -> int:
        raise NotImplementedError

    def update(self, payload, probe: Callable | None = None) -> UpdateTrace:
        raise NotImplementedError


class S1Engine(_EngineBase):
    """Traditional design: per-unit erase RAMs, two cycles per word."""

    architecture = "s1"

    def __init__(self, geometry: CamGeometry, bus: BusModel = IDEAL_BUS,
                 record_events: bool = True, prefetch_one_beat: bool = False):
        super().__init__(geometry, bus, record_events)
        self.eram = PerUnitEraseBank(geometry)
        # Sensitivity knob: request the next beat when consumption of the
        # current one starts, hiding burst overhead behind the 2*(B/W)-cycle
        # consumption instead of paying it between bursts.
        self.prefetch_one_beat = prefetch_one_beat

    def ideal_total_cycles(self) -> int:
        return 2 * self.geometry.depth_n

    def _beat_starts(self) -> tuple[np.ndarray, np.ndarray]:
        g = self.geometry
        consume = 2 * g.words_per_bus_beat
        stalls = StallSequence(self.bus.burst_overhead_cycles).take(g.beat_count)
        if self.prefetch_one_beat:
            steps = np.maximum(consume, 1 + stalls[1:])
        else:
            steps = consume + stalls[1:]
        starts = np.empty(g.beat_count, dtype=np.int64)
        starts[0] = stalls[0]
        if g.beat_count > 1:
            starts[1:] = stalls[0] + np.cumsum(steps)
        return starts, stalls

    def update(self, payload, probe: Callable | None = None) -> UpdateTrace:
        g = self.geometry
        payload = _as_payload(g, payload)
        starts, stalls = self._beat_starts()
        consume = 2 * g.words_per_bus_beat
        total = int(starts[-1]) + consume

        old_words = self.eram.stored_words()
        self.cam.apply_full_table(old_words, 0)   # erase stage of every word
        self.eram.store_words(payload)
        self.cam.apply_full_table(payload, 1)     # write stage of every word

        events = None
        if self.record_events:
            events = []
            wb = g.words_per_bus_beat
            prev_end = 0
            for b in range(g.beat_count):
                s = int(starts[b])
                events.extend(TraceEvent(c, "stall", None)
                              for c in range(prev_end, s))
                events.append(TraceEvent(s, "beat", b))
                base = b * wb
                for o in range(wb):
                    events.append(TraceEvent(s + 2 * o, "erase", base + o))
                    events.append(TraceEvent(s + 2 * o + 1, "write", base + o))
                prev_end = s + consume
            # construction order is already chronological; the beat event
            # precedes the first erase it feeds

        self.updates_completed += 1
        return UpdateTrace(
            architecture="s1", depth_n=g.depth_n, word_width_w=g.word_width_w,
            total_cycles=total, bus_read_cycles=g.beat_count,
            stall_cycles=total - self.ideal_total_cycles(),
            erase_span=(int(starts[0]), total - 2),
            write_span=(int(starts[0]) + 1, total - 1),
            events=events)

    def update_word(self, index: int, value: int) -> UpdateTrace:
        """Incremental single-word update: one erase/write pair (2 cycles)."""
        g = self.geometry
        if not 0 <= index < g.depth_n:
            raise EngineError(f"word index {index} out of range")
        if not 0 <= value <= g.word_mask:
            raise EngineError(f"value does not fit {g.word_width_w} bits")
        rcu_row = index // RCU_SLOTS
        slot = index % RCU_SLOTS
        events = [] if self.record_events else None
        for c in range(g.slices):
            flat = rcu_row * g.slices + c
            unit = self.eram.unit(flat)
            old = unit.read(slot)
            self.cam.cells[flat, old] &= ~np.uint32(1 << slot)
            unit.swap(slot, (value >> (8 * c)) & 0xFF)
        self.cam.apply_word(index, value, 1)
        if events is not None:
            events.append(TraceEvent(0, "erase", index))
            events.append(TraceEvent(1, "write", index))
        return UpdateTrace(
            architecture="s1", depth_n=g.depth_n, word_width_w=g.word_width_w,
            total_cycles=2, bus_read_cycles=0, stall_cycles=0,
            erase_span=(0, 0), write_span=(1, 1), events=events)


class S2Engine(_EngineBase):
    """Centralized erase RAM with bit-sliced parallel writes."""

    architecture = "s2"

    def __init__(self, geometry: CamGeometry, bus: BusModel = IDEAL_BUS,
                 record_events: bool = True):
        super().__init__(geometry, bus, record_events)
        self.eram = CentralEraseRam(geometry)

    def ideal_total_cycles(self) -> int:
        return 2 * self.geometry.beat_count

    def update(self, payload, probe: Callable | None = None) -> UpdateTrace:
        g = self.geometry
        payload = _as_payload(g, payload)
        beats = g.beat_count
        avail = stream_schedule(self.bus, beats)

        # Phase E: beat r lands in erase-RAM row r while the old row clears
        # its k words the same cycle (dual-port read-before-write).
        old_words = self.eram.rows.ravel().copy()
        self.cam.apply_full_table(old_words, 0)
        self.eram.rows[:, :] = payload.reshape(beats, g.words_per_bus_beat)
        if probe is not None:
            probe("after_erase", self)

        # Phase W: one erase-RAM row per cycle, starting right after the
        # last erase.
        write_start = int(avail[-1]) + 1
        self.cam.apply_full_table(payload, 1)
        total = write_start + beats

        events = None
        if self.record_events:
            events = []
            prev = -1
            for r in range(beats):
                a = int(avail[r])
                events.extend(TraceEvent(c, "stall", None)
                              for c in range(prev + 1, a))
                events.append(TraceEvent(a, "beat", r))
                events.append(TraceEvent(a, "erase_row", r))
                prev = a
            events.extend(TraceEvent(write_start + t, "write_row", t)
                          for t in range(beats))

        self.updates_completed += 1
        return UpdateTrace(
            architecture="s2", depth_n=g.depth_n, word_width_w=g.word_width_w,
            total_cycles=total, bus_read_cycles=beats,
            stall_cycles=total - self.ideal_total_cycles(),
            erase_span=(int(avail[0]), int(avail[-1])),
            write_span=(write_start, total - 1),
            events=events)


class S3Engine(_EngineBase):
    """Adds horizontal erase-RAM partitioning: erase overlaps the bus read."""

    architecture = "s3"

    def __init__(self, geometry: CamGeometry, bus: BusModel = IDEAL_BUS,
                 record_events: bool = True):
        super().__init__(geometry, bus, record_events)
        self.eram = HPartEraseRam(geometry)

    def ideal_total_cycles(self) -> int:
        g = self.geometry
        if g.partitions_p == 1:
            return 2 * g.beat_count  # degenerate: no overlap possible
        return g.beat_count + 1

    def _write_schedule(self, avail: np.ndarray) -> np.ndarray:
        """Write cycle of each word group (one wide erase-RAM row)."""
        g = self.geometry
        groups = g.erase_row_count
        # Group g is ready the cycle after its last beat; never before the
        # erase pass (rows 0..groups-1 at cycles 0..groups-1) has finished.
        ready = avail[g.partitions_p - 1::g.partitions_p] + 1
        base = np.maximum(ready, groups)
        idx = np.arange(groups, dtype=np.int64)
        return np.maximum.accumulate(base - idx) + idx

    def update(self, payload, probe: Callable | None = None) -> UpdateTrace:
        g = self.geometry
        payload = _as_payload(g, payload)
        beats = g.beat_count
        groups = g.erase_row_count
        avail = stream_schedule(self.bus, beats)
        # The erase pass reads old contents only, so beat arrival never gates
        # it.  Beat b lands in row b // P no earlier than cycle b >= b // P,
        # i.e. never before that row's erase read; same-cycle collisions are
        # shielded by read-before-write, so the pre-pass snapshot is
        # cycle-exact.
        assert int(avail[0]) >= 0 and bool((avail >= np.arange(beats)).all())

        old_words = self.eram.rows.ravel().copy()
        self.cam.apply_full_table(old_words, 0)
        self.eram.rows[:, :] = payload.reshape(groups, g.words_per_beat_k)
        if probe is not None:
            probe("after_erase", self)

        writes = self._write_schedule(avail)
        self.cam.apply_full_table(payload, 1)
        total = int(writes[-1]) + 1

        # First write-side idle cycle at/after the write start: the moment
        # the backlog accumulated during the erase pass has drained.
        if int(writes[0]) > groups:
            caught_up = groups
        else:
            gaps = np.flatnonzero(np.diff(writes) > 1)
            caught_up = int(writes[gaps[0]]) + 1 if gaps.size else total
        catch_up_cycles = caught_up - (groups - 1)

        events = None
        if self.record_events:
            events = [TraceEvent(gr, "erase_row", gr) for gr in range(groups)]
            events.extend(TraceEvent(int(avail[b]), "beat", b)
                          for b in range(beats))
            write_set = set()
            for gr in range(groups):
                events.append(TraceEvent(int(writes[gr]), "write_row", gr))
                write_set.add(int(writes[gr]))
            events.extend(TraceEvent(c, "stall", None)
                          for c in range(groups, total) if c not in write_set)
            events.sort(key=lambda e: (e.cycle, _EVENT_ORDER[e.kind]))

        self.updates_completed += 1
        return UpdateTrace(
            architecture="s3", depth_n=g.depth_n, word_width_w=g.word_width_w,
            total_cycles=total, bus_read_cycles=beats,
            stall_cycles=total - self.ideal_total_cycles(),
            erase_span=(0, groups - 1),
            write_span=(int(writes[0]), total - 1),
            catch_up_cycles=catch_up_cycles,
            events=events)


# Intra-cycle ordering of s3 events: the wide erase read happens before any
# same-cycle beat load (dual-port read-before-write); a write reads a row
# whose beats all landed in earlier cycles.
_EVENT_ORDER = {"erase_row": 0, "beat": 1, "write_row": 2, "stall": 3}

_ENGINES = {"s1": S1Engine, "s2": S2Engine, "s3": S3Engine}


def build_engine(geometry: CamGeometry, bus: BusModel = IDEAL_BUS,
                 record_events: bool = True, **kwargs) -> _EngineBase:
    return _ENGINES[geometry.architecture](geometry, bus, record_events, **kwargs)
