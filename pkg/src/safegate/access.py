"""Smart-door lock state machine.

The lock is fail-secure: without power it is locked and open commands
are rejected.  An open command starts a relock countdown; close locks
immediately; ticks enforce the deadline (inclusive comparison).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

LOCKED = "locked"
UNLOCKED = "unlocked"
DEFAULT_RELOCK_INTERVAL_S = 30.0

OPEN = "open"
CLOSE = "close"


class FailSecureError(RuntimeError):
    """Open rejected because the lock has no power."""


@dataclass(frozen=True)
class DoorState:
    state: str = LOCKED
    relock_deadline: float | None = None
    powered: bool = True

    def __post_init__(self):
        if self.state not in (LOCKED, UNLOCKED):
            raise ValueError(f"bad door state {self.state!r}")
        if self.state == UNLOCKED and self.relock_deadline is None:
            raise ValueError("unlocked door needs a relock deadline")
        if not self.powered and self.state == UNLOCKED:
            raise ValueError("an unpowered door cannot be unlocked")


def command(
    door: DoorState,
    cmd: str,
    now: float,
    relock_interval: float = DEFAULT_RELOCK_INTERVAL_S,
) -> DoorState:
    """Apply a user command. Open extends the deadline when already open."""
    if cmd == OPEN:
        if not door.powered:
            raise FailSecureError("no power: lock stays engaged")
        return DoorState(state=UNLOCKED, relock_deadline=now + relock_interval, powered=True)
    if cmd == CLOSE:
        return DoorState(state=LOCKED, relock_deadline=None, powered=door.powered)
    raise ValueError(f"unknown door command {cmd!r}")


def tick(door: DoorState, now: float) -> DoorState:
    """Relock once the deadline has passed (inclusive)."""
    if door.state == UNLOCKED and now >= door.relock_deadline:
        return DoorState(state=LOCKED, relock_deadline=None, powered=door.powered)
    return door


def power_event(door: DoorState, powered: bool) -> DoorState:
    """Power loss forces Locked; power return never unlocks."""
    if not powered:
        return DoorState(state=LOCKED, relock_deadline=None, powered=False)
    return replace(door, powered=True)


class LoggingActuator:
    """Records actuation commands; stands in for the physical relay."""

    def __init__(self):
        self.log = []

    def engage(self) -> None:
        self.log.append("engage")

    def release(self) -> None:
        self.log.append("release")


class DoorController:
    """Serialized wrapper around the pure state machine.

    Commands, ticks, and power events run under one lock; the actuator
    hears about every locked/unlocked edge.
    """

    def __init__(self, actuator=None, relock_interval: float = DEFAULT_RELOCK_INTERVAL_S, clock=None):
        import threading
        import time as _time

        self._lock = threading.Lock()
        self._state = DoorState()
        self._actuator = actuator or LoggingActuator()
        self.relock_interval = relock_interval
        self._clock = clock or _time.time

    @property
    def state(self) -> DoorState:
        return self._state

    def _swap(self, new: DoorState) -> DoorState:
        old, self._state = self._state, new
        if old.state != new.state:
            if new.state == UNLOCKED:
                self._actuator.release()
            else:
                self._actuator.engage()
        return new

    def command(self, cmd: str, now: float | None = None) -> DoorState:
        with self._lock:
            t = self._clock() if now is None else now
            return self._swap(command(self._state, cmd, t, self.relock_interval))

    def tick(self, now: float | None = None) -> DoorState:
        with self._lock:
            t = self._clock() if now is None else now
            return self._swap(tick(self._state, t))

    def power_event(self, powered: bool) -> DoorState:
        with self._lock:
            return self._swap(power_event(self._state, powered))

    def snapshot(self) -> DoorState:
        """Current state after applying any due relock."""
        return self.tick()
