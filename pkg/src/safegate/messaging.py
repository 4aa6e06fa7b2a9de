"""Notification text assembly, throttling, and outbox dispatch.

Messages follow the fixed five-branch template keyed on how many known
and unknown persons are present; crowded scenes (4+) mention only
persons carrying items from the harmful lexicon.  Throttling caps each
camera to one dispatch per interval; delivery goes through pluggable
outbox adapters (file and in-memory shipped).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

DEFAULT_HARMFUL_LEXICON = frozenset({"gun", "mask", "baseball bat"})
DEFAULT_NOTIFY_INTERVAL_S = 180.0
CROWD_SIZE = 4

DISPATCH = "dispatch"
SUPPRESS = "suppress"

STATUS_PENDING = "pending"
STATUS_SENT = "sent"
STATUS_SUPPRESSED = "suppressed"
STATUS_FAILED = "failed"

POOR_LIGHTING_MESSAGE = "The lighting condition is poor. Please turn on the external lights."


@dataclass(frozen=True)
class MessageInput:
    observations: tuple
    unknown_count: int
    known_count: int
    harmful_lexicon: frozenset = DEFAULT_HARMFUL_LEXICON

    def __post_init__(self):
        if self.unknown_count < 0 or self.known_count < 0:
            raise ValueError("person counts cannot be negative")
        if self.unknown_count + self.known_count < 1:
            raise ValueError("message needs at least one person")
        known_named = sum(1 for o in self.observations if o.is_known)
        unknown_named = len(self.observations) - known_named
        if known_named != self.known_count:
            raise ValueError("known_count disagrees with named observations")
        if unknown_named > self.unknown_count:
            raise ValueError("more unknown observations than unknown_count")

    @staticmethod
    def from_observations(observations, harmful_lexicon=DEFAULT_HARMFUL_LEXICON):
        observations = tuple(observations)
        known = sum(1 for o in observations if o.is_known)
        return MessageInput(
            observations=observations,
            unknown_count=len(observations) - known,
            known_count=known,
            harmful_lexicon=harmful_lexicon,
        )


def _desc(observation) -> str:
    return ", ".join(observation.desc_words)


def _position_entry(observation) -> str:
    return f"Person on the {observation.position} has {_desc(observation)}."


def _name_entry(observation) -> str:
    return f"{observation.name} has {_desc(observation)}."


def _join_head_suffix(head: str, suffix: str) -> str:
    return f"{head} {suffix}" if suffix else head


def compose_message(inp: MessageInput) -> str:
    """Render the notification text for one scene.

    Branches:
      crowd (total >= 4): known names + " with N unknown person." then
        position entries for harmful-item carriers only;
      single unknown: "An unknown person with <desc>" (no terminator,
        matching the reference wording);
      unknowns only: "N unknown person." then position entries;
      knowns only: "<name> has <desc>." entries joined by " and ";
      mixed small group: known names + " with N unknown person." then
        name entries for the known persons.
    Observations with no words are left out of entry lists.
    """
    u, k = inp.unknown_count, inp.known_count
    obs = inp.observations
    described = [o for o in obs if o.desc_words]
    known_names = [o.name for o in obs if o.is_known]
    prefix = " and ".join(known_names)
    count_head = f"{prefix} with {u} unknown person." if prefix else f"{u} unknown person."

    if u + k >= CROWD_SIZE:
        carriers = [o for o in described if set(o.desc_words) & inp.harmful_lexicon]
        suffix = " and ".join(_position_entry(o) for o in carriers)
        return _join_head_suffix(count_head, suffix)
    if u == 1 and k == 0:
        only = described[0] if described else None
        return f"An unknown person with {_desc(only)}" if only else "An unknown person"
    if u >= 2 and k == 0:
        suffix = " and ".join(_position_entry(o) for o in described)
        return _join_head_suffix(f"{u} unknown person.", suffix)
    if u == 0:
        entries = [_name_entry(o) for o in described if o.is_known]
        if not entries:
            return " and ".join(f"{name} is at the door." for name in known_names)
        return " and ".join(entries)
    suffix = " and ".join(_name_entry(o) for o in described if o.is_known)
    return _join_head_suffix(count_head, suffix)


def sentence_count(message: str) -> int:
    """Count sentence terminators, treating ". and" joins as one sentence."""
    count = 0
    i = 0
    while i < len(message):
        if message[i] in ".!?" and not message[i + 1 :].startswith(" and "):
            count += 1
        i += 1
    return count


@dataclass
class NotificationEvent:
    message: str
    snapshot_ref: str = ""
    created_at: float = 0.0
    channel: str = "mms"  # "mms" | "call"
    camera_id: str = ""
    status: str = STATUS_PENDING

    def __post_init__(self):
        if not self.message:
            raise ValueError("notification message cannot be empty")


class ThrottleState:
    """Last-dispatch clock per throttle key (camera, or camera+kind)."""

    def __init__(self, interval_s: float = DEFAULT_NOTIFY_INTERVAL_S):
        if interval_s <= 0:
            raise ValueError("interval must be positive")
        self.interval_s = interval_s
        self._last: dict = {}

    def decide(self, key: str, now: float) -> str:
        last = self._last.get(key)
        if last is None or now - last >= self.interval_s:
            self._last[key] = now
            return DISPATCH
        return SUPPRESS


def throttle(event: NotificationEvent, state: ThrottleState, key: str | None = None) -> str:
    """Dispatch or suppress an event against the per-camera clock."""
    return state.decide(key if key is not None else event.camera_id, event.created_at)


@dataclass(frozen=True)
class OutboxRecord:
    channel: str
    recipient: str
    subject: str
    attachment: str
    created_at: float
    camera_id: str = ""
    status: str = STATUS_SENT

    def to_json(self) -> str:
        return json.dumps(
            {
                "channel": self.channel,
                "recipient": self.recipient,
                "subject": self.subject,
                "attachment": self.attachment,
                "created_at": self.created_at,
            },
            indent=2,
        )


class MemoryOutbox:
    """Collects records in a list; used by tests."""

    def __init__(self):
        self.records = []

    def send(self, record: OutboxRecord) -> None:
        self.records.append(record)


class FileOutbox:
    """Writes one JSON file per record: <timestamp>-<camera>.json."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def send(self, record: OutboxRecord) -> None:
        stamp = f"{record.created_at:.3f}".replace(".", "_")
        camera = record.camera_id or "cam"
        path = self.directory / f"{stamp}-{camera}.json"
        path.write_text(record.to_json())


def dispatch(event: NotificationEvent, adapters, recipient: str = "") -> OutboxRecord:
    """Send one pending event through its channel adapter.

    Adapter exceptions mark the record failed instead of propagating so
    a broken carrier cannot stall the camera pipeline.
    """
    if event.status != STATUS_PENDING:
        raise ValueError(f"dispatch requires a pending event, got {event.status!r}")
    if event.channel not in adapters:
        raise ValueError(f"unknown notification channel {event.channel!r}")
    record = OutboxRecord(
        channel=event.channel,
        recipient=recipient,
        subject=event.message,
        attachment=event.snapshot_ref,
        created_at=event.created_at,
        camera_id=event.camera_id,
    )
    try:
        adapters[event.channel].send(record)
        event.status = STATUS_SENT
    except Exception:
        record = replace(record, status=STATUS_FAILED)
        event.status = STATUS_FAILED
    return record
