"""Per-camera processing: change detection, description, notification,
and activity recording.

One pipeline instance per camera stream; frames must arrive in order.
Recording keeps only frames belonging to active pairs; a segment closes
once activity has been absent for the configured gap (default 5 s).
"""

from __future__ import annotations

from dataclasses import dataclass

from .. import change, illumination, messaging, perception
from ..imaging import Frame
from ..messaging import (
    DISPATCH,
    POOR_LIGHTING_MESSAGE,
    MessageInput,
    NotificationEvent,
    ThrottleState,
)


@dataclass
class ProcessResult:
    """What one frame produced; returned to callers and the simulator."""

    camera_id: str
    ts_ms: int
    change: change.ChangeResult | None = None
    observations: tuple = ()
    message: str = ""
    dispatched: bool = False
    advisory_dispatched: bool = False
    segment_id: int | None = None


def pair_faces_to_persons(persons, faces):
    """Match each face to the person box containing its center.

    Returns a list of (person_box, face_box_or_None); faces without an
    enclosing person become their own entry (face-only sighting).
    """
    remaining = list(faces)
    pairs = []
    for person in persons:
        px, py, pw, ph = person.bbox
        match = None
        for face in remaining:
            fx, fy, fw, fh = face.bbox
            cx, cy = fx + fw / 2.0, fy + fh / 2.0
            if px <= cx <= px + pw and py <= cy <= py + ph:
                match = face
                break
        if match is not None:
            remaining.remove(match)
        pairs.append((person, match))
    for face in remaining:
        pairs.append((face, face))
    return pairs


class CameraPipeline:
    def __init__(
        self,
        camera_id: str,
        *,
        config,
        store=None,
        model_provider=None,
        adapters=None,
        throttle_state: ThrottleState | None = None,
        attribute_backend=None,
    ):
        self.camera_id = camera_id
        self.config = config
        self.store = store
        self.model_provider = model_provider or (lambda: None)
        self.adapters = adapters if adapters is not None else {}
        self.throttle = throttle_state or ThrottleState(config.notify_interval_s)
        self.attribute_backend = attribute_backend
        self.change_config = change.ChangeConfig(
            strategy=change.ChangeStrategy.parse(config.strategy),
            area_threshold=config.area_threshold,
            closing_iterations=config.closing_iterations,
        )
        self.prev: Frame | None = None
        self.segment_id: int | None = None
        self.last_activity_ms: int | None = None

    # --- recording ---

    def _record_frame(self, frame: Frame) -> int:
        ts = frame.timestamp_ms
        gap = self.config.segment_gap_ms
        if self.segment_id is None or (
            self.last_activity_ms is not None and ts - self.last_activity_ms > gap
        ):
            self.segment_id = self.store.open_segment(self.camera_id, ts)
            rel = self.store.append_segment_frame(
                self.segment_id, self.camera_id, ts, frame.to_png_bytes()
            )
            self.store.set_segment_snapshot(self.segment_id, rel)
        else:
            self.store.append_segment_frame(
                self.segment_id, self.camera_id, ts, frame.to_png_bytes()
            )
        self.last_activity_ms = ts
        return self.segment_id

    def _maybe_close_segment(self, ts_ms: int):
        if (
            self.segment_id is not None
            and self.last_activity_ms is not None
            and ts_ms - self.last_activity_ms > self.config.segment_gap_ms
        ):
            self.segment_id = None

    def flush(self):
        """Forget the open segment (stream ended)."""
        self.segment_id = None
        self.prev = None

    # --- perception plumbing ---

    def _backend_for(self, manifest, regions):
        if self.attribute_backend is not None:
            return self.attribute_backend(manifest, regions)
        if manifest is not None:
            return perception.OracleBackend(manifest)
        return perception.MotionBackend(regions, self.config.area_threshold)

    def _observe(self, frame: Frame, manifest, regions):
        backend = self._backend_for(manifest, regions)
        persons = backend.detect_persons(frame)
        faces = backend.detect_faces(frame)
        model = self.model_provider()
        observations = []
        for person_box, face_box in pair_faces_to_persons(persons, faces):
            attrs, items = backend.words_for(face_box or person_box)
            observations.append(
                perception.describe_person(
                    frame,
                    person_box,
                    face_box,
                    model,
                    attributes=attrs,
                    items=items,
                )
            )
        return tuple(observations)

    # --- notification ---

    def _recipient(self, observations) -> str:
        if self.store is not None:
            for obs in observations:
                if obs.is_known:
                    contact = self.store.person_contact(obs.name)
                    if contact:
                        return contact
        return self.config.recipient

    def _notify(self, frame: Frame, observations) -> tuple[str, bool]:
        inp = MessageInput.from_observations(
            observations, harmful_lexicon=frozenset(self.config.harmful_lexicon)
        )
        message = messaging.compose_message(inp)
        snapshot = ""
        if self.store is not None:
            snapshot = self.store.save_snapshot(
                self.camera_id, frame.timestamp_ms, frame.to_png_bytes()
            )
        event = NotificationEvent(
            message=message,
            snapshot_ref=snapshot,
            created_at=frame.timestamp_ms / 1000.0,
            channel="mms",
            camera_id=self.camera_id,
        )
        if messaging.throttle(event, self.throttle) != DISPATCH:
            event.status = messaging.STATUS_SUPPRESSED
            return message, False
        record = messaging.dispatch(event, self.adapters, self._recipient(observations))
        if self.store is not None:
            self.store.add_event(
                self.camera_id, message, snapshot, event.created_at, event.channel, record.status
            )
        return message, True

    def _advise_lighting(self, frame: Frame) -> bool:
        if not illumination.assess_lighting(frame).poor:
            return False
        event = NotificationEvent(
            message=POOR_LIGHTING_MESSAGE,
            created_at=frame.timestamp_ms / 1000.0,
            channel="mms",
            camera_id=self.camera_id,
        )
        key = f"{self.camera_id}:lighting"
        if messaging.throttle(event, self.throttle, key=key) != DISPATCH:
            return False
        record = messaging.dispatch(event, self.adapters, self.config.recipient)
        if self.store is not None:
            self.store.add_event(
                self.camera_id, event.message, "", event.created_at, event.channel, record.status
            )
        return True

    # --- main entry ---

    def process(self, frame: Frame, manifest: dict | None = None) -> ProcessResult:
        """Feed the next frame of this camera's stream."""
        result = ProcessResult(camera_id=self.camera_id, ts_ms=frame.timestamp_ms)
        result.advisory_dispatched = self._advise_lighting(frame)

        prev, self.prev = self.prev, frame
        if prev is None:
            return result

        detection = change.detect_changes(prev, frame, self.change_config)
        result.change = detection
        if not detection.has_activity:
            self._maybe_close_segment(frame.timestamp_ms)
            return result

        if self.store is not None:
            result.segment_id = self._record_frame(frame)
        else:
            self.last_activity_ms = frame.timestamp_ms

        observations = self._observe(frame, manifest, detection.regions)
        result.observations = observations
        if observations:
            result.message, result.dispatched = self._notify(frame, observations)
        return result
