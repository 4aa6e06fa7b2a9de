"""HTTP surface of the gateway.

Ingestion is asynchronous: POST /ingest authenticates and decodes the
frame, queues it for the camera's worker thread, and acks immediately,
so response latency does not include perception time.  Door commands
need a bearer token encrypted under the shared key.
"""

from __future__ import annotations

import base64
import queue
import threading
import time
import uuid

from fastapi import FastAPI, Header, HTTPException, Request
from fastapi.responses import FileResponse, JSONResponse

from .. import access, crypto, guidance, illumination, kernels, messaging, perception
from ..imaging import Frame
from ..messaging import FileOutbox, ThrottleState
from .config import SafegateConfig
from .pipeline import CameraPipeline
from .store import Store

INGEST_QUEUE_LIMIT = 256


class ModelRegistry:
    """Current recognition model with atomic swap on re-train."""

    def __init__(self, store: Store):
        self._store = store
        self._lock = threading.Lock()
        model, version = store.latest_model()
        self._model = model
        self._version = version

    @property
    def model(self):
        return self._model

    @property
    def version(self) -> int:
        return self._version

    def enroll(self, person: perception.PersonInfo, crops) -> int:
        """Re-train under the registry lock; readers keep the old model
        until the new version is fully saved."""
        with self._lock:
            new_model = perception.enroll(person, crops, self._model)
            version = self._store.save_model(new_model)
            self._model = new_model
            self._version = version
            return version


class _Worker:
    def __init__(self, pipeline: CameraPipeline):
        self.pipeline = pipeline
        self.queue: queue.Queue = queue.Queue(maxsize=INGEST_QUEUE_LIMIT)
        self.thread = threading.Thread(target=self._run, daemon=True)
        self.errors = 0
        self.thread.start()

    def _run(self):
        while True:
            item = self.queue.get()
            if item is None:
                self.queue.task_done()
                return
            frame, manifest = item
            try:
                self.pipeline.process(frame, manifest)
            except Exception:
                self.errors += 1
            finally:
                self.queue.task_done()


class GatewayService:
    """Owns the store, model registry, door controller, and workers."""

    def __init__(self, config: SafegateConfig, clock=time.time, attribute_backend=None):
        config.resolve_key()
        self.config = config
        self.clock = clock
        self.store = Store(config.store_dir)
        self.registry = ModelRegistry(self.store)
        outbox = FileOutbox(config.outbox_dir)
        self.adapters = {"mms": outbox, "call": outbox}
        self.throttle = ThrottleState(config.notify_interval_s)
        self.door = access.DoorController(
            relock_interval=config.relock_interval_s, clock=clock
        )
        self.attribute_backend = attribute_backend
        self._workers: dict[str, _Worker] = {}
        self._workers_lock = threading.Lock()

    # --- workers ---

    def _worker(self, camera_id: str) -> _Worker:
        with self._workers_lock:
            worker = self._workers.get(camera_id)
            if worker is None:
                pipeline = CameraPipeline(
                    camera_id,
                    config=self.config,
                    store=self.store,
                    model_provider=lambda: self.registry.model,
                    adapters=self.adapters,
                    throttle_state=self.throttle,
                    attribute_backend=self.attribute_backend,
                )
                worker = _Worker(pipeline)
                self._workers[camera_id] = worker
            return worker

    def drain(self):
        """Block until every queued frame is processed (test hook)."""
        for worker in list(self._workers.values()):
            worker.queue.join()

    def shutdown(self):
        for worker in self._workers.values():
            worker.queue.put(None)
        for worker in self._workers.values():
            worker.thread.join(timeout=5)
        self.store.close()

    # --- operations ---

    def ingest(self, camera_id: str, token: str, manifest=None, timestamp_ms=None) -> dict:
        plaintext = crypto.decrypt_token(token, self.config.key, ttl=None)
        ts = int(self.clock() * 1000) if timestamp_ms is None else int(timestamp_ms)
        frame = Frame.from_png_bytes(plaintext, timestamp_ms=ts, camera_id=camera_id)
        worker = self._worker(camera_id)
        try:
            worker.queue.put_nowait((frame, manifest))
        except queue.Full as exc:
            raise OverflowError("camera queue is full") from exc
        return {"result_id": uuid.uuid4().hex, "queued": worker.queue.qsize()}

    def check_bearer(self, authorization: str | None):
        if not authorization or not authorization.startswith("Bearer "):
            raise crypto.InvalidTokenError("missing bearer token")
        token = authorization[len("Bearer ") :].strip()
        crypto.decrypt_token(token, self.config.key, ttl=self.config.token_ttl_s, now=self.clock())

    def mint_token(self, payload: bytes = b"door-access") -> str:
        return crypto.encrypt_token(payload, self.config.key, now=self.clock()).decode("ascii")


def _error(status: int, detail: str):
    return HTTPException(status_code=status, detail=detail)


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception:
        raise _error(400, "request body must be a JSON object")
    if not isinstance(body, dict):
        raise _error(400, "request body must be a JSON object")
    return body


def create_app(config: SafegateConfig | None = None, service: GatewayService | None = None) -> FastAPI:
    if service is None:
        service = GatewayService(config or SafegateConfig())
    app = FastAPI(title="safegate", version="0.1.0")
    app.state.service = service

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "kernel_backend": kernels.BACKEND,
            "model_version": service.registry.version,
            "cameras": sorted(service._workers),
        }

    @app.post("/ingest")
    async def ingest(request: Request):
        body = await _json_body(request)
        camera_id = body.get("camera_id")
        token = body.get("token")
        if not camera_id or not token:
            raise _error(400, "camera_id and token are required")
        try:
            ack = service.ingest(
                camera_id, token, body.get("manifest"), body.get("timestamp_ms")
            )
        except crypto.TokenError as exc:
            raise _error(401, f"token rejected: {exc}")
        except ValueError as exc:
            raise _error(400, f"bad frame: {exc}")
        except OverflowError as exc:
            raise _error(503, str(exc))
        return ack

    @app.post("/profile")
    async def profile(request: Request):
        body = await _json_body(request)
        name = (body.get("name") or "").strip()
        images = body.get("images") or []
        if not name or not images:
            raise _error(400, "name and at least one image are required")
        contact = (body.get("contact") or "").strip()

        crops, usable_png, labels = [], [], []
        for item in images:
            try:
                png = base64.b64decode(item["data"])
                frame = Frame.from_png_bytes(png)
            except Exception:
                labels.append("unreadable image")
                continue
            box = item.get("box") or _default_face_box(frame)
            x, y, w, h = (int(v) for v in box)
            if x <= 0 or y <= 0 or w <= 0 or h <= 0:
                labels.append("face box out of frame")
                continue
            label = guidance.face_position(frame.width, frame.height, guidance.FaceBox(x, y, w, h))
            labels.append(label)
            if label == guidance.LABEL_CENTER:
                crop = perception.crop_box(frame, (x, y, w, h))
                crops.append(crop)
                usable_png.append(crop.to_png_bytes())
        if not crops:
            return JSONResponse(status_code=422, content={"guidance": labels})

        person_id = service.store.upsert_person(name, contact)
        service.store.add_person_images(person_id, usable_png)
        version = service.registry.enroll(
            perception.PersonInfo(person_id=person_id, name=name, contact=contact), crops
        )
        return {
            "person_id": person_id,
            "model_version": version,
            "accepted": len(crops),
            "guidance": labels,
        }

    @app.get("/events")
    def events(since: float | None = None, before: float | None = None, limit: int = 100):
        items = service.store.events(since=since, before=before, limit=min(limit, 500))
        return {"events": items, "now": service.clock()}

    @app.get("/recordings")
    def recordings(date: str, time: str, window: int | None = None):
        try:
            start_s = _parse_utc(date, time)
        except ValueError as exc:
            raise _error(400, f"bad date/time: {exc}")
        minutes = window if window is not None else service.config.recordings_window_min
        if minutes <= 0:
            raise _error(400, "window must be positive minutes")
        start_ms = int(start_s * 1000)
        end_ms = start_ms + minutes * 60 * 1000
        segments = service.store.segments_overlapping(start_ms, end_ms)
        if not segments:
            return {"segments": [], "message": "no activity found"}
        return {"segments": segments}

    @app.post("/guidance")
    async def guidance_endpoint(request: Request):
        body = await _json_body(request)
        try:
            window_w = int(body["window_w"])
            window_h = int(body["window_h"])
            x, y, w, h = (int(v) for v in body["box"])
            label = guidance.face_position(window_w, window_h, guidance.FaceBox(x, y, w, h))
        except (KeyError, TypeError):
            raise _error(400, "window_w, window_h and box [x,y,w,h] are required")
        except ValueError as exc:
            raise _error(422, str(exc))
        return {"label": label}

    @app.get("/door")
    def door_state():
        state = service.door.snapshot()
        return {
            "state": state.state,
            "relock_deadline": state.relock_deadline,
            "powered": state.powered,
            "now": service.clock(),
        }

    @app.post("/door")
    async def door_command(request: Request, authorization: str | None = Header(default=None)):
        try:
            service.check_bearer(authorization)
        except crypto.TokenError as exc:
            raise _error(401, f"unauthorized: {exc}")
        body = await _json_body(request)
        cmd = body.get("command")
        if cmd not in (access.OPEN, access.CLOSE):
            raise _error(400, "command must be open or close")
        try:
            state = service.door.command(cmd)
        except access.FailSecureError as exc:
            raise _error(409, str(exc))
        return {
            "state": state.state,
            "relock_deadline": state.relock_deadline,
            "powered": state.powered,
            "now": service.clock(),
        }

    @app.post("/door/power")
    async def door_power(request: Request, authorization: str | None = Header(default=None)):
        try:
            service.check_bearer(authorization)
        except crypto.TokenError as exc:
            raise _error(401, f"unauthorized: {exc}")
        body = await _json_body(request)
        state = service.door.power_event(bool(body.get("powered", True)))
        return {"state": state.state, "powered": state.powered}

    @app.post("/emergency")
    async def emergency(request: Request, authorization: str | None = Header(default=None)):
        try:
            service.check_bearer(authorization)
        except crypto.TokenError as exc:
            raise _error(401, f"unauthorized: {exc}")
        body = await _json_body(request)
        note = (body.get("note") or "").strip()
        message = "Emergency assistance requested."
        if note:
            message = f"Emergency assistance requested: {note}."
        event = messaging.NotificationEvent(
            message=message, created_at=service.clock(), channel="call", camera_id="panel"
        )
        record = messaging.dispatch(event, service.adapters, service.config.recipient)
        service.store.add_event(
            "panel", message, "", event.created_at, "call", record.status
        )
        return {"status": record.status}

    @app.get("/media/{rel_path:path}")
    def media(rel_path: str):
        try:
            path = service.store.resolve_media(rel_path)
        except ValueError:
            raise _error(404, "no such media")
        if not path.is_file():
            raise _error(404, "no such media")
        return FileResponse(path)

    return app


def _default_face_box(frame: Frame):
    """Fallback enrollment box: centered square, 40% of the short side."""
    side = max(33, min(frame.width, frame.height) * 2 // 5)
    x = max(1, (frame.width - side) // 2)
    y = max(1, (frame.height - side) // 2)
    return (x, y, side, side)


def _parse_utc(date: str, hhmm: str) -> float:
    from datetime import datetime, timezone

    dt = datetime.strptime(f"{date} {hhmm}", "%Y-%m-%d %H:%M")
    return dt.replace(tzinfo=timezone.utc).timestamp()
