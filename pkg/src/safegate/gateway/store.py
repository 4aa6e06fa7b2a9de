"""Persistence: sqlite for metadata, filesystem for images and models.

Layout under the store root:
    safegate.db         metadata (persons, segments, events, model versions)
    profiles/<person-id>/<nnn>.png
    models/model_v<n>.npz      (last 3 versions kept)
    recordings/<camera>/<segment-id>/<ts>.png
    snapshots/<ts>-<camera>.png
"""

from __future__ import annotations

import re
import sqlite3
import threading
import time
from pathlib import Path

import numpy as np

from .. import perception

MODEL_VERSIONS_KEPT = 3

_SCHEMA = """
CREATE TABLE IF NOT EXISTS persons (
    person_id TEXT PRIMARY KEY,
    name TEXT NOT NULL UNIQUE,
    contact TEXT NOT NULL DEFAULT '',
    enrolled_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS person_images (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    person_id TEXT NOT NULL,
    path TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS model_versions (
    version INTEGER PRIMARY KEY,
    path TEXT NOT NULL,
    created_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS segments (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    camera TEXT NOT NULL,
    start_ms INTEGER NOT NULL,
    end_ms INTEGER NOT NULL,
    snapshot TEXT NOT NULL DEFAULT ''
);
CREATE TABLE IF NOT EXISTS segment_frames (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    segment_id INTEGER NOT NULL,
    ts_ms INTEGER NOT NULL,
    path TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS events (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    camera TEXT NOT NULL,
    message TEXT NOT NULL,
    snapshot TEXT NOT NULL DEFAULT '',
    created_at REAL NOT NULL,
    channel TEXT NOT NULL,
    status TEXT NOT NULL
);
"""


def slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", name.strip().lower()).strip("-")
    return slug or "person"


class Store:
    """Single-writer metadata + media store, safe across request threads."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        for sub in ("profiles", "models", "recordings", "snapshots"):
            (self.root / sub).mkdir(exist_ok=True)
        self._db = sqlite3.connect(self.root / "safegate.db", check_same_thread=False)
        self._db.executescript(_SCHEMA)
        self._db.commit()
        self._lock = threading.Lock()

    def close(self):
        with self._lock:
            self._db.close()

    def _write(self, sql, params=()):
        with self._lock:
            cur = self._db.execute(sql, params)
            self._db.commit()
            return cur

    def _read(self, sql, params=()):
        with self._lock:
            return self._db.execute(sql, params).fetchall()

    def resolve_media(self, rel_path: str) -> Path:
        """Resolve a store-relative media path, refusing traversal."""
        candidate = (self.root / rel_path).resolve()
        if not candidate.is_relative_to(self.root.resolve()):
            raise ValueError("path escapes the store")
        return candidate

    # --- persons ---

    def upsert_person(self, name: str, contact: str = "") -> str:
        person_id = slugify(name)
        rows = self._read("SELECT person_id FROM persons WHERE name = ?", (name,))
        if rows:
            if contact:
                self._write(
                    "UPDATE persons SET contact = ? WHERE person_id = ?",
                    (contact, rows[0][0]),
                )
            return rows[0][0]
        self._write(
            "INSERT INTO persons (person_id, name, contact, enrolled_at) VALUES (?,?,?,?)",
            (person_id, name, contact, time.time()),
        )
        return person_id

    def person_contact(self, name: str) -> str:
        rows = self._read("SELECT contact FROM persons WHERE name = ?", (name,))
        return rows[0][0] if rows else ""

    def add_person_images(self, person_id: str, png_blobs) -> list:
        folder = self.root / "profiles" / person_id
        folder.mkdir(parents=True, exist_ok=True)
        existing = len(list(folder.glob("*.png")))
        paths = []
        for i, blob in enumerate(png_blobs):
            rel = f"profiles/{person_id}/{existing + i:03d}.png"
            (self.root / rel).write_bytes(blob)
            self._write(
                "INSERT INTO person_images (person_id, path) VALUES (?,?)", (person_id, rel)
            )
            paths.append(rel)
        return paths

    # --- model versions ---

    def save_model(self, model: perception.ProfileModel) -> int:
        rows = self._read("SELECT MAX(version) FROM model_versions")
        version = (rows[0][0] or 0) + 1
        rel = f"models/model_v{version:06d}.npz"
        counts = np.array([f.shape[0] for f in model.features], np.int64)
        stacked = (
            np.concatenate(model.features)
            if model.features
            else np.zeros((0, perception.FEATURE_LEN))
        )
        np.savez(
            self.root / rel,
            names=np.array(list(model.names), dtype=np.str_),
            counts=counts,
            features=stacked,
            centroids=model.centroids,
            threshold=np.float64(model.unknown_threshold),
        )
        self._write(
            "INSERT INTO model_versions (version, path, created_at) VALUES (?,?,?)",
            (version, rel, time.time()),
        )
        self._prune_models()
        return version

    def _prune_models(self):
        rows = self._read(
            "SELECT version, path FROM model_versions ORDER BY version DESC"
        )
        for version, rel in rows[MODEL_VERSIONS_KEPT:]:
            self._write("DELETE FROM model_versions WHERE version = ?", (version,))
            path = self.root / rel
            if path.exists():
                path.unlink()

    def latest_model(self):
        """(model, version); (None, 0) when nothing is enrolled yet."""
        rows = self._read(
            "SELECT version, path FROM model_versions ORDER BY version DESC LIMIT 1"
        )
        if not rows:
            return None, 0
        version, rel = rows[0]
        with np.load(self.root / rel) as data:
            names = tuple(str(n) for n in data["names"])
            counts = data["counts"]
            stacked = data["features"]
            features = []
            offset = 0
            for c in counts:
                features.append(stacked[offset : offset + int(c)])
                offset += int(c)
            model = perception.ProfileModel(
                names=names,
                centroids=data["centroids"],
                features=tuple(features),
                unknown_threshold=float(data["threshold"]),
            )
        return model, int(version)

    def model_version(self) -> int:
        rows = self._read("SELECT MAX(version) FROM model_versions")
        return int(rows[0][0] or 0)

    # --- recordings ---

    def open_segment(self, camera: str, start_ms: int, snapshot_rel: str = "") -> int:
        cur = self._write(
            "INSERT INTO segments (camera, start_ms, end_ms, snapshot) VALUES (?,?,?,?)",
            (camera, start_ms, start_ms, snapshot_rel),
        )
        return int(cur.lastrowid)

    def append_segment_frame(self, segment_id: int, camera: str, ts_ms: int, png: bytes) -> str:
        folder = self.root / "recordings" / camera / f"{segment_id:06d}"
        folder.mkdir(parents=True, exist_ok=True)
        rel = f"recordings/{camera}/{segment_id:06d}/{ts_ms:013d}.png"
        (self.root / rel).write_bytes(png)
        self._write(
            "INSERT INTO segment_frames (segment_id, ts_ms, path) VALUES (?,?,?)",
            (segment_id, ts_ms, rel),
        )
        self._write(
            "UPDATE segments SET end_ms = MAX(end_ms, ?) WHERE id = ?", (ts_ms, segment_id)
        )
        return rel

    def set_segment_snapshot(self, segment_id: int, rel: str):
        self._write("UPDATE segments SET snapshot = ? WHERE id = ?", (rel, segment_id))

    def segments_overlapping(self, start_ms: int, end_ms: int):
        rows = self._read(
            "SELECT id, camera, start_ms, end_ms, snapshot FROM segments "
            "WHERE start_ms <= ? AND end_ms >= ? ORDER BY start_ms",
            (end_ms, start_ms),
        )
        out = []
        for seg_id, camera, s, e, snapshot in rows:
            frames = self._read(
                "SELECT COUNT(*) FROM segment_frames WHERE segment_id = ?", (seg_id,)
            )[0][0]
            out.append(
                {
                    "id": seg_id,
                    "camera": camera,
                    "start_ms": s,
                    "end_ms": e,
                    "snapshot": snapshot,
                    "frame_count": frames,
                }
            )
        return out

    def segment_frames(self, segment_id: int):
        return [
            {"ts_ms": ts, "path": path}
            for ts, path in self._read(
                "SELECT ts_ms, path FROM segment_frames WHERE segment_id = ? ORDER BY ts_ms",
                (segment_id,),
            )
        ]

    def save_snapshot(self, camera: str, ts_ms: int, png: bytes) -> str:
        rel = f"snapshots/{ts_ms:013d}-{camera}.png"
        (self.root / rel).write_bytes(png)
        return rel

    # --- events ---

    def add_event(self, camera, message, snapshot, created_at, channel, status) -> int:
        cur = self._write(
            "INSERT INTO events (camera, message, snapshot, created_at, channel, status) "
            "VALUES (?,?,?,?,?,?)",
            (camera, message, snapshot, created_at, channel, status),
        )
        return int(cur.lastrowid)

    def events(self, since: float | None = None, before: float | None = None, limit: int = 100):
        sql = "SELECT id, camera, message, snapshot, created_at, channel, status FROM events"
        clauses, params = [], []
        if since is not None:
            clauses.append("created_at > ?")
            params.append(since)
        if before is not None:
            clauses.append("created_at < ?")
            params.append(before)
        if clauses:
            sql += " WHERE " + " AND ".join(clauses)
        sql += " ORDER BY created_at DESC, id DESC LIMIT ?"
        params.append(limit)
        return [
            {
                "id": row[0],
                "camera": row[1],
                "message": row[2],
                "snapshot": row[3],
                "created_at": row[4],
                "channel": row[5],
                "status": row[6],
            }
            for row in self._read(sql, params)
        ]
