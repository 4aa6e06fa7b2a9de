"""Persistence layer: sqlite metadata plus on-disk media."""

import numpy as np
import pytest

from safegate import perception, synth
from safegate.gateway.store import MODEL_VERSIONS_KEPT, Store, slugify


@pytest.fixture()
def store(tmp_path):
    s = Store(tmp_path / "store")
    yield s
    s.close()


def test_slugify():
    assert slugify("Reza") == "reza"
    assert slugify("Mary Jane O'Neill") == "mary-jane-o-neill"
    assert slugify("  --  ") == "person"


def test_store_creates_layout(tmp_path):
    s = Store(tmp_path / "store")
    for sub in ("profiles", "models", "recordings", "snapshots"):
        assert (tmp_path / "store" / sub).is_dir()
    assert (tmp_path / "store" / "safegate.db").exists()
    s.close()


# --- persons ---


def test_upsert_person_idempotent(store):
    pid = store.upsert_person("Reza", contact="555-0100")
    assert pid == "reza"
    assert store.upsert_person("Reza") == pid
    assert store.person_contact("Reza") == "555-0100"
    store.upsert_person("Reza", contact="555-0199")
    assert store.person_contact("Reza") == "555-0199"
    assert store.person_contact("Nobody") == ""


def test_add_person_images_numbering(store):
    pid = store.upsert_person("Reza")
    first = store.add_person_images(pid, [b"png0", b"png1"])
    second = store.add_person_images(pid, [b"png2"])
    assert first == ["profiles/reza/000.png", "profiles/reza/001.png"]
    assert second == ["profiles/reza/002.png"]
    assert (store.root / "profiles/reza/002.png").read_bytes() == b"png2"


# --- media path guard ---


def test_resolve_media_blocks_traversal(store):
    pid = store.upsert_person("A")
    store.add_person_images(pid, [b"data"])
    ok = store.resolve_media("profiles/a/000.png")
    assert ok.read_bytes() == b"data"
    with pytest.raises(ValueError):
        store.resolve_media("../outside.txt")
    with pytest.raises(ValueError):
        store.resolve_media("profiles/../../etc/passwd")


# --- model versions ---


def _tiny_model(n_people=1):
    model = None
    for i in range(n_people):
        model = perception.enroll(f"p{i}", [synth.generate_face(i)], model)
    return model


def test_model_roundtrip_bitwise(store):
    model = _tiny_model(2)
    version = store.save_model(model)
    assert version == 1
    loaded, got_version = store.latest_model()
    assert got_version == 1
    assert loaded.names == model.names
    assert loaded.unknown_threshold == model.unknown_threshold
    np.testing.assert_array_equal(loaded.centroids, model.centroids)
    for a, b in zip(loaded.features, model.features):
        np.testing.assert_array_equal(a, b)


def test_model_versions_monotonic_and_pruned(store):
    model = _tiny_model()
    for _ in range(5):
        store.save_model(model)
    assert store.model_version() == 5
    _, version = store.latest_model()
    assert version == 5
    kept = sorted((store.root / "models").glob("*.npz"))
    assert [p.name for p in kept] == [
        f"model_v{v:06d}.npz" for v in (3, 4, 5)
    ]
    assert len(kept) == MODEL_VERSIONS_KEPT


def test_latest_model_empty_store(store):
    model, version = store.latest_model()
    assert model is None and version == 0
    assert store.model_version() == 0


def test_saved_model_has_no_pickled_objects(store):
    # loading with allow_pickle=False (numpy's default) must succeed
    store.save_model(_tiny_model())
    path = next((store.root / "models").glob("*.npz"))
    with np.load(path, allow_pickle=False) as data:
        assert set(data.files) == {"names", "counts", "features", "centroids", "threshold"}


# --- recordings ---


def test_segment_lifecycle(store):
    seg = store.open_segment("door", start_ms=1000)
    store.append_segment_frame(seg, "door", 1000, b"f0")
    store.append_segment_frame(seg, "door", 1200, b"f1")
    store.set_segment_snapshot(seg, "snapshots/x.png")
    rows = store.segments_overlapping(0, 5000)
    assert len(rows) == 1
    row = rows[0]
    assert row["camera"] == "door"
    assert (row["start_ms"], row["end_ms"]) == (1000, 1200)
    assert row["frame_count"] == 2
    assert row["snapshot"] == "snapshots/x.png"
    frames = store.segment_frames(seg)
    assert [f["ts_ms"] for f in frames] == [1000, 1200]
    assert (store.root / frames[0]["path"]).read_bytes() == b"f0"


def test_segments_overlap_query_boundaries(store):
    seg = store.open_segment("door", start_ms=1000)
    store.append_segment_frame(seg, "door", 2000, b"f")
    # window strictly before / after misses; touching boundaries hit
    assert store.segments_overlapping(0, 999) == []
    assert store.segments_overlapping(2001, 9999) == []
    assert len(store.segments_overlapping(0, 1000)) == 1
    assert len(store.segments_overlapping(2000, 9999)) == 1
    assert len(store.segments_overlapping(1500, 1600)) == 1


def test_segments_ordered_by_start(store):
    s2 = store.open_segment("door", start_ms=5000)
    s1 = store.open_segment("door", start_ms=1000)
    rows = store.segments_overlapping(0, 10000)
    assert [r["id"] for r in rows] == [s1, s2]


def test_save_snapshot_path(store):
    rel = store.save_snapshot("front", 1234, b"img")
    assert rel == "snapshots/0000000001234-front.png"
    assert (store.root / rel).read_bytes() == b"img"


# --- events ---


def test_events_newest_first_with_filters(store):
    for i, t in enumerate([10.0, 20.0, 30.0]):
        store.add_event("door", f"m{i}", "", t, "mms", "sent")
    all_events = store.events()
    assert [e["message"] for e in all_events] == ["m2", "m1", "m0"]
    assert [e["message"] for e in store.events(since=10.0)] == ["m2", "m1"]
    assert [e["message"] for e in store.events(before=30.0)] == ["m1", "m0"]
    assert [e["message"] for e in store.events(since=10.0, before=30.0)] == ["m1"]
    assert [e["message"] for e in store.events(limit=1)] == ["m2"]


def test_event_fields_roundtrip(store):
    store.add_event("door", "Reza has beard.", "snapshots/a.png", 42.5, "mms", "sent")
    e = store.events()[0]
    assert e["camera"] == "door"
    assert e["message"] == "Reza has beard."
    assert e["snapshot"] == "snapshots/a.png"
    assert e["created_at"] == 42.5
    assert e["channel"] == "mms" and e["status"] == "sent"
