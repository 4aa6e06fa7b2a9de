"""Command-line entry points.

    safegate serve     --config cfg.yaml
    safegate simulate  --frames-dir dir --strategy binary:20 --area 400
    safegate enroll    --video dir --name "Reza"
    safegate describe  --image frame.png [--manifest frame.json]
    safegate keygen / token / fixture
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import crypto, guidance, illumination, perception, synth
from .change import ChangeStrategy, evaluate_strategy
from .gateway.config import SafegateConfig, load_config
from .gateway.pipeline import CameraPipeline
from .gateway.store import Store
from .imaging import load_frame
from .messaging import FileOutbox, ThrottleState


def _load_sequence(frames_dir: Path, fps: float = 5.0):
    """Numbered PNGs plus optional <stem>.json manifests, in name order."""
    paths = sorted(frames_dir.glob("*.png"))
    if not paths:
        raise SystemExit(f"no PNG frames found in {frames_dir}")
    step_ms = int(1000 / fps)
    frames, manifests = [], []
    for idx, path in enumerate(paths):
        frames.append(load_frame(path, timestamp_ms=idx * step_ms, camera_id="sim"))
        manifest_path = path.with_suffix(".json")
        manifests.append(
            json.loads(manifest_path.read_text()) if manifest_path.exists() else None
        )
    return paths, frames, manifests


def cmd_simulate(args) -> int:
    frames_dir = Path(args.frames_dir)
    paths, frames, manifests = _load_sequence(frames_dir)

    config = load_config(args.config) if args.config else SafegateConfig()
    config.strategy = args.strategy
    config.area_threshold = args.area
    if args.store_dir:
        config.store_dir = args.store_dir
    config.outbox_dir = args.outbox_dir or str(Path(config.store_dir) / "outbox")

    store = Store(config.store_dir)
    model, _version = store.latest_model()
    outbox = FileOutbox(config.outbox_dir)
    pipeline = CameraPipeline(
        "sim",
        config=config,
        store=store,
        model_provider=lambda: model,
        adapters={"mms": outbox, "call": outbox},
        throttle_state=ThrottleState(config.notify_interval_s),
    )

    rows = []
    results = []
    for frame, manifest in zip(frames, manifests):
        results.append(pipeline.process(frame, manifest))
    for i, res in enumerate(results[1:], start=1):
        det = res.change
        rows.append(
            {
                "pair": i - 1,
                "prev": paths[i - 1].name,
                "curr": paths[i].name,
                "has_activity": int(det.has_activity),
                "regions": len(det.regions),
                "max_area": max((r.area for r in det.regions), default=0),
                "changed_pixels": det.changed_pixels,
                "strategy": det.strategy,
                "message": res.message,
                "dispatched": int(res.dispatched),
            }
        )

    out_path = Path(args.out) if args.out else frames_dir / "results.csv"
    with open(out_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()) if rows else ["pair"])
        writer.writeheader()
        writer.writerows(rows)
    active = sum(r["has_activity"] for r in rows)
    dispatched = sum(r["dispatched"] for r in rows)
    print(f"{len(rows)} pairs, {active} active, {dispatched} notifications -> {out_path}")

    if args.labels:
        labels = _read_labels(Path(args.labels), len(rows))
        from .change import ChangeConfig

        cfg = ChangeConfig(
            strategy=ChangeStrategy.parse(args.strategy),
            area_threshold=args.area,
            closing_iterations=config.closing_iterations,
        )
        triples = [
            (frames[i], frames[i + 1], labels[i]) for i in range(len(rows))
        ]
        precision, recall = evaluate_strategy(triples, cfg)
        print(f"precision={precision:.4f} recall={recall:.4f}")
    store.close()
    return 0


def _read_labels(path: Path, expected: int):
    labels = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() in ("pair", "#"):
                continue
            labels[int(row[0])] = row[1].strip().lower() in ("1", "true", "yes")
    missing = [i for i in range(expected) if i not in labels]
    if missing:
        raise SystemExit(f"labels file is missing pairs: {missing[:5]} ...")
    return [labels[i] for i in range(expected)]


def cmd_enroll(args) -> int:
    video_dir = Path(args.video)
    _paths, frames, manifests = _load_sequence(video_dir)

    boxes_by_frame = {}
    for frame, manifest in zip(frames, manifests):
        boxes = []
        if manifest:
            backend = perception.OracleBackend(manifest)
            boxes = backend.detect_faces(frame)
        boxes_by_frame[id(frame)] = boxes

    class _Faces:
        def detect_faces(self, frame):
            return boxes_by_frame.get(id(frame), [])

    crops = guidance.select_enrollment_frames(frames, _Faces())
    if not crops:
        print("no usable centered faces found in the video", file=sys.stderr)
        return 2

    store = Store(args.store_dir)
    person_id = store.upsert_person(args.name, args.contact or "")
    store.add_person_images(person_id, [c.to_png_bytes() for c in crops])
    model, _ = store.latest_model()
    model = perception.enroll(
        perception.PersonInfo(person_id=person_id, name=args.name, contact=args.contact or ""),
        crops,
        model,
    )
    version = store.save_model(model)
    print(f"enrolled {args.name!r} ({person_id}) with {len(crops)} crops, model v{version}")
    store.close()
    return 0


def cmd_describe(args) -> int:
    frame = load_frame(args.image)
    assessment = illumination.assess_lighting(frame)
    print(f"lighting: {assessment.condition} (dark fraction {assessment.dark_fraction:.3f})")
    if frame.channels == 3:
        params = illumination.select_gamma(frame)
        print(f"gamma: {params.gamma}")

    manifest = json.loads(Path(args.manifest).read_text()) if args.manifest else None
    if manifest is None:
        print("no manifest given; person description skipped")
        return 0
    model = None
    if args.store_dir:
        store = Store(args.store_dir)
        model, _ = store.latest_model()
        store.close()
    backend = perception.OracleBackend(manifest)
    persons = backend.detect_persons(frame)
    faces = backend.detect_faces(frame)
    from .gateway.pipeline import pair_faces_to_persons

    for person_box, face_box in pair_faces_to_persons(persons, faces):
        attrs, items = backend.words_for(face_box or person_box)
        obs = perception.describe_person(
            frame, person_box, face_box, model, attributes=attrs, items=items
        )
        words = ", ".join(obs.desc_words) or "(no attributes)"
        print(f"{obs.name} on the {obs.position}: {words}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .gateway.app import create_app

    config = load_config(args.config) if args.config else SafegateConfig()
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def cmd_keygen(_args) -> int:
    print(crypto.generate_key().decode("ascii"))
    return 0


def cmd_token(args) -> int:
    config = load_config(args.config) if args.config else SafegateConfig()
    config.resolve_key()
    token = crypto.encrypt_token(b"door-access", config.key)
    print(token.decode("ascii"))
    return 0


def cmd_fixture(args) -> int:
    out = Path(args.out)
    if args.kind == "event":
        synth.write_event_fixture(out)
    elif args.kind == "quiet":
        synth.write_quiet_fixture(out)
    elif args.kind == "video":
        synth.write_enrollment_video(out)
    else:
        raise SystemExit(f"unknown fixture kind {args.kind!r}")
    print(f"wrote {args.kind} fixture to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="safegate")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the gateway service")
    p.add_argument("--config")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("simulate", help="replay a directory of numbered PNG frames")
    p.add_argument("--frames-dir", required=True)
    p.add_argument("--strategy", default="binary:20")
    p.add_argument("--area", type=int, default=400)
    p.add_argument("--labels", help="CSV of pair,label for precision/recall")
    p.add_argument("--out", help="results CSV path")
    p.add_argument("--store-dir", default="safegate-sim")
    p.add_argument("--outbox-dir")
    p.add_argument("--config")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("enroll", help="enroll a person from a directory of video frames")
    p.add_argument("--video", required=True, help="directory of numbered PNG frames")
    p.add_argument("--name", required=True)
    p.add_argument("--contact", default="")
    p.add_argument("--store-dir", default="safegate-data")
    p.set_defaults(func=cmd_enroll)

    p = sub.add_parser("describe", help="lighting assessment and person description")
    p.add_argument("--image", required=True)
    p.add_argument("--manifest")
    p.add_argument("--store-dir")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("keygen", help="print a fresh transport key")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("token", help="mint a bearer token for door commands")
    p.add_argument("--config")
    p.set_defaults(func=cmd_token)

    p = sub.add_parser("fixture", help="write synthetic demo fixtures")
    p.add_argument("--kind", choices=("event", "quiet", "video"), default="event")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fixture)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
