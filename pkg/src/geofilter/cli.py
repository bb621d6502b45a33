"""Command-line driver: run the filter over recorded frames, synthesize
datasets, render overlays and benchmark dimensionality against baselines."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import formats, render
from .core import (CameraModel, FilterState, PixelPoint, config_from_text,
                   config_to_text, default_config)
from .detect import detect_fast9
from .pipeline import baseline_store, step
from .scene_synth import MoverSpec, SceneSpec, generate


def _load_config(path: Optional[str], verbatim_eq1: bool):
    if path:
        config = config_from_text(Path(path).read_text())
    else:
        config = default_config()
    if verbatim_eq1:
        from dataclasses import replace
        config = replace(config, use_verbatim_eq1=True)
    return config


def read_pgm(path: Path):
    """Binary (P5) PGM reader."""
    import numpy as np
    data = path.read_bytes()
    if not data.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary PGM")
    fields: List[bytes] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    width, height, _maxval = (int(f) for f in fields)
    pos += 1
    pixels = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos)
    return pixels.reshape(height, width)


def _cmd_run(args) -> int:
    config = _load_config(args.config, args.verbatim_eq1)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    frames = list(formats.parse_frames(args.frames))
    imu = formats.parse_imu(args.imu, n_frames=max(f for f, _ in frames) + 1)
    if args.images:
        image_dir = Path(args.images)
        for i, (frame, _edges) in enumerate(frames):
            img_path = image_dir / f"{frame:06d}.pgm"
            if img_path.exists():
                frames[i] = (frame, detect_fast9(read_pgm(img_path),
                                                 args.threshold))
    state = FilterState()
    states, reports = [], []
    for frame, edges in frames:
        state, report = step(state, edges, imu[frame], config,
                             frame_index=frame)
        states.append(state)
        reports.append((frame, report))
    formats.write_state_jsonl(out / "state.jsonl", states)
    formats.write_metrics_csv(out / "metrics.csv", reports)
    return 0


def _cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    camera = CameraModel(f=args.focal, principal=PixelPoint(args.width / 2,
                                                            args.height / 2),
                         width=args.width, height=args.height)
    movers = tuple(
        MoverSpec(start=(m[0], m[1]), velocity=(m[2], m[3]),
                  start_frame=int(m[4]))
        for m in (json.loads(args.movers) if args.movers else []))
    spec = SceneSpec(n_points=args.points, frames=args.n_frames, camera=camera,
                     v_v=args.speed, noise_sigma=args.noise, movers=movers)
    truth = generate(args.seed, spec)
    formats.write_scene(truth, out / "frames.jsonl", out / "imu.jsonl")
    (out / "config.txt").write_text(config_to_text(default_config()))
    return 0


def _cmd_render(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = _load_config(args.config, False)
    cam = config.camera
    with open(args.state) as fh:
        for line in fh:
            rec = json.loads(line)
            state = _state_from_dict(rec)
            svg = render.render_frame_svg(state, cam.width, cam.height)
            (out / f"frame_{rec['frame']:06d}.svg").write_text(svg)
    return 0


def _state_from_dict(rec: dict) -> FilterState:
    from .core import (Circle, Collector, IgnoranceRegion, NormalEdge,
                       RebelAlignmentRow, RebelEdge, Square)

    def pp(v):
        return PixelPoint(v[0], v[1])

    return FilterState(
        frame_index=rec["frame"],
        chi=[(pp(p), n) for p, n in rec["chi"]],
        collectors=[Collector(center=pp(c["center"]), radius=c["radius"],
                              count=c["count"]) for c in rec["collectors"]],
        psi=[IgnoranceRegion(loc=pp(r["loc"]), extent=tuple(r["extent"]),
                             ty=r["ty"], remaining_frames=r["remaining"])
             for r in rec["psi"]],
        alpha=[RebelAlignmentRow([(f, pp(p)) for f, p in row])
               for row in rec["alpha"]],
        normal_edges=[NormalEdge(loc=pp(e["loc"]), vel=e["vel"], beta=e["beta"],
                                 mu=e["mu"], trust=e["trust"])
                      for e in rec["normal_edges"]],
        rebel_edges=[RebelEdge(loc=pp(e["loc"]), vel=e["vel"], beta=e["beta"],
                               mu=e["mu"], origin=pp(e["origin"]),
                               trust=e["trust"]) for e in rec["rebel_edges"]],
        normal_circles=[_circle_from(c) for c in rec["normal_circles"]],
        rebel_circles=[_circle_from(c) for c in rec["rebel_circles"]],
        squares=[Square(loc=pp(s["loc"]), radii=tuple(s["radii"]), vel=s["vel"],
                        beta=s["beta"], origin=pp(s["origin"]),
                        trust=s["trust"]) for s in rec["squares"]],
    )


def _circle_from(c: dict):
    from .core import Circle
    return Circle(kind=c["kind"], loc=PixelPoint(c["loc"][0], c["loc"][1]),
                  radius=c["radius"], vel=c["vel"], beta=c["beta"],
                  trust=c["trust"], members=list(c["members"]),
                  origin=PixelPoint(c["origin"][0], c["origin"][1]))


def _cmd_bench(args) -> int:
    config = _load_config(args.config, False)
    frames = list(formats.parse_frames(args.frames))
    imu = formats.parse_imu(args.imu, n_frames=max(f for f, _ in frames) + 1)
    raw_counts = [len(edges) for _f, edges in frames]
    acc = baseline_store("accumulative", raw_counts)
    last5 = baseline_store("last_k", raw_counts, k=args.window)
    state = FilterState()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "bench.csv", "w") as fh:
        fh.write(f"frame,filter,accumulative,last_{args.window}\n")
        for i, (frame, edges) in enumerate(frames):
            state, report = step(state, edges, imu[frame], config,
                                 frame_index=frame)
            fh.write(f"{frame},{report.total},{acc[i]},{last5[i]}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geofilter",
        description="Streaming geometric filter over per-frame corner "
                    "detections and IMU motion data")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the filter over a dataset")
    run.add_argument("--frames", required=True)
    run.add_argument("--imu", required=True)
    run.add_argument("--config")
    run.add_argument("--out", required=True)
    run.add_argument("--images", help="directory of companion PGM images")
    run.add_argument("--threshold", type=float, default=20.0)
    run.add_argument("--verbatim-eq1", action="store_true")
    run.set_defaults(func=_cmd_run)

    synth = sub.add_parser("synth", help="generate a synthetic dataset")
    synth.add_argument("--out", required=True)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--points", type=int, default=200)
    synth.add_argument("--n-frames", type=int, default=37)
    synth.add_argument("--width", type=float, default=640.0)
    synth.add_argument("--height", type=float, default=480.0)
    synth.add_argument("--focal", type=float, default=500.0)
    synth.add_argument("--speed", type=float, default=3.0)
    synth.add_argument("--noise", type=float, default=0.0)
    synth.add_argument("--movers",
                       help='JSON list of [x, y, vx, vy, start_frame]')
    synth.set_defaults(func=_cmd_synth)

    rend = sub.add_parser("render", help="render SVG overlays from a state log")
    rend.add_argument("--state", required=True)
    rend.add_argument("--config")
    rend.add_argument("--out", required=True)
    rend.set_defaults(func=_cmd_render)

    bench = sub.add_parser("bench",
                           help="dimensionality vs baseline memory models")
    bench.add_argument("--frames", required=True)
    bench.add_argument("--imu", required=True)
    bench.add_argument("--config")
    bench.add_argument("--out", required=True)
    bench.add_argument("--window", type=int, default=5)
    bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
