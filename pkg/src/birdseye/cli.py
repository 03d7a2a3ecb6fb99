"""Command-line interface.

Subcommands: ``rectify``, ``generate``, ``encode``, ``decode``, ``eval`` and
``video``.  Exit codes: 0 success, 1 usage, 2 I/O, 3 geometry error,
4 malformed input record.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import bins as binmod
from .errors import BirdseyeError
from .evaluation import DEFAULT_TAU, auc, format_report, horizon_error, parameter_errors, video_average
from .imaging import WarpSpec, read_image, rectified_fill, warp, write_image
from .rectify import RectifyInput, compose_full, fov_to_focal
from .sphere import CodecFrame, decode_geometry, decode_horizontal_vp, encode_geometry, encode_horizontal_vp
from .synthetic import SamplingConfig, generate_records, write_dataset

log = logging.getLogger("birdseye")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_GEOMETRY, EXIT_RECORD = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class RecordError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str, n=(2, 3)) -> np.ndarray:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None
    if len(vals) not in n:
        raise UsageError(f"expected {' or '.join(map(str, n))} numbers, got {text!r}")
    if len(vals) == 2:
        vals.append(1.0)
    return np.array(vals)


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"expected WIDTHxHEIGHT, got {text!r}") from None
    if w < 1 or h < 1:
        raise UsageError("canvas dimensions must be at least 1")
    return w, h


# -- record helpers ------------------------------------------------------------

def _read_jsonl(path) -> list[dict]:
    out = []
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordError(f"{path}:{n}: invalid JSON ({exc.msg})") from None
            if not isinstance(d, dict):
                raise RecordError(f"{path}:{n}: expected a JSON object")
            if "manifest" in d:
                continue
            out.append(d)
    return out


def _record_id(d: dict) -> str:
    for key in ("image_id", "camera_id", "id"):
        if key in d:
            return str(d[key])
    raise RecordError("record has no image_id / camera_id")


def _dims(d: dict) -> tuple[float, float]:
    if "intrinsics" in d:
        return float(d["intrinsics"]["w"]), float(d["intrinsics"]["h"])
    if "width" in d and "height" in d:
        return float(d["width"]), float(d["height"])
    raise RecordError(f"record {_record_id(d)}: missing image dimensions")


def _get(d: dict, *keys):
    for k in keys:
        if k in d and d[k] is not None:
            return d[k]
    return None


def _decode_align_code(x: float) -> float:
    return float(x) * (math.pi / 2)


def _encode_align_code(theta: float) -> float:
    return theta / (math.pi / 2)


def geometry_from_record(d: dict, spec: binmod.BinSpec, top_c: int, dims=None) -> dict:
    """Pixel geometry from an annotation, code or probability record.

    Returns a dict with ``horizon``, optional ``vz``, optional ``vx``,
    ``width`` and ``height``.
    """
    try:
        w, h = dims if dims is not None else _dims(d)
        frame = CodecFrame(w, h)
        out = {"width": w, "height": h}
        if _get(d, "probs") is not None:
            probs = d["probs"]
            if len(probs) != 4:
                raise RecordError(f"record {_record_id(d)}: expected 4 probability vectors")
            codes = [binmod.decode_topc(np.asarray(p, dtype=float), top_c, spec) for p in probs]
            out["codes"] = codes
            out["horizon"], out["vz"] = decode_geometry(codes, frame)
            if _get(d, "align") is not None:
                theta = _decode_align_code(binmod.decode_topc(np.asarray(d["align"], dtype=float), top_c, spec))
                out["vx"] = decode_horizontal_vp(out["horizon"], theta, frame)
        elif _get(d, "codes") is not None:
            out["codes"] = list(d["codes"])
            out["horizon"], out["vz"] = decode_geometry(d["codes"], frame)
            if _get(d, "theta_align") is not None:
                out["vx"] = decode_horizontal_vp(out["horizon"], float(d["theta_align"]), frame)
        else:
            hz = _get(d, "horizon")
            if hz is None:
                raise RecordError(f"record {_record_id(d)}: no horizon, codes or probs")
            out["horizon"] = np.asarray(hz, dtype=float)
            vz = _get(d, "vz", "v_z")
            if vz is not None:
                out["vz"] = np.asarray(vz, dtype=float)
            vx = _get(d, "vx", "v_x")
            if vx is not None:
                out["vx"] = np.asarray(vx, dtype=float)
        f = _get(d, "f", "focal")
        if f is not None:
            out["f"] = float(f)
        return out
    except (KeyError, TypeError) as exc:
        raise RecordError(f"malformed record: {exc}") from None
    except ValueError as exc:
        if isinstance(exc, BirdseyeError):
            raise
        raise RecordError(f"malformed record: {exc}") from None


def _camera_params(g: dict):
    res = compose_full(
        RectifyInput(horizon=g["horizon"], width=g["width"], height=g["height"], vz=g.get("vz"), focal=g.get("f"))
    )
    return res.f, res.tilt, res.roll


def _bin_spec(args) -> binmod.BinSpec:
    return binmod.BinSpec(b=args.bins)


# -- subcommands -----------------------------------------------------------------

def cmd_rectify(args) -> int:
    img = read_image(args.image)
    ih, iw = img.shape[:2]
    focal = args.focal
    if args.fov is not None:
        focal = fov_to_focal(math.radians(args.fov), iw)
    if args.codes is not None:
        codes = [float(t) for t in args.codes.split(",")]
        if len(codes) != 4:
            raise UsageError("--codes needs four numbers")
        horizon, vz = decode_geometry(codes, CodecFrame(iw, ih))
    else:
        if args.horizon is None:
            raise UsageError("give --horizon (and --vpz or --focal), or --codes")
        horizon = _floats(args.horizon, (3,))
        vz = _floats(args.vpz) if args.vpz is not None else None
    if vz is None and focal is None:
        raise UsageError("--vpz or --focal/--fov is required")
    inp = RectifyInput(
        horizon=horizon,
        width=iw,
        height=ih,
        vz=vz,
        focal=focal,
        align_angle=math.radians(args.align_angle) if args.align_angle is not None else None,
        horizontal_vp=_floats(args.align_vp) if args.align_vp is not None else None,
    )
    t0 = time.perf_counter()
    res = compose_full(inp, canvas=args.canvas, max_scale_ratio=args.max_scale_ratio)
    t_geom = time.perf_counter() - t0
    channels = 1 if img.ndim == 2 else img.shape[2]
    if args.transparent and channels == 3:
        img = np.dstack([img, np.full(img.shape[:2], 255, np.uint8)])
        channels = 4
    spec = WarpSpec(
        H=res.H,
        size=res.canvas_size,
        fill=rectified_fill(channels, args.transparent),
        mode=args.mode,
        clip_line=res.clip_line,
    )
    t0 = time.perf_counter()
    out = warp(img, spec, workers=args.workers)
    t_warp = time.perf_counter() - t0
    write_image(args.out, out)
    sidecar = Path(args.sidecar) if args.sidecar else Path(args.out).with_suffix(".json")
    record = {"image": str(args.image), "output": str(args.out), **res.as_dict()}
    record["tilt_deg"] = math.degrees(res.tilt)
    record["roll_deg"] = math.degrees(res.roll)
    sidecar.write_text(json.dumps(record, indent=2) + "\n")
    if args.benchmark:
        n = args.benchmark
        t0 = time.perf_counter()
        for _ in range(n):
            compose_full(inp, canvas=args.canvas, max_scale_ratio=args.max_scale_ratio)
        t_geom = (time.perf_counter() - t0) / n
        t0 = time.perf_counter()
        for _ in range(n):
            warp(img, spec, workers=args.workers)
        t_warp = (time.perf_counter() - t0) / n
        mpx = res.canvas_size[0] * res.canvas_size[1] / 1e6
        print(f"geometry {1e3 * t_geom:.3f} ms/image, warp {1e3 * t_warp:.2f} ms/image "
              f"({mpx / t_warp:.1f} Mpx/s, {args.workers} worker(s))")
    print(f"f={res.f:.3f}px tilt={math.degrees(res.tilt):.4f}deg roll={math.degrees(res.roll):.4f}deg "
          f"canvas={res.canvas_size[0]}x{res.canvas_size[1]} -> {args.out}")
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    cfg = SamplingConfig(seed=args.seed)
    t0 = time.perf_counter()
    n = write_dataset(args.out, generate_records(cfg, args.n), cfg, args.n)
    print(f"wrote {n} records to {args.out} in {time.perf_counter() - t0:.2f} s (seed {args.seed})")
    return EXIT_OK


def cmd_encode(args) -> int:
    spec = _bin_spec(args)
    rows = []
    clamped = 0
    for d in _read_jsonl(args.input):
        rid = _record_id(d)
        g = geometry_from_record(d, spec, args.top_c)
        if "vz" not in g:
            raise RecordError(f"record {rid}: vertical vanishing point required for encoding")
        frame = CodecFrame(g["width"], g["height"])
        codes = encode_geometry(g["horizon"], g["vz"], frame)
        idx, k = binmod.encode_scalars(codes, spec)
        clamped += k
        row = {"image_id": rid, "width": g["width"], "height": g["height"], "codes": codes.tolist(), "bins": idx.tolist()}
        if "vx" in g:
            theta = encode_horizontal_vp(g["horizon"], g["vx"], frame)
            row["theta_align"] = theta
            row["align_bin"] = binmod.encode_scalar(_encode_align_code(theta), spec)
        rows.append(row)
    with open(args.out, "w") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    print(f"encoded {len(rows)} records to {args.out} ({clamped} scalars clamped)")
    return EXIT_OK


def cmd_decode(args) -> int:
    spec = _bin_spec(args)
    n = 0
    with open(args.out, "w") as fh:
        for d in _read_jsonl(args.input):
            rid = _record_id(d)
            g = geometry_from_record(d, spec, args.top_c)
            row = {"image_id": rid, "width": g["width"], "height": g["height"], "horizon": g["horizon"].tolist()}
            if "codes" in g:
                row["codes"] = [float(c) for c in g["codes"]]
            if "vz" in g:
                row["vz"] = g["vz"].tolist()
            if "vx" in g:
                row["vx"] = g["vx"].tolist()
            try:
                f, tilt, roll = _camera_params(g)
                row.update(f=f, tilt=tilt, roll=roll)
            except BirdseyeError as exc:
                if not args.keep_going:
                    raise
                row["error"] = f"{type(exc).__name__}: {exc}"
            fh.write(json.dumps(row) + "\n")
            n += 1
    print(f"decoded {n} records to {args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    spec = _bin_spec(args)
    gt = {_record_id(d): d for d in _read_jsonl(args.gt)}
    preds = _read_jsonl(args.pred)
    if not preds:
        raise RecordError(f"{args.pred}: no predictions")
    errs, fov_e, tilt_e, roll_e = [], [], [], []
    failed = 0
    for d in preds:
        rid = _record_id(d)
        if rid not in gt:
            raise RecordError(f"prediction {rid} has no ground truth")
        g_gt = geometry_from_record(gt[rid], spec, args.top_c)
        dims = (g_gt["width"], g_gt["height"])
        g_est = geometry_from_record(d, spec, args.top_c, dims=dims)
        errs.append(horizon_error(g_gt["horizon"], g_est["horizon"], *dims))
        if "vz" in g_est or "f" in g_est:
            try:
                gt_params = _gt_params(gt[rid], g_gt)
                est = _camera_params(g_est)
            except BirdseyeError:
                failed += 1
                continue
            e = parameter_errors(*gt_params, *est, dims[0])
            fov_e.append(e[0])
            tilt_e.append(e[1])
            roll_e.append(e[2])
    curve = auc(errs, args.tau)
    summary = {
        "n": len(errs),
        "tau": args.tau,
        "auc": curve.auc,
        "fov_err_deg": float(np.mean(fov_e)) if fov_e else None,
        "tilt_err_deg": float(np.mean(tilt_e)) if tilt_e else None,
        "roll_err_deg": float(np.mean(roll_e)) if roll_e else None,
        "failed": failed,
    }
    print(format_report(summary))
    print(json.dumps(summary))
    if args.csv:
        curve.to_csv(args.csv)
    if args.summary:
        Path(args.summary).write_text(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


def _gt_params(d: dict, g: dict):
    if "extrinsics" in d and "intrinsics" in d:
        e = d["extrinsics"]
        return d["intrinsics"]["f"], e["tilt"], e["roll"]
    return _camera_params(g)


def cmd_video(args) -> int:
    spec = _bin_spec(args)
    frames = []
    for d in _read_jsonl(args.frames):
        if all(k in d for k in ("f", "tilt", "roll")) and "horizon" not in d:
            frames.append((float(d["f"]), float(d["tilt"]), float(d["roll"])))
        else:
            frames.append(_camera_params(geometry_from_record(d, spec, args.top_c)))
    est = video_average(frames, true_f=args.true_f)
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write("frames,relative_focal_error\n")
            for i, e in enumerate(est.trace, 1):
                fh.write(f"{i},{e!r}\n")
    msg = f"{est.n} frames: f={est.f:.3f}px tilt={math.degrees(est.tilt):.4f}deg roll={math.degrees(est.roll):.4f}deg"
    if est.trace:
        msg += f" relative focal error {est.trace[-1]:.4%}"
    print(msg)
    return EXIT_OK


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="birdseye", description="Bird's-eye rectification from the horizon and vertical vanishing point.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def codec_opts(sp):
        sp.add_argument("--bins", type=int, default=binmod.DEFAULT_BINS, help="discretisation bins (default 500)")
        sp.add_argument("--top-c", type=int, default=binmod.DEFAULT_TOP_C, help="bins averaged when decoding (default 11)")

    sp = sub.add_parser("rectify", help="warp an image to the bird's-eye view")
    sp.add_argument("--image", required=True)
    sp.add_argument("--horizon", help="horizon line a,b,c in pixels")
    sp.add_argument("--vpz", help="vertical vanishing point x,y or x,y,w")
    sp.add_argument("--codes", help="four encoded scalars instead of --horizon/--vpz")
    sp.add_argument("--focal", type=float, help="known focal length in pixels")
    sp.add_argument("--fov", type=float, help="known horizontal field of view in degrees")
    sp.add_argument("--align-vp", help="horizontal vanishing point x,y[,w] for axis alignment")
    sp.add_argument("--align-angle", type=float, help="canvas rotation in degrees")
    sp.add_argument("--canvas", type=_size, default=(1000, 1000), help="WIDTHxHEIGHT (default 1000x1000)")
    sp.add_argument("--max-scale-ratio", type=float, default=20.0)
    sp.add_argument("--mode", choices=["bilinear", "nearest"], default="bilinear")
    sp.add_argument("--transparent", action="store_true", help="RGBA output, unmapped pixels transparent")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--benchmark", type=int, nargs="?", const=20, default=0, metavar="N",
                    help="time N geometry and warp runs")
    sp.add_argument("--out", required=True)
    sp.add_argument("--sidecar", help="JSON record path (default: OUT with .json)")
    sp.set_defaults(func=cmd_rectify)

    sp = sub.add_parser("generate", help="write synthetic annotation records")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("encode", help="geometry records -> codes and bin targets")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    codec_opts(sp)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("decode", help="probability or code records -> geometry and camera parameters")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--keep-going", action="store_true", help="record geometry errors instead of stopping")
    codec_opts(sp)
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("eval", help="horizon AUC and camera-parameter errors")
    sp.add_argument("--gt", required=True)
    sp.add_argument("--pred", required=True)
    sp.add_argument("--tau", type=float, default=DEFAULT_TAU)
    sp.add_argument("--csv", help="write the AUC curve as CSV")
    sp.add_argument("--summary", help="write the summary record as JSON")
    codec_opts(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("video", help="running average of per-frame camera estimates")
    sp.add_argument("--frames", required=True)
    sp.add_argument("--true-f", type=float)
    sp.add_argument("--trace", help="write relative focal error per frame count as CSV")
    codec_opts(sp)
    sp.set_defaults(func=cmd_video)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"birdseye: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RecordError as exc:
        print(f"birdseye: {exc}", file=sys.stderr)
        return EXIT_RECORD
    except BirdseyeError as exc:
        print(f"birdseye: geometry error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except OSError as exc:
        print(f"birdseye: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"birdseye: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
