import json
import math
import subprocess
import sys

import numpy as np
import pytest

from birdseye.bins import BinSpec, one_hot
from birdseye.cli import EXIT_GEOMETRY, EXIT_IO, EXIT_OK, EXIT_RECORD, EXIT_USAGE, main
from birdseye.imaging import read_image, write_image
from birdseye.synthetic import SamplingConfig, generate_records, read_dataset


@pytest.fixture
def scene(tmp_path, rng):
    path = tmp_path / "in.png"
    write_image(path, rng.integers(0, 256, size=(100, 100, 3), dtype=np.uint8))
    return path


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "gt.jsonl"
    assert main(["generate", "--n", "30", "--seed", "7", "--out", str(path)]) == EXIT_OK
    return path


def read_jsonl(path):
    return [json.loads(l) for l in open(path) if l.strip()]


def test_rectify_happy_path(tmp_path, scene, capsys):
    # example camera scaled to 100 x 100: f = 50, tilt 30 deg
    out = tmp_path / "out.png"
    code = main(["rectify", "--image", str(scene), "--horizon", "0,1,-21.132486540518712", "--vpz", "50,136.60254037844385",
                 "--canvas", "64x48", "--out", str(out)])
    assert code == EXIT_OK
    assert read_image(out).shape == (48, 64, 3)
    side = json.loads(out.with_suffix(".json").read_text())
    assert side["f"] == pytest.approx(50.0, rel=1e-12)
    assert side["tilt_deg"] == pytest.approx(30.0, abs=1e-9)
    assert side["roll"] == 0.0
    assert np.array(side["H"]).shape == (3, 3)
    assert "f=50.000px" in capsys.readouterr().out


def test_rectify_codes_focal_and_benchmark(tmp_path, scene, capsys, example_record):
    out = tmp_path / "o.png"
    codes = ",".join(repr(c) for c in example_record.encoded)
    assert main(["rectify", "--image", str(scene), "--codes", codes, "--transparent", "--benchmark", "2", "--out", str(out)]) == EXIT_OK
    img = read_image(out)
    assert img.shape == (1000, 1000, 4) and img[0, 0, 3] == 0
    assert "ms/image" in capsys.readouterr().out
    assert main(["rectify", "--image", str(scene), "--horizon", "0,1,-20", "--fov", "90", "--out", str(out)]) == EXIT_OK


def test_rectify_exit_codes(tmp_path, scene):
    out = str(tmp_path / "o.png")
    assert main(["rectify", "--image", str(scene), "--horizon", "0,1", "--vpz", "50,130", "--out", out]) == EXIT_USAGE
    assert main(["rectify", "--image", str(scene), "--horizon", "0,1,-20", "--out", out]) == EXIT_USAGE
    assert main(["rectify", "--image", str(tmp_path / "missing.png"), "--horizon", "0,1,-20", "--focal", "50", "--out", out]) == EXIT_IO
    # v_z on the horizon side of the principal point
    assert main(["rectify", "--image", str(scene), "--horizon", "0,1,-20", "--vpz", "50,10", "--out", out]) == EXIT_GEOMETRY
    with pytest.raises(SystemExit) as exc:
        main(["rectify", "--bogus"])
    assert exc.value.code == EXIT_USAGE


def test_generate_is_reproducible(tmp_path, dataset):
    other = tmp_path / "again.jsonl"
    assert main(["generate", "--n", "30", "--seed", "7", "--out", str(other)]) == EXIT_OK
    assert other.read_text() == dataset.read_text()
    manifest, recs = read_dataset(dataset)
    assert len(recs) == 30 and manifest["seed"] == 7
    assert recs == list(generate_records(SamplingConfig(seed=7), 30))


def test_encode_decode_round_trip(tmp_path, dataset):
    enc = tmp_path / "enc.jsonl"
    dec = tmp_path / "dec.jsonl"
    assert main(["encode", "--in", str(dataset), "--out", str(enc)]) == EXIT_OK
    rows = read_jsonl(enc)
    _, recs = read_dataset(dataset)
    for row, rec in zip(rows, recs):
        np.testing.assert_allclose(row["codes"], rec.encoded, atol=1e-12)
        assert len(row["bins"]) == 4 and all(0 <= b < 500 for b in row["bins"])
        assert row["theta_align"] == pytest.approx(rec.theta_align, abs=1e-12)
    assert main(["decode", "--in", str(enc), "--out", str(dec)]) == EXIT_OK
    for row, rec in zip(read_jsonl(dec), recs):
        if rec.extrinsics["tilt"] > math.radians(0.5):
            assert row["f"] == pytest.approx(rec.f, rel=1e-8)
            assert row["tilt"] == pytest.approx(rec.extrinsics["tilt"], abs=1e-9)
            assert row["roll"] == pytest.approx(rec.extrinsics["roll"], abs=1e-9)


def test_decode_probability_records(tmp_path, dataset):
    """Probability vectors from an external model plug straight into decode and eval."""
    spec = BinSpec()
    enc = tmp_path / "enc.jsonl"
    main(["encode", "--in", str(dataset), "--out", str(enc)])
    probs = tmp_path / "probs.jsonl"
    with open(probs, "w") as fh:
        for row in read_jsonl(enc):
            fh.write(json.dumps({
                "image_id": row["image_id"], "width": row["width"], "height": row["height"],
                "probs": [one_hot(b, spec).tolist() for b in row["bins"]],
                "align": one_hot(row["align_bin"], spec).tolist(),
            }) + "\n")
    dec = tmp_path / "dec.jsonl"
    assert main(["decode", "--in", str(probs), "--out", str(dec), "--keep-going"]) == EXIT_OK
    rows = read_jsonl(dec)
    assert len(rows) == 30 and all("horizon" in r and "vx" in r for r in rows)
    summary = tmp_path / "s.json"
    assert main(["eval", "--gt", str(dataset), "--pred", str(probs), "--summary", str(summary)]) == EXIT_OK
    s = json.loads(summary.read_text())
    assert 0.9 < s["auc"] <= 1.0


def test_eval_prediction_equals_truth(tmp_path, dataset, capsys):
    csv = tmp_path / "auc.csv"
    summary = tmp_path / "s.json"
    assert main(["eval", "--gt", str(dataset), "--pred", str(dataset), "--csv", str(csv), "--summary", str(summary)]) == EXIT_OK
    s = json.loads(summary.read_text())
    assert s["auc"] == 1.0 and s["n"] == 30
    assert s["fov_err_deg"] < 1e-6 and s["tilt_err_deg"] < 1e-6 and s["roll_err_deg"] < 1e-6
    assert "100.00%" in capsys.readouterr().out
    assert csv.read_text().startswith("threshold,fraction")


def test_eval_record_errors(tmp_path, dataset):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json\n")
    assert main(["eval", "--gt", str(dataset), "--pred", str(bad)]) == EXIT_RECORD
    bad.write_text(json.dumps({"image_id": "nope", "horizon": [0, 1, -3]}) + "\n")
    assert main(["eval", "--gt", str(dataset), "--pred", str(bad)]) == EXIT_RECORD
    bad.write_text(json.dumps({"width": 10, "height": 10, "horizon": [0, 1, -3]}) + "\n")
    assert main(["decode", "--in", str(bad), "--out", str(tmp_path / "x.jsonl")]) == EXIT_RECORD
    assert main(["eval", "--gt", str(tmp_path / "missing.jsonl"), "--pred", str(dataset)]) == EXIT_IO


def test_video(tmp_path, capsys, rng):
    frames = tmp_path / "frames.jsonl"
    with open(frames, "w") as fh:
        for f in 600 * (1 + 0.05 * rng.standard_normal(400)):
            fh.write(json.dumps({"f": f, "tilt": 0.3, "roll": 0.0}) + "\n")
    trace = tmp_path / "trace.csv"
    assert main(["video", "--frames", str(frames), "--true-f", "600", "--trace", str(trace)]) == EXIT_OK
    assert "400 frames" in capsys.readouterr().out
    lines = trace.read_text().splitlines()
    assert lines[0] == "frames,relative_focal_error" and len(lines) == 401


def test_video_from_geometry_records(tmp_path, dataset, capsys):
    # one camera observed in every frame
    _, recs = read_dataset(dataset)
    frames = tmp_path / "frames.jsonl"
    frames.write_text("\n".join([recs[0].to_json()] * 5) + "\n")
    assert main(["video", "--frames", str(frames), "--true-f", str(recs[0].f)]) == EXIT_OK
    assert "relative focal error 0.0000%" in capsys.readouterr().out


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "birdseye.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for cmd in ("rectify", "generate", "encode", "decode", "eval", "video"):
        assert cmd in r.stdout
