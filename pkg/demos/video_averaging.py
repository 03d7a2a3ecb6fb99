"""
Steadier camera estimates from a fixed video camera
===================================================

A static camera sees the same scene in every frame, so per-frame estimates of
focal length, tilt and roll can simply be averaged.  With per-frame focal
errors of about 5%, the running mean settles within a few hundred frames;
the dashed line is the 1/sqrt(n) law it follows.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from birdseye import video_average

out_dir = Path(__file__).with_name("output")
out_dir.mkdir(exist_ok=True)

true_f, n_frames, n_streams = 800.0, 1000, 200
traces = []
for seed in range(n_streams):
    rng = np.random.default_rng(seed)
    frames = np.column_stack([
        true_f * (1 + 0.05 * rng.standard_normal(n_frames)),
        0.35 + 0.01 * rng.standard_normal(n_frames),
        0.01 * rng.standard_normal(n_frames),
    ])
    traces.append(video_average(frames, true_f=true_f).trace)
traces = np.array(traces)
n = np.arange(1, n_frames + 1)
rms = np.sqrt((traces**2).mean(axis=0))
for k in (1, 10, 100, 400, 1000):
    print(f"after {k:>4} frames: RMS relative focal error {100 * rms[k - 1]:.2f}%")

fig, ax = plt.subplots(figsize=(6, 4))
for t in traces[:5]:
    ax.plot(n, 100 * t, lw=0.6, alpha=0.6)
ax.plot(n, 100 * rms, "k", lw=1.5, label="RMS over 200 streams")
ax.plot(n, 100 * 0.05 / np.sqrt(n), "k--", lw=1, label="5% / sqrt(n)")
ax.set_xscale("log")
ax.set_xlabel("frames averaged")
ax.set_ylabel("relative focal error (%)")
ax.legend()
fig.tight_layout()
fig.savefig(out_dir / "video_averaging.png", dpi=90)
print("wrote", out_dir / "video_averaging.png")
