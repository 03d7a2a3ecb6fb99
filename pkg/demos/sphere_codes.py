"""
Finite codes for points and lines at infinity
=============================================

Vanishing points can sit anywhere in the image plane, including at infinity,
which makes them awkward regression targets.  Projecting through a sphere
resting on the image gives every point and every line a code inside the unit
disk.  Here we trace the codes of points marching off along a ray, of lines
sweeping past the principal point, and of the horizon / vertical vanishing
point pairs of a few hundred random cameras.
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from birdseye import CodecFrame, SamplingConfig, encode_line, encode_point, generate_records

out_dir = Path(__file__).with_name("output")
out_dir.mkdir(exist_ok=True)
frame = CodecFrame(1280, 720)

fig, axes = plt.subplots(1, 3, figsize=(13, 4.5))
for ax in axes:
    ax.add_patch(plt.Circle((0, 0), 1.0, fill=False, color="k", lw=0.8))
    ax.set_aspect("equal")
    ax.set_xlim(-1.1, 1.1)
    ax.set_ylim(-1.1, 1.1)

# Points along rays from the principal point: the codes approach the circle
# but only a point at infinity reaches it.
for a in np.linspace(0, 2 * math.pi, 12, endpoint=False):
    d = np.array([math.cos(a), math.sin(a)])
    codes = np.array([encode_point(frame.point_from_normalized((*(t * d), 1.0)), frame) for t in np.geomspace(0.01, 100, 60)])
    axes[0].plot(*codes.T, ".-", ms=2, lw=0.5)
    axes[0].plot(*encode_point([d[0], d[1], 0.0], frame), "kx")
axes[0].set_title("points: x marks the point at infinity")

# Lines at growing distance from the principal point drift towards the
# origin, the code of the line at infinity.
for a in np.linspace(0, math.pi, 8, endpoint=False):
    codes = np.array([encode_line(frame.line_from_normalized((math.cos(a), math.sin(a), -t)), frame) for t in np.geomspace(0.01, 100, 60)])
    axes[1].plot(*codes.T, ".-", ms=2, lw=0.5)
axes[1].plot(0, 0, "kx")
axes[1].set_title("lines: x marks the line at infinity")

records = list(generate_records(SamplingConfig(seed=3), 400))
enc = np.array([r.encoded for r in records])
axes[2].plot(enc[:, 0], enc[:, 1], ".", ms=3, label="horizon")
axes[2].plot(enc[:, 2], enc[:, 3], ".", ms=3, label="vertical VP")
axes[2].legend(loc="lower left", fontsize=8)
axes[2].set_title("400 sampled cameras")
fig.tight_layout()
fig.savefig(out_dir / "sphere_codes.png", dpi=90)

print("largest code norm over the sampled cameras:", np.abs(enc).max())
print("wrote", out_dir / "sphere_codes.png")
