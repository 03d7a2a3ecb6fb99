"""
From a network's softmax outputs to a horizon AUC
=================================================

A horizon detector that regresses by classification emits, for each of the
four geometry scalars, a probability vector over 500 bins.  We simulate such
outputs for a synthetic test set (a smeared, slightly wrong peak around the
true bin), decode them with the top-11 weighted mean, and score the decoded
horizons with the AUC of the horizon-error curve.
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from birdseye import BinSpec, SamplingConfig, auc, decode_geometry, decode_topc, encode_scalar, generate_records, horizon_error
from birdseye.errors import GeometryError

out_dir = Path(__file__).with_name("output")
out_dir.mkdir(exist_ok=True)
spec = BinSpec(b=500)
rng = np.random.default_rng(0)
centres = spec.centres


def fake_softmax(value, sharpness):
    """Gaussian bump around a noisy guess of the true bin."""
    guess = encode_scalar(value + rng.normal(0, 0.02 / sharpness), spec)
    logits = -0.5 * ((np.arange(spec.b) - guess) / (3.0 / sharpness)) ** 2
    p = np.exp(logits - logits.max())
    return p / p.sum()


records = list(generate_records(SamplingConfig(seed=21), 1000))
curves = {}
for label, sharpness in (("confident", 4.0), ("average", 1.0), ("poor", 0.25)):
    errors = []
    for rec in records:
        codes = [decode_topc(fake_softmax(v, sharpness), 11, spec) for v in rec.encoded]
        try:
            h, _ = decode_geometry(codes, rec.frame)
            errors.append(horizon_error(rec.horizon, h, rec.width, rec.height))
        except GeometryError:
            errors.append(math.inf)  # undecodable counts as a miss
    curves[label] = auc(errors)
    print(f"{label:>9}: horizon AUC {100 * curves[label].auc:.2f}%")

fig, ax = plt.subplots(figsize=(5, 4))
for label, c in curves.items():
    ax.step(np.r_[0, c.thresholds, c.tau], np.r_[0, c.fractions, c.fractions[-1]], where="post", label=f"{label} ({100 * c.auc:.1f}%)")
ax.set_xlabel("horizon error (fraction of image height)")
ax.set_ylabel("fraction of images")
ax.set_xlim(0, 0.25)
ax.legend()
fig.tight_layout()
fig.savefig(out_dir / "auc_curves.png", dpi=90)
print("wrote", out_dir / "auc_curves.png")
