#!/usr/bin/env python3
"""Regenerate data/synthetic/: a small GloVe-format store with planted structure.

Entities e000..e059 live in 16 dimensions (x2 with 3x the spread) with
  signal      = 3 x0 + 2 x1                (noiseless linear target)
  temperature = 15 + 2 x2 + N(0, 0.5)      (tracked by hot/warm and cold/icy)
  noise       = N(0, 1)                    (unrelated to the embedding)
Category lists: `signal` spans (x0, x1); `orthogonal` spans (x10..x13).
"""
import pathlib

import numpy as np

DIM = 16
N_ENTITIES = 60
N_FILLER = 500

out = pathlib.Path(__file__).resolve().parent.parent / "data" / "synthetic"
(out / "categories").mkdir(parents=True, exist_ok=True)
rng = np.random.default_rng(20240917)

offset = np.zeros(DIM)
offset[15] = 4.0  # common component keeps every entity far from the origin
entities = rng.standard_normal((N_ENTITIES, DIM)) + offset
entities[:, 2] *= 3.0  # the temperature axis dominates entity variation
signal = 3 * entities[:, 0] + 2 * entities[:, 1]
temperature = 15 + 2 * entities[:, 2] + rng.normal(0, 0.5, N_ENTITIES)
noise = rng.standard_normal(N_ENTITIES)

warm = entities[temperature >= np.quantile(temperature, 0.75)].mean(axis=0)
cold = entities[temperature <= np.quantile(temperature, 0.25)].mean(axis=0)

rows = []
rows += [(f"e{i:03d}", v) for i, v in enumerate(entities)]
rows.append(("hot", warm))
rows.append(("warm", warm + rng.normal(0, 0.05, DIM)))
rows.append(("cold", cold))
rows.append(("icy", cold + rng.normal(0, 0.05, DIM)))
for j in range(N_FILLER):
    rows.append((f"filler{j:04d}", rng.standard_normal(DIM) + offset))

def span_words(prefix, axes, count):
    words = []
    for j in range(count):
        v = np.zeros(DIM)
        v[axes] = rng.standard_normal(len(axes)) * 2
        words.append((f"{prefix}{j:02d}", v))
    return words

signal_words = span_words("sigword", [0, 1], 8)
orth_words = span_words("orthword", [10, 11, 12, 13], 10)
rows += signal_words + orth_words

with open(out / "planted.txt", "w") as f:
    for token, v in rows:
        f.write(token + " " + " ".join(f"{x:.6f}" for x in v) + "\n")

with open(out / "planted.csv", "w") as f:
    f.write("name,signal,temperature[degC],noise\n")
    for i in range(N_ENTITIES):
        f.write(f"e{i:03d},{signal[i]:.6f},{temperature[i]:.6f},{noise[i]:.6f}\n")

(out / "categories" / "signal.txt").write_text("\n".join(w for w, _ in signal_words) + "\n")
(out / "categories" / "orthogonal.txt").write_text("\n".join(w for w, _ in orth_words) + "\n")
(out / "exclusions").mkdir(exist_ok=True)
(out / "exclusions" / "entities.txt").write_text(
    "\n".join(f"e{i:03d}" for i in range(N_ENTITIES)) + "\n")
