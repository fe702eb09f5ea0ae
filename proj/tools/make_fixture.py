#!/usr/bin/env python3
"""Regenerate data/fixture.csv: 200 synthetic rows (age, race, label) where
the label depends on age and is biased by race."""
import csv
import math
import pathlib
import random

rng = random.Random(20240611)
out = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixture.csv"
with out.open("w", newline="") as f:
    w = csv.writer(f)
    w.writerow(["age", "race", "label"])
    for _ in range(200):
        race = "groupB" if rng.random() < 0.45 else "groupA"
        age = max(18, min(80, round(rng.gauss(38 if race == "groupA" else 33, 11))))
        logit = 0.09 * (age - 36) + (0.8 if race == "groupA" else -0.8)
        label = int(rng.random() < 1 / (1 + math.exp(-logit)))
        w.writerow([age, race, label])
