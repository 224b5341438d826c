"""Regenerates the bundled synthetic CSV fixtures in data/."""
import csv
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data"


def burn_like(rng):
    rows = []
    for _ in range(388):
        age = round(rng.uniform(1, 90), 1)
        tbsa = round(min(95.0, rng.expovariate(1 / 14.0)), 1)
        gender = "male" if rng.random() < 0.7 else "female"
        race = "white" if rng.random() < 0.6 else "nonwhite"
        inh = 1 if rng.random() < 0.22 else 0
        flame = 1 if rng.random() < 0.5 + 0.2 * inh else 0
        eta = -6.2 + 0.055 * age + 0.075 * tbsa + 1.4 * inh + 0.3 * flame
        death = 1 if rng.random() < 1 / (1 + math.exp(-eta)) else 0
        rows.append([age, tbsa, gender, race, inh, flame, death])
    return ["age", "tbsa", "gender", "race", "inh_inj", "flame", "death"], rows


def wide_noise(rng):
    # Many weak predictors, to exercise screening and sampling-based BMA.
    header = [f"x{j + 1}" for j in range(40)] + ["y"]
    rows = []
    for _ in range(150):
        x = [round(rng.gauss(0, 1), 4) for _ in range(40)]
        eta = -0.3 + 1.2 * x[0] - 0.9 * x[1] + 0.7 * x[2]
        rows.append(x + [1 if rng.random() < 1 / (1 + math.exp(-eta)) else 0])
    return header, rows


def main():
    rng = random.Random(388)
    OUT.mkdir(exist_ok=True)
    for name, build in [("burn_like.csv", burn_like), ("wide_noise.csv", wide_noise)]:
        header, rows = build(rng)
        with open(OUT / name, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)


if __name__ == "__main__":
    main()
