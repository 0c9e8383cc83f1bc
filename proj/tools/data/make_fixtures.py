#!/usr/bin/env python3
"""Writes the shipped measurement tables under data/.

Crossing slopes are the tabulated per-crossing coefficients. The rest are
values read off plots, picked to land on the tabulated thresholds and totals
(see README, "Data").
"""
import math
import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[2] / "data"
LAUNCHES = ["SMF9", "MMF50", "MMF100MM"]

SLOPES = {  # (k1, k2) per launch
    ("WG01", "DEG90"): [(0.098, 0.092), (0.122, 0.096), (0.155, 0.101)],
    ("WG02", "DEG90"): [(0.008, 0.006), (0.027, 0.017), (0.046, 0.022)],
    ("WG03", "DEG90"): [(0.042, 0.031), (0.070, 0.040), (0.092, 0.050)],
    ("WG01", "DEG45"): [(0.243, 0.261), (0.292, 0.259), (0.296, 0.256)],
    ("WG02", "DEG45"): [(0.114, 0.053), (0.119, 0.065), (0.125, 0.067)],
    ("WG03", "DEG45"): [(0.143, 0.068), (0.210, 0.089), (0.239, 0.100)],
}
CROSSING_COUNTS = [1, 5, 10, 20, 40, 80]

RADII = [5, 6, 8, 11, 15, 20]
BEND = {
    ("WG01", "SMF9"): [1.3, 0.85, 0.45, 0.25, 0.15, 0.1],
    ("WG01", "MMF50"): [1.6, 0.95, 0.6, 0.35, 0.2, 0.12],
    ("WG01", "MMF100MM"): [2.6, 1.8, 0.9, 0.55, 0.30, 0.32],
    ("WG02", "SMF9"): [3.2, 2.4, 1.5, 0.7, 0.4, 0.25],
    ("WG02", "MMF50"): [3.8, 3.0, 1.9, 0.96, 0.55, 0.35],
    ("WG02", "MMF100MM"): [5.0, 4.1, 2.8, 1.6, 0.98, 0.6],
    ("WG03", "SMF9"): [0.8, 0.5, 0.25, 0.12, 0.08, 0.05],
    ("WG03", "MMF50"): [1.2, 0.7, 0.4, 0.25, 0.15, 0.1],
    ("WG03", "MMF100MM"): [2.1, 1.35, 0.75, 0.45, 0.25, 0.15],
}

PROFILES = [  # width, height, delta_n, dB/cm, radius floor
    ("WG01", 32, 35, 0.020, 0.04, 8),
    ("WG02", 35, 35, 0.011, 0.045, 0),
    ("WG03", 29, 30, 0.019, 0.04, 8),
]
REFERENCE = {
    "WG01": [2.05, 2.34, 3.17],
    "WG02": [3.73, 4.31, 5.23],
    "WG03": [1.90, 2.26, 2.75],
}

NA = {"SMF9": 0.13, "MMF50": 0.18, "MMF100MM": 0.26}
FAR_FIELD_THRESHOLD = 0.05

BLP = {  # GHz*m for LENS10x, MMF50, MMF100MM
    "WG01": [110, 45, 35],
    "WG02": [260, 112, 85],
    "WG03": [105, 44, 33],
}
PULSE_LAUNCHES = ["LENS10x", "MMF50", "MMF100MM"]
DUT_LENGTH_M = 0.1625
BACK_TO_BACK_PS = 0.3  # source pulses of about 300 fs
TIME_BANDWIDTH = 0.4413


def fmt(v):
    return f"{v:.6f}".rstrip("0").rstrip(".")


def write(path, header, rows, comment):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.write(f"# {comment}\n")
        f.write(",".join(header) + "\n")
        for r in rows:
            f.write(",".join(x if isinstance(x, str) else fmt(x) for x in r) + "\n")


def excess(k1, k2, x, knee=10):
    return k1 * min(x, knee) + k2 * max(0, x - knee)


def main():
    rows = []
    for (profile, angle), per_launch in SLOPES.items():
        for launch, (k1, k2) in zip(LAUNCHES, per_launch):
            for x in CROSSING_COUNTS:
                rows.append((profile, launch, angle, str(x), excess(k1, k2, x)))
    write(ROOT / "table-authoritative" / "crossing_excess.csv",
          ["profile", "launch", "angle_class", "x", "excess_db"], rows,
          "excess loss per crossing count generated from the tabulated piecewise slopes (knee at 10)")

    write(ROOT / "figure-digitized" / "profiles.csv",
          ["profile", "width_um", "height_um", "delta_n", "propagation_loss_db_per_cm", "radius_floor_mm"],
          [(p, w, h, dn, a, fl) for p, w, h, dn, a, fl in PROFILES],
          "cross-section, index contrast and propagation loss; radius floor is a designer setting")

    rows = [(p, l, v) for p, vals in REFERENCE.items() for l, v in zip(LAUNCHES, vals)]
    write(ROOT / "figure-digitized" / "reference_loss.csv", ["profile", "launch", "insertion_loss_db"], rows,
          "insertion loss of the 16.25 cm reference guides")

    rows = [(p, l, r, v) for (p, l), vals in BEND.items() for r, v in zip(RADII, vals)]
    write(ROOT / "figure-digitized" / "bend_excess.csv", ["profile", "launch", "radius_mm", "excess_db"], rows,
          "excess loss of the 90-degree bend structures against radius")

    rows = []
    for launch, na in NA.items():
        half = math.degrees(math.asin(na))
        sigma = half / math.sqrt(2.0 * math.log(1.0 / FAR_FIELD_THRESHOLD))
        for i in range(-60, 61):
            a = 0.5 * i
            rows.append((launch, a, math.exp(-a * a / (2.0 * sigma * sigma))))
    write(ROOT / "figure-digitized" / "far_field.csv", ["launch", "angle_deg", "intensity"], rows,
          "normalized far-field intensity of the launch fibres")

    rows = []
    for p, vals in BLP.items():
        for launch, blp in zip(PULSE_LAUNCHES, vals):
            f_ghz = blp / DUT_LENGTH_M
            dut_ps = TIME_BANDWIDTH / f_ghz * 1e3
            rows.append((p, launch, BACK_TO_BACK_PS, math.hypot(BACK_TO_BACK_PS, dut_ps), DUT_LENGTH_M))
    write(ROOT / "figure-digitized" / "pulses.csv",
          ["profile", "launch", "fwhm_back_to_back_ps", "fwhm_through_dut_ps", "dut_length_m"], rows,
          "pulse widths back-to-back and through the reference guides")


if __name__ == "__main__":
    main()
