#!/usr/bin/env python3
"""Fetch COMPAS and Adult into data/ as plain CSVs matching the bundled manifests.

Both files come from the `responsibly` wheel on PyPI, which ships the
ProPublica COMPAS export and the UCI Adult train/test files.
"""
import argparse
import csv
import io
import pathlib
import subprocess
import sys
import tempfile
import zipfile

COMPAS_COLUMNS = [
    "age", "age_cat", "sex", "race", "priors_count", "juv_fel_count",
    "juv_misd_count", "juv_other_count", "c_charge_degree", "two_year_recid",
]
ADULT_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education_num", "marital_status",
    "occupation", "relationship", "race", "sex", "capital_gain", "capital_loss",
    "hours_per_week", "native_country", "income",
]


def find_wheel(cache: pathlib.Path) -> pathlib.Path:
    wheels = sorted(cache.glob("responsibly-*.whl"))
    if wheels:
        return wheels[-1]
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "responsibly==0.1.2", "-d", str(cache)],
        check=True,
    )
    return sorted(cache.glob("responsibly-*.whl"))[-1]


def compas_rows(text: str):
    # Standard ProPublica screening filters.
    for r in csv.DictReader(io.StringIO(text)):
        try:
            days = int(r["days_b_screening_arrest"])
        except ValueError:
            continue
        if not -30 <= days <= 30 or r["is_recid"] == "-1":
            continue
        if r["c_charge_degree"] == "O" or r["score_text"] == "N/A":
            continue
        yield [r[c] for c in COMPAS_COLUMNS]


def adult_rows(text: str):
    for line in text.splitlines():
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != len(ADULT_COLUMNS):
            continue
        parts[-1] = parts[-1].rstrip(".")
        yield parts


def write(path: pathlib.Path, header, rows) -> int:
    n = 0
    with path.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow(row)
            n += 1
    return n


def main() -> None:
    root = pathlib.Path(__file__).resolve().parent.parent
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=pathlib.Path, default=root / "data")
    ap.add_argument("--cache", type=pathlib.Path, default=pathlib.Path(tempfile.gettempdir()) / "guardfed-datasets")
    args = ap.parse_args()
    args.cache.mkdir(parents=True, exist_ok=True)
    args.out.mkdir(parents=True, exist_ok=True)

    with zipfile.ZipFile(find_wheel(args.cache)) as z:
        compas = z.read("responsibly/dataset/compas/compas-scores-two-years.csv").decode()
        adult = z.read("responsibly/dataset/adult/adult.data").decode()
        adult += "\n" + z.read("responsibly/dataset/adult/adult.test").decode()

    n = write(args.out / "compas.csv", COMPAS_COLUMNS, compas_rows(compas))
    print(f"compas.csv: {n} rows")
    n = write(args.out / "adult.csv", ADULT_COLUMNS, adult_rows(adult))
    print(f"adult.csv: {n} rows")


if __name__ == "__main__":
    main()
