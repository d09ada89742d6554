"""Regenerate the bundled UCI CSV files under ``src/brforest/data``.

The sandbox this package was built in could not reach the UCI archive, so the
tables were extracted from packages on PyPI that redistribute them:

* iris, wine        -- ``scikit-learn`` (``sklearn.datasets``)
* sonar             -- ``keel_ds`` wheel, ``data/balanced/raw/sonar.dat``
* thyroid           -- ``common_datasets`` wheel, KEEL ``newthyroid.dat``
* ecoli             -- ``common_datasets`` wheel, UCI ``ecoli.data.txt``
* dermatology       -- ``common_datasets`` wheel, KEEL ``dermatology.dat``

soybean (the 47-row "small" soybean table) is not redistributed by any package
available here; drop a ``soybean.csv`` into ``$BRF_DATA_DIR`` to enable it.

Usage::

    pip download --no-deps -d wheels keel_ds==0.2.5 common_datasets==0.3.10
    python scripts/build_datasets.py wheels
"""
import csv
import glob
import os
import sys
import zipfile

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "brforest", "data")


def _write(name, header, rows):
    path = os.path.join(OUT, name + ".csv")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    print(f"{name}: {len(rows)} rows, {len(header) - 1} features -> {path}")


def _keel(text):
    names, rows = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.lower().startswith("@attribute"):
            names.append(line.split()[1])
        elif not line.startswith("@"):
            rows.append([c.strip() for c in line.split(",")])
    return names, rows


def _sklearn(loader, name):
    bunch = loader()
    header = [f.replace(" (cm)", "").replace(" ", "_") for f in bunch.feature_names]
    header.append("class")
    rows = [[repr(float(v)) for v in x] + [bunch.target_names[y]]
            for x, y in zip(bunch.data, bunch.target)]
    _write(name, header, rows)


def main(wheel_dir):
    from sklearn.datasets import load_iris, load_wine

    _sklearn(load_iris, "iris")
    _sklearn(load_wine, "wine")

    keel = zipfile.ZipFile(glob.glob(os.path.join(wheel_dir, "keel_ds-*.whl"))[0])
    text = keel.read("keel_ds/data/balanced/raw/sonar.dat").decode()
    _, rows = _keel(text)
    _write("sonar", [f"band{i}" for i in range(1, 61)] + ["class"], rows)

    common = zipfile.ZipFile(glob.glob(os.path.join(wheel_dir, "common_datasets-*.whl"))[0])
    base = "common_datasets/data/classification/"
    names, rows = _keel(common.read(base + "newthyroid/newthyroid.dat").decode())
    _write("thyroid", names[:-1] + ["class"], rows)
    names, rows = _keel(common.read(base + "dermatology/dermatology.dat").decode())
    _write("dermatology", names[:-1] + ["class"], rows)

    rows = []
    for line in common.read(base + "ecoli/ecoli.data.txt").decode().splitlines():
        parts = line.split()
        if parts:
            rows.append(parts[1:])
    header = ["mcg", "gvh", "lip", "chg", "aac", "alm1", "alm2", "class"]
    _write("ecoli", header, rows)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "wheels")
