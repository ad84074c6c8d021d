#!/usr/bin/env python3
"""Extract the Ionosphere and Segment benchmark tables into data/*.csv.

The tables come from the KEEL repository copies bundled with the `keel-ds`
wheel, which is fetched with pip so no direct internet access is needed.
"""
import argparse
import pathlib
import subprocess
import sys
import tempfile
import zipfile

DATASETS = {
    "ionosphere": "keel_ds/data/balanced/raw/ionosphere.dat",
    "segment": "keel_ds/data/balanced/raw/segment.dat",
}


def fetch_wheel(workdir: pathlib.Path) -> pathlib.Path:
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "-q",
         "-d", str(workdir), "keel-ds==0.2.5"],
        check=True)
    return next(workdir.glob("keel_ds-*.whl"))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[1] / "data"))
    parser.add_argument("--wheel", help="use an already downloaded keel-ds wheel")
    args = parser.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        wheel = pathlib.Path(args.wheel) if args.wheel else fetch_wheel(pathlib.Path(tmp))
        archive = zipfile.ZipFile(wheel)
        for name, member in DATASETS.items():
            rows = [line.strip() for line in archive.read(member).decode().splitlines()
                    if line.strip() and not line.startswith("@")]
            width = len(rows[0].split(","))
            header = ",".join([f"a{i + 1}" for i in range(width - 1)] + ["class"])
            with open(out / f"{name}.csv", "w", newline="\n") as f:
                f.write(header + "\n")
                for row in rows:
                    f.write(",".join(cell.strip() for cell in row.split(",")) + "\n")
            print(f"{name}: {len(rows)} rows, {width - 1} attributes -> {out / (name + '.csv')}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
