"""Run ingest -> train -> evaluate on the 48-state data and score the directional claims.

    python scripts/full_data_check.py DATA_DIR [--workdir work_full] [--set train.epochs=319]

DATA_DIR holds cases.csv (JHU time_series_covid19_confirmed_US), a
populations.csv with ``name,population`` rows and a distances.csv matrix
labelled by state name. Nothing is downloaded.
"""
import argparse
import json
import sys
from pathlib import Path

from gcnsir.cli import main as cli


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("data", type=Path)
    ap.add_argument("--workdir", default="work_full")
    ap.add_argument("--set", dest="overrides", action="append", default=[])
    args = ap.parse_args()

    common = ["--workdir", args.workdir]
    for o in args.overrides:
        common += ["--set", o]
    paths = [f'paths.{k}="{args.data / (k + ".csv")}"' for k in ("cases", "populations", "distances")]
    for p in paths:
        common += ["--set", p]
    for cmd in ("ingest", "train", "evaluate"):
        code = cli([cmd, *common])
        if code:
            sys.exit(code)

    rep = json.loads((Path(args.workdir) / "report.json").read_text())
    ok = True
    for nat in rep["national"]:
        h = nat["horizon"]
        rows = [r for r in rep["per_region"] if r["horizon"] == h]
        good = sum(r["r_squared"] is not None and r["r_squared"] > 0.6 for r in rows)
        corr = rep["correlation"][str(h)]
        beats = nat["model_mae"] < nat["baseline_mae"]
        majority = good > len(rows) / 2
        positive = corr is not None and corr > 0
        ok &= beats and majority and positive
        print(f"h={h}: model MAE {nat['model_mae']:.4g} vs baseline {nat['baseline_mae']:.4g} "
              f"({'lower' if beats else 'NOT lower'}); {good}/{len(rows)} states R^2>0.6; "
              f"R^2 vs log10 pop r={corr}")
    print("PASS" if ok else "FAIL")
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
