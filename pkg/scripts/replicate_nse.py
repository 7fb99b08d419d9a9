"""Run the full 729-order pipeline on real NIFTY 50 daily closes and score the holdout.

No market data ships with the package. Download daily closes for 2009-01-01
through 2019-12-31 (NSE historical data, columns ``Date`` and ``Close``) and run::

    python3 scripts/replicate_nse.py nifty50_daily.csv --out replication

The reference holdout (Jan-Jun 2019) scores are MAPE 0.89 and RMSE 139.67;
the check accepts MAPE within 0.5 points and RMSE within 75.
"""

import argparse
import json
import sys
from pathlib import Path

from nifty_sarima.cli import main as cli_main

REFERENCE = {"mape": (0.89, 0.5), "rmse": (139.67, 75.0)}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv", type=Path)
    ap.add_argument("--out", type=Path, default=Path("replication"))
    ap.add_argument("--jobs", type=int, default=None)
    ap.add_argument("--date-column", default="Date")
    ap.add_argument("--close-column", default="Close")
    args = ap.parse_args(argv)

    cli_args = ["pipeline", "--input", str(args.csv), "--out", str(args.out), "--plots",
                "--date-column", args.date_column, "--close-column", args.close_column]
    if args.jobs:
        cli_args += ["--jobs", str(args.jobs)]
    rc = cli_main(cli_args)
    if rc != 0:
        return rc

    report = json.loads((args.out / "report.json").read_text())
    print("winner:", report["selection"]["winner"]["order"], "AIC", report["selection"]["winner"]["aic"])
    ok = True
    for key, (target, tol) in REFERENCE.items():
        value = report["holdout"]["metrics"][key]
        hit = abs(value - target) <= tol
        ok &= hit
        print(f"{'PASS' if hit else 'FAIL'}  {key.upper()} {value:.2f} (reference {target} +/- {tol})")
    return 0 if ok else 4


if __name__ == "__main__":
    sys.exit(main())
