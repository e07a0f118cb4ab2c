#!/usr/bin/env python3
"""Synthesize a measurement report that mirrors the model exactly.

Useful for exercising `phyenergy compare`: comparing the generated
file against the same scenario must give ratio 1 for every block.

usage: synth_measurement.py [scenario.yaml] [out.csv]
"""

import sys
from pathlib import Path

from phyenergy.ingest import rows_from_tallies, write_measurement
from phyenergy.opcount import tally_pipeline
from phyenergy.scenario import load_scenario

DEFAULT_CONFIG = Path(__file__).resolve().parent.parent / "configs" / "reference.yaml"


def main() -> None:
    config = Path(sys.argv[1]) if len(sys.argv) > 1 else DEFAULT_CONFIG
    out = Path(sys.argv[2]) if len(sys.argv) > 2 else Path("measured.csv")
    rows = rows_from_tallies(tally_pipeline(load_scenario(config)))
    write_measurement(rows, out)
    print(f"wrote {out} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
