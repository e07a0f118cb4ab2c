#!/usr/bin/env python3
"""Cycles-per-bit versus modulation order, as plot-ready CSV on stdout.

Same computation as `phyenergy sweep --param modulation`; kept as a
script so the sweep can be re-run or extended (more orders, other
grids) without touching the CLI.
"""

import sys
from pathlib import Path

from phyenergy.cli import render_sweep_table
from phyenergy.costmodel import EnergyParams, build_report
from phyenergy.opcount import tally_pipeline
from phyenergy.costmodel import load_default_cost_table
from phyenergy.scenario import Modulation, load_scenario

from dataclasses import replace

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "reference.yaml"

ORDERS = (Modulation.QPSK, Modulation.QAM16, Modulation.QAM64)


def main() -> None:
    base = load_scenario(CONFIG)
    table = load_default_cost_table()
    energy = EnergyParams(kappa=base.kappa, clock_hz=base.clock_hz)
    results = []
    for mod in ORDERS:
        s = replace(base, modulation=mod)
        results.append((mod.name,
                        build_report(tally_pipeline(s), table, energy, s)))
    sys.stdout.write(render_sweep_table("modulation", results))


if __name__ == "__main__":
    main()
