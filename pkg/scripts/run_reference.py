#!/usr/bin/env python3
"""Cost the bundled reference scenario and print the per-block breakdown."""

from pathlib import Path

from phyenergy import (EnergyParams, BlockId, build_report,
                       load_default_cost_table, load_scenario, tally_pipeline)

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "reference.yaml"


def main() -> None:
    s = load_scenario(CONFIG)
    rep = build_report(tally_pipeline(s), load_default_cost_table(),
                       EnergyParams(kappa=s.kappa, clock_hz=s.clock_hz))
    print(f"epsilon: {rep.energy.epsilon:.3e} J/cycle")
    print(f"bits:    {rep.bits_transmitted}")
    print(f"{'block':>5} {'side':>4} {'cycles':>16} {'energy [J]':>12} "
          f"{'cycles/bit':>12}")
    for block in BlockId:
        cost = rep.per_block[block]
        print(f"{block.value:>5} {block.side:>4} {float(cost.cycles):>16.1f} "
              f"{cost.energy_j:>12.4g} {float(cost.cycles_per_bit):>12.2f}")
    total = rep.total
    print(f"{'TOTAL':>5} {'':>4} {float(total.cycles):>16.1f} "
          f"{total.energy_j:>12.4g} {float(total.cycles_per_bit):>12.2f}")


if __name__ == "__main__":
    main()
