"""Command-line interface: estimate, sweep, compare, legacy.

Output is deterministic byte-for-byte for identical inputs: sections
and keys are emitted in fixed order, floating quantities use six
significant digits, and operation/micro-op counts print as exact
integers.  Cycle totals are exact rationals; they print as exact
decimals when terminating and fall back to six significant digits
otherwise.

The default instruction-cost table is the bundled one; the
``PHYENERGY_COST_TABLE`` environment variable or ``--cost-table``
(which wins) can point at a replacement.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import yaml

from . import costmodel, ingest, legacy
from .costmodel import EnergyParams, EnergyReport, InstructionCostTable
from .errors import ConfigError, MeasurementError, PhyEnergyError, UsageError
from .opcount import BlockId, tally_pipeline
from .scenario import Scenario, derive, load_scenario, parse_modulation, with_overrides

COST_TABLE_ENV = "PHYENERGY_COST_TABLE"

_FORMATS = ("structured-text", "delimited-table")
_SWEEP_PARAMS = ("modulation", "n_prb", "n_layers", "n_slots")


# ---------------------------------------------------------------------------
# Deterministic value formatting


def fmt_float(x: float) -> str:
    return format(x, ".6g")


def fmt_exact(q: Fraction) -> str:
    """Exact decimal rendering when terminating, else 6 significant digits."""
    if q.denominator == 1:
        return str(q.numerator)
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return fmt_float(float(q))
    digits = max(twos, fives)
    sign = "-" if q < 0 else ""
    scaled = abs(q.numerator) * 10 ** digits // abs(q.denominator)
    text = str(scaled).rjust(digits + 1, "0")
    frac = text[-digits:].rstrip("0")
    return f"{sign}{text[:-digits]}.{frac}"


def fmt_opt(q: Optional[Fraction], as_float: bool = False) -> str:
    if q is None:
        return "undefined"
    return fmt_float(float(q)) if as_float else fmt_exact(q)


# ---------------------------------------------------------------------------
# Report rendering


def _scenario_lines(s: Scenario) -> list[str]:
    lines = [
        "scenario:",
        f"  n_slots: {s.n_slots}",
        f"  snr_db: {fmt_float(s.snr_db)}",
        f"  scs_khz: {s.scs_khz}",
        f"  n_prb: {s.n_prb}",
        f"  modulation: {s.modulation.name}",
        f"  code_rate: {s.code_rate}/1024",
        f"  n_tx: {s.n_tx}",
        f"  n_rx: {s.n_rx}",
        f"  n_layers: {s.n_layers}",
        f"  n_ports: {s.n_ports}",
        f"  clock_hz: {fmt_float(s.clock_hz)}",
        f"  kappa: {fmt_float(s.kappa)}",
        f"  channel_len: {s.channel_len}",
        f"  pilot_sc_per_prb: {s.pilot_sc_per_prb}",
        f"  pilot_symbols_per_slot: {s.pilot_symbols_per_slot}",
    ]
    if s.tbs_override is not None:
        lines.append(f"  tbs_override: {s.tbs_override}")
    if s.rx_fft_antennas is not None:
        lines.append(f"  rx_fft_antennas: {s.rx_fft_antennas}")
    lines += [
        "  decode:",
        f"    deg_cn: {s.decode.deg_cn}",
        f"    deg_vn: {s.decode.deg_vn}",
        f"    iterations: {s.decode.iterations}",
    ]
    return lines


def _derived_lines(s: Scenario) -> list[str]:
    d = derive(s)
    return [
        "derived:",
        f"  n_f: {d.n_f}",
        f"  n_fft: {d.n_fft}",
        f"  k_p: {d.k_p}",
        f"  n_re: {d.n_re}",
        f"  n_symbols: {d.n_symbols}",
        f"  m_cw: {d.m_cw}",
        f"  a: {d.a}",
        f"  base_graph: {d.bg}",
        f"  c: {d.c}",
        f"  z: {d.z}",
        f"  k: {d.k}",
        f"  n_ccb: {d.n_ccb}",
    ]


def _cost_lines(rep: EnergyReport, label: str, cost) -> list[str]:
    bits = rep.bits_transmitted
    nj_per_bit = (fmt_float(cost.energy_j / bits * 1e9) if bits > 0
                  else "undefined")
    return [
        f"{label}:",
        f"  micro_ops: {cost.micro_ops}",
        f"  cycles: {fmt_exact(cost.cycles)}",
        f"  cycles_per_bit: {fmt_opt(cost.cycles_per_bit, as_float=True)}",
        f"  energy_j: {fmt_float(cost.energy_j)}",
        f"  energy_nj_per_bit: {nj_per_bit}",
    ]


def render_estimate_text(rep: EnergyReport) -> str:
    lines: list[str] = []
    if rep.scenario is not None:
        lines += _scenario_lines(rep.scenario)
        lines += _derived_lines(rep.scenario)
    lines += [
        "energy:",
        f"  kappa_j_s2: {fmt_float(rep.energy.kappa)}",
        f"  clock_hz: {fmt_float(rep.energy.clock_hz)}",
        f"  epsilon_j_per_cycle: {fmt_float(rep.energy.epsilon)}",
        "cost_table:",
        f"  source: {rep.table_source}",
        f"  date: {rep.table_date or 'unknown'}",
        f"bits_transmitted: {rep.bits_transmitted}",
        "blocks:",
    ]
    for block in BlockId:
        cost = rep.per_block[block]
        lines.append(f"  {block.value}:")
        lines.append(f"    side: {block.side}")
        for line in _cost_lines(rep, "x", cost)[1:]:
            lines.append("  " + line)
    lines += _cost_lines(rep, "total", rep.total)
    return "\n".join(lines) + "\n"


def render_estimate_table(rep: EnergyReport) -> str:
    bits = rep.bits_transmitted
    rows = ["block,side,micro_ops,cycles,cycles_per_bit,energy_j,"
            "energy_nj_per_bit"]
    entries = [(blk.value, blk.side, rep.per_block[blk]) for blk in BlockId]
    entries.append(("TOTAL", "", rep.total))
    for name, side, cost in entries:
        nj = (fmt_float(cost.energy_j / bits * 1e9) if bits > 0
              else "undefined")
        rows.append(",".join([
            name, side, str(cost.micro_ops), fmt_exact(cost.cycles),
            fmt_opt(cost.cycles_per_bit, as_float=True),
            fmt_float(cost.energy_j), nj,
        ]))
    return "\n".join(rows) + "\n"


def render_sweep_table(param: str, results: Sequence[tuple[str, EnergyReport]],
                       ) -> str:
    rows = [f"{param},block,micro_ops,cycles,cycles_per_bit"]
    for value_label, rep in results:
        for block in BlockId:
            cost = rep.per_block[block]
            rows.append(",".join([
                value_label, block.value, str(cost.micro_ops),
                fmt_exact(cost.cycles),
                fmt_opt(cost.cycles_per_bit, as_float=True),
            ]))
        rows.append(",".join([
            value_label, "TOTAL", str(rep.total.micro_ops),
            fmt_exact(rep.total.cycles),
            fmt_opt(rep.total.cycles_per_bit, as_float=True),
        ]))
    return "\n".join(rows) + "\n"


def render_sweep_text(param: str, results: Sequence[tuple[str, EnergyReport]],
                      ) -> str:
    lines = [f"sweep: {param}"]
    for value_label, rep in results:
        lines.append(f"{value_label}:")
        for block in BlockId:
            cost = rep.per_block[block]
            lines.append(
                f"  {block.value}: cycles={fmt_exact(cost.cycles)} "
                f"cycles_per_bit={fmt_opt(cost.cycles_per_bit, as_float=True)}")
        lines.append(
            f"  TOTAL: cycles={fmt_exact(rep.total.cycles)} "
            f"cycles_per_bit={fmt_opt(rep.total.cycles_per_bit, as_float=True)}")
    return "\n".join(lines) + "\n"


def _comparison_fields(cmp: ingest.BlockComparison) -> list[str]:
    err = ("undefined" if cmp.signed_relative_error is None
           else fmt_float(cmp.signed_relative_error))
    return [
        fmt_exact(cmp.modeled_cycles),
        fmt_opt(cmp.measured_cycles),
        fmt_opt(cmp.ratio),
        err,
        cmp.flag,
    ]


def render_compare_text(result: ingest.ComparisonReport) -> str:
    lines = ["comparison:", "blocks:"]
    for block in BlockId:
        cmp = result.per_block[block]
        modeled, measured, ratio, err, flag = _comparison_fields(cmp)
        lines += [
            f"  {block.value}:",
            f"    modeled_cycles: {modeled}",
            f"    measured_cycles: {measured}",
            f"    ratio: {ratio}",
            f"    signed_relative_error: {err}",
            f"    flag: {flag}",
        ]
    modeled, measured, ratio, err, flag = _comparison_fields(result.total)
    lines += [
        "total:",
        f"  modeled_cycles: {modeled}",
        f"  measured_cycles: {measured}",
        f"  ratio: {ratio}",
        f"  signed_relative_error: {err}",
        f"  flag: {flag}",
        f"unattributed_cycles: {fmt_exact(result.unattributed_cycles)}",
        "overestimated: " + (",".join(b.value for b in result.overestimated)
                             or "none"),
        "underestimated: " + (",".join(b.value for b in result.underestimated)
                              or "none"),
    ]
    return "\n".join(lines) + "\n"


def render_compare_table(result: ingest.ComparisonReport) -> str:
    rows = ["block,modeled_cycles,measured_cycles,ratio,"
            "signed_relative_error,flag"]
    for block in BlockId:
        rows.append(",".join([block.value]
                             + _comparison_fields(result.per_block[block])))
    rows.append(",".join(["TOTAL"] + _comparison_fields(result.total)))
    rows.append(",".join([
        "UNATTRIBUTED", "", fmt_exact(result.unattributed_cycles), "", "", "",
    ]))
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# Command implementations


def _emit(text: str, out_path: Optional[str]) -> None:
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _resolve_table(arg: Optional[str]) -> InstructionCostTable:
    path = arg or os.environ.get(COST_TABLE_ENV)
    if path:
        return costmodel.load_cost_table(path)
    return costmodel.load_default_cost_table()


def _load_run(args: argparse.Namespace) -> tuple[Scenario, InstructionCostTable,
                                                 EnergyParams]:
    s = load_scenario(args.scenario)
    s = with_overrides(s, kappa=args.kappa, clock_hz=args.clock_hz)
    table = _resolve_table(args.cost_table)
    return s, table, EnergyParams(kappa=s.kappa, clock_hz=s.clock_hz)


def _estimate(s: Scenario, table: InstructionCostTable,
              energy: EnergyParams) -> EnergyReport:
    return costmodel.build_report(tally_pipeline(s), table, energy, scenario=s)


def cmd_estimate(args: argparse.Namespace) -> int:
    s, table, energy = _load_run(args)
    rep = _estimate(s, table, energy)
    fmt = args.format or "structured-text"
    text = (render_estimate_text(rep) if fmt == "structured-text"
            else render_estimate_table(rep))
    _emit(text, args.out)
    return 0


def _sweep_scenarios(s: Scenario, param: str,
                     raw_values: str) -> list[tuple[str, Scenario]]:
    values = [v.strip() for v in raw_values.split(",") if v.strip()]
    if not values:
        raise UsageError("--values must list at least one value")
    out = []
    for value in values:
        if param == "modulation":
            mod = parse_modulation(value)
            out.append((mod.name, replace(s, modulation=mod)))
        else:
            try:
                number = int(value)
            except ValueError:
                raise UsageError(
                    f"--values: {value!r} is not an integer for {param}"
                ) from None
            out.append((value, replace(s, **{param: number})))
    return out


def cmd_sweep(args: argparse.Namespace) -> int:
    s, table, energy = _load_run(args)
    if args.param not in _SWEEP_PARAMS:
        raise UsageError(
            f"--param must be one of {', '.join(_SWEEP_PARAMS)}")
    pairs = _sweep_scenarios(s, args.param, args.values)
    # Evaluate everything before emitting: an invalid value must fail
    # with no partial output.
    results = []
    for label, scenario in pairs:
        energy_i = EnergyParams(kappa=scenario.kappa,
                                clock_hz=scenario.clock_hz)
        results.append((label, _estimate(scenario, table, energy_i)))
    fmt = args.format or "delimited-table"
    text = (render_sweep_table(args.param, results)
            if fmt == "delimited-table"
            else render_sweep_text(args.param, results))
    _emit(text, args.out)
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    s, table, energy = _load_run(args)
    if args.filter:
        path_filter, block_map = ingest.load_filter_config(args.filter)
    else:
        path_filter, block_map = ingest.PathFilter(), {}
    report = ingest.parse_measurement(args.measured, path_filter, block_map)
    if report.empty:
        raise MeasurementError(
            f"{args.measured}: no rows left after filtering "
            f"({report.meta.rows_filtered} filtered out)")
    modeled = _estimate(s, table, energy)
    measured = ingest.measured_cycles(report, table)
    unattributed = ingest.unattributed_cycles(report, table)
    result = ingest.compare(modeled, measured, unattributed)
    fmt = args.format or "structured-text"
    text = (render_compare_text(result) if fmt == "structured-text"
            else render_compare_table(result))
    _emit(text, args.out)
    return 0


def cmd_legacy(args: argparse.Namespace) -> int:
    if args.model not in legacy.MODELS:
        raise UsageError(
            f"unknown model {args.model!r}; valid: "
            + ", ".join(sorted(legacy.MODELS)))
    path = Path(args.params)
    if not path.exists():
        raise ConfigError(f"params file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: malformed config: {exc}") from None
    if raw is None:
        raise ConfigError(f"{path}: empty params file")
    value, unit = legacy.evaluate_model(args.model, raw)
    key = "power_w" if unit == "W" else "energy_j"
    _emit(f"model: {args.model}\n{key}: {fmt_float(value)}\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phyenergy",
        description="Operation counting and energy estimation for a 5G NR "
                    "downlink baseband chain.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--scenario", required=True,
                       help="scenario config file")
        p.add_argument("--cost-table", default=None,
                       help=f"instruction cost table CSV (default: bundled, "
                            f"or ${COST_TABLE_ENV})")
        p.add_argument("--kappa", type=float, default=None,
                       help="override energy scale in J*s^2")
        p.add_argument("--clock-hz", type=float, default=None,
                       help="override processor clock in Hz")
        p.add_argument("--format", choices=_FORMATS, default=None,
                       help="output format")
        p.add_argument("--out", default=None, help="write output to a file")

    p_est = sub.add_parser("estimate",
                           help="cost one scenario: cycles, energy, per bit")
    add_run_flags(p_est)
    p_est.set_defaults(func=cmd_estimate)

    p_sweep = sub.add_parser("sweep",
                             help="re-estimate while varying one parameter")
    add_run_flags(p_sweep)
    p_sweep.add_argument("--param", required=True,
                         help="parameter to vary: " + ", ".join(_SWEEP_PARAMS))
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated parameter values")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cmp = sub.add_parser("compare",
                           help="compare modeled cycles against a "
                                "measurement report")
    add_run_flags(p_cmp)
    p_cmp.add_argument("--measured", required=True,
                       help="measurement report (delimited text)")
    p_cmp.add_argument("--filter", default=None,
                       help="path filter / block map config")
    p_cmp.set_defaults(func=cmd_compare)

    p_leg = sub.add_parser("legacy",
                           help="evaluate a literature base-station "
                                "power model")
    p_leg.add_argument("--model", required=True,
                       help="model name: " + ", ".join(sorted(legacy.MODELS)))
    p_leg.add_argument("--params", required=True,
                       help="model parameter file")
    p_leg.add_argument("--out", default=None, help="write output to a file")
    p_leg.set_defaults(func=cmd_legacy)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PhyEnergyError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
