"""Instruction costs: micro-ops, cycles and energy for counted operations.

An :class:`InstructionCostTable` maps (operation kind, data class,
operand location) to a micro-op count and a reciprocal-throughput
cycle cost.  Operand locations are implied by the data class: scalars
live in general-purpose registers, logical/integer vectors in mmx
registers, double vectors in xmm registers, and structs in memory.

Cycle costs are kept as exact rationals while accumulating; floats
appear only when energy is computed or a report is rendered.  The
composite FLOP kind is expanded into one addition plus one
multiplication of the same data class before any table lookup.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple

from .errors import ConfigError, CostTableError, CoverageError
from .opcount import BlockId, DataClass, OpKind, OperationTally, PipelineTallies
from .scenario import Scenario

DEFAULT_TABLE_RESOURCE = "cost_table.csv"


class OperandLocation(enum.Enum):
    REGISTER = "register"
    MMX = "mmx"
    XMM = "xmm"
    MEMORY = "memory"


_LOCATION_BY_CLASS = {
    DataClass.LOGICAL_SCALAR: OperandLocation.REGISTER,
    DataClass.INT_SCALAR: OperandLocation.REGISTER,
    DataClass.DOUBLE_SCALAR: OperandLocation.REGISTER,
    DataClass.LOGICAL_VECTOR: OperandLocation.MMX,
    DataClass.INT_VECTOR: OperandLocation.MMX,
    DataClass.DOUBLE_VECTOR: OperandLocation.XMM,
    DataClass.STRUCT: OperandLocation.MEMORY,
}


def assign_location(data_class: DataClass) -> OperandLocation:
    """Operand location implied by a data class."""
    return _LOCATION_BY_CLASS[data_class]


@dataclass(frozen=True)
class CostEntry:
    micro_ops: int
    cycles: Fraction


TableKey = Tuple[OpKind, DataClass, OperandLocation]


@dataclass(frozen=True)
class InstructionCostTable:
    """Lookup table from (kind, class, location) to micro-ops and cycles."""

    entries: Mapping[TableKey, CostEntry]
    source: str = ""
    date: str = ""

    def lookup(self, kind: OpKind, cls: DataClass) -> CostEntry:
        key = (kind, cls, assign_location(cls))
        try:
            return self.entries[key]
        except KeyError:
            raise CoverageError(
                f"no cost entry for op_kind={kind.value} "
                f"data_class={cls.value} operand_location={key[2].value} "
                f"(table source: {self.source or 'unknown'})") from None


_HEADER = ["op_kind", "data_class", "operand_location", "micro_ops", "cycles"]

_KIND_BY_NAME = {kind.value: kind for kind in OpKind}
_CLASS_BY_NAME = {cls.value: cls for cls in DataClass}
_LOCATION_BY_NAME = {loc.value: loc for loc in OperandLocation}


def _parse_cycles(text: str, where: str) -> Fraction:
    text = text.strip()
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise CostTableError(f"{where}: bad cycles value {text!r}") from None
    if value < 0:
        raise CostTableError(f"{where}: cycles must be >= 0")
    return value


def parse_cost_table(text: str, source: str = "<string>") -> InstructionCostTable:
    """Parse cost-table CSV text.

    Lines starting with ``#`` are comments; ``# source:`` and
    ``# date:`` comments populate the table metadata.  The header row
    is required and duplicate keys are rejected.
    """
    meta = {"source": source, "date": ""}
    data_lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            for tag in ("source", "date"):
                prefix = tag + ":"
                if body.lower().startswith(prefix):
                    meta[tag] = body[len(prefix):].strip()
            continue
        data_lines.append((lineno, line))

    if not data_lines:
        raise CostTableError(f"{source}: empty cost table")

    header_line = data_lines[0][1]
    header = next(csv.reader(io.StringIO(header_line)))
    if [h.strip() for h in header] != _HEADER:
        raise CostTableError(
            f"{source}:{data_lines[0][0]}: header must be "
            + ",".join(_HEADER))

    entries: Dict[TableKey, CostEntry] = {}
    for lineno, line in data_lines[1:]:
        where = f"{source}:{lineno}"
        row = next(csv.reader(io.StringIO(line)))
        if len(row) != len(_HEADER):
            raise CostTableError(f"{where}: expected {len(_HEADER)} columns")
        kind_s, cls_s, loc_s, uops_s, cyc_s = (cell.strip() for cell in row)
        try:
            kind = _KIND_BY_NAME[kind_s]
        except KeyError:
            raise CostTableError(f"{where}: unknown op_kind {kind_s!r}") from None
        try:
            cls = _CLASS_BY_NAME[cls_s]
        except KeyError:
            raise CostTableError(f"{where}: unknown data_class {cls_s!r}") from None
        try:
            loc = _LOCATION_BY_NAME[loc_s]
        except KeyError:
            raise CostTableError(
                f"{where}: unknown operand_location {loc_s!r}") from None
        try:
            micro_ops = int(uops_s)
        except ValueError:
            raise CostTableError(f"{where}: bad micro_ops {uops_s!r}") from None
        if micro_ops < 0:
            raise CostTableError(f"{where}: micro_ops must be >= 0")
        cycles = _parse_cycles(cyc_s, where)
        key = (kind, cls, loc)
        if key in entries:
            raise CostTableError(
                f"{where}: duplicate entry for "
                f"{kind.value},{cls.value},{loc.value}")
        entries[key] = CostEntry(micro_ops=micro_ops, cycles=cycles)

    return InstructionCostTable(entries=entries, source=meta["source"],
                                date=meta["date"])


def load_cost_table(path: str | Path) -> InstructionCostTable:
    path = Path(path)
    if not path.exists():
        raise CostTableError(f"cost table not found: {path}")
    return parse_cost_table(path.read_text(), source=str(path))


def load_default_cost_table() -> InstructionCostTable:
    text = resources.files("phyenergy").joinpath(
        "data", DEFAULT_TABLE_RESOURCE).read_text()
    return parse_cost_table(text, source=f"bundled:{DEFAULT_TABLE_RESOURCE}")


def expand_flops(tally: OperationTally) -> OperationTally:
    """Rewrite each FLOP as one ADD plus one MUL of the same class."""
    counts = {}
    for (kind, cls), n in tally.as_dict().items():
        if kind is OpKind.FLOP:
            counts[(OpKind.ADD, cls)] = counts.get((OpKind.ADD, cls), 0) + n
            counts[(OpKind.MUL, cls)] = counts.get((OpKind.MUL, cls), 0) + n
        else:
            counts[(kind, cls)] = counts.get((kind, cls), 0) + n
    return OperationTally(counts)


@dataclass(frozen=True)
class CostTotals:
    micro_ops: int
    cycles: Fraction


def cycles_for(tally: OperationTally, table: InstructionCostTable) -> CostTotals:
    """Micro-ops and cycles for a tally under a cost table (exact)."""
    micro_ops = 0
    cycles = Fraction(0)
    for (kind, cls), n in expand_flops(tally).items():
        entry = table.lookup(kind, cls)
        micro_ops += n * entry.micro_ops
        cycles += n * entry.cycles
    return CostTotals(micro_ops=micro_ops, cycles=cycles)


def energy_per_cycle(kappa: float, clock_hz: float) -> float:
    """Joules per cycle: kappa times the squared clock frequency."""
    if kappa <= 0 or clock_hz <= 0:
        raise ConfigError("kappa and clock_hz must be positive")
    return kappa * clock_hz * clock_hz


@dataclass(frozen=True)
class EnergyParams:
    kappa: float
    clock_hz: float

    @property
    def epsilon(self) -> float:
        return energy_per_cycle(self.kappa, self.clock_hz)


@dataclass(frozen=True)
class BlockCost:
    micro_ops: int
    cycles: Fraction
    energy_j: float
    cycles_per_bit: Optional[Fraction]   # None when no payload bits


@dataclass(frozen=True)
class EnergyReport:
    """Costed pipeline: per-block and total micro-ops, cycles, energy."""

    per_block: Mapping[BlockId, BlockCost]
    total: BlockCost
    bits_transmitted: int
    energy: EnergyParams
    table_source: str
    table_date: str
    scenario: Optional[Scenario] = None


def _block_cost(totals: CostTotals, bits: int, eps: float) -> BlockCost:
    per_bit = totals.cycles / bits if bits > 0 else None
    return BlockCost(
        micro_ops=totals.micro_ops,
        cycles=totals.cycles,
        energy_j=float(totals.cycles) * eps,
        cycles_per_bit=per_bit,
    )


def build_report(tallies: PipelineTallies, table: InstructionCostTable,
                 energy: EnergyParams,
                 scenario: Optional[Scenario] = None) -> EnergyReport:
    """Attach costs to pipeline tallies and aggregate totals."""
    eps = energy.epsilon
    bits = tallies.bits_transmitted
    per_block = {}
    total_uops = 0
    total_cycles = Fraction(0)
    for block in BlockId:
        totals = cycles_for(tallies.per_block[block], table)
        per_block[block] = _block_cost(totals, bits, eps)
        total_uops += totals.micro_ops
        total_cycles += totals.cycles
    total = _block_cost(CostTotals(total_uops, total_cycles), bits, eps)
    return EnergyReport(per_block=per_block, total=total,
                        bits_transmitted=bits, energy=energy,
                        table_source=table.source, table_date=table.date,
                        scenario=scenario)
