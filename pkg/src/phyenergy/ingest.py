"""Measurement-report ingestion and model-vs-measurement comparison.

A measurement report is delimited text with one row per operator
record::

    function_path,block,operator,data_type,shape,count

``block`` is a letter A-H or empty; empty cells are attributed by
longest-prefix match against a user-supplied path-to-block map, and
rows that still match nothing land in an "unattributed" bucket that is
reported separately.  The column set is a reconstruction of a profiler
export: the original tooling's exact column names are not public, so
this schema is the package's documented interchange format.

Measured rows run through the same cost path as modeled tallies
(location assignment, FLOP expansion, table lookup), which makes
model/measurement ratios invariant under cost-table rescaling.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .costmodel import EnergyReport, InstructionCostTable, cycles_for
from .errors import ConfigError, MeasurementError
from .opcount import (BlockId, DataClass, OpKind, OperationTally,
                      PipelineTallies)

_HEADER = ["function_path", "block", "operator", "data_type", "shape", "count"]

_KIND_BY_NAME = {kind.value: kind for kind in OpKind}
_CLASS_BY_NAME = {cls.value: cls for cls in DataClass}
_BLOCK_BY_NAME = {blk.value: blk for blk in BlockId}


@dataclass(frozen=True)
class MeasuredRow:
    function_path: str
    block: Optional[BlockId]
    operator: OpKind
    data_type: DataClass
    shape: str
    count: int


@dataclass(frozen=True)
class MeasurementMeta:
    source: str = ""
    rows_seen: int = 0
    rows_kept: int = 0
    rows_filtered: int = 0
    rows_unattributed: int = 0


@dataclass(frozen=True)
class MeasuredReport:
    rows: Tuple[MeasuredRow, ...]
    meta: MeasurementMeta = field(default_factory=MeasurementMeta)

    @property
    def empty(self) -> bool:
        return not self.rows


@dataclass(frozen=True)
class PathFilter:
    """Prefix allow/deny filter over profiled function paths.

    A path passes when it starts with some allow prefix (an empty
    allowlist admits everything) and starts with no deny prefix.
    Filtering is idempotent by construction.
    """

    allow: Tuple[str, ...] = ()
    deny: Tuple[str, ...] = ()

    def matches(self, path: str) -> bool:
        if self.allow and not any(path.startswith(p) for p in self.allow):
            return False
        return not any(path.startswith(p) for p in self.deny)


def assign_block(path: str, block_map: Mapping[str, BlockId]) -> Optional[BlockId]:
    """Longest-prefix block attribution; None when nothing matches."""
    best: Optional[BlockId] = None
    best_len = -1
    for prefix, block in block_map.items():
        if path.startswith(prefix) and len(prefix) > best_len:
            best, best_len = block, len(prefix)
    return best


def parse_measurement(path: str | Path,
                      path_filter: Optional[PathFilter] = None,
                      block_map: Optional[Mapping[str, BlockId]] = None,
                      ) -> MeasuredReport:
    """Read a measurement file, filter it, and attribute rows to blocks."""
    path = Path(path)
    if not path.exists():
        raise MeasurementError(f"measurement file not found: {path}")
    return parse_measurement_text(path.read_text(), source=str(path),
                                  path_filter=path_filter,
                                  block_map=block_map)


def parse_measurement_text(text: str, source: str = "<string>",
                           path_filter: Optional[PathFilter] = None,
                           block_map: Optional[Mapping[str, BlockId]] = None,
                           ) -> MeasuredReport:
    path_filter = path_filter or PathFilter()
    block_map = block_map or {}

    lines = [(n, ln.strip()) for n, ln in enumerate(text.splitlines(), start=1)
             if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise MeasurementError(f"{source}: empty measurement file")

    header = next(csv.reader(io.StringIO(lines[0][1])))
    if [h.strip() for h in header] != _HEADER:
        raise MeasurementError(
            f"{source}:{lines[0][0]}: header must be " + ",".join(_HEADER))

    rows: list[MeasuredRow] = []
    seen = kept = filtered = unattributed = 0
    for lineno, line in lines[1:]:
        where = f"{source}:{lineno}"
        cells = next(csv.reader(io.StringIO(line)))
        if len(cells) != len(_HEADER):
            raise MeasurementError(
                f"{where}: expected {len(_HEADER)} columns, got {len(cells)}")
        fpath, block_s, op_s, type_s, shape, count_s = (c.strip() for c in cells)
        seen += 1

        try:
            operator = _KIND_BY_NAME[op_s]
        except KeyError:
            raise MeasurementError(
                f"{where}: unknown operator {op_s!r}") from None
        try:
            data_type = _CLASS_BY_NAME[type_s]
        except KeyError:
            raise MeasurementError(
                f"{where}: unknown data_type {type_s!r}") from None
        try:
            count = int(count_s)
        except ValueError:
            raise MeasurementError(
                f"{where}: count must be an integer, got {count_s!r}") from None
        if count < 0:
            raise MeasurementError(f"{where}: count must be >= 0")

        if block_s:
            try:
                block: Optional[BlockId] = _BLOCK_BY_NAME[block_s.upper()]
            except KeyError:
                raise MeasurementError(
                    f"{where}: unknown block {block_s!r}") from None
        else:
            block = assign_block(fpath, block_map)

        if not path_filter.matches(fpath):
            filtered += 1
            continue
        if block is None:
            unattributed += 1
        kept += 1
        rows.append(MeasuredRow(function_path=fpath, block=block,
                                operator=operator, data_type=data_type,
                                shape=shape, count=count))

    meta = MeasurementMeta(source=source, rows_seen=seen, rows_kept=kept,
                           rows_filtered=filtered,
                           rows_unattributed=unattributed)
    return MeasuredReport(rows=tuple(rows), meta=meta)


def serialize_measurement(rows: Iterable[MeasuredRow]) -> str:
    """Measurement rows back to delimited text (inverse of parsing)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(_HEADER)
    for row in rows:
        writer.writerow([
            row.function_path,
            row.block.value if row.block is not None else "",
            row.operator.value,
            row.data_type.value,
            row.shape,
            row.count,
        ])
    return out.getvalue()


def write_measurement(rows: Iterable[MeasuredRow], path: str | Path) -> None:
    Path(path).write_text(serialize_measurement(rows))


def rows_from_tallies(tallies: PipelineTallies,
                      path_prefix: str = "model/") -> list[MeasuredRow]:
    """Synthesize measurement rows that mirror modeled tallies exactly.

    Used to exercise the ingest/compare path against the model itself;
    re-ingesting these rows must reproduce every per-block cycle count.
    """
    rows = []
    for block in BlockId:
        fpath = f"{path_prefix}block_{block.value.lower()}"
        for (kind, cls), count in tallies.per_block[block].items():
            rows.append(MeasuredRow(function_path=fpath, block=block,
                                    operator=kind, data_type=cls,
                                    shape="", count=count))
    return rows


def load_filter_config(path: str | Path) -> tuple[PathFilter, Dict[str, BlockId]]:
    """Read a filter config: allow/deny prefix lists plus a block map."""
    import yaml

    path = Path(path)
    if not path.exists():
        raise ConfigError(f"filter file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: malformed config: {exc}") from None
    if raw is None:
        raw = {}
    if not isinstance(raw, Mapping):
        raise ConfigError(f"{path}: filter config must be a mapping")
    unknown = sorted(set(raw) - {"allow", "deny", "block_map"})
    if unknown:
        raise ConfigError(f"{path}: unknown filter keys: " + ", ".join(unknown))

    def _prefix_list(key: str) -> Tuple[str, ...]:
        value = raw.get(key, [])
        if value is None:
            return ()
        if not isinstance(value, Sequence) or isinstance(value, (str, bytes)):
            raise ConfigError(f"{path}: {key} must be a list of prefixes")
        return tuple(str(item) for item in value)

    block_map: Dict[str, BlockId] = {}
    raw_map = raw.get("block_map", {}) or {}
    if not isinstance(raw_map, Mapping):
        raise ConfigError(f"{path}: block_map must be a mapping")
    for prefix, letter in raw_map.items():
        name = str(letter).strip().upper()
        if name not in _BLOCK_BY_NAME:
            raise ConfigError(
                f"{path}: block_map value {letter!r} is not a block A-H")
        block_map[str(prefix)] = _BLOCK_BY_NAME[name]

    return PathFilter(allow=_prefix_list("allow"),
                      deny=_prefix_list("deny")), block_map


# ---------------------------------------------------------------------------
# Costing measured rows and comparing against the model


def _block_tallies(report: MeasuredReport) -> Dict[Optional[BlockId],
                                                   OperationTally]:
    grouped: Dict[Optional[BlockId], Dict] = {}
    for row in report.rows:
        counts = grouped.setdefault(row.block, {})
        key = (row.operator, row.data_type)
        counts[key] = counts.get(key, 0) + row.count
    return {blk: OperationTally(counts) for blk, counts in grouped.items()}


def measured_cycles(report: MeasuredReport,
                    table: InstructionCostTable) -> Dict[BlockId, Fraction]:
    """Per-block measured cycles through the shared cost path.

    Every block appears in the result (zero when absent from the
    report).  Unattributed rows are excluded here; see
    :func:`unattributed_cycles`.
    """
    grouped = _block_tallies(report)
    out: Dict[BlockId, Fraction] = {}
    for block in BlockId:
        tally = grouped.get(block)
        out[block] = cycles_for(tally, table).cycles if tally else Fraction(0)
    return out


def unattributed_cycles(report: MeasuredReport,
                        table: InstructionCostTable) -> Fraction:
    """Cycles from rows that could not be attributed to any block."""
    tally = _block_tallies(report).get(None)
    return cycles_for(tally, table).cycles if tally else Fraction(0)


@dataclass(frozen=True)
class BlockComparison:
    modeled_cycles: Fraction
    measured_cycles: Optional[Fraction]
    ratio: Optional[Fraction]                # modeled / measured
    signed_relative_error: Optional[float]   # (modeled - measured) / measured
    flag: str                                # over | under | match | undefined


@dataclass(frozen=True)
class ComparisonReport:
    per_block: Mapping[BlockId, BlockComparison]
    total: BlockComparison
    unattributed_cycles: Fraction = Fraction(0)

    @property
    def overestimated(self) -> Tuple[BlockId, ...]:
        return tuple(b for b in BlockId if self.per_block[b].flag == "over")

    @property
    def underestimated(self) -> Tuple[BlockId, ...]:
        return tuple(b for b in BlockId if self.per_block[b].flag == "under")


def _compare_pair(modeled: Fraction,
                  measured: Optional[Fraction]) -> BlockComparison:
    if measured is None or measured == 0:
        return BlockComparison(modeled_cycles=modeled,
                               measured_cycles=measured,
                               ratio=None, signed_relative_error=None,
                               flag="undefined")
    ratio = modeled / measured
    err = float((modeled - measured) / measured)
    flag = "over" if modeled > measured else (
        "under" if modeled < measured else "match")
    return BlockComparison(modeled_cycles=modeled, measured_cycles=measured,
                           ratio=ratio, signed_relative_error=err, flag=flag)


def compare(modeled: EnergyReport,
            measured: Mapping[BlockId, Fraction],
            unattributed: Fraction = Fraction(0)) -> ComparisonReport:
    """Per-block modeled/measured ratios with over/under flags.

    Blocks missing from ``measured`` (or measured at zero cycles) get
    an undefined ratio rather than an error.  Totals compare the sum
    of modeled cycles against the sum of the measured cycles that are
    present.
    """
    per_block = {}
    total_modeled = Fraction(0)
    total_measured = Fraction(0)
    any_measured = False
    for block in BlockId:
        m_cycles = modeled.per_block[block].cycles
        meas = measured.get(block)
        per_block[block] = _compare_pair(m_cycles, meas)
        total_modeled += m_cycles
        if meas is not None:
            total_measured += meas
            any_measured = True
    total = _compare_pair(total_modeled,
                          total_measured if any_measured else None)
    return ComparisonReport(per_block=per_block, total=total,
                            unattributed_cycles=unattributed)
