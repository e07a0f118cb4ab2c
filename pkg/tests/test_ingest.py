from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_table, reference_scenario

from phyenergy.costmodel import EnergyParams, build_report
from phyenergy.errors import ConfigError, MeasurementError
from phyenergy.ingest import (MeasuredRow, PathFilter, assign_block, compare,
                              load_filter_config, measured_cycles,
                              parse_measurement, parse_measurement_text,
                              rows_from_tallies, serialize_measurement,
                              unattributed_cycles, write_measurement)
from phyenergy.opcount import BlockId, DataClass, OpKind, tally_pipeline

HEADER = "function_path,block,operator,data_type,shape,count\n"

SMALL = HEADER + """\
nr5g/dlsch/crc,A,XOR,logical_scalar,32,596
nr5g/dlsch/crc,A,AND,logical_scalar,32,596
nr5g/scrambling,B,XOR,logical_vector,64,4000
nr5g/helpers/pad,,SET,int_scalar,1,12
"""


# ---------------------------------------------------------------------------
# Parsing


def test_parse_small_report():
    report = parse_measurement_text(SMALL)
    assert report.meta.rows_seen == 4
    assert report.meta.rows_kept == 4
    assert report.meta.rows_unattributed == 1
    assert report.rows[0].block is BlockId.A
    assert report.rows[0].operator is OpKind.XOR
    assert report.rows[0].data_type is DataClass.LOGICAL_SCALAR
    assert report.rows[0].count == 596
    assert report.rows[3].block is None


def test_parse_requires_header():
    with pytest.raises(MeasurementError, match="header"):
        parse_measurement_text("a,b,c\n1,2,3\n")


def test_parse_empty_file():
    with pytest.raises(MeasurementError, match="empty"):
        parse_measurement_text("# only comments\n")


def test_parse_errors_carry_row_numbers():
    bad_op = HEADER + "f,A,NOP,int_scalar,1,5\n"
    with pytest.raises(MeasurementError, match=r":2: unknown operator"):
        parse_measurement_text(bad_op)
    bad_type = HEADER + "\n\nf,A,ADD,int128,1,5\n"
    with pytest.raises(MeasurementError, match=r":4: unknown data_type"):
        parse_measurement_text(bad_type)
    bad_count = HEADER + "f,A,ADD,int_scalar,1,many\n"
    with pytest.raises(MeasurementError, match=r":2: count"):
        parse_measurement_text(bad_count)
    negative = HEADER + "f,A,ADD,int_scalar,1,-4\n"
    with pytest.raises(MeasurementError, match=r":2: count must be >= 0"):
        parse_measurement_text(negative)
    bad_block = HEADER + "f,Q,ADD,int_scalar,1,5\n"
    with pytest.raises(MeasurementError, match=r":2: unknown block"):
        parse_measurement_text(bad_block)
    short_row = HEADER + "f,A,ADD\n"
    with pytest.raises(MeasurementError, match="expected 6 columns"):
        parse_measurement_text(short_row)


def test_parse_block_letter_case_insensitive():
    report = parse_measurement_text(HEADER + "f,h,ADD,int_scalar,1,5\n")
    assert report.rows[0].block is BlockId.H


def test_parse_missing_file(tmp_path):
    with pytest.raises(MeasurementError, match="not found"):
        parse_measurement(tmp_path / "gone.csv")


def test_roundtrip_through_file(tmp_path):
    report = parse_measurement_text(SMALL)
    path = tmp_path / "m.csv"
    write_measurement(report.rows, path)
    again = parse_measurement(path)
    assert again.rows == report.rows
    assert serialize_measurement(again.rows) == serialize_measurement(report.rows)


# ---------------------------------------------------------------------------
# Filtering and attribution


def test_filter_allow_deny_semantics():
    f = PathFilter(allow=("nr5g/",), deny=("nr5g/internal/",))
    assert f.matches("nr5g/dlsch/crc")
    assert not f.matches("nr5g/internal/scratch")
    assert not f.matches("matlab/startup")
    assert PathFilter().matches("anything/at/all")


def test_filter_applied_during_parse():
    f = PathFilter(allow=("nr5g/",), deny=("nr5g/helpers/",))
    report = parse_measurement_text(SMALL, path_filter=f)
    assert report.meta.rows_seen == 4
    assert report.meta.rows_kept == 3
    assert report.meta.rows_filtered == 1
    assert report.meta.rows_unattributed == 0
    assert all(r.block is not None for r in report.rows)


def test_filter_is_idempotent():
    f = PathFilter(allow=("nr5g/",), deny=("nr5g/helpers/",))
    once = parse_measurement_text(SMALL, path_filter=f)
    again = parse_measurement_text(serialize_measurement(once.rows),
                                   path_filter=f)
    assert again.rows == once.rows


def test_longest_prefix_attribution():
    block_map = {"nr5g/": BlockId.A, "nr5g/scramb": BlockId.B}
    assert assign_block("nr5g/scrambling", block_map) is BlockId.B
    assert assign_block("nr5g/dlsch/crc", block_map) is BlockId.A
    assert assign_block("other/", block_map) is None


def test_block_map_fills_empty_cells_only():
    block_map = {"nr5g/helpers/": BlockId.D}
    report = parse_measurement_text(SMALL, block_map=block_map)
    assert report.meta.rows_unattributed == 0
    by_path = {r.function_path: r for r in report.rows}
    assert by_path["nr5g/helpers/pad"].block is BlockId.D
    # explicit letters win over the map
    assert by_path["nr5g/scrambling"].block is BlockId.B


def test_load_filter_config(tmp_path):
    path = tmp_path / "f.yaml"
    path.write_text(
        "allow:\n  - nr5g/\ndeny:\n  - nr5g/internal/\n"
        "block_map:\n  nr5g/dlsch: A\n  nr5g/ofdm: d\n")
    pf, bmap = load_filter_config(path)
    assert pf.allow == ("nr5g/",)
    assert pf.deny == ("nr5g/internal/",)
    assert bmap == {"nr5g/dlsch": BlockId.A, "nr5g/ofdm": BlockId.D}


def test_load_filter_config_rejects_bad_block(tmp_path):
    path = tmp_path / "f.yaml"
    path.write_text("block_map:\n  x: Z\n")
    with pytest.raises(ConfigError, match="not a block"):
        load_filter_config(path)


def test_load_filter_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "f.yaml"
    path.write_text("allowlist: []\n")
    with pytest.raises(ConfigError, match="unknown filter keys"):
        load_filter_config(path)


# ---------------------------------------------------------------------------
# Costing measured rows


def test_measured_cycles_covers_all_blocks(uniform_table):
    report = parse_measurement_text(SMALL)
    cycles = measured_cycles(report, uniform_table)
    assert set(cycles) == set(BlockId)
    assert cycles[BlockId.A] == 1192
    assert cycles[BlockId.B] == 4000
    assert cycles[BlockId.C] == 0
    assert unattributed_cycles(report, uniform_table) == 12


def test_measured_cycles_additive_over_rows(uniform_table):
    doubled = SMALL + "nr5g/dlsch/crc,A,XOR,logical_scalar,32,596\n"
    once = measured_cycles(parse_measurement_text(SMALL), uniform_table)
    twice = measured_cycles(parse_measurement_text(doubled), uniform_table)
    assert twice[BlockId.A] == once[BlockId.A] + 596
    assert twice[BlockId.B] == once[BlockId.B]


def test_measured_rows_expand_flops(uniform_table):
    text = HEADER + "f,C,FLOP,double_scalar,1,100\n"
    cycles = measured_cycles(parse_measurement_text(text), uniform_table)
    assert cycles[BlockId.C] == 200


# ---------------------------------------------------------------------------
# Synthesis and comparison


def _reference_report(table):
    tallies = tally_pipeline(reference_scenario())
    return tallies, build_report(tallies, table,
                                 EnergyParams(kappa=1e-25, clock_hz=2.1e9))


def test_synthesized_rows_reproduce_model_exactly(uniform_table):
    tallies, report = _reference_report(uniform_table)
    rows = rows_from_tallies(tallies)
    parsed = parse_measurement_text(serialize_measurement(rows))
    meas = measured_cycles(parsed, uniform_table)
    comparison = compare(report, meas)
    for block in BlockId:
        assert comparison.per_block[block].ratio == 1
        assert comparison.per_block[block].flag == "match"
        assert comparison.per_block[block].signed_relative_error == 0.0
    assert comparison.total.ratio == 1
    assert comparison.overestimated == ()
    assert comparison.underestimated == ()


def test_comparison_ratio_is_table_scale_invariant():
    # same table on both sides: scaling cycle costs cancels in the ratio
    tallies, _ = _reference_report(make_table())
    rows = rows_from_tallies(tallies)
    parsed = parse_measurement_text(serialize_measurement(rows))
    for scale in (1, 3, 7):
        table = make_table(cycles=Fraction(scale))
        report = build_report(tallies, table,
                              EnergyParams(kappa=1e-25, clock_hz=2.1e9))
        meas = measured_cycles(parsed, table)
        comparison = compare(report, meas)
        assert comparison.total.ratio == 1


def test_compare_flags_over_and_under(uniform_table):
    _, report = _reference_report(uniform_table)
    meas = measured_cycles(
        parse_measurement_text(serialize_measurement(
            rows_from_tallies(tally_pipeline(reference_scenario())))),
        uniform_table)
    meas[BlockId.A] = meas[BlockId.A] * 2      # model now underestimates A
    meas[BlockId.D] = meas[BlockId.D] / 2      # model now overestimates D
    comparison = compare(report, meas)
    assert comparison.per_block[BlockId.A].flag == "under"
    assert comparison.per_block[BlockId.D].flag == "over"
    assert BlockId.D in comparison.overestimated
    assert BlockId.A in comparison.underestimated
    assert comparison.per_block[BlockId.A].ratio == Fraction(1, 2)
    assert comparison.per_block[BlockId.D].ratio == 2


def test_compare_handles_missing_blocks(uniform_table):
    _, report = _reference_report(uniform_table)
    meas = {BlockId.A: Fraction(100)}
    comparison = compare(report, meas)
    assert comparison.per_block[BlockId.B].flag == "undefined"
    assert comparison.per_block[BlockId.B].ratio is None
    assert comparison.per_block[BlockId.B].signed_relative_error is None
    # total still compares against the one measured block
    assert comparison.total.measured_cycles == 100


def test_compare_zero_measurement_is_undefined(uniform_table):
    _, report = _reference_report(uniform_table)
    meas = {b: Fraction(0) for b in BlockId}
    comparison = compare(report, meas)
    for b in BlockId:
        assert comparison.per_block[b].flag == "undefined"


def test_compare_records_unattributed_cycles(uniform_table):
    _, report = _reference_report(uniform_table)
    comparison = compare(report, {BlockId.A: Fraction(1)},
                         unattributed=Fraction(55))
    assert comparison.unattributed_cycles == 55


@given(scale=st.integers(min_value=1, max_value=9))
@settings(max_examples=9, deadline=None)
def test_scaling_measurement_scales_ratio_inversely(scale):
    table = make_table()
    tallies, report = _reference_report(table)
    rows = rows_from_tallies(tallies)
    meas = measured_cycles(
        parse_measurement_text(serialize_measurement(rows)), table)
    scaled = {b: c * scale for b, c in meas.items()}
    comparison = compare(report, scaled)
    assert comparison.total.ratio == Fraction(1, scale)
