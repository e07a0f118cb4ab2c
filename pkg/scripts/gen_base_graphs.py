#!/usr/bin/env python3
"""Regenerate the bundled LDPC base-graph descriptors.

The operation counts use only three facts about each base graph: its
row count, its column count, and its number of non-null entries.  The
descriptors written here reproduce those exactly for both standard
graphs (46x68 with 316 entries; 42x52 with 197 entries) on top of the
usual structure: dense first rows, a dual-diagonal core parity block,
and an identity extension.  Entry placement inside the systematic
columns and the per-entry shift values are deterministic placeholders,
not the standard's coefficient tables, and nothing in the package
reads them.
"""

from __future__ import annotations

from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "phyenergy" / "data"


def build_graph(rows: int, cols: int, info_cols: int, total: int,
                top_degree: int) -> list[tuple[int, int, int]]:
    core_cols = cols - info_cols - (rows - 4)   # parity core width
    entries: list[tuple[int, int]] = []

    # Dense top rows over the systematic columns.
    for r in range(4):
        for k in range(top_degree):
            entries.append((r, (r * 7 + k * 3) % info_cols))

    # Dual-diagonal core parity block on the first four rows.
    for r in range(4):
        entries.append((r, info_cols + r))
        entries.append((r, info_cols + (r + 1) % core_cols))

    # Identity extension: one parity column per remaining row.
    ext_start = info_cols + core_cols
    for i in range(rows - 4):
        entries.append((4 + i, ext_start + i))

    # Spread the remaining budget over the lower rows' systematic part.
    remaining = total - len(entries)
    lower_rows = rows - 4
    base_deg, extra = divmod(remaining, lower_rows)
    for i in range(lower_rows):
        r = 4 + i
        deg = base_deg + (1 if i < extra else 0)
        for k in range(deg):
            entries.append((r, (r * 7 + k * 3) % info_cols))

    assert len(entries) == len(set(entries)) == total, "placement collision"
    assert max(e[0] for e in entries) == rows - 1
    assert max(e[1] for e in entries) == cols - 1
    return [(r, c, (7 * r + 11 * c) % 384) for r, c in sorted(entries)]


def write_graph(name: str, rows: int, cols: int, info_cols: int,
                total: int, top_degree: int) -> None:
    entries = build_graph(rows, cols, info_cols, total, top_degree)
    lines = [
        f"# LDPC base graph descriptor: one line per non-null entry, 'row col shift'.",
        f"# {rows} rows x {cols} cols, {total} non-null entries,"
        f" {info_cols} systematic columns.",
        "# Entry placement and shift values are deterministic placeholders;",
        "# only the dimensions and the entry count feed the operation counts.",
        "# Regenerate with scripts/gen_base_graphs.py.",
    ]
    lines += [f"{r} {c} {s}" for r, c, s in entries]
    (DATA_DIR / name).write_text("\n".join(lines) + "\n")
    print(f"wrote {name}: {rows}x{cols}, {total} entries")


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    write_graph("bg1.txt", rows=46, cols=68, info_cols=22, total=316,
                top_degree=17)
    write_graph("bg2.txt", rows=42, cols=52, info_cols=10, total=197,
                top_degree=8)


if __name__ == "__main__":
    main()
