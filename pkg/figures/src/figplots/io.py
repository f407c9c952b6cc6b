"""Readers for the glsbi output formats.

Figures consume only the documented CSV files and the versioned table
format; nothing is recomputed from simulations.  A missing column raises
SchemaError naming the expected header.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass


class SchemaError(Exception):
    """Input file does not carry the expected columns."""

    def __init__(self, path, expected: list[str], found: list[str] | None):
        self.expected = expected
        super().__init__(
            f"{path}: expected header with columns {','.join(expected)}, "
            f"found {','.join(found) if found else 'nothing'}"
        )


def read_csv(path, required: list[str]) -> list[dict[str, str]]:
    """Rows as dicts; header must contain every required column."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if header is None or any(col not in header for col in required):
            raise SchemaError(path, required, header)
        return list(reader)


def floats(rows: list[dict], column: str) -> list[float]:
    return [float(r[column]) for r in rows]


@dataclass
class TablePointData:
    p: float
    m: int
    excluded: int
    mu: float
    sigma: float
    edges: list[float]
    densities: list[float]


@dataclass
class TableData:
    kind: str
    meta: dict[str, str]
    points: list[TablePointData]


def read_table(path) -> TableData:
    """Parse the versioned sampling-distribution table format."""
    meta: dict[str, str] = {}
    points: list[TablePointData] = []
    kind = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                key, value = key.strip(), value.strip()
                if key == "kind":
                    kind = value
                else:
                    meta[key] = value
                continue
            parts = line.split(",")
            if len(parts) < 7:
                raise SchemaError(
                    path, ["p", "m", "excluded", "mu", "sigma", "bin_count", "edges..."], parts
                )
            bcount = int(parts[5])
            points.append(
                TablePointData(
                    p=float(parts[0]),
                    m=int(parts[1]),
                    excluded=int(parts[2]),
                    mu=float(parts[3]),
                    sigma=float(parts[4]),
                    edges=[float(v) for v in parts[6 : 7 + bcount]],
                    densities=[float(v) for v in parts[7 + bcount : 7 + 2 * bcount]],
                )
            )
    if kind is None:
        raise SchemaError(path, ["# kind: <statistic>"], None)
    return TableData(kind=kind, meta=meta, points=points)
