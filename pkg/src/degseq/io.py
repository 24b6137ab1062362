"""File formats.

Degree files: one non-negative integer per line, vertex = 0-based line number.
Graph files: one edge per line as "j k" with j < k, 0-based.
Matrix files: CSV with header "i,j,value", strict upper triangle only.
Family files: edge-list blocks separated by blank lines.
Trace files: one JSON object per line.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

from .graphs import DegreeSequence, SimpleGraph, SymmetricProbMatrix, tri_pairs
from .oracle import GraphFamily


def read_degree_file(path: str | Path) -> DegreeSequence:
    degrees = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line:
            degrees.append(int(line))
    return DegreeSequence(tuple(degrees))


def write_degree_file(path: str | Path, d: DegreeSequence | Sequence[int]) -> None:
    d = DegreeSequence.of(d)
    Path(path).write_text("".join(f"{x}\n" for x in d.degrees))


def read_edge_list(path: str | Path, n: int) -> SimpleGraph:
    edges = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        j, k = line.split()
        edges.append((int(j), int(k)))
    return SimpleGraph.from_edges(n, edges)


def write_edge_list(path: str | Path, g: SimpleGraph) -> None:
    Path(path).write_text(_edge_block(g))


def _edge_block(g: SimpleGraph) -> str:
    return "".join(f"{j} {k}\n" for j, k in g.sorted_edges())


def write_matrix_csv(path: str | Path, m: SymmetricProbMatrix) -> None:
    lines = ["i,j,value\n"]
    for idx, (j, k) in enumerate(tri_pairs(m.n)):
        lines.append(f"{j},{k},{float(m.tri[idx])!r}\n")
    Path(path).write_text("".join(lines))


def read_matrix_csv(path: str | Path) -> SymmetricProbMatrix:
    import numpy as np

    rows = Path(path).read_text().splitlines()
    if not rows or rows[0].strip() != "i,j,value":
        raise ValueError("expected header 'i,j,value'")
    entries: dict[tuple[int, int], float] = {}
    n = 0
    for line in rows[1:]:
        line = line.strip()
        if not line:
            continue
        i, j, value = line.split(",")
        i, j = int(i), int(j)
        if not i < j:
            raise ValueError("matrix files carry the strict upper triangle only")
        entries[(i, j)] = float(value)
        n = max(n, j + 1)
    dense = np.zeros((n, n))
    for (i, j), v in entries.items():
        dense[i, j] = v
        dense[j, i] = v
    return SymmetricProbMatrix.from_dense(dense)


def write_family(path: str | Path, fam: GraphFamily) -> None:
    blocks = [_edge_block(member) for member in fam.members]
    Path(path).write_text("\n".join(blocks))


def read_family_edge_lists(path: str | Path, n: int) -> list[SimpleGraph]:
    graphs = []
    current: list[tuple[int, int]] = []
    text = Path(path).read_text()
    for line in text.splitlines():
        line = line.strip()
        if not line:
            graphs.append(SimpleGraph.from_edges(n, current))
            current = []
            continue
        j, k = line.split()
        current.append((int(j), int(k)))
    graphs.append(SimpleGraph.from_edges(n, current))
    return graphs


def write_trace_ndjson(path: str | Path, traces: Iterable[dict]) -> None:
    with open(path, "w") as fh:
        for record in traces:
            fh.write(json.dumps(record, sort_keys=True))
            fh.write("\n")
