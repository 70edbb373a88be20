"""Byte-deterministic readers/writers for graph and attribute files."""

from __future__ import annotations

from pathlib import Path
from typing import Union

from .bits import BitVector
from .graphs import AttributeRepresentation, CompatibilityGraph


class ParseError(ValueError):
    def __init__(self, path, lineno: int, message: str):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


def write_edge_list(graph: CompatibilityGraph, path: Union[str, Path]) -> None:
    lines = [f"{graph.n} {len(graph.edges)}"]
    for i, j in sorted(graph.edges):
        lines.append(f"{i} {j}")
    for a in sorted(graph.altruists):
        lines.append(f"altruist {a}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path: Union[str, Path]) -> CompatibilityGraph:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ParseError(path, 1, "empty file, expected 'n m' header")
    header = lines[0].split()
    if len(header) != 2 or not all(tok.isdigit() for tok in header):
        raise ParseError(path, 1, f"bad header {lines[0]!r}, expected 'n m'")
    n, m = int(header[0]), int(header[1])
    edges = set()
    altruists = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        toks = line.split()
        if toks[0] == "altruist":
            if len(toks) != 2 or not toks[1].isdigit():
                raise ParseError(path, lineno, f"bad altruist line {line!r}")
            a = int(toks[1])
            if a >= n:
                raise ParseError(path, lineno, f"altruist {a} out of range [0,{n})")
            altruists.add(a)
            continue
        if len(toks) != 2 or not all(tok.isdigit() for tok in toks):
            raise ParseError(path, lineno, f"bad edge line {line!r}, expected 'i j'")
        i, j = int(toks[0]), int(toks[1])
        if i == j or i >= n or j >= n:
            raise ParseError(path, lineno, f"edge ({i},{j}) invalid for n={n}")
        edges.add((i, j))
    if len(edges) != m:
        raise ParseError(path, 1, f"header promised {m} edges, file has {len(edges)}")
    return CompatibilityGraph(n, frozenset(edges), frozenset(altruists))


def write_attributes(rep: AttributeRepresentation, path: Union[str, Path]) -> None:
    lines = [f"{rep.n} {rep.k} {rep.t}"]
    for i in range(rep.n):
        lines.append(f"d:{rep.donor[i]} p:{rep.patient[i]}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_attributes(path: Union[str, Path]) -> AttributeRepresentation:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ParseError(path, 1, "empty file, expected 'n k t' header")
    header = lines[0].split()
    if len(header) != 3 or not all(tok.isdigit() for tok in header):
        raise ParseError(path, 1, f"bad header {lines[0]!r}, expected 'n k t'")
    n, k, t = (int(tok) for tok in header)
    donor = []
    patient = []
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != n:
        raise ParseError(path, 1, f"header promised {n} vertices, file has {len(body)}")
    for lineno, line in enumerate(body, start=2):
        toks = line.split()
        if (
            len(toks) != 2
            or not toks[0].startswith("d:")
            or not toks[1].startswith("p:")
        ):
            raise ParseError(path, lineno, f"bad vertex line {line!r}")
        d_str, p_str = toks[0][2:], toks[1][2:]
        if len(d_str) != k or len(p_str) != k or set(d_str + p_str) - {"0", "1"}:
            raise ParseError(path, lineno, f"vectors must be {k}-bit 0/1 strings")
        donor.append(BitVector.from_string(d_str))
        patient.append(BitVector.from_string(p_str))
    return AttributeRepresentation(k, t, tuple(donor), tuple(patient))
