"""DIMACS CNF interchange plus the sidecar variable map for decoding models."""

from __future__ import annotations

from pathlib import Path
from typing import Union

from .bits import BitVector
from .graphs import AttributeRepresentation
from .represent import CnfEncoding


def write_dimacs(encoding: CnfEncoding, path: Union[str, Path]) -> None:
    lines = [f"p cnf {encoding.num_vars} {len(encoding.clauses)}"]
    for clause in encoding.clauses:
        lines.append(" ".join(str(lit) for lit in clause) + " 0")
    Path(path).write_text("\n".join(lines) + "\n")


def read_dimacs(path: Union[str, Path]):
    """Returns (num_vars, clauses)."""
    num_vars = None
    num_clauses = None
    clauses = []
    current = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            toks = line.split()
            if len(toks) != 4 or toks[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {line!r}")
            num_vars, num_clauses = int(toks[2]), int(toks[3])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if num_vars is None:
        raise ValueError("missing 'p cnf' header")
    if current:
        clauses.append(current)
    if num_clauses is not None and len(clauses) != num_clauses:
        raise ValueError(
            f"header promised {num_clauses} clauses, file has {len(clauses)}"
        )
    return num_vars, clauses


def write_varmap(encoding: CnfEncoding, path: Union[str, Path]) -> None:
    lines = []
    for key in sorted(encoding.varmap, key=lambda k: encoding.varmap[k]):
        lines.append(" ".join(str(part) for part in key) + f" {encoding.varmap[key]}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_varmap(path: Union[str, Path]) -> dict:
    varmap = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        toks = line.split()
        role = toks[0]
        if role in ("d", "p") and len(toks) == 4:
            key = (role, int(toks[1]), int(toks[2]))
        elif role in ("z", "c") and len(toks) == 5:
            key = (role, int(toks[1]), int(toks[2]), int(toks[3]))
        elif role == "xi" and len(toks) == 4:
            key = (role, int(toks[1]), int(toks[2]))
        else:
            raise ValueError(f"{path}:{lineno}: bad varmap line {line!r}")
        varmap[key] = int(toks[-1])
    return varmap


def read_model(path: Union[str, Path]) -> dict:
    """Parse a solver model file: whitespace-separated literals, optional
    'v ' prefixes and SAT/SATISFIABLE banner lines, terminated by 0."""
    model = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.upper() in ("SAT", "SATISFIABLE"):
            continue
        if line.startswith("v "):
            line = line[2:]
        if line.startswith("s "):
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                continue
            model[abs(lit)] = lit > 0
    return model


def decode_external_model(
    varmap: dict, model: dict, n: int, k: int, t: int
) -> AttributeRepresentation:
    donor = []
    patient = []
    for i in range(n):
        donor.append(
            BitVector.from_bits(int(model[varmap[("d", i, q)]]) for q in range(k))
        )
        patient.append(
            BitVector.from_bits(int(model[varmap[("p", i, q)]]) for q in range(k))
        )
    return AttributeRepresentation(k, t, tuple(donor), tuple(patient))
