"""Versioned JSON serialization of problem instances.

The document stores grids and tables (flat values with an explicit ordering
tag), variables, linear constraints, interpolant bindings, the objective in its
original sense, and optional scenario metadata plus the RNG seed that produced
the instance. Serialization is canonical (sorted keys, fixed indentation), so
parse followed by serialize is the identity on canonical files.
"""

from __future__ import annotations

import json
from typing import Optional

from .gridtab import make_grid, make_table
from .model import (
    InterpolantDef,
    LinConstraint,
    ProblemIR,
    VarRef,
    build_problem,
)

FORMAT_VERSION = 1
ORDERING = "last-axis-fastest"


def ir_to_dict(
    ir: ProblemIR,
    scenario: Optional[dict] = None,
    seed: Optional[int] = None,
) -> dict:
    tables = []
    table_index: dict[int, int] = {}
    for itp in ir.interpolants:
        if id(itp.table) not in table_index:
            table_index[id(itp.table)] = len(tables)
            tables.append(
                {
                    "axes": [list(map(float, a)) for a in itp.table.grid.axes],
                    "values": list(map(float, itp.table.values)),
                    "ordering": ORDERING,
                }
            )
    objective = ir.objective
    if ir.maximize:  # stored minimization form; file carries the original sense
        objective = tuple((-c, v) for c, v in objective)
    return {
        "version": FORMAT_VERSION,
        "name": ir.name,
        "maximize": ir.maximize,
        "variables": [
            {"id": v.id, "kind": v.kind, "lo": v.lo, "hi": v.hi, "name": v.name}
            for v in ir.variables
        ],
        "constraints": [
            {
                "terms": [[c, v] for c, v in cons.terms],
                "sense": cons.sense,
                "rhs": cons.rhs,
                "name": cons.name,
            }
            for cons in ir.constraints
        ],
        "tables": tables,
        "interpolants": [
            {
                "table": table_index[id(itp.table)],
                "inputs": list(itp.inputs),
                "output": itp.output,
                "activation": itp.activation,
            }
            for itp in ir.interpolants
        ],
        "objective": [[c, v] for c, v in objective],
        "scenario": scenario,
        "seed": seed,
    }


def ir_from_dict(doc: dict) -> ProblemIR:
    if "version" not in doc:
        raise ValueError("instance file is missing the version field")
    if doc["version"] != FORMAT_VERSION:
        raise ValueError(f"unsupported instance format version {doc['version']}")
    tables = []
    for t in doc["tables"]:
        if t.get("ordering") != ORDERING:
            raise ValueError(f"unsupported value ordering {t.get('ordering')!r}")
        tables.append(make_table(make_grid(t["axes"]), t["values"]))
    variables = [
        VarRef(int(v["id"]), v["kind"], float(v["lo"]), float(v["hi"]), v.get("name", ""))
        for v in doc["variables"]
    ]
    constraints = [
        LinConstraint(
            tuple((float(c), int(v)) for c, v in cons["terms"]),
            cons["sense"],
            float(cons["rhs"]),
            cons.get("name", ""),
        )
        for cons in doc["constraints"]
    ]
    interps = [
        InterpolantDef(
            tables[int(i["table"])],
            tuple(int(v) for v in i["inputs"]),
            int(i["output"]),
            None if i.get("activation") is None else int(i["activation"]),
        )
        for i in doc["interpolants"]
    ]
    return build_problem(
        variables,
        constraints,
        interps,
        objective=[(float(c), int(v)) for c, v in doc["objective"]],
        maximize=bool(doc.get("maximize", False)),
        name=doc.get("name", ""),
    )


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def save(path: str, ir: ProblemIR, scenario=None, seed=None) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(ir_to_dict(ir, scenario=scenario, seed=seed)))


def load(path: str) -> tuple[ProblemIR, dict]:
    """Read an instance; returns the IR and the raw document (for metadata)."""
    with open(path) as fh:
        doc = json.load(fh)
    return ir_from_dict(doc), doc
