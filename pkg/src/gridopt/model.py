"""Intermediate representation of the mixed-integer interpolation problem.

Holds variables, linear constraints, and interpolant bindings, with validation
and size accounting for the MILP relaxation that will be built from it. The IR
is immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import BoundsOutsideHull, DanglingVariable, DimensionMismatch
from .gridtab import LookupTable

CONTINUOUS = "continuous"
BINARY = "binary"

LE = "<="
EQ = "="
GE = ">="


@dataclass(frozen=True)
class VarRef:
    id: int
    kind: str
    lo: float
    hi: float
    name: str = ""

    def __post_init__(self):
        if self.kind not in (CONTINUOUS, BINARY):
            raise ValueError(f"unknown variable kind {self.kind!r}")
        if self.kind == BINARY and (self.lo, self.hi) != (0.0, 1.0):
            raise ValueError("binary variables must have bounds [0, 1]")
        if self.lo > self.hi:
            raise ValueError(f"variable {self.id}: lo > hi")


@dataclass(frozen=True)
class LinConstraint:
    terms: tuple[tuple[float, int], ...]  # (coefficient, variable id)
    sense: str
    rhs: float
    name: str = ""

    def __post_init__(self):
        if self.sense not in (LE, EQ, GE):
            raise ValueError(f"unknown sense {self.sense!r}")


@dataclass(frozen=True)
class InterpolantDef:
    table: LookupTable
    inputs: tuple[int, ...]  # continuous variable ids, one per grid axis
    output: int  # continuous variable id
    activation: Optional[int] = None  # binary variable id


@dataclass(frozen=True)
class ProblemIR:
    variables: tuple[VarRef, ...]
    constraints: tuple[LinConstraint, ...]
    interpolants: tuple[InterpolantDef, ...]
    objective: tuple[tuple[float, int], ...]  # minimization
    maximize: bool = False  # objective was negated from a maximization input
    name: str = ""

    def var(self, vid: int) -> VarRef:
        return self._by_id[vid]

    @property
    def _by_id(self) -> dict[int, VarRef]:
        return {v.id: v for v in self.variables}

    @property
    def binary_ids(self) -> tuple[int, ...]:
        return tuple(v.id for v in self.variables if v.kind == BINARY)

    @property
    def num_binaries(self) -> int:
        return len(self.binary_ids)


@dataclass(frozen=True)
class SizeRecord:
    """Column/row accounting of the relaxation induced by an IR."""

    n_xi: int
    n_lambda: int
    n_y: int
    n_segment: int
    n_vars: int
    rows: int
    cols: int
    nonzeros: int


def _norm_terms(terms: Iterable[Sequence]) -> tuple[tuple[float, int], ...]:
    return tuple((float(c), int(v)) for c, v in terms)


def build_problem(
    variables: Iterable[VarRef],
    constraints: Iterable[LinConstraint] = (),
    interpolants: Iterable[InterpolantDef] = (),
    objective: Iterable[Sequence] = (),
    maximize: bool = False,
    name: str = "",
) -> ProblemIR:
    """Assemble and validate a ProblemIR.

    Maximization objectives are negated into minimization, with the flip
    recorded on the IR.
    """
    variables = tuple(variables)
    by_id: dict[int, VarRef] = {}
    for v in variables:
        if v.id in by_id:
            raise ValueError(f"duplicate variable id {v.id}")
        by_id[v.id] = v

    def require(vid: int, where: str) -> VarRef:
        if vid not in by_id:
            raise DanglingVariable(f"{where} references undeclared variable {vid}")
        return by_id[vid]

    constraints = tuple(
        LinConstraint(_norm_terms(c.terms), c.sense, float(c.rhs), c.name)
        for c in constraints
    )
    for c in constraints:
        seen = set()
        for coef, vid in c.terms:
            require(vid, f"constraint {c.name or '?'}")
            if not math.isfinite(coef):
                raise ValueError(f"non-finite coefficient in {c.name or '?'}")
            if vid in seen:
                raise ValueError(f"variable {vid} repeated in {c.name or '?'}")
            seen.add(vid)

    interpolants = tuple(interpolants)
    for idx, itp in enumerate(interpolants):
        grid = itp.table.grid
        if len(itp.inputs) != grid.n:
            raise DimensionMismatch(
                f"interpolant {idx}: {len(itp.inputs)} inputs for {grid.n} axes"
            )
        if len(set(itp.inputs)) != len(itp.inputs):
            raise ValueError(f"interpolant {idx}: repeated input variable")
        for j, vid in enumerate(itp.inputs):
            v = require(vid, f"interpolant {idx}")
            if v.kind != CONTINUOUS:
                raise ValueError(f"interpolant {idx}: input {vid} must be continuous")
            if itp.activation is None:
                a = grid.axes[j]
                if v.lo < a[0] - 1e-12 or v.hi > a[-1] + 1e-12:
                    raise BoundsOutsideHull(
                        f"interpolant {idx}: input {vid} bounds [{v.lo}, {v.hi}] "
                        f"exceed axis hull [{a[0]}, {a[-1]}]"
                    )
        out = require(itp.output, f"interpolant {idx}")
        if out.kind != CONTINUOUS:
            raise ValueError(f"interpolant {idx}: output must be continuous")
        if itp.activation is not None:
            act = require(itp.activation, f"interpolant {idx}")
            if act.kind != BINARY:
                raise ValueError(f"interpolant {idx}: activation must be binary")

    obj = _norm_terms(objective)
    for coef, vid in obj:
        require(vid, "objective")
    if maximize:
        obj = tuple((-c, v) for c, v in obj)

    return ProblemIR(
        variables=variables,
        constraints=constraints,
        interpolants=interpolants,
        objective=obj,
        maximize=maximize,
        name=name,
    )


def validate(ir: ProblemIR) -> list[str]:
    """Diagnostic sweep over the IR invariants; empty list means all hold."""
    report: list[str] = []
    ids = {v.id for v in ir.variables}
    for v in ir.variables:
        if v.lo > v.hi:
            report.append(f"variable {v.id}: lo > hi")
        if v.kind == BINARY and (v.lo, v.hi) != (0.0, 1.0):
            report.append(f"variable {v.id}: binary bounds not [0, 1]")
    for c in ir.constraints:
        seen = set()
        for coef, vid in c.terms:
            if vid not in ids:
                report.append(f"constraint {c.name or '?'}: undeclared variable {vid}")
            if vid in seen:
                report.append(f"constraint {c.name or '?'}: repeated variable {vid}")
            seen.add(vid)
            if not math.isfinite(coef):
                report.append(f"constraint {c.name or '?'}: non-finite coefficient")
    used = {vid for c in ir.constraints for _, vid in c.terms}
    used |= {vid for _, vid in ir.objective}
    for idx, itp in enumerate(ir.interpolants):
        if not np.all(np.isfinite(itp.table.values)):
            report.append(f"interpolant {idx}: non-finite table value")
        if itp.output not in used:
            report.append(f"interpolant {idx}: output {itp.output} unused")
    return report


def problem_size(ir: ProblemIR) -> SizeRecord:
    """Deterministic size of the relaxation that build_relaxation will create.

    Nonzeros are structural: one per stored coefficient, table zeros included.
    """
    n_xi = n_lambda = n_seg = 0
    rows = len(ir.constraints)
    nnz = sum(len(c.terms) for c in ir.constraints)
    for itp in ir.interpolants:
        sizes = itp.table.grid.shape
        prod = int(np.prod(sizes))
        act = 1 if itp.activation is not None else 0
        for K in sizes:
            n_xi += K
            n_seg += K - 1
            rows += 3 + 2 * K
            nnz += (1 + K)  # linking row
            nnz += K + act  # convexity row
            nnz += K + prod  # marginalization rows
            nnz += (K - 1) + act  # segment-sum row
            nnz += 3 * K - 2  # xi <= s rows
        n_lambda += prod
        rows += 1  # output row
        nnz += 1 + prod
    n_vars = len(ir.variables)
    n_y = ir.num_binaries
    cols = n_vars + n_xi + n_lambda + n_seg
    return SizeRecord(
        n_xi=n_xi,
        n_lambda=n_lambda,
        n_y=n_y,
        n_segment=n_seg,
        n_vars=n_vars,
        rows=rows,
        cols=cols,
        nonzeros=nnz,
    )
