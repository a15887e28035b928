"""MILP relaxation of the interpolation problem, fixing, and exclusion cuts.

The relaxation replaces each interpolant's weight products by their convex
envelope: per-axis convex-combination weights, corner weights coupled through
marginalization rows, and one binary per consecutive-breakpoint segment
realizing the SOS2 condition. Cuts are plain linear rows appended to the model;
the model is otherwise immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import NoValidSegment
from .gridtab import CellIndex, Grid
from .model import BINARY, EQ, GE, LE, ProblemIR
from .simplex import LpProblem

SUPPORT_TOL = 1e-9  # below LP feasibility tolerance


@dataclass
class Row:
    terms: list[tuple[int, float]]  # (column, coefficient)
    sense: str
    rhs: float
    name: str = ""


@dataclass
class InterpBlock:
    """Column bookkeeping for one interpolant inside the relaxation."""

    grid: Grid
    input_cols: list[int]
    output_col: int
    activation_col: Optional[int]
    xi_cols: list[list[int]]  # per axis, per breakpoint
    seg_cols: list[list[int]]  # per axis, per segment
    lam_cols: np.ndarray  # flat, same ordering as the table values


@dataclass
class MilpModel:
    names: list[str]
    lo: list[float]
    hi: list[float]
    is_binary: list[bool]
    obj: dict[int, float]
    rows: list[Row]
    var_col: dict[int, int]  # IR variable id -> column
    blocks: list[InterpBlock]
    ir: ProblemIR
    cuts: list[int] = field(default_factory=list)  # row indices

    @property
    def ncols(self) -> int:
        return len(self.names)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def nonzeros(self) -> int:
        return sum(len(r.terms) for r in self.rows)

    def binary_cols(self) -> list[int]:
        return [j for j, b in enumerate(self.is_binary) if b]

    def to_lp(self) -> LpProblem:
        obj = np.zeros(self.ncols)
        for col, coef in self.obj.items():
            obj[col] += coef
        return LpProblem.from_rows(
            self.ncols,
            obj,
            self.lo,
            self.hi,
            [(r.terms, r.sense, r.rhs) for r in self.rows],
        )


@dataclass(frozen=True)
class Fixing:
    """One segment per axis of each active interpolant plus a full binary assignment."""

    segments: tuple[Optional[tuple[int, ...]], ...]  # None marks an inactive interpolant
    y: tuple[int, ...]  # by ascending binary variable id
    binary_ids: tuple[int, ...]

    def y_of(self, var_id: int) -> int:
        return self.y[self.binary_ids.index(var_id)]


@dataclass
class BoxNlp:
    """Cell-restricted NLP subproblem: every interpolant confined to one cell."""

    ir: ProblemIR
    var_lo: np.ndarray  # by position in ir.variables
    var_hi: np.ndarray
    cells: tuple[Optional[CellIndex], ...]  # per interpolant; None = inactive


def build_relaxation(ir: ProblemIR) -> MilpModel:
    """Assemble the MILP relaxation of the IR in extended weight space."""
    names: list[str] = []
    lo: list[float] = []
    hi: list[float] = []
    isbin: list[bool] = []

    def add_col(name, l, h, binary=False) -> int:
        names.append(name)
        lo.append(float(l))
        hi.append(float(h))
        isbin.append(binary)
        return len(names) - 1

    var_col = {}
    for v in ir.variables:
        var_col[v.id] = add_col(v.name or f"v{v.id}", v.lo, v.hi, v.kind == BINARY)

    rows: list[Row] = []
    blocks: list[InterpBlock] = []
    for i, itp in enumerate(ir.interpolants):
        grid = itp.table.grid
        sizes = grid.shape
        act = var_col[itp.activation] if itp.activation is not None else None
        xi_cols = [
            [add_col(f"xi{i}_{j}_{k}", 0.0, 1.0) for k in range(K)]
            for j, K in enumerate(sizes)
        ]
        lam_cols = np.array(
            [add_col(f"lam{i}_{k}", 0.0, 1.0) for k in range(grid.num_corners)],
            dtype=np.int64,
        )
        seg_cols = [
            [add_col(f"s{i}_{j}_{t}", 0.0, 1.0, binary=True) for t in range(K - 1)]
            for j, K in enumerate(sizes)
        ]
        lam_grid = lam_cols.reshape(sizes)
        for j, K in enumerate(sizes):
            axis = grid.axes[j]
            rows.append(
                Row(
                    [(var_col[itp.inputs[j]], 1.0)]
                    + [(xi_cols[j][k], -float(axis[k])) for k in range(K)],
                    EQ,
                    0.0,
                    f"link{i}_{j}",
                )
            )
            conv = [(xi_cols[j][k], 1.0) for k in range(K)]
            if act is None:
                rows.append(Row(conv, EQ, 1.0, f"conv{i}_{j}"))
            else:
                rows.append(Row(conv + [(act, -1.0)], EQ, 0.0, f"conv{i}_{j}"))
            for k in range(K):
                margin = [(xi_cols[j][k], 1.0)] + [
                    (int(c), -1.0) for c in np.take(lam_grid, k, axis=j).ravel()
                ]
                rows.append(Row(margin, EQ, 0.0, f"marg{i}_{j}_{k}"))
            segsum = [(seg_cols[j][t], 1.0) for t in range(K - 1)]
            if act is None:
                rows.append(Row(segsum, EQ, 1.0, f"seg{i}_{j}"))
            else:
                rows.append(Row(segsum + [(act, -1.0)], EQ, 0.0, f"seg{i}_{j}"))
            for k in range(K):
                terms = [(xi_cols[j][k], 1.0)]
                if k - 1 >= 0:
                    terms.append((seg_cols[j][k - 1], -1.0))
                if k <= K - 2:
                    terms.append((seg_cols[j][k], -1.0))
                rows.append(Row(terms, LE, 0.0, f"sos{i}_{j}_{k}"))
        rows.append(
            Row(
                [(var_col[itp.output], 1.0)]
                + [
                    (int(lam_cols[k]), -float(itp.table.values[k]))
                    for k in range(grid.num_corners)
                ],
                EQ,
                0.0,
                f"out{i}",
            )
        )
        blocks.append(
            InterpBlock(
                grid=grid,
                input_cols=[var_col[v] for v in itp.inputs],
                output_col=var_col[itp.output],
                activation_col=act,
                xi_cols=xi_cols,
                seg_cols=seg_cols,
                lam_cols=lam_cols,
            )
        )

    for c in ir.constraints:
        rows.append(
            Row([(var_col[v], coef) for coef, v in c.terms], c.sense, c.rhs, c.name)
        )

    obj: dict[int, float] = {}
    for coef, v in ir.objective:
        obj[var_col[v]] = obj.get(var_col[v], 0.0) + coef

    return MilpModel(
        names=names,
        lo=lo,
        hi=hi,
        is_binary=isbin,
        obj=obj,
        rows=rows,
        var_col=var_col,
        blocks=blocks,
        ir=ir,
    )


def segment_from_weights(
    xi: Sequence[float],
    seg: Optional[Sequence[float]] = None,
    tol: float = SUPPORT_TOL,
) -> int:
    """Canonical segment covering the support of an SOS2 weight vector.

    Two-point support pins the segment. A singleton support admits two covering
    segments; the solution's segment binaries (``seg``) disambiguate when
    available, otherwise the leftmost covering segment is chosen.
    """
    xi = np.asarray(xi, dtype=float)
    K = xi.size
    support = np.nonzero(xi > tol)[0]
    if support.size == 0:
        raise NoValidSegment("weight vector has empty support")
    lo, hi = int(support[0]), int(support[-1])
    if hi - lo > 1:
        raise NoValidSegment(f"support spans non-consecutive breakpoints {support}")
    if hi > lo:
        return lo
    cands = [t for t in (lo - 1, lo) if 0 <= t <= K - 2]
    if seg is not None:
        for t in cands:
            if seg[t] > 0.5:
                return t
    return cands[0]


def extract_fixing(milp: MilpModel, solution: np.ndarray) -> Fixing:
    """Read the discrete decisions out of an integral relaxation solution."""
    solution = np.asarray(solution, dtype=float)
    segments: list[Optional[tuple[int, ...]]] = []
    for blk in milp.blocks:
        if blk.activation_col is not None and solution[blk.activation_col] < 0.5:
            segments.append(None)
            continue
        segs = []
        for j in range(blk.grid.n):
            xi = solution[np.array(blk.xi_cols[j])]
            sv = solution[np.array(blk.seg_cols[j])] if blk.seg_cols[j] else None
            segs.append(segment_from_weights(xi, sv))
        segments.append(tuple(segs))
    bin_ids = tuple(sorted(milp.ir.binary_ids))
    y = tuple(int(round(solution[milp.var_col[b]])) for b in bin_ids)
    return Fixing(segments=tuple(segments), y=y, binary_ids=bin_ids)


def add_no_good_cut(milp: MilpModel, fixing: Fixing) -> int:
    """Append a row excluding the fixing's discrete assignment; returns row index.

    The row requires at least one chosen segment or binary to change. Segments
    of inactive interpolants are omitted; their exclusion rides on the
    activation binary's term.
    """
    terms: list[tuple[int, float]] = []
    ones = 0
    for blk, segs in zip(milp.blocks, fixing.segments):
        if segs is None:
            continue
        for j, t in enumerate(segs):
            terms.append((blk.seg_cols[j][t], -1.0))
            ones += 1
    for vid, val in zip(fixing.binary_ids, fixing.y):
        col = milp.var_col[vid]
        if val == 1:
            terms.append((col, -1.0))
            ones += 1
        else:
            terms.append((col, 1.0))
    row = Row(terms, GE, 1.0 - ones, f"cut{len(milp.cuts)}")
    milp.rows.append(row)
    idx = len(milp.rows) - 1
    milp.cuts.append(idx)
    return idx


def build_subproblem(ir: ProblemIR, fixing: Fixing) -> BoxNlp:
    """Confine every interpolant input to its fixed cell and pin the binaries."""
    pos = {v.id: i for i, v in enumerate(ir.variables)}
    var_lo = np.array([v.lo for v in ir.variables], dtype=float)
    var_hi = np.array([v.hi for v in ir.variables], dtype=float)
    for vid, val in zip(fixing.binary_ids, fixing.y):
        var_lo[pos[vid]] = var_hi[pos[vid]] = float(val)
    cells: list[Optional[CellIndex]] = []
    for itp, segs in zip(ir.interpolants, fixing.segments):
        if segs is None:
            for vid in itp.inputs:
                var_lo[pos[vid]] = var_hi[pos[vid]] = 0.0
            var_lo[pos[itp.output]] = var_hi[pos[itp.output]] = 0.0
            cells.append(None)
            continue
        cell = CellIndex(t=tuple(segs))
        cell.validate(itp.table.grid)
        cells.append(cell)
        for j, vid in enumerate(itp.inputs):
            a = itp.table.grid.axes[j]
            var_lo[pos[vid]] = max(var_lo[pos[vid]], float(a[segs[j]]))
            var_hi[pos[vid]] = min(var_hi[pos[vid]], float(a[segs[j] + 1]))
        corners = itp.table.cell_corner_values(cell)
        var_lo[pos[itp.output]] = max(var_lo[pos[itp.output]], float(corners.min()))
        var_hi[pos[itp.output]] = min(var_hi[pos[itp.output]], float(corners.max()))
    return BoxNlp(ir=ir, var_lo=var_lo, var_hi=var_hi, cells=tuple(cells))
