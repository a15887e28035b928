"""Dense primal simplex for linear programs with bounded variables.

Two-phase method with artificial variables, Dantzig pricing, and a Bland
fallback after a run of degenerate pivots. The tableau is dense and refactorized
periodically from the basis; inputs beyond ~5e4 constraint nonzeros are refused.
Solver state is per call, so independent solves may run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .errors import NumericalFailure, ProblemTooLarge
from .model import EQ, GE, LE

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"

MAX_NONZEROS = 50_000

_AT_LO, _AT_UP, _BASIC, _FREE = 0, 1, 2, 3

_RC_TOL = 1e-9
_PIV_TOL = 1e-7  # pivots below this are numerically unsafe to enter the basis
_FEAS_TOL = 1e-7
_REFACTOR_EVERY = 150


@dataclass
class LpProblem:
    obj: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    A: np.ndarray  # dense (m, ncols)
    senses: list[str]
    rhs: np.ndarray

    @classmethod
    def from_rows(
        cls,
        ncols: int,
        obj: Sequence[float],
        lo: Sequence[float],
        hi: Sequence[float],
        rows: Iterable[tuple[Sequence[tuple[int, float]], str, float]],
    ) -> "LpProblem":
        rows = list(rows)
        A = np.zeros((len(rows), ncols))
        senses = []
        rhs = np.zeros(len(rows))
        for i, (terms, sense, b) in enumerate(rows):
            for col, coef in terms:
                A[i, col] += coef
            senses.append(sense)
            rhs[i] = b
        return cls(
            obj=np.asarray(obj, dtype=float),
            lo=np.asarray(lo, dtype=float),
            hi=np.asarray(hi, dtype=float),
            A=A,
            senses=senses,
            rhs=rhs,
        )

    @property
    def ncols(self) -> int:
        return self.obj.size

    @property
    def nrows(self) -> int:
        return self.rhs.size


@dataclass
class LpResult:
    status: str
    x: Optional[np.ndarray] = None
    objective: float = np.inf
    duals: Optional[np.ndarray] = None
    reduced_costs: Optional[np.ndarray] = None
    iterations: int = 0


class _Tableau:
    """Mutable simplex state over structural + slack + artificial columns."""

    def __init__(self, lp: LpProblem, lo: np.ndarray, hi: np.ndarray):
        n, m = lp.ncols, lp.nrows
        self.n, self.m = n, m
        self.N = n + 2 * m
        self.lo = np.concatenate([lo, np.zeros(m), np.zeros(m)])
        self.hi = np.concatenate([hi, np.zeros(m), np.full(m, np.inf)])
        for i, s in enumerate(lp.senses):
            if s == LE:
                self.hi[n + i] = np.inf
            elif s == GE:
                self.lo[n + i] = -np.inf
            # EQ keeps the slack fixed at 0
        self.xval = np.zeros(self.N)
        self.vstat = np.full(self.N, _AT_LO, dtype=np.int8)
        for j in range(n + m):
            if np.isfinite(self.lo[j]):
                self.xval[j] = self.lo[j]
                self.vstat[j] = _AT_LO
            elif np.isfinite(self.hi[j]):
                self.xval[j] = self.hi[j]
                self.vstat[j] = _AT_UP
            else:
                self.xval[j] = 0.0
                self.vstat[j] = _FREE
        r = lp.rhs - lp.A @ self.xval[:n] - self.xval[n : n + m]
        self.sigma = np.where(r >= 0.0, 1.0, -1.0)
        self.basis = np.arange(n + m, n + 2 * m)
        self.vstat[self.basis] = _BASIC
        self.xB = np.abs(r)
        self.T = np.empty((m, self.N))
        self.T[:, :n] = lp.A
        self.T[:, n : n + m] = np.eye(m)
        self.T[:, n + m :] = np.diag(self.sigma)
        self.T *= self.sigma[:, None]
        self.lp = lp
        self.pivots = 0

    def refactorize(self) -> None:
        """Rebuild the tableau and basic values from the basis columns."""
        n, m = self.n, self.m
        Afull = np.empty((m, self.N))
        Afull[:, :n] = self.lp.A
        Afull[:, n : n + m] = np.eye(m)
        Afull[:, n + m :] = np.diag(self.sigma)
        B = Afull[:, self.basis]
        try:
            self.T = np.linalg.solve(B, Afull)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure("singular basis during refactorization") from exc
        nb_mask = self.vstat != _BASIC
        resid = self.lp.rhs - Afull[:, nb_mask] @ self.xval[nb_mask]
        self.xB = np.linalg.solve(B, resid)

    def solution(self) -> np.ndarray:
        x = self.xval.copy()
        x[self.basis] = self.xB
        return x


def _price(tab: _Tableau, cost: np.ndarray, bland: bool):
    """Pick an entering column; returns (col, direction) or None at optimum."""
    z = cost[tab.basis] @ tab.T
    d = cost - z
    best = None
    best_viol = _RC_TOL
    for j in range(tab.N):
        st = tab.vstat[j]
        if st == _BASIC or tab.lo[j] == tab.hi[j]:
            continue
        if (st == _AT_LO or st == _FREE) and d[j] < -best_viol:
            cand = (j, 1.0)
            viol = -d[j]
        elif (st == _AT_UP or st == _FREE) and d[j] > best_viol:
            cand = (j, -1.0)
            viol = d[j]
        else:
            continue
        if bland:
            return cand
        best, best_viol = cand, viol
    return best


def _ratio_test(tab: _Tableau, j: int, direction: float):
    """Max step for entering column j; returns (step, leaving row or -1)."""
    w = tab.T[:, j]
    step = np.inf
    row = -1
    if np.isfinite(tab.lo[j]) and np.isfinite(tab.hi[j]):
        step = tab.hi[j] - tab.lo[j]  # bound flip
    best_piv = 0.0
    for i in range(tab.m):
        coef = direction * w[i]
        b = tab.basis[i]
        if coef > _PIV_TOL:
            if not np.isfinite(tab.lo[b]):
                continue
            t = (tab.xB[i] - tab.lo[b]) / coef
        elif coef < -_PIV_TOL:
            if not np.isfinite(tab.hi[b]):
                continue
            t = (tab.xB[i] - tab.hi[b]) / coef
        else:
            continue
        t = max(t, 0.0)
        if t < step - 1e-12 or (t < step + 1e-12 and abs(coef) > best_piv):
            step = t
            row = i
            best_piv = abs(coef)
    return step, row


def _iterate(tab: _Tableau, cost: np.ndarray, max_iter: int) -> str:
    degen = 0
    bland = False
    degen_limit = 2 * (tab.m + tab.N)
    for _ in range(max_iter):
        pick = _price(tab, cost, bland)
        if pick is None:
            return OPTIMAL
        j, direction = pick
        step, row = _ratio_test(tab, j, direction)
        if not np.isfinite(step):
            return UNBOUNDED
        w = tab.T[:, j]
        if row == -1:
            # bound flip: entering variable crosses to its other bound
            tab.xB -= direction * step * w
            tab.xval[j] = tab.hi[j] if direction > 0 else tab.lo[j]
            tab.vstat[j] = _AT_UP if direction > 0 else _AT_LO
        else:
            enter_val = tab.xval[j] + direction * step
            tab.xB -= direction * step * w
            leave = tab.basis[row]
            if direction * w[row] > 0:
                tab.xval[leave] = tab.lo[leave]
                tab.vstat[leave] = _AT_LO
            else:
                tab.xval[leave] = tab.hi[leave]
                tab.vstat[leave] = _AT_UP
            tab.basis[row] = j
            tab.vstat[j] = _BASIC
            tab.xB[row] = enter_val
            _kernels.tableau_pivot(tab.T, row, j)
            tab.pivots += 1
            if tab.pivots % _REFACTOR_EVERY == 0:
                tab.refactorize()
        if step <= 1e-12:
            degen += 1
            if degen > degen_limit:
                bland = True
        else:
            degen = 0
    raise NumericalFailure("simplex iteration limit exceeded")


def _drive_out_artificials(tab: _Tableau) -> None:
    n, m = tab.n, tab.m
    for i in range(m):
        b = tab.basis[i]
        if b < n + m:
            continue
        # basic artificial at value ~0: replace by any usable column
        for j in range(n + m):
            if tab.vstat[j] != _BASIC and abs(tab.T[i, j]) > 1e-7:
                enter_val = tab.xval[j]
                tab.xval[b] = 0.0
                tab.vstat[b] = _AT_LO
                tab.basis[i] = j
                tab.vstat[j] = _BASIC
                tab.xB[i] = enter_val
                _kernels.tableau_pivot(tab.T, i, j)
                break
        # no pivot found: the row is redundant; the artificial stays basic at 0


def solve_lp(
    lp: LpProblem,
    lo_override: Optional[np.ndarray] = None,
    hi_override: Optional[np.ndarray] = None,
) -> LpResult:
    """Solve min obj @ x subject to the rows and bounds of ``lp``.

    ``lo_override``/``hi_override`` replace the column bounds without mutating
    the problem (used by branch-and-bound nodes). Deterministic for identical
    input.
    """
    nnz = int(np.count_nonzero(lp.A))
    if nnz > MAX_NONZEROS:
        raise ProblemTooLarge(f"{nnz} nonzeros exceeds dense limit {MAX_NONZEROS}")
    lo = np.asarray(lo_override if lo_override is not None else lp.lo, dtype=float)
    hi = np.asarray(hi_override if hi_override is not None else lp.hi, dtype=float)
    if np.any(lo > hi + 1e-12):
        return LpResult(status=INFEASIBLE)
    # collapse crossing bounds from round-off
    hi = np.maximum(hi, lo)

    tab = _Tableau(lp, lo, hi)
    n, m = tab.n, tab.m
    max_iter = 5000 + 200 * (m + tab.N)

    phase1_cost = np.zeros(tab.N)
    phase1_cost[n + m :] = 1.0
    status = _iterate(tab, phase1_cost, max_iter)
    if status == UNBOUNDED:  # cannot happen: phase-1 objective is bounded below
        raise NumericalFailure("phase-1 reported unbounded")
    art_sum = float(np.sum(tab.solution()[n + m :]))
    if art_sum > _FEAS_TOL:
        return LpResult(status=INFEASIBLE, iterations=tab.pivots)
    _drive_out_artificials(tab)
    # artificials may not re-enter
    tab.lo[n + m :] = 0.0
    tab.hi[n + m :] = 0.0

    cost = np.zeros(tab.N)
    cost[:n] = lp.obj
    status = _iterate(tab, cost, max_iter)
    if status == UNBOUNDED:
        return LpResult(status=UNBOUNDED, objective=-np.inf, iterations=tab.pivots)

    x = tab.solution()
    # duals from the artificial block: B^-1 = T[:, art] * sigma (columnwise)
    Binv = tab.T[:, n + m :] * tab.sigma[None, :]
    y = cost[tab.basis] @ Binv
    rc = np.concatenate([lp.obj, np.zeros(m)]) - y @ np.hstack([lp.A, np.eye(m)])
    resid = lp.A @ x[:n] + x[n : n + m] - lp.rhs
    if np.max(np.abs(resid), initial=0.0) > 1e-6:
        tab.refactorize()
        x = tab.solution()
        resid = lp.A @ x[:n] + x[n : n + m] - lp.rhs
        if np.max(np.abs(resid), initial=0.0) > 1e-6:
            raise NumericalFailure("primal residual too large after refactorization")
    obj = float(lp.obj @ x[:n])
    return LpResult(
        status=OPTIMAL,
        x=x[:n].copy(),
        objective=obj,
        duals=y,
        reduced_costs=rc[: n + m],
        iterations=tab.pivots,
    )
