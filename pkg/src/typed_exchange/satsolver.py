"""A complete CDCL SAT solver: two-watched literals, first-UIP learning, restarts.

Clauses use DIMACS conventions: variables are positive integers, a negative
integer is a negated literal.  The solver is deterministic: identical input
and budget (in conflicts) always yields the identical run.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from heapq import heappop, heappush
from typing import Iterable, Optional

SAT = "SAT"
UNSAT = "UNSAT"
TIMEOUT = "TIMEOUT"

_VAR_DECAY = 0.95
_RESTART_BASE = 100


def _luby(i: int) -> int:
    """The i-th Luby number, 1-indexed: 1, 1, 2, 1, 1, 2, 4, ..."""
    while True:
        k = i.bit_length()
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1


@dataclass
class SolverStats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    restarts: int = 0
    wall_seconds: float = 0.0


@dataclass
class SolveResult:
    status: str
    model: Optional[dict] = None  # var -> bool, only on SAT
    stats: SolverStats = field(default_factory=SolverStats)


class CdclSolver:
    """Single-use-per-search, reusable-across-searches CDCL solver.

    Clauses may be added between :meth:`solve` calls (e.g. blocking clauses
    for model enumeration); learned clauses and level-0 facts persist.
    """

    def __init__(self, num_vars: int, clauses: Iterable = ()):
        self.num_vars = num_vars
        self.clauses: list = []  # each an internal-literal list, clause[0:2] watched
        self.watches: list = [[] for _ in range(2 * num_vars)]
        self.values = bytearray(b"\x02" * (2 * num_vars))  # 0 false, 1 true, 2 unset
        self.reason = [-1] * num_vars
        self.level = [-1] * num_vars
        self.trail: list = []
        self.trail_lim: list = []
        self.qhead = 0
        self.activity = [0.0] * num_vars
        self.var_inc = 1.0
        self.phase = bytearray(num_vars)  # saved phase, default False
        self.order: list = []  # lazy max-heap of (-activity, var)
        self.unsat = False
        self.stats = SolverStats()
        for v in range(num_vars):
            heappush(self.order, (0.0, v))
        for clause in clauses:
            self.add_clause(clause)

    # -- literal helpers: internal lit = 2*(var-1) + (1 if negated) --

    @staticmethod
    def _intern(lit: int) -> int:
        return 2 * (lit - 1) if lit > 0 else 2 * (-lit - 1) + 1

    @staticmethod
    def _extern(ilit: int) -> int:
        v = (ilit >> 1) + 1
        return -v if ilit & 1 else v

    def add_clause(self, clause: Iterable[int]) -> None:
        if self.trail_lim:
            raise RuntimeError("clauses may only be added at decision level 0")
        lits = []
        seen = set()
        for lit in clause:
            if not lit or abs(lit) > self.num_vars:
                raise ValueError(f"literal {lit} out of range (num_vars={self.num_vars})")
            il = self._intern(lit)
            if il ^ 1 in seen:
                return  # tautology
            if il in seen:
                continue
            seen.add(il)
            if self.values[il] == 1:
                return  # satisfied at level 0
            if self.values[il] == 0:
                continue  # false at level 0, drop
            lits.append(il)
        if not lits:
            self.unsat = True
            return
        if len(lits) == 1:
            if not self._enqueue(lits[0], -1):
                self.unsat = True
            elif self._propagate() is not None:
                self.unsat = True
            return
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.watches[lits[0]].append(ci)
        self.watches[lits[1]].append(ci)

    # -- assignment machinery --

    def _enqueue(self, ilit: int, reason: int) -> bool:
        if self.values[ilit] != 2:
            return self.values[ilit] == 1
        self.values[ilit] = 1
        self.values[ilit ^ 1] = 0
        v = ilit >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.phase[v] = 0 if ilit & 1 else 1
        self.trail.append(ilit)
        return True

    def _propagate(self) -> Optional[int]:
        """Unit propagation; returns a conflicting clause index or None."""
        values = self.values
        clauses = self.clauses
        while self.qhead < len(self.trail):
            ilit = self.trail[self.qhead]
            self.qhead += 1
            self.stats.propagations += 1
            flit = ilit ^ 1
            ws = self.watches[flit]
            new_ws = []
            i = 0
            nws = len(ws)
            while i < nws:
                ci = ws[i]
                i += 1
                lits = clauses[ci]
                if lits[0] == flit:
                    lits[0], lits[1] = lits[1], lits[0]
                first = lits[0]
                if values[first] == 1:
                    new_ws.append(ci)
                    continue
                moved = False
                for j in range(2, len(lits)):
                    lj = lits[j]
                    if values[lj] != 0:
                        lits[1], lits[j] = lj, lits[1]
                        self.watches[lj].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                new_ws.append(ci)
                if values[first] == 0:
                    new_ws.extend(ws[i:])
                    self.watches[flit] = new_ws
                    return ci
                self.values[first] = 1
                self.values[first ^ 1] = 0
                v = first >> 1
                self.level[v] = len(self.trail_lim)
                self.reason[v] = ci
                self.phase[v] = 0 if first & 1 else 1
                self.trail.append(first)
            self.watches[flit] = new_ws
        return None

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(self.num_vars):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
        heappush(self.order, (-self.activity[v], v))

    def _analyze(self, confl: int):
        """First-UIP conflict analysis; returns (learnt clause, backjump level)."""
        seen = bytearray(self.num_vars)
        learnt = [0]  # slot 0 holds the asserting literal
        counter = 0
        p = -1
        index = len(self.trail) - 1
        cur_level = len(self.trail_lim)
        reason_lits = self.clauses[confl]
        while True:
            start = 1 if p != -1 else 0
            for il in reason_lits[start:]:
                v = il >> 1
                if seen[v] or self.level[v] <= 0:
                    continue
                seen[v] = 1
                self._bump(v)
                if self.level[v] == cur_level:
                    counter += 1
                else:
                    learnt.append(il)
            while not seen[self.trail[index] >> 1]:
                index -= 1
            p = self.trail[index]
            index -= 1
            v = p >> 1
            seen[v] = 0
            counter -= 1
            if counter == 0:
                break
            reason_lits = self.clauses[self.reason[v]]
        learnt[0] = p ^ 1
        if len(learnt) == 1:
            return learnt, 0
        # find backjump level: max level among the non-asserting literals
        max_i = 1
        max_lvl = self.level[learnt[1] >> 1]
        for i in range(2, len(learnt)):
            lvl = self.level[learnt[i] >> 1]
            if lvl > max_lvl:
                max_lvl, max_i = lvl, i
        learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
        return learnt, max_lvl

    def _backtrack(self, target_level: int) -> None:
        if len(self.trail_lim) <= target_level:
            return
        bound = self.trail_lim[target_level]
        for ilit in reversed(self.trail[bound:]):
            v = ilit >> 1
            self.values[ilit] = 2
            self.values[ilit ^ 1] = 2
            self.level[v] = -1
            self.reason[v] = -1
            heappush(self.order, (-self.activity[v], v))
        del self.trail[bound:]
        del self.trail_lim[target_level:]
        self.qhead = len(self.trail)

    def _decide(self) -> Optional[int]:
        while self.order:
            neg_act, v = heappop(self.order)
            if self.values[2 * v] == 2 and -neg_act == self.activity[v]:
                return 2 * v + (0 if self.phase[v] else 1)
        for v in range(self.num_vars):
            if self.values[2 * v] == 2:
                return 2 * v + (0 if self.phase[v] else 1)
        return None

    def solve(
        self,
        max_conflicts: Optional[int] = None,
        max_seconds: Optional[float] = None,
    ) -> SolveResult:
        start = time.monotonic()
        run = SolverStats()
        if self.unsat:
            return SolveResult(UNSAT, stats=run)
        self._backtrack(0)
        if self._propagate() is not None:
            self.unsat = True
            return SolveResult(UNSAT, stats=run)
        restart_count = 0
        conflicts_until_restart = _RESTART_BASE * _luby(restart_count + 1)
        conflicts_in_run = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                run.conflicts += 1
                self.stats.conflicts += 1
                conflicts_in_run += 1
                if not self.trail_lim:
                    self.unsat = True
                    run.wall_seconds = time.monotonic() - start
                    return SolveResult(UNSAT, stats=run)
                learnt, back_level = self._analyze(confl)
                self._backtrack(back_level)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = len(self.clauses)
                    self.clauses.append(learnt)
                    self.watches[learnt[0]].append(ci)
                    self.watches[learnt[1]].append(ci)
                    self._enqueue(learnt[0], ci)
                self.var_inc /= _VAR_DECAY
                if max_conflicts is not None and run.conflicts >= max_conflicts:
                    run.wall_seconds = time.monotonic() - start
                    self._backtrack(0)
                    return SolveResult(TIMEOUT, stats=run)
                if max_seconds is not None and run.conflicts % 64 == 0:
                    if time.monotonic() - start > max_seconds:
                        run.wall_seconds = time.monotonic() - start
                        self._backtrack(0)
                        return SolveResult(TIMEOUT, stats=run)
                if conflicts_in_run >= conflicts_until_restart:
                    restart_count += 1
                    run.restarts += 1
                    conflicts_in_run = 0
                    conflicts_until_restart = _RESTART_BASE * _luby(restart_count + 1)
                    self._backtrack(0)
                continue
            ilit = self._decide()
            if ilit is None:
                model = {
                    v + 1: self.values[2 * v] == 1 for v in range(self.num_vars)
                }
                run.wall_seconds = time.monotonic() - start
                self._backtrack(0)
                return SolveResult(SAT, model=model, stats=run)
            run.decisions += 1
            self.stats.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(ilit, -1)


def solve_cnf(
    num_vars: int,
    clauses: Iterable,
    max_conflicts: Optional[int] = None,
    max_seconds: Optional[float] = None,
) -> SolveResult:
    return CdclSolver(num_vars, clauses).solve(max_conflicts, max_seconds)
