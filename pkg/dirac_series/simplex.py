"""Exact phase-one simplex for box-constrained feasibility problems

    A x = b,   0 <= x_j <= upper_j,

in rational arithmetic. Nonbasic variables sit at either bound (upper-bounding technique), so the
tableau only has one row per equation. Entering and leaving variables follow Bland's rule.
"""
import logging
from fractions import Fraction
from typing import List, Optional, Sequence

logger = logging.getLogger(__name__)


class BoundedSimplex:
    def __init__(self, A: Sequence[Sequence], b: Sequence, upper: Sequence):
        self.m = len(A)
        self.n = len(upper)
        assert all(len(row) == self.n for row in A), "A must have one column per variable"
        assert len(b) == self.m
        self.A = [[Fraction(v) for v in row] for row in A]
        self.b = [Fraction(v) for v in b]
        self.upper = [Fraction(u) for u in upper]
        if any(u < 0 for u in self.upper):
            raise ValueError("upper bounds must be non-negative")

        # artificial variables n..n+m-1 start basic; rows are flipped so that b >= 0
        self.T = []
        self.values = []
        for i in range(self.m):
            sign = -1 if self.b[i] < 0 else 1
            row = [sign * v for v in self.A[i]] + [Fraction(int(k == i)) for k in range(self.m)]
            self.T.append(row)
            self.values.append(sign * self.b[i])
        self.basis = list(range(self.n, self.n + self.m))
        self.at_upper = [False] * self.n
        self.pivots = 0

    def _is_artificial(self, j: int) -> bool:
        return j >= self.n

    def _reduced_cost(self, j: int) -> Fraction:
        # phase-one cost: 1 on artificials, 0 on structural variables
        return -sum((self.T[i][j] for i in range(self.m) if self._is_artificial(self.basis[i])), Fraction(0))

    def _entering(self) -> Optional[int]:
        basic = set(self.basis)
        for j in range(self.n):
            if j in basic or self.upper[j] == 0:
                continue
            d = self._reduced_cost(j)
            if (not self.at_upper[j] and d < 0) or (self.at_upper[j] and d > 0):
                return j
        return None

    def pivot(self, r: int, j: int):
        piv = self.T[r][j]
        self.T[r] = [v / piv for v in self.T[r]]
        for i in range(self.m):
            if i != r:
                f = self.T[i][j]
                if f != 0:
                    self.T[i] = [a - f * p for a, p in zip(self.T[i], self.T[r])]
        self.pivots += 1

    def bland_step(self) -> str:
        j = self._entering()
        if j is None:
            return 'optimal'
        delta = -1 if self.at_upper[j] else 1

        best, best_ratio = None, None
        for i in range(self.m):
            g = delta * self.T[i][j]
            k = self.basis[i]
            if g > 0:
                ratio = self.values[i] / g
            elif g < 0 and not self._is_artificial(k):
                ratio = (self.upper[k] - self.values[i]) / (-g)
            else:
                continue
            if best is None or ratio < best_ratio or (ratio == best_ratio and k < self.basis[best]):
                best, best_ratio = i, ratio

        if best is None or self.upper[j] <= best_ratio:
            theta = self.upper[j]
            for i in range(self.m):
                self.values[i] -= delta * theta * self.T[i][j]
            self.at_upper[j] = not self.at_upper[j]
            return 'go_on'

        theta = best_ratio
        entering_value = (self.upper[j] if self.at_upper[j] else Fraction(0)) + delta * theta
        for i in range(self.m):
            self.values[i] -= delta * theta * self.T[i][j]
        leaving = self.basis[best]
        if not self._is_artificial(leaving):
            self.at_upper[leaving] = delta * self.T[best][j] < 0
        self.pivot(best, j)
        self.basis[best] = j
        self.values[best] = entering_value
        self.at_upper[j] = False
        return 'go_on'

    def solution(self) -> List[Fraction]:
        x = [self.upper[j] if self.at_upper[j] else Fraction(0) for j in range(self.n)]
        for i, k in enumerate(self.basis):
            if not self._is_artificial(k):
                x[k] = self.values[i]
        return x

    def infeasibility(self) -> Fraction:
        return sum((self.values[i] for i in range(self.m) if self._is_artificial(self.basis[i])), Fraction(0))

    def solve(self) -> Optional[List[Fraction]]:
        '''Returns a feasible point, or None when the system has no solution in the box.'''
        while self.bland_step() != 'optimal':
            pass
        if self.infeasibility() != 0:
            return None
        x = self.solution()
        for row, rhs in zip(self.A, self.b):
            assert sum((a * v for a, v in zip(row, x)), Fraction(0)) == rhs, "simplex returned an infeasible point"
        assert all(0 <= v <= u for v, u in zip(x, self.upper)), "simplex violated a bound"
        return x


def box_feasible(A: Sequence[Sequence], b: Sequence, upper: Sequence) -> Optional[List[Fraction]]:
    return BoundedSimplex(A, b, upper).solve()
