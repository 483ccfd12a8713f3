import itertools
import random
import unittest
from fractions import Fraction

from dirac_series.simplex import BoundedSimplex, box_feasible


def brute_force_vertex(A, b, upper):
    '''Feasibility over the box by trying every basis of the vertices; fine for tiny systems.'''
    m, n = len(A), len(upper)
    for fixed in itertools.product([0, 1], repeat=n):
        for free in itertools.combinations(range(n), m):
            x = [Fraction(upper[j]) * fixed[j] for j in range(n)]
            rhs = [Fraction(bi) - sum(A[i][j] * x[j] for j in range(n) if j not in free) for i, bi in enumerate(b)]
            block = [[Fraction(A[i][j]) for j in free] for i in range(m)]
            solution = _solve(block, rhs)
            if solution is None:
                continue
            for j, v in zip(free, solution):
                x[j] = v
            if all(0 <= x[j] <= upper[j] for j in range(n)):
                return True
    return False


def _full_row_rank(A):
    if len(A) == 1:
        return any(v != 0 for v in A[0])
    n = len(A[0])
    return any(A[0][i] * A[1][j] != A[0][j] * A[1][i] for i in range(n) for j in range(i + 1, n))


def _solve(M, rhs):
    n = len(M)
    M = [row[:] + [r] for row, r in zip(M, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            return None
        M[col], M[pivot] = M[pivot], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


class TestBoundedSimplex(unittest.TestCase):
    def test_simple_feasible(self):
        x = box_feasible([[1, 1, 1]], [2], [1, 1, 1])
        self.assertIsNotNone(x)
        self.assertEqual(sum(x), 2)
        self.assertTrue(all(0 <= v <= 1 for v in x))

    def test_simple_infeasible(self):
        self.assertIsNone(box_feasible([[1, 1, 1]], [4], [1, 1, 1]))
        self.assertIsNone(box_feasible([[1, -1]], [-2], [1, 1]))

    def test_negative_rhs(self):
        x = box_feasible([[1, -1], [1, 1]], [Fraction(-1, 2), 1], [1, 1])
        self.assertEqual(x, [Fraction(1, 4), Fraction(3, 4)])

    def test_rational_bounds(self):
        x = box_feasible([[2, 3]], [Fraction(7, 2)], [Fraction(1, 2), 1])
        self.assertIsNotNone(x)
        self.assertEqual(2 * x[0] + 3 * x[1], Fraction(7, 2))

    def test_zero_upper_bound(self):
        self.assertIsNone(box_feasible([[1, 1]], [2], [0, 1]))
        self.assertEqual(box_feasible([[1, 1]], [1], [0, 1]), [0, 1])

    def test_bad_bounds(self):
        with self.assertRaises(ValueError):
            BoundedSimplex([[1]], [0], [-1])

    def test_against_vertex_enumeration(self):
        random.seed(3)
        for _ in range(60):
            m, n = random.randint(1, 2), random.randint(2, 4)
            A = [[random.randint(-2, 2) for _ in range(n)] for _ in range(m)]
            upper = [random.randint(0, 2) for _ in range(n)]
            b = [Fraction(random.randint(-6, 6), random.choice([1, 2])) for _ in range(m)]
            if not _full_row_rank(A):
                continue
            x = box_feasible(A, b, upper)
            self.assertEqual(x is not None, brute_force_vertex(A, b, upper), (A, b, upper))


if __name__ == '__main__':
    unittest.main()
