from __future__ import annotations

import unittest
from fractions import Fraction

from multiflow.exact_lp import LinearProgram, Unbounded, solve_max


class TestExactLP(unittest.TestCase):
    """Test class for the exact rational simplex."""

    def test_vertex_optimum(self):
        """Test a two-variable LP with a fractional optimum."""
        lp = LinearProgram.from_rows([[1, 2], [3, 1]], [4, 6])
        solution = solve_max(lp)
        self.assertEqual(solution.x, (Fraction(8, 5), Fraction(6, 5)))
        self.assertEqual(solution.value, Fraction(14, 5))
        self.assertEqual(solution.y, (Fraction(2, 5), Fraction(1, 5)))
        self.assertFalse(solution.is_integral())

    def test_strong_duality(self):
        """Test that the dual value equals the primal value."""
        lp = LinearProgram.from_index_sets([[0, 1], [1, 2], [0, 2]], [1, 1, 1], 3)
        solution = solve_max(lp)
        self.assertEqual(solution.value, Fraction(3, 2))
        self.assertEqual(sum(solution.x), solution.value)
        self.assertEqual(
            sum(price * bound for price, bound in zip(solution.y, lp.rhs)),
            solution.value,
        )
        for row in lp.rows:
            self.assertLessEqual(sum(a * x for a, x in zip(row, solution.x)), 1)

    def test_degenerate(self):
        """Test a zero right-hand side."""
        solution = solve_max(LinearProgram.from_rows([[1, 1]], [0]))
        self.assertEqual(solution.value, 0)
        self.assertTrue(solution.is_integral())

    def test_unbounded(self):
        """Test a column without a positive entry."""
        with self.assertRaises(Unbounded):
            solve_max(LinearProgram.from_rows([[-1]], [1]))
        with self.assertRaises(Unbounded):
            solve_max(LinearProgram.from_rows([], [], variable_count=1))

    def test_malformed(self):
        """Test ragged rows and negative bounds."""
        with self.assertRaises(ValueError):
            LinearProgram.from_rows([[1, 1], [1]], [1, 1])
        with self.assertRaises(ValueError):
            LinearProgram.from_rows([[1]], [-1])
        with self.assertRaises(ValueError):
            LinearProgram.from_rows([[1]], [1, 2])

    def test_interval_matrix_is_integral(self):
        """Test that an interval matrix with integer bounds has an integral optimum."""
        supports = [[0, 1, 2], [1, 2], [2, 3], [3]]
        solution = solve_max(LinearProgram.from_index_sets(supports, [3, 1, 2, 1], 4))
        self.assertTrue(solution.is_integral())
        self.assertEqual(solution.value, 4)


if __name__ == "__main__":
    unittest.main()
