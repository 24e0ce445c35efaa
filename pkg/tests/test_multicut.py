from __future__ import annotations

import unittest
from fractions import Fraction
from itertools import chain, combinations

from multiflow.fractional_flow import PathExplosion, check_feasible, max_multiflow
from multiflow.instance_io.generators import (
    gen_c4_2k2_overline,
    gen_fuzz,
    gen_gk,
    gk_reference_solutions,
)
from multiflow.multicut import (
    is_2connector,
    minimal_violated_sets,
    p_value,
    verify_multicut,
    wgmv_multicut,
)

FUZZ_SEEDS = range(50)


def subsets(items):
    return chain.from_iterable(combinations(items, size) for size in range(len(items) + 1))


def brute_force_violated_sets(inst, dm, qstar):
    """Every inclusion-minimal face set with one leaving demand and no leaving Q* edge."""

    def leaving(faces, edges):
        return sum(
            1
            for edge in edges
            if (dm.endpoints[edge][0] in faces) != (dm.endpoints[edge][1] in faces)
        )

    violated = [
        frozenset(faces)
        for faces in subsets(range(dm.face_count))
        if leaving(frozenset(faces), inst.demand_edges) == 1
        and leaving(frozenset(faces), qstar) == 0
    ]
    minimal = [faces for faces in violated if not any(other < faces for other in violated)]
    return sorted(minimal, key=sorted)


class TestMulticutChecks(unittest.TestCase):
    """Test class for multicut verification and its dual form."""

    def test_verify_multicut(self):
        """Test separation on G_3."""
        inst = gen_gk(3)
        self.assertTrue(verify_multicut(inst, gk_reference_solutions(3).multicut))
        self.assertTrue(verify_multicut(inst, inst.supply_edges))
        self.assertFalse(verify_multicut(inst, []))
        self.assertFalse(verify_multicut(inst, [3]))
        with self.assertRaises(ValueError):
            verify_multicut(inst, [5])

    def test_two_connector_matches_multicut(self):
        """Test that Q separates all demands exactly when Q* is a 2-connector."""
        for inst in (gen_gk(3), gen_gk(4), gen_c4_2k2_overline(), gen_fuzz(1)):
            for q in subsets(inst.supply_edges):
                with self.subTest(q=q):
                    self.assertEqual(
                        verify_multicut(inst, q), is_2connector(inst, inst.dual, q)
                    )

    def test_violated_sets(self):
        """Test the minimal violated sets of the empty dual edge set."""
        inst = gen_gk(3)
        dm = inst.dual
        violated = minimal_violated_sets(inst, dm, [])
        self.assertTrue(violated)
        self.assertEqual(violated, sorted(violated, key=sorted))
        for faces in violated:
            self.assertEqual(p_value(inst, dm, faces), 1)
        for a, b in combinations(violated, 2):
            self.assertFalse(a & b)
        self.assertEqual(minimal_violated_sets(inst, dm, inst.supply_edges), [])

    def test_violated_sets_match_enumeration(self):
        """Test the minimal violated sets against all face subsets of small instances."""
        instances = [gen_gk(3), gen_gk(4), gen_c4_2k2_overline()]
        instances.extend(gen_fuzz(seed) for seed in range(10))
        for number, inst in enumerate(instances):
            dm = inst.dual
            if dm.face_count > 12:
                continue
            supply = sorted(inst.supply_edges)
            for qstar in ((), supply[::2], supply[::3], supply[1:]):
                with self.subTest(instance=number, qstar=qstar):
                    self.assertEqual(
                        minimal_violated_sets(inst, dm, qstar),
                        brute_force_violated_sets(inst, dm, qstar),
                    )

    def test_p_value(self):
        """Test p on the empty cut and on a single face."""
        inst = gen_gk(3)
        dm = inst.dual
        self.assertEqual(p_value(inst, dm, range(dm.face_count)), 0)
        face = next(
            face for face in range(dm.face_count) if {5, 6} <= set(dm.rotation[face])
        )
        self.assertEqual(p_value(inst, dm, {face}), 0)


class TestPrimalDual(unittest.TestCase):
    """Test class for the primal-dual multicut."""

    def assert_run(self, inst):
        run = wgmv_multicut(inst)
        fractional = max_multiflow(inst)
        self.assertTrue(verify_multicut(inst, run.multicut))
        self.assertTrue(check_feasible(inst, run.flow).feasible)
        self.assertEqual(run.flow.value, run.dual_value)
        self.assertLessEqual(run.capacity, 2 * run.flow.value)
        self.assertLessEqual(run.flow.value, fractional.value)
        self.assertLessEqual(fractional.value, run.capacity)
        self.assertEqual(minimal_violated_sets(inst, inst.dual, run.multicut), [])
        self.assertEqual(set(run.x), set(inst.supply_edges))
        self.assertEqual(sum(run.x.values()), len(run.multicut))
        self.assertLessEqual(run.multicut, frozenset(run.additions))
        for shore, value in run.y.items():
            self.assertGreater(value, 0)
            self.assertNotIn(inst.dual.outer_face, shore)
        return run

    def test_gk(self):
        """Test G_k against its minimum multicut k - 1."""
        for k in range(3, 9):
            with self.subTest(k=k):
                run = self.assert_run(gen_gk(k))
                self.assertGreaterEqual(run.capacity, k - 1)

    def test_overline_gadget(self):
        """Test the overline gadget, whose minimum multicut is 2."""
        run = self.assert_run(gen_c4_2k2_overline())
        self.assertGreaterEqual(run.capacity, 2)
        self.assertLessEqual(run.capacity, 4)

    def test_fuzz(self):
        """Test the factor-two certificate on random grids."""
        for seed in FUZZ_SEEDS:
            inst = gen_fuzz(seed)
            try:
                max_multiflow(inst)
            except PathExplosion:
                continue
            with self.subTest(seed=seed):
                self.assert_run(inst)

    def test_deterministic(self):
        """Test that repeated runs agree."""
        inst = gen_fuzz(8)
        first, second = wgmv_multicut(inst), wgmv_multicut(inst)
        self.assertEqual(first.multicut, second.multicut)
        self.assertEqual(first.y, second.y)
        self.assertEqual(first.dual_value, second.dual_value)
        self.assertIsInstance(first.dual_value, Fraction)


if __name__ == "__main__":
    unittest.main()
