from __future__ import annotations

import json
import unittest
from fractions import Fraction
from itertools import combinations, islice

from config.settings.solver_settings import SolverSettings
from multiflow.fractional_flow import PathExplosion, check_feasible, max_multiflow
from multiflow.instance_io.generators import (
    gen_c4_2k2_overline,
    gen_fuzz,
    gen_gk,
    gk_reference_solutions,
)
from multiflow.laminar import (
    LaminarFlow,
    UncrossingError,
    _Uncrosser,
    chain,
    crosses,
    cut_loads,
    demand_duals,
    flow_to_shores,
    is_laminar,
    laminarize,
    uncross,
)
from multiflow.plane_core import Shore

FUZZ_SEEDS = range(200)


def crossing_families():
    """Non-laminar shore families of known flows and of random grids."""
    for k in range(3, 7):
        inst = gen_gk(k)
        for flow in gk_reference_solutions(k)[:3]:
            family = flow_to_shores(inst, flow)
            if not is_laminar(family):
                yield inst, family
    for seed in FUZZ_SEEDS:
        inst = gen_fuzz(seed)
        try:
            family = flow_to_shores(inst, max_multiflow(inst))
        except PathExplosion:
            continue
        if not is_laminar(family):
            yield inst, family


class TestShoreRelations(unittest.TestCase):
    """Test class for crossing, laminarity and chains."""

    def test_crosses(self):
        """Test the crossing relation on canonical shores."""
        self.assertTrue(crosses(Shore.of({1, 2}), Shore.of({2, 3})))
        self.assertFalse(crosses(Shore.of({1, 2}), Shore.of({1, 2, 3})))
        self.assertFalse(crosses(Shore.of({1}), Shore.of({2})))
        self.assertTrue(is_laminar([Shore.of({1}), Shore.of({1, 2}), Shore.of({3})]))
        self.assertFalse(is_laminar([Shore.of({1, 2}), Shore.of({2, 3})]))

    def test_chain(self):
        """Test that chains list the separating shores innermost first."""
        inner, outer, other = Shore.of({1}), Shore.of({1, 2}), Shore.of({3})
        lf = LaminarFlow(
            entries=((inner, Fraction(1)), (outer, Fraction(1)), (other, Fraction(1))),
            paths={},
            face_count=4,
        )
        self.assertEqual(chain(lf, 1, 0), (inner, outer))
        self.assertEqual(chain(lf, 1, 2), (inner,))
        self.assertEqual(chain(lf, 2, 1), ())
        with self.assertRaises(ValueError):
            chain(lf, 1, 1)


class TestUncross(unittest.TestCase):
    """Test class for turning path flows into laminar flows."""

    def assert_uncrossed(self, inst, flow) -> None:
        family = flow_to_shores(inst, flow)
        before = cut_loads(inst, family)
        lf = uncross(inst, family)
        after = cut_loads(inst, lf.weights)

        self.assertEqual(lf.value, flow.value)
        self.assertTrue(is_laminar(lf.shores))
        self.assertLessEqual(len(lf), 2 * (inst.dual.face_count - 1))
        for edge, load in after.items():
            self.assertLessEqual(load, before.get(edge, Fraction(0)))
        for shore in lf.shores:
            self.assertEqual(len(demand_duals(inst, inst.dual, shore)), 1)
            self.assertNotIn(inst.dual.outer_face, shore)
        self.assertTrue(check_feasible(inst, lf.to_flow()).feasible)
        self.assertEqual(lf.to_flow().value, flow.value)

    def test_gk_reference_flows(self):
        """Test uncrossing the known optimal flows of G_k."""
        for k in range(3, 7):
            reference = gk_reference_solutions(k)
            for flow in reference[:3]:
                with self.subTest(k=k, value=str(flow.value)):
                    self.assert_uncrossed(gen_gk(k), flow)

    def test_shores_of_gk(self):
        """Test that every G_3 path bounds its own shore."""
        flow = gk_reference_solutions(3).fractional
        family = flow_to_shores(gen_gk(3), flow)
        self.assertEqual(len(family), 3)
        self.assertEqual(sum(family.values()), flow.value)

    def test_overline_gadget(self):
        """Test uncrossing the fractional optimum of the overline gadget."""
        inst = gen_c4_2k2_overline()
        self.assert_uncrossed(inst, max_multiflow(inst))

    def test_fuzz_properties(self):
        """Test value, load, size and feasibility guarantees on random grids."""
        for seed in FUZZ_SEEDS:
            inst = gen_fuzz(seed)
            try:
                flow = max_multiflow(inst)
            except PathExplosion:
                continue
            with self.subTest(seed=seed):
                self.assert_uncrossed(inst, flow)

    def test_laminarize(self):
        """Test the one-call wrapper."""
        inst = gen_fuzz(5, width=3, height=4)
        flow = max_multiflow(inst)
        lf = laminarize(inst, flow)
        self.assertEqual(lf.value, flow.value)
        self.assertEqual(lf.face_count, inst.dual.face_count)

    def test_wrong_demand_count(self):
        """Test that a shore crossed by several demands is refused."""
        inst = gen_gk(3)
        dm = inst.dual
        face = next(
            face for face in range(dm.face_count) if {5, 6} <= set(dm.rotation[face])
        )
        with self.assertRaises(UncrossingError):
            uncross(inst, {dm.canonical_shore({face}): Fraction(1)})

    def test_budget(self):
        """Test that a tiny budget stops a crossing family."""
        inst, family = next(crossing_families(), (None, None))
        self.assertIsNotNone(family)
        with self.assertRaises(UncrossingError):
            uncross(inst, family, SolverSettings(uncross_budget_factor=0))

    def test_measure_decreases(self):
        """Test that every uncrossing step lowers the crossing measure."""
        steps = 0
        for number, (inst, family) in enumerate(islice(crossing_families(), 10)):
            with self.subTest(family=number):
                with self.assertLogs(level="DEBUG") as captured:
                    uncross(inst, family)
                for record in captured.records:
                    message = json.loads(record.getMessage())
                    if message["message"] != "Uncrossed shores":
                        continue
                    steps += 1
                    self.assertLess(
                        Fraction(message["measure_after"]),
                        Fraction(message["measure_before"]),
                    )
                    self.assertGreater(message["crossing_pairs"], 0)
        self.assertGreater(steps, 0)

    def test_two_crossing_shores(self):
        """Test that a crossing pair of half weights becomes its admissible pair."""
        inst, family = next(crossing_families(), (None, None))
        self.assertIsNotNone(family)
        dm = inst.dual
        a, b = next(
            (a, b) for a, b in combinations(sorted(family), 2) if crosses(a, b)
        )
        half = Fraction(1, 2)
        inner, outer = Shore.of(a.faces & b.faces), Shore.of(a.faces | b.faces)
        if all(len(demand_duals(inst, dm, s)) == 1 for s in (inner, outer)):
            expected = {inner: half, outer: half}
        else:
            expected = {
                Shore.of(a.faces - b.faces): half,
                Shore.of(b.faces - a.faces): half,
            }
        weights = {a: half, b: half}
        _Uncrosser(inst, budget=10).uncross_pairs(weights)
        self.assertEqual(weights, expected)
        self.assertTrue(is_laminar(weights))

        lf = uncross(inst, {a: half, b: half})
        self.assertEqual(lf.value, 1)
        self.assertTrue(is_laminar(lf.shores))
        self.assertFalse({a, b} <= set(lf.shores))
        before = cut_loads(inst, {a: half, b: half})
        for edge, load in cut_loads(inst, lf.weights).items():
            self.assertLessEqual(load, before.get(edge, Fraction(0)))

    def test_laminar_input_is_a_fixed_point(self):
        """Test that uncrossing an uncrossed family changes nothing."""
        instances = [(gen_gk(k), max_multiflow(gen_gk(k))) for k in (3, 5)]
        instances.append((gen_c4_2k2_overline(), max_multiflow(gen_c4_2k2_overline())))
        for seed in range(10):
            inst = gen_fuzz(seed)
            try:
                instances.append((inst, max_multiflow(inst)))
            except PathExplosion:
                continue
        for number, (inst, flow) in enumerate(instances):
            with self.subTest(instance=number):
                lf = laminarize(inst, flow)
                again = uncross(inst, lf.weights)
                self.assertEqual(again.entries, lf.entries)
                self.assertEqual(again.paths, lf.paths)


if __name__ == "__main__":
    unittest.main()
