from __future__ import annotations

import random
import unittest
from fractions import Fraction

import networkx as nx

from config.settings.solver_settings import SolverSettings
from multiflow.exact_lp import solve_max
from multiflow.fractional_flow import PathExplosion, check_feasible, max_multiflow
from multiflow.instance_io.generators import (
    c4_2k2_instance,
    gen_c4_2k2_overline,
    gen_gk,
    gk_reference_solutions,
)
from multiflow.instance_io.model import Flow, SupplyPath
from multiflow.laminar import LaminarFlow, chain, crosses, laminarize
from multiflow.oracle import TooLarge, exact_max_half_integer_flow
from multiflow.plane_core import Shore
from multiflow.rounding.chain_lp import ChainLP, ChainRow, greedy_chain_lp
from multiflow.rounding.half_integer import (
    half_integer_round,
    plus_one_round,
    refine_halves,
    split_integer_part,
)
from multiflow.rounding.integer import integer_round
from multiflow.rounding.stable_set import (
    TargetUnreachable,
    maximum_stable_set,
    stable_set,
)
from multiflow.rounding.subdivision import subdivide, subdivided_integer_round
from tests.fuzz_corpus import fuzz_instances

CHAIN_SYSTEMS = 200
FACES = 7


def random_chain_lp(rng: random.Random) -> ChainLP:
    """Random laminar family over faces 1..FACES with one row per nonempty chain."""
    order = list(range(1, FACES + 1))
    rng.shuffle(order)
    shores: list[Shore] = []
    for _ in range(12):
        start = rng.randrange(FACES)
        stop = rng.randrange(start + 1, FACES + 1)
        candidate = Shore.of(order[start:stop])
        if candidate not in shores and not any(
            crosses(candidate, shore) for shore in shores
        ):
            shores.append(candidate)
    shores.sort()
    lf = LaminarFlow(
        entries=tuple((shore, Fraction(1)) for shore in shores),
        paths={},
        face_count=FACES + 1,
    )
    column = {shore: index for index, shore in enumerate(shores)}
    rows = []
    for u in range(1, FACES + 1):
        for v in range(FACES + 1):
            if u == v:
                continue
            members = chain(lf, u, v)
            if members:
                rows.append(
                    ChainRow(
                        edge=len(rows),
                        faces=(u, v),
                        members=tuple(column[shore] for shore in members),
                        bound=rng.randint(0, 3),
                    )
                )
    return ChainLP(shores=tuple(shores), rows=tuple(rows))


class TestChainLP(unittest.TestCase):
    """Test class for the greedy chain LP solver."""

    def test_small_system(self):
        """Test a system where the tightest row is not the longest."""
        inner, outer, other = Shore.of({1}), Shore.of({1, 2}), Shore.of({3})
        clp = ChainLP(
            shores=(inner, outer, other),
            rows=(
                ChainRow(0, (1, 0), (0, 1), 3),
                ChainRow(1, (1, 2), (0,), 1),
                ChainRow(2, (3, 0), (2,), 2),
            ),
        )
        solution = greedy_chain_lp(clp, cross_check=True)
        self.assertEqual(solution.x, (1, 2, 2))
        self.assertEqual(solution.y, (1, 0, 1))
        self.assertEqual(solution.value, 5)

    def test_random_systems_match_simplex(self):
        """Test the greedy against the exact simplex on random chain systems."""
        rng = random.Random(2024)
        for index in range(CHAIN_SYSTEMS):
            clp = random_chain_lp(rng)
            with self.subTest(system=index):
                solution = greedy_chain_lp(clp)
                exact = solve_max(clp.as_linear_program())
                self.assertEqual(exact.value, solution.value)
                self.assertTrue(exact.is_integral())
                for row in clp.rows:
                    self.assertLessEqual(
                        sum(solution.x[member] for member in row.members), row.bound
                    )


class TestHalfIntegerRounding(unittest.TestCase):
    """Test class for the half-integral and plus-one roundings."""

    def corpus(self):
        instances = [gen_gk(k) for k in range(3, 9)]
        instances.append(gen_c4_2k2_overline())
        instances.extend(inst for _, inst in fuzz_instances())
        return instances

    def test_half_integer_round(self):
        """Test feasibility, half-integrality and the factor-two value bound."""
        for number, inst in enumerate(self.corpus()):
            try:
                fractional = max_multiflow(inst)
            except PathExplosion:
                continue
            with self.subTest(instance=number):
                half = half_integer_round(inst, fractional)
                self.assertTrue(half.is_half_integer())
                self.assertTrue(check_feasible(inst, half).feasible)
                self.assertGreaterEqual(2 * half.value, fractional.value)

    def test_plus_one_round(self):
        """Test integrality, value and overload of at most one per edge."""
        for number, inst in enumerate(self.corpus()):
            try:
                fractional = max_multiflow(inst)
            except PathExplosion:
                continue
            with self.subTest(instance=number):
                rounded = plus_one_round(inst, laminarize(inst, fractional))
                self.assertTrue(rounded.is_integer())
                self.assertGreaterEqual(rounded.value, fractional.value)
                self.assertTrue(check_feasible(inst, rounded, slack=1).feasible)

    def test_without_verification(self):
        """Test that the switches of SolverSettings are honoured."""
        inst = gen_gk(4)
        settings = SolverSettings(cross_check_chain_lp=False, verify_outputs=False)
        half = half_integer_round(inst, max_multiflow(inst), settings)
        self.assertTrue(check_feasible(inst, half).feasible)

    def test_split_integer_part(self):
        """Test separating whole units from halves."""
        base = gen_gk(3)
        inst = base.with_capacities({edge: 2 for edge in base.supply_edges})
        pair = SupplyPath.canonical(5, (3, 0, 1, 4), (0, 3, 1))
        diagonal = SupplyPath.canonical(7, (3, 0, 1, 2), (0, 3, 4))
        flow = Flow.from_items([(pair, Fraction(3, 2)), (diagonal, Fraction(1, 2))])
        integer_part, halves, residual = split_integer_part(inst, laminarize(inst, flow))
        self.assertEqual(integer_part.value + halves.value, 2)
        self.assertTrue(integer_part.is_integer())
        self.assertTrue(all(value == Fraction(1, 2) for value in halves.weights.values()))
        for left in residual.values():
            self.assertGreaterEqual(left, 0)
        thirds = laminarize(inst, gk_reference_solutions(3).fractional)
        with self.assertRaises(ValueError):
            split_integer_part(inst, thirds)

    def test_refine_halves(self):
        """Test slot sizes and the intersection graph."""
        inst = gen_gk(5)
        integer_part, split = refine_halves(inst, gk_reference_solutions(5).half_integer)
        self.assertEqual(integer_part.value + split.value, Fraction(5, 2))
        for edge, slots in split.slots.items():
            self.assertLessEqual(len(slots), split.residual[edge])
            for slot in slots:
                self.assertIn(len(slot), (1, 2))
        self.assertEqual(sorted(split.intersection.nodes), list(range(len(split))))


class TestIntegerRounding(unittest.TestCase):
    """Test class for the half-integral to integral rounding."""

    def assert_rounded(self, inst, half: Flow) -> Flow:
        rounded = integer_round(inst, half)
        self.assertTrue(rounded.is_integer())
        self.assertTrue(check_feasible(inst, rounded).feasible)
        self.assertGreaterEqual(2 * rounded.value, half.value)
        return rounded

    def test_overline_gadget(self):
        """Test that the gadget's half-integral optimum rounds to value one."""
        inst = gen_c4_2k2_overline()
        value, half = exact_max_half_integer_flow(inst)
        self.assertEqual(value, 2)
        self.assertEqual(self.assert_rounded(inst, half).value, 1)

    def test_gk_reference(self):
        """Test rounding the half-integral optimum of G_k."""
        for k in range(3, 9):
            with self.subTest(k=k):
                rounded = self.assert_rounded(
                    gen_gk(k), gk_reference_solutions(k).half_integer
                )
                self.assertLessEqual(rounded.value, k // 2)

    def test_rounding_pipeline(self):
        """Test rounding the output of the half-integral rounding."""
        for seed, inst in fuzz_instances():
            try:
                half = half_integer_round(inst, max_multiflow(inst))
            except PathExplosion:
                continue
            with self.subTest(seed=seed):
                self.assert_rounded(inst, half)

    def test_half_integer_optimum_on_fuzz(self):
        """Test rounding the exact half-integral optimum of random grids."""
        for seed, inst in fuzz_instances():
            try:
                value, half = exact_max_half_integer_flow(inst)
            except (TooLarge, PathExplosion):
                continue
            with self.subTest(seed=seed):
                self.assertEqual(half.value, value)
                rounded = self.assert_rounded(inst, half)
                self.assertLessEqual(rounded.value, value)

    def test_integral_input(self):
        """Test that integral input is returned unchanged."""
        integer = gk_reference_solutions(4).integer
        self.assertIs(integer_round(gen_gk(4), integer), integer)

    def test_not_half_integral(self):
        """Test that thirds are refused."""
        with self.assertRaises(ValueError):
            integer_round(gen_gk(3), gk_reference_solutions(3).fractional)


class TestSubdivision(unittest.TestCase):
    """Test class for the explicit unit subdivision."""

    def test_subdivide(self):
        """Test copies, numbering and the embedding of a subdivided gadget."""
        inst = c4_2k2_instance()
        subdivided, bundle, original = subdivide(inst, {0: 3, 2: 2})
        self.assertEqual(bundle[0], [0, 6, 7])
        self.assertEqual(bundle[2], [2, 8])
        self.assertEqual(bundle[1], [1])
        self.assertEqual(original[7], 0)
        self.assertEqual(len(subdivided.supply_edges), 7)
        self.assertEqual(subdivided.plane.face_count, inst.plane.face_count + 3)
        for edge in subdivided.supply_edges:
            self.assertEqual(subdivided.capacity(edge), 1)
        self.assertEqual(subdivided.endpoints(7), inst.endpoints(0))

    def test_subdivided_rounding(self):
        """Test the subdivision route directly."""
        inst = gen_c4_2k2_overline()
        _, half = exact_max_half_integer_flow(inst)
        rounded = subdivided_integer_round(inst, half)
        self.assertTrue(rounded.is_integer())
        self.assertTrue(check_feasible(inst, rounded).feasible)
        self.assertEqual(rounded.value, 1)

        inst = gen_gk(6)
        rounded = subdivided_integer_round(inst, gk_reference_solutions(6).half_integer)
        self.assertTrue(check_feasible(inst, rounded).feasible)
        self.assertGreaterEqual(2 * rounded.value, 3)


class TestStableSet(unittest.TestCase):
    """Test class for the exact maximum stable set."""

    def test_known_graphs(self):
        """Test cycles, complete graphs and the icosahedron."""
        self.assertEqual(len(maximum_stable_set(nx.cycle_graph(5))), 2)
        self.assertEqual(len(maximum_stable_set(nx.cycle_graph(6))), 3)
        self.assertEqual(len(maximum_stable_set(nx.complete_graph(4))), 1)
        self.assertEqual(len(maximum_stable_set(nx.icosahedral_graph())), 3)
        self.assertEqual(maximum_stable_set(nx.path_graph(4)), [0, 2])
        self.assertEqual(maximum_stable_set(nx.Graph()), [])

    def test_is_stable(self):
        """Test that the returned set is independent."""
        graph = nx.grid_2d_graph(3, 4)
        chosen = stable_set(graph)
        self.assertEqual(len(chosen), 6)
        for a in chosen:
            for b in chosen:
                self.assertFalse(graph.has_edge(a, b))

    def test_target(self):
        """Test the lower bound check."""
        self.assertEqual(len(stable_set(nx.cycle_graph(5))), 2)
        with self.assertRaises(TargetUnreachable):
            stable_set(nx.cycle_graph(5), target=3)

    def test_default_target_is_a_quarter(self):
        """Test that the default target is a quarter of the vertices, rounded up."""
        self.assertEqual(len(stable_set(nx.complete_graph(4))), 1)
        with self.assertRaises(TargetUnreachable):
            stable_set(nx.complete_graph(5))
        self.assertEqual(len(stable_set(nx.empty_graph(9), target=None)), 9)


if __name__ == "__main__":
    unittest.main()
