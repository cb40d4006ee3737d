import random
from fractions import Fraction

import pytest

from ordmech import DomainError, RationalLP, StructuralError, decompose, verify_tu_laminar

from oracles import best_vertex_value


def test_solve_simple_max():
    lp = RationalLP()
    lp.add_variable("x", 0, None)
    lp.add_constraint({"x": 1}, "<=", 3)
    lp.set_objective("max", {"x": 1})
    sol = lp.solve()
    assert sol.status == "optimal"
    assert sol["x"] == 3 and sol.objective_value == 3


def test_solve_degenerate_equalities():
    lp = RationalLP()
    lp.add_variable("x", 0, None)
    lp.add_variable("y", 0, None)
    lp.add_constraint({"x": 1, "y": 1}, "==", 2)
    lp.add_constraint({"x": 2, "y": 2}, "==", 4)  # redundant copy
    lp.set_objective("max", {"x": 1})
    sol = lp.solve()
    assert sol.status == "optimal"
    assert sol["x"] + sol["y"] == 2 and sol["x"] == 2


def test_solve_infeasible_and_unbounded():
    lp = RationalLP()
    lp.add_variable("x", 0, None)
    lp.add_constraint({"x": 1}, "<=", 1)
    lp.add_constraint({"x": 1}, ">=", 2)
    lp.set_objective("max", {"x": 1})
    assert lp.solve().status == "infeasible"

    lp2 = RationalLP()
    lp2.add_variable("x", 0, None)
    lp2.set_objective("max", {"x": 1})
    assert lp2.solve().status == "unbounded"


def test_solve_free_variables_and_fractions():
    lp = RationalLP()
    lp.add_variable("x", None, None)
    lp.add_variable("y", 0, Fraction(1, 2))
    lp.add_constraint({"x": 2, "y": 3}, "<=", Fraction(7, 2))
    lp.add_constraint({"x": 1}, ">=", Fraction(-5, 4))
    lp.set_objective("max", {"x": 1, "y": 1})
    sol = lp.solve()
    assert sol.status == "optimal"
    # x + y = x + y <= (7/2 - 3y)/2 + y = 7/4 - y/2, so y = 0 and x = 7/4
    assert sol["y"] == 0 and sol["x"] == Fraction(7, 4)
    assert sol.objective_value == Fraction(7, 4)


def test_solution_satisfies_every_constraint_exactly():
    rng = random.Random(3)
    for trial in range(25):
        lp = _random_bounded_lp(rng, n_vars=3, n_rows=4)
        sol = lp.solve()
        if sol.status == "optimal":
            assert lp.is_feasible_point(sol.values)


def test_solve_matches_vertex_enumeration_oracle():
    rng = random.Random(17)
    checked = 0
    for trial in range(30):
        lp = _random_bounded_lp(rng, n_vars=3, n_rows=3)
        sol = lp.solve()
        oracle = best_vertex_value(lp)
        if oracle is None:
            assert sol.status == "infeasible"
        else:
            assert sol.status == "optimal"
            assert sol.objective_value == oracle
            checked += 1
    assert checked >= 10


def _random_bounded_lp(rng: random.Random, n_vars: int, n_rows: int) -> RationalLP:
    lp = RationalLP()
    names = [f"v{t}" for t in range(n_vars)]
    for nm in names:
        lp.add_variable(nm, 0, rng.randint(1, 4))
    for _ in range(n_rows):
        coeffs = {nm: Fraction(rng.randint(-3, 3)) for nm in names}
        sense = rng.choice(["<=", ">="])
        lp.add_constraint(coeffs, sense, Fraction(rng.randint(-4, 6)))
    lp.set_objective(rng.choice(["max", "min"]), {nm: Fraction(rng.randint(-3, 3)) for nm in names})
    return lp


# ---------------------------------------------------------------------------
# decompose
# ---------------------------------------------------------------------------


def _birkhoff_polytope(n: int) -> RationalLP:
    lp = RationalLP()
    for j in range(n):
        for i in range(n):
            lp.add_variable((j, i), 0, 1)
    for j in range(n):
        lp.add_constraint({(j, i): 1 for i in range(n)}, "==", 1)
    for i in range(n):
        lp.add_constraint({(j, i): 1 for j in range(n)}, "==", 1)
    return lp


def test_decompose_integral_target_is_single_point():
    poly = _birkhoff_polytope(3)
    target = {(j, i): Fraction(1 if i == j else 0) for j in range(3) for i in range(3)}
    deco = decompose(target, poly)
    assert len(deco.points) == 1
    assert deco.weights == (Fraction(1),)
    assert deco.points[0] == target


def test_decompose_uniform_two_by_two():
    poly = _birkhoff_polytope(2)
    target = {(j, i): Fraction(1, 2) for j in range(2) for i in range(2)}
    deco = decompose(target, poly)
    assert len(deco.points) == 2
    assert sorted(deco.weights) == [Fraction(1, 2), Fraction(1, 2)]
    assert deco.recompose() == target


def test_decompose_random_doubly_stochastic():
    rng = random.Random(9)
    n = 3
    # random convex combination of permutation matrices, then re-decompose
    import itertools

    perms = list(itertools.permutations(range(n)))
    weights = [Fraction(rng.randint(1, 5)) for _ in range(4)]
    total = sum(weights)
    weights = [w / total for w in weights]
    chosen = rng.sample(perms, 4)
    target = {(j, i): Fraction(0) for j in range(n) for i in range(n)}
    for w, perm in zip(weights, chosen):
        for j in range(n):
            target[(j, perm[j])] += w
    poly = _birkhoff_polytope(n)
    deco = decompose(target, poly)
    assert deco.recompose() == target
    assert sum(deco.weights, Fraction(0)) == 1
    assert len(deco.points) <= (n - 1) ** 2 + 1
    for pt in deco.points:
        assert all(v in (0, 1) for v in pt.values())
        assert poly.is_feasible_point(pt)


def test_decompose_rejects_infeasible_target():
    poly = _birkhoff_polytope(2)
    target = {(j, i): Fraction(1) for j in range(2) for i in range(2)}
    with pytest.raises(DomainError):
        decompose(target, poly)


def test_decompose_flags_fractional_vertices():
    # odd-cycle fractional-matching polytope: vertices are half-integral
    lp = RationalLP()
    for e in ("ab", "bc", "ca"):
        lp.add_variable(e, 0, 1)
    lp.add_constraint({"ab": 1, "ca": 1}, "==", 1)
    lp.add_constraint({"ab": 1, "bc": 1}, "==", 1)
    lp.add_constraint({"bc": 1, "ca": 1}, "==", 1)
    target = {"ab": Fraction(1, 2), "bc": Fraction(1, 2), "ca": Fraction(1, 2)}
    with pytest.raises(StructuralError):
        decompose(target, lp)


# ---------------------------------------------------------------------------
# laminar structure
# ---------------------------------------------------------------------------


def test_laminar_two_families_accepted():
    lp = RationalLP()
    for v in "abcd":
        lp.add_variable(v, 0, 1)
    # family 1: disjoint pairs; family 2: nested chain crossing family 1
    lp.add_constraint({"a": 1, "b": 1}, "<=", 1)
    lp.add_constraint({"c": 1, "d": 1}, "<=", 1)
    lp.add_constraint({"b": 1, "c": 1}, ">=", 0)
    lp.add_constraint({"a": 1, "b": 1, "c": 1, "d": 1}, ">=", 1)
    assert verify_tu_laminar(lp)


def test_laminar_rejects_crossing_triple():
    lp = RationalLP()
    for v in "abc":
        lp.add_variable(v, 0, 1)
    # pairwise-crossing supports form an odd cycle in the crossing graph
    lp.add_constraint({"a": 1, "b": 1}, "<=", 1)
    lp.add_constraint({"b": 1, "c": 1}, "<=", 1)
    lp.add_constraint({"a": 1, "c": 1}, "<=", 1)
    assert not verify_tu_laminar(lp)


def test_dump_is_textual():
    lp = RationalLP()
    lp.add_variable("x", 0, 2)
    lp.add_constraint({"x": 1}, "<=", 1)
    lp.set_objective("max", {"x": 1})
    text = lp.dump()
    assert "max" in text and "<=" in text and "x" in text
