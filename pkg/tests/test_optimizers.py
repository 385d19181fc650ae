import itertools
import math
import random

import numpy as np
import pytest

from placenet import (
    InfeasibleError,
    LoadingInstance,
    LoadingItem,
    PlanInstance,
    ScenarioError,
    TransportInstance,
    balance,
    solve_loading,
    solve_production_plan,
    solve_transportation,
)


def brute_force_transport(instance: TransportInstance) -> float:
    """Exhaustive integer enumeration over all feasible carriage matrices."""
    instance = balance(instance)
    supply = [int(a) for a in instance.supply]
    demand = [int(b) for b in instance.demand]
    costs = instance.costs
    m, n = len(supply), len(demand)
    best = math.inf

    def fill(i, remaining_cols, cost_so_far):
        nonlocal best
        if cost_so_far >= best:
            return
        if i == m:
            if all(c == 0 for c in remaining_cols):
                best = cost_so_far
            return
        def row_fill(j, left, cols, cost):
            nonlocal best
            if cost >= best:
                return
            if j == n - 1:
                if left <= cols[j]:
                    new_cols = list(cols)
                    new_cols[j] -= left
                    fill(i + 1, new_cols, cost + costs[i][j] * left)
                return
            for x in range(min(left, cols[j]) + 1):
                new_cols = list(cols)
                new_cols[j] -= x
                row_fill(j + 1, left - x, new_cols, cost + costs[i][j] * x)
        row_fill(0, supply[i], list(remaining_cols), cost_so_far)

    fill(0, list(demand), 0.0)
    return best


def brute_force_loading(instance: LoadingInstance) -> float:
    best = 0.0
    ranges = [range(instance.capacity // item.weight + 1) for item in instance.items]
    for counts in itertools.product(*ranges):
        weight = sum(c * item.weight for c, item in zip(counts, instance.items))
        if weight <= instance.capacity:
            best = max(best, sum(c * item.profit for c, item in zip(counts, instance.items)))
    return best


def plan_vertices(instance: PlanInstance):
    """All basic feasible points of the plan polytope via constraint-plane intersections."""
    n = len(instance.profit)
    rows = []
    rhs = []
    for i in range(n):
        row = [0.0] * n
        row[i] = 1.0
        rows.append(list(row))
        rhs.append(instance.upper[i])
        rows.append([-v for v in row])
        rhs.append(-instance.lower[i])
    for j in range(len(instance.resource_limits)):
        rows.append([instance.resource_use[i][j] for i in range(n)])
        rhs.append(instance.resource_limits[j])
    rows = np.array(rows)
    rhs = np.array(rhs)
    vertices = []
    for subset in itertools.combinations(range(len(rows)), n):
        a = rows[list(subset)]
        if abs(np.linalg.det(a)) < 1e-9:
            continue
        x = np.linalg.solve(a, rhs[list(subset)])
        if np.all(rows @ x <= rhs + 1e-7):
            vertices.append(x)
    return vertices


class TestBalance:
    def test_excess_supply_adds_destination(self):
        instance = TransportInstance(supply=(10,), demand=(6,), costs=((3,),))
        balanced = balance(instance)
        assert balanced.demand == (6, 4)
        assert balanced.costs == ((3, 0),)

    def test_balanced_unchanged(self):
        instance = TransportInstance(supply=(5, 5), demand=(4, 6), costs=((1, 2), (3, 4)))
        assert balance(instance) is instance

    def test_excess_demand_adds_source(self):
        instance = TransportInstance(supply=(3,), demand=(5, 4), costs=((2, 7),))
        balanced = balance(instance)
        assert balanced.supply == (3, 6)
        assert balanced.costs[1] == (0, 0)

    def test_idempotent(self):
        instance = TransportInstance(supply=(10,), demand=(6,), costs=((3,),))
        once = balance(instance)
        assert balance(once) is once


class TestTransportation:
    def test_one_by_one(self):
        plan = solve_transportation(TransportInstance(supply=(5,), demand=(5,), costs=((3,),)))
        assert plan.allocation == ((5,),)
        assert plan.objective == 15

    def test_two_by_two_hand_case(self):
        plan = solve_transportation(
            TransportInstance(supply=(10, 20), demand=(15, 15), costs=((1, 2), (3, 1)))
        )
        assert plan.objective == 40
        assert plan.allocation[0][0] == 10
        assert plan.allocation[1][0] == 5
        assert plan.allocation[1][1] == 15

    def test_unbalanced_records_fictitious(self):
        plan = solve_transportation(TransportInstance(supply=(10,), demand=(6,), costs=((3,),)))
        assert plan.fictitious == ("destination", 1)
        assert plan.objective == 18
        assert not plan.balanced

    def test_negative_supply_rejected(self):
        with pytest.raises(ScenarioError):
            TransportInstance(supply=(-1,), demand=(1,), costs=((1,),))

    def test_matches_brute_force_on_random_instances(self):
        rng = random.Random(20240818)
        for trial in range(220):
            m = rng.randint(1, 3)
            n = rng.randint(1, 3)
            supply = tuple(float(rng.randint(1, 9)) for _ in range(m))
            total = int(sum(supply))
            cuts = sorted(rng.randint(0, total) for _ in range(n - 1))
            parts = [b - a for a, b in zip([0] + cuts, cuts + [total])]
            demand = tuple(float(p) for p in parts)
            costs = tuple(tuple(float(rng.randint(0, 9)) for _ in range(n)) for _ in range(m))
            instance = TransportInstance(supply=supply, demand=demand, costs=costs)
            plan = solve_transportation(instance)
            assert plan.objective == pytest.approx(brute_force_transport(instance))

    def test_conservation_and_basis_size(self):
        rng = random.Random(7)
        for _ in range(50):
            m, n = rng.randint(2, 4), rng.randint(2, 4)
            supply = tuple(float(rng.randint(1, 9)) for _ in range(m))
            demand_total = sum(supply)
            weights = [rng.random() for _ in range(n)]
            scale = demand_total / sum(weights)
            demand = [round(w * scale) for w in weights]
            demand[-1] += int(demand_total - sum(demand))
            if demand[-1] < 0:
                continue
            costs = tuple(tuple(float(rng.randint(0, 9)) for _ in range(n)) for _ in range(m))
            plan = solve_transportation(
                TransportInstance(supply=supply, demand=tuple(map(float, demand)), costs=costs)
            )
            allocation = np.array(plan.allocation)
            assert np.allclose(allocation.sum(axis=1), supply)
            assert np.allclose(allocation.sum(axis=0), demand)
            assert np.all(allocation >= 0)
            assert len(plan.basis) <= m + n - 1

    def test_duality_at_optimum(self):
        rng = random.Random(13)
        for _ in range(30):
            m, n = rng.randint(2, 3), rng.randint(2, 3)
            supply = tuple(float(rng.randint(1, 9)) for _ in range(m))
            total = int(sum(supply))
            cuts = sorted(rng.randint(0, total) for _ in range(n - 1))
            demand = tuple(
                float(b - a) for a, b in zip([0] + cuts, cuts + [total])
            )
            costs = tuple(tuple(float(rng.randint(0, 9)) for _ in range(n)) for _ in range(m))
            plan = solve_transportation(
                TransportInstance(supply=supply, demand=demand, costs=costs)
            )
            u, v = plan.potentials
            basis = set(plan.basis)
            for i in range(m):
                for j in range(n):
                    if (i, j) not in basis:
                        assert u[i] + v[j] <= costs[i][j] + 1e-9


class TestLoading:
    def test_two_item_hand_case(self):
        instance = LoadingInstance(
            capacity=5,
            items=(LoadingItem("a", 2, 3), LoadingItem("b", 3, 4)),
        )
        solution = solve_loading(instance)
        assert solution.counts == {"a": 1, "b": 1}
        assert solution.objective == 7

    def test_zero_capacity(self):
        instance = LoadingInstance(capacity=0, items=(LoadingItem("a", 2, 3),))
        solution = solve_loading(instance)
        assert solution.counts == {"a": 0}
        assert solution.objective == 0

    def test_single_item_floor(self):
        instance = LoadingInstance(capacity=10, items=(LoadingItem("a", 3, 5),))
        solution = solve_loading(instance)
        assert solution.counts == {"a": 3}
        assert solution.objective == 15

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ScenarioError, match="weight"):
            LoadingInstance(capacity=5, items=(LoadingItem("a", 0, 3),))

    def test_full_sweep_matches_enumeration(self):
        rng = random.Random(5)
        for n in (1, 2, 3):
            for capacity in range(0, 21):
                for _ in range(3):
                    items = tuple(
                        LoadingItem(f"i{k}", rng.randint(1, max(1, capacity)), rng.randint(0, 9))
                        for k in range(n)
                    )
                    instance = LoadingInstance(capacity=capacity, items=items)
                    solution = solve_loading(instance)
                    assert solution.objective == pytest.approx(brute_force_loading(instance))
                    chosen_weight = sum(
                        solution.counts[item.name] * item.weight for item in items
                    )
                    assert chosen_weight <= capacity

    def test_table_rows_nondecreasing_in_weight(self):
        instance = LoadingInstance(
            capacity=12,
            items=(LoadingItem("a", 3, 4), LoadingItem("b", 5, 9), LoadingItem("c", 2, 1)),
        )
        solution = solve_loading(instance)
        for row in solution.table:
            assert np.all(np.diff(row) >= 0)

    def test_quantum_scaling(self):
        data = {"capacity": 1.0, "items": [{"name": "a", "weight": 0.25, "profit": 2}]}
        instance = LoadingInstance.from_dict(data, quantum=0.25)
        assert instance.capacity == 4
        assert instance.items[0].weight == 1
        assert solve_loading(instance).objective == 8


class TestProductionPlan:
    def test_hand_case_unconstrained_lower(self):
        instance = PlanInstance(
            lower=(0, 0),
            upper=(10, 10),
            resource_use=((1,), (2,)),
            resource_limits=(8,),
            profit=(3, 5),
        )
        x, objective = solve_production_plan(instance)
        assert x == pytest.approx((8, 0))
        assert objective == pytest.approx(24)

    def test_zero_resources_forces_zero(self):
        instance = PlanInstance(
            lower=(0, 0),
            upper=(10, 10),
            resource_use=((1,), (2,)),
            resource_limits=(0,),
            profit=(3, 5),
        )
        x, objective = solve_production_plan(instance)
        assert x == pytest.approx((0, 0))
        assert objective == 0

    def test_hand_case_with_lower_bounds(self):
        instance = PlanInstance(
            lower=(1, 1),
            upper=(10, 10),
            resource_use=((1,), (2,)),
            resource_limits=(8,),
            profit=(3, 5),
        )
        x, objective = solve_production_plan(instance)
        assert x == pytest.approx((6, 1))
        assert objective == pytest.approx(23)

    def test_infeasible_lower_bounds(self):
        instance = PlanInstance(
            lower=(5, 5),
            upper=(10, 10),
            resource_use=((1,), (2,)),
            resource_limits=(8,),
            profit=(3, 5),
        )
        with pytest.raises(InfeasibleError, match="lower bounds"):
            solve_production_plan(instance)

    def test_random_instances_match_vertex_enumeration(self):
        rng = random.Random(20240819)
        for _ in range(60):
            n = rng.randint(1, 3)
            m = rng.randint(1, min(3, 6 - n))
            lower = tuple(float(rng.randint(0, 2)) for _ in range(n))
            upper = tuple(lo + rng.randint(1, 6) for lo in lower)
            use = tuple(tuple(float(rng.randint(0, 3)) for _ in range(m)) for _ in range(n))
            limits = tuple(
                float(sum(use[i][j] * lower[i] for i in range(n)) + rng.randint(0, 12))
                for j in range(m)
            )
            profit = tuple(float(rng.randint(0, 9)) for _ in range(n))
            instance = PlanInstance(
                lower=lower, upper=upper, resource_use=use,
                resource_limits=limits, profit=profit,
            )
            x, objective = solve_production_plan(instance)
            vertices = plan_vertices(instance)
            assert vertices, "feasible instance must have vertices"
            best = max(np.dot(profit, v) for v in vertices)
            assert objective == pytest.approx(best, abs=1e-6)
            # returned point satisfies all constraints
            assert all(
                lo - 1e-9 <= xi <= hi + 1e-9 for xi, lo, hi in zip(x, lower, upper)
            )
            assert np.all(np.array(x) @ np.array(use) <= np.array(limits) + 1e-9)

    def test_objective_dominates_random_feasible_points(self):
        instance = PlanInstance(
            lower=(0, 1, 0),
            upper=(6, 5, 4),
            resource_use=((1, 2), (2, 1), (1, 1)),
            resource_limits=(14, 12),
            profit=(4, 3, 5),
        )
        _, objective = solve_production_plan(instance)
        rng = random.Random(77)
        tried = 0
        while tried < 1000:
            candidate = [rng.uniform(lo, hi) for lo, hi in zip(instance.lower, instance.upper)]
            usage = np.array(candidate) @ np.array(instance.resource_use)
            if np.all(usage <= np.array(instance.resource_limits)):
                tried += 1
                assert np.dot(instance.profit, candidate) <= objective + 1e-9

    def test_integer_mode(self):
        instance = PlanInstance(
            lower=(0, 0),
            upper=(4, 4),
            resource_use=((2,), (3,)),
            resource_limits=(11,),
            profit=(3, 5),
        )
        x, objective = solve_production_plan(instance, integer=True)
        assert all(float(v).is_integer() for v in x)
        best = max(
            3 * a + 5 * b
            for a in range(5)
            for b in range(5)
            if 2 * a + 3 * b <= 11
        )
        assert objective == pytest.approx(best)

    def test_integer_mode_refuses_huge_boxes(self):
        instance = PlanInstance(
            lower=(0, 0, 0),
            upper=(200, 200, 200),
            resource_use=((1,), (1,), (1,)),
            resource_limits=(10,),
            profit=(1, 1, 1),
        )
        with pytest.raises(ScenarioError, match="10\\^6"):
            solve_production_plan(instance, integer=True)
