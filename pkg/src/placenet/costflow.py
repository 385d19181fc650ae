"""Demand aggregation, raw-chain costing, and the cheapest-first flow rule.

Everything here is a pure function of the scenario and its arguments, so the
operations can be evaluated concurrently for different placements.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import InfeasibleError, ScenarioError, UnreachableRouteError
from .scenario import Scenario

WEIGHTED = "weighted"
UNIT = "unit"


@dataclass(frozen=True)
class DemandSummary:
    """Totals implied by the store demand table and the recipes."""

    total_per_product: dict[str, int]
    total_raw_required: dict[str, float]


@dataclass(frozen=True)
class Shipment:
    plant: str
    units: int
    warehouse: str
    unit_cost: float


@dataclass(frozen=True)
class FlowAssignment:
    """Plant-to-store shipments through product warehouses, plus total cost."""

    shipments: dict[tuple[str, str], tuple[Shipment, ...]]
    total_cost: float

    def shipped_from(self, plant: str, product: str) -> int:
        return sum(
            s.units
            for (prod, _store), entries in self.shipments.items()
            if prod == product
            for s in entries
            if s.plant == plant
        )


def total_demand(scenario: Scenario) -> dict[str, int]:
    """Componentwise sum of store demands."""
    totals = {product: 0 for product in scenario.product_ids}
    for per_product in scenario.demand.values():
        for product, units in per_product.items():
            totals[product] += units
    return totals


def raw_requirements(
    totals: dict[str, int], recipes: dict[str, dict[str, float]]
) -> dict[str, float]:
    """Recipe-weighted raw totals: req_r = sum_p recipe[p][r] * totals[p]."""
    requirements: dict[str, float] = {}
    for product, units in totals.items():
        if product not in recipes:
            raise ScenarioError(f"no recipe for product {product!r}")
        for rid, per_unit in recipes[product].items():
            requirements[rid] = requirements.get(rid, 0.0) + per_unit * units
    return requirements


def demand_summary(scenario: Scenario) -> DemandSummary:
    totals = total_demand(scenario)
    return DemandSummary(totals, raw_requirements(totals, scenario.recipes))


def raw_route_cost(scenario: Scenario, raw_id: str, warehouse: str, plant: str) -> float:
    """Unit transport cost extraction -> raw warehouse -> plant for one raw."""
    source = scenario.sites.extraction[raw_id]
    leg_in = scenario.distance(raw_id, source, warehouse)
    leg_out = scenario.distance(raw_id, warehouse, plant)
    if math.isinf(leg_in) or math.isinf(leg_out):
        raise UnreachableRouteError(
            f"no {raw_id} route {source} -> {warehouse} -> {plant}"
        )
    return leg_in + leg_out


def raw_bundle_cost(
    scenario: Scenario, plant: str, bundle: dict[str, float], warehouse: str
) -> float:
    """Cost of buying a raw bundle delivered to a plant through one warehouse.

    Per unit of each raw: extraction cost, transport on both legs, and the
    warehouse storage fee.
    """
    cost = 0.0
    for rid, units in bundle.items():
        if units == 0:
            continue
        commodity = scenario.commodities[rid]
        cost += units * (
            commodity.unit_cost
            + raw_route_cost(scenario, rid, warehouse, plant)
            + commodity.storage_fee
        )
    return cost


def product_unit_total_cost(scenario: Scenario, plant_unit_price: float, product: str) -> float:
    """Store-side unit cost: plant price plus the product storage fee.

    Transport to the store is accounted in the flow assignment, not here.
    """
    if plant_unit_price < 0:
        raise ScenarioError("plant unit price must be >= 0")
    return plant_unit_price + scenario.commodities[product].storage_fee


def ship_unit_cost(
    scenario: Scenario, plant: str, warehouses: tuple[str, ...], store: str, product: str
) -> tuple[float, str]:
    """Cheapest plant -> warehouse -> store unit cost over the given warehouses.

    Ties between warehouses resolve to the lexicographically smallest id.
    """
    best: tuple[float, str] | None = None
    for warehouse in warehouses:
        cost = scenario.distance(product, plant, warehouse) + scenario.distance(
            product, warehouse, store
        )
        if best is None or cost < best[0] or (cost == best[0] and warehouse < best[1]):
            best = (cost, warehouse)
    assert best is not None
    if math.isinf(best[0]):
        raise UnreachableRouteError(
            f"no {product} route from {plant} to {store} via {warehouses}"
        )
    return best


def greedy_flow(
    scenario: Scenario,
    plants: tuple[str, ...],
    outputs: dict[str, dict[str, int]],
    warehouses: tuple[str, ...],
) -> FlowAssignment:
    """Fill demand cheapest-shipment-first, bounded by each plant's output.

    For every product the (plant, store) unit cost is the minimum over the
    chosen warehouses of the two route legs.  Cells are served in ascending
    unit-cost order; among equal costs the lowest store position goes first,
    then the lowest plant position.  Shipments conserve units exactly: every
    store is filled and no plant exceeds its allocated output.
    """
    store_order = {store: i for i, store in enumerate(scenario.sites.stores)}
    plant_order = {plant: i for i, plant in enumerate(plants)}

    shipments: dict[tuple[str, str], list[Shipment]] = {}
    total_cost = 0.0
    for product in scenario.product_ids:
        remaining_supply = {plant: outputs.get(plant, {}).get(product, 0) for plant in plants}
        remaining_demand = {
            store: scenario.demand[store].get(product, 0) for store in scenario.sites.stores
        }
        if sum(remaining_supply.values()) < sum(remaining_demand.values()):
            raise InfeasibleError(
                f"outputs of {product} ({sum(remaining_supply.values())}) cannot cover "
                f"demand ({sum(remaining_demand.values())})"
            )
        cells = []
        for plant in plants:
            for store in scenario.sites.stores:
                cost, via = ship_unit_cost(scenario, plant, warehouses, store, product)
                cells.append((cost, store_order[store], plant_order[plant], plant, store, via))
        cells.sort(key=lambda c: c[:3])
        for cost, _s, _p, plant, store, via in cells:
            units = min(remaining_supply[plant], remaining_demand[store])
            if units <= 0:
                continue
            remaining_supply[plant] -= units
            remaining_demand[store] -= units
            shipments.setdefault((product, store), []).append(
                Shipment(plant, units, via, cost)
            )
            total_cost += units * cost
        if any(v > 0 for v in remaining_demand.values()):
            raise InfeasibleError(f"demand for {product} left unfilled after greedy pass")
    return FlowAssignment(
        {key: tuple(entries) for key, entries in shipments.items()}, total_cost
    )


def select_raw_warehouses(
    scenario: Scenario,
    plants: tuple[str, ...],
    plant_raw_requirements: dict[str, dict[str, float]],
    mode: str = WEIGHTED,
) -> dict[str, str]:
    """Assign one distinct raw warehouse to each plant at minimum route cost.

    ``weighted`` scores an assignment by unit route cost times the plant's raw
    requirement; ``unit`` ignores the requirement weights.  Ties resolve to
    the lexicographically smallest warehouse tuple in plant order.
    """
    candidates = scenario.sites.raw_warehouses
    if len(candidates) < len(plants):
        raise InfeasibleError(
            f"{len(candidates)} raw warehouse candidates for {len(plants)} plants"
        )
    if mode not in (WEIGHTED, UNIT):
        raise ScenarioError(f"unknown raw-warehouse selection mode {mode!r}")

    def assignment_cost(choice: tuple[str, ...]) -> float:
        cost = 0.0
        for plant, warehouse in zip(plants, choice):
            for rid in scenario.raw_ids:
                weight = (
                    plant_raw_requirements[plant].get(rid, 0.0) if mode == WEIGHTED else 1.0
                )
                if weight == 0.0:
                    continue
                cost += raw_route_cost(scenario, rid, warehouse, plant) * weight
        return cost

    best_choice: tuple[str, ...] | None = None
    best_cost = math.inf
    for choice in itertools.permutations(candidates, len(plants)):
        cost = assignment_cost(choice)
        if cost < best_cost or (cost == best_cost and choice < best_choice):
            best_choice, best_cost = choice, cost
    assert best_choice is not None
    return dict(zip(plants, best_choice))


def select_product_warehouses(
    scenario: Scenario,
    plants: tuple[str, ...],
    outputs: dict[str, dict[str, int]],
) -> tuple[tuple[str, str], FlowAssignment]:
    """Pick the distinct warehouse pair minimizing the greedy flow cost.

    Returns the pair and its flow.  Ties resolve to the lexicographically
    smallest (id, id) pair, comparing ids as strings.
    """
    candidates = scenario.sites.product_warehouses
    if len(candidates) < 2:
        raise InfeasibleError("need at least 2 product warehouse candidates")
    best: tuple[tuple[str, str], FlowAssignment] | None = None
    for pair in itertools.combinations(candidates, 2):
        flow = greedy_flow(scenario, plants, outputs, pair)
        if (
            best is None
            or flow.total_cost < best[1].total_cost
            or (flow.total_cost == best[1].total_cost and pair < best[0])
        ):
            best = (pair, flow)
    assert best is not None
    return best
