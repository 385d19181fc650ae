"""Problem instances: commodities, sites, fees, recipes, demand, and loading.

A scenario is a single JSON document (see docs/formats.md).  String node ids
are mapped to dense integer indices at load time; everything downstream works
with the dense indices and the scenario keeps the label mapping for reporting.
Scenarios are immutable after load, so shared read access is safe.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ScenarioError
from .network import (
    CommodityDistanceMatrix,
    Edge,
    Network,
    Node,
    all_pairs_shortest_paths,
    build_network,
    euclidean_distance,
)

DEFAULT_PLANT_CAPACITY = 10.0
DEFAULT_HANDLING_RATE = 0.2

RAW = "raw"
PRODUCT = "product"


@dataclass(frozen=True)
class Commodity:
    """One raw material or finished product with its money parameters.

    ``unit_cost`` is the extraction cost per raw unit; ``purchase_price`` is
    what a plant pays per raw unit it consumes; ``storage_fee`` is the
    warehousing fee per stored unit.  Products only use ``storage_fee``.
    """

    id: str
    kind: str
    unit_cost: float = 0.0
    purchase_price: float = 0.0
    storage_fee: float = 0.0


@dataclass(frozen=True)
class Sites:
    """Where things may be placed.  All values are node labels."""

    extraction: dict[str, str]
    raw_warehouses: tuple[str, ...]
    plants: tuple[str, ...]
    product_warehouses: tuple[str, ...]
    stores: tuple[str, ...]


@dataclass(frozen=True)
class ProductionParams:
    """Cobb-Douglas factors/exponents, per-plant capacities, output splits.

    ``splits`` optionally pins, per unordered plant pair, exactly how many
    units of each product each plant produces; pairs without an entry fall
    back to the fill-first-plant-to-capacity rule.
    """

    factors: dict[str, dict[str, float]]
    exponents: dict[str, dict[str, float]]
    capacity: dict[str, dict[str, float]]
    splits: dict[frozenset[str], dict[str, dict[str, int]]] = field(default_factory=dict)

    def capacity_for(self, plant: str, product: str) -> float:
        return self.capacity.get(plant, {}).get(product, DEFAULT_PLANT_CAPACITY)


@dataclass(frozen=True)
class DistanceBound:
    node_a: str
    node_b: str
    max_distance: float


@dataclass(frozen=True)
class GlobalLimits:
    total_raw: float | None = None
    total_product: float | None = None
    max_distances: tuple[DistanceBound, ...] = ()


@dataclass(frozen=True)
class Violation:
    """One broken feasibility constraint; data, not an exception."""

    kind: str
    subject: str
    message: str


class Scenario:
    """A fully validated problem instance with cached distance matrices."""

    def __init__(
        self,
        *,
        name: str,
        node_labels: list[str],
        network: Network,
        commodities: dict[str, Commodity],
        recipes: dict[str, dict[str, float]],
        sites: Sites,
        demand: dict[str, dict[str, int]],
        retail_prices: dict[str, float],
        production: ProductionParams,
        limits: GlobalLimits,
        handling_rate: float,
        notes: tuple[str, ...],
        digest: str,
        source: dict[str, Any],
    ):
        self.name = name
        self.node_labels = node_labels
        self.node_index = {label: i for i, label in enumerate(node_labels)}
        self.network = network
        self.commodities = commodities
        self.raw_ids = [c.id for c in commodities.values() if c.kind == RAW]
        self.product_ids = [c.id for c in commodities.values() if c.kind == PRODUCT]
        self.recipes = recipes
        self.sites = sites
        self.demand = demand
        self.retail_prices = retail_prices
        self.production = production
        self.limits = limits
        self.handling_rate = handling_rate
        self.notes = notes
        self.digest = digest
        # private deep copy so later mutation of the caller's dict cannot leak in
        self._source = json.loads(json.dumps(source))
        self._distances: dict[str, CommodityDistanceMatrix] = {
            commodity: all_pairs_shortest_paths(network, commodity)
            for commodity in sorted(network.commodities)
        }

    def distances(self, commodity: str) -> CommodityDistanceMatrix:
        try:
            return self._distances[commodity]
        except KeyError:
            raise ScenarioError(f"no edge carries commodity {commodity!r}") from None

    def distance(self, commodity: str, from_label: str, to_label: str) -> float:
        """Minimum route cost between two labelled nodes for a commodity."""
        return self.distances(commodity).at(
            self.node_index[from_label], self.node_index[to_label]
        )

    def node(self, label: str) -> Node:
        return self.network.nodes[self.node_index[label]]

    def to_dict(self) -> dict[str, Any]:
        """Canonical dict in the documented file format (round-trips)."""
        return json.loads(json.dumps(self._source))

    @staticmethod
    def from_dict(data: dict[str, Any], *, digest: str | None = None) -> "Scenario":
        return _scenario_from_dict(data, digest=digest)


def load_scenario(path: str | Path) -> Scenario:
    """Parse and validate a scenario file.

    Raises ScenarioError with the offending field or entity named; a scenario
    that loads cleanly satisfies every structural invariant the pipeline
    relies on.
    """
    path = Path(path)
    raw_bytes = path.read_bytes()
    try:
        data = json.loads(raw_bytes)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: not valid JSON: line {exc.lineno}: {exc.msg}") from exc
    digest = hashlib.sha256(raw_bytes).hexdigest()
    try:
        return _scenario_from_dict(data, digest=digest)
    except ScenarioError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def _require(data: dict[str, Any], key: str, context: str) -> Any:
    if key not in data:
        raise ScenarioError(f"{context}: missing required key {key!r}")
    return data[key]


def _nonneg(value: float, what: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise ScenarioError(f"{what} must be a finite number >= 0, got {value}")
    return value


def _scenario_from_dict(data: dict[str, Any], *, digest: str | None = None) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario document must be a JSON object")
    name = str(data.get("name", "scenario"))

    node_specs = _require(data, "nodes", "scenario")
    if not node_specs:
        raise ScenarioError("nodes: list must be nonempty")
    node_labels: list[str] = []
    nodes: list[Node] = []
    for i, spec in enumerate(node_specs):
        label = str(_require(spec, "id", f"nodes[{i}]"))
        if label in node_labels:
            raise ScenarioError(f"nodes: duplicate id {label!r}")
        node_labels.append(label)
        nodes.append(Node(i, float(spec.get("x", 0.0)), float(spec.get("y", 0.0))))
    index = {label: i for i, label in enumerate(node_labels)}

    def node_ref(label: Any, context: str) -> str:
        label = str(label)
        if label not in index:
            raise ScenarioError(f"{context}: unknown node id {label!r}")
        return label

    commodities: dict[str, Commodity] = {}
    for spec in _require(data, "commodities", "scenario"):
        cid = str(_require(spec, "id", "commodities"))
        kind = str(_require(spec, "kind", f"commodity {cid}"))
        if kind not in (RAW, PRODUCT):
            raise ScenarioError(f"commodity {cid}: kind must be 'raw' or 'product'")
        if cid in commodities:
            raise ScenarioError(f"commodities: duplicate id {cid!r}")
        commodities[cid] = Commodity(
            id=cid,
            kind=kind,
            unit_cost=_nonneg(spec.get("unit_cost", 0.0), f"commodity {cid}: unit_cost"),
            purchase_price=_nonneg(
                spec.get("purchase_price", 0.0), f"commodity {cid}: purchase_price"
            ),
            storage_fee=_nonneg(spec.get("storage_fee", 0.0), f"commodity {cid}: storage_fee"),
        )
    raw_ids = [c.id for c in commodities.values() if c.kind == RAW]
    product_ids = [c.id for c in commodities.values() if c.kind == PRODUCT]

    def commodity_ref(cid: Any, context: str, kind: str | None = None) -> str:
        cid = str(cid)
        if cid not in commodities:
            raise ScenarioError(f"{context}: unknown commodity {cid!r}")
        if kind and commodities[cid].kind != kind:
            raise ScenarioError(f"{context}: commodity {cid!r} is not a {kind}")
        return cid

    grid_costs = None
    if "grid_costs" in data and data["grid_costs"] is not None:
        grid_costs = {}
        for cid, spec in data["grid_costs"].items():
            commodity_ref(cid, "grid_costs")
            grid_costs[cid] = (
                _nonneg(_require(spec, "horizontal", f"grid_costs[{cid}]"), "horizontal cost"),
                _nonneg(_require(spec, "vertical", f"grid_costs[{cid}]"), "vertical cost"),
            )

    edges: list[Edge] = []
    for i, spec in enumerate(_require(data, "edges", "scenario")):
        tail = node_ref(_require(spec, "from", f"edges[{i}]"), f"edges[{i}].from")
        head = node_ref(_require(spec, "to", f"edges[{i}]"), f"edges[{i}].to")
        cost = {
            commodity_ref(cid, f"edges[{i}].cost"): _nonneg(v, f"edges[{i}] cost for {cid}")
            for cid, v in spec.get("cost", {}).items()
        }
        capacity = {
            commodity_ref(cid, f"edges[{i}].capacity"): _nonneg(
                v, f"edges[{i}] capacity for {cid}"
            )
            for cid, v in spec.get("capacity", {}).items()
        }
        if grid_costs is None and not cost:
            raise ScenarioError(f"edges[{i}]: needs a cost map (no grid_costs given)")
        edges.append(Edge(index[tail], index[head], cost, capacity))
    network = build_network(nodes, edges, grid_costs)

    recipes: dict[str, dict[str, float]] = {}
    for product, entries in _require(data, "recipes", "scenario").items():
        commodity_ref(product, "recipes", PRODUCT)
        recipe = {
            commodity_ref(rid, f"recipe for {product}", RAW): _nonneg(
                units, f"recipe for {product}: {rid}"
            )
            for rid, units in entries.items()
        }
        if not any(v > 0 for v in recipe.values()):
            raise ScenarioError(f"recipe for {product}: needs at least one positive entry")
        recipes[product] = recipe
    for product in product_ids:
        if product not in recipes:
            raise ScenarioError(f"recipes: product {product!r} has no recipe")

    sites_spec = _require(data, "sites", "scenario")
    extraction = {
        commodity_ref(rid, "sites.extraction", RAW): node_ref(label, f"sites.extraction[{rid}]")
        for rid, label in _require(sites_spec, "extraction", "sites").items()
    }
    for rid in raw_ids:
        if rid not in extraction:
            raise ScenarioError(f"sites.extraction: raw {rid!r} has no extraction node")

    def site_list(key: str) -> tuple[str, ...]:
        labels = tuple(node_ref(x, f"sites.{key}") for x in _require(sites_spec, key, "sites"))
        if not labels:
            raise ScenarioError(f"sites.{key}: list must be nonempty")
        if len(set(labels)) != len(labels):
            raise ScenarioError(f"sites.{key}: duplicate node ids")
        return labels

    sites = Sites(
        extraction=extraction,
        raw_warehouses=site_list("raw_warehouses"),
        plants=site_list("plants"),
        product_warehouses=site_list("product_warehouses"),
        stores=site_list("stores"),
    )
    groups = [
        set(sites.extraction.values()),
        set(sites.raw_warehouses),
        set(sites.plants),
        set(sites.product_warehouses),
        set(sites.stores),
    ]
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            overlap = groups[i] & groups[j]
            if overlap:
                raise ScenarioError(f"sites: node(s) {sorted(overlap)} appear in two site groups")

    demand_spec = _require(data, "demand", "scenario")
    store_demand: dict[str, dict[str, int]] = {}
    for store, entries in _require(demand_spec, "stores", "demand").items():
        node_ref(store, "demand.stores")
        if store not in sites.stores:
            raise ScenarioError(f"demand.stores: {store!r} is not a store site")
        per_product = {}
        for product, units in entries.items():
            commodity_ref(product, f"demand for {store}", PRODUCT)
            units = int(units)
            if units < 0:
                raise ScenarioError(f"demand for {store}: {product} units must be >= 0")
            per_product[product] = units
        store_demand[store] = per_product
    for store in sites.stores:
        store_demand.setdefault(store, {})
    retail_prices = {
        commodity_ref(product, "demand.retail_prices", PRODUCT): _nonneg(
            price, f"retail price for {product}"
        )
        for product, price in _require(demand_spec, "retail_prices", "demand").items()
    }
    for product in product_ids:
        if product not in retail_prices:
            raise ScenarioError(f"demand.retail_prices: missing product {product!r}")

    production_spec = _require(data, "production", "scenario")
    factors: dict[str, dict[str, float]] = {}
    for plant, entries in _require(production_spec, "factors", "production").items():
        node_ref(plant, "production.factors")
        factors[plant] = {}
        for product, j_factor in entries.items():
            commodity_ref(product, f"production factor at {plant}", PRODUCT)
            j_factor = float(j_factor)
            if not j_factor > 0:
                raise ScenarioError(f"production factor at {plant} for {product} must be > 0")
            factors[plant][product] = j_factor
    for plant in sites.plants:
        for product in product_ids:
            if factors.get(plant, {}).get(product) is None:
                raise ScenarioError(
                    f"production.factors: missing factor for plant {plant!r}, product {product!r}"
                )
    exponents: dict[str, dict[str, float]] = {}
    for product, entries in _require(production_spec, "exponents", "production").items():
        commodity_ref(product, "production.exponents", PRODUCT)
        exponents[product] = {}
        for rid, exponent in entries.items():
            commodity_ref(rid, f"exponents for {product}", RAW)
            exponent = float(exponent)
            if not exponent > 0:
                raise ScenarioError(f"exponent for {product}/{rid} must be > 0")
            exponents[product][rid] = exponent
    for product in product_ids:
        if product not in exponents:
            raise ScenarioError(f"production.exponents: missing product {product!r}")

    capacity: dict[str, dict[str, float]] = {}
    for plant, entries in production_spec.get("capacity", {}).items():
        node_ref(plant, "production.capacity")
        capacity[plant] = {
            commodity_ref(product, f"capacity at {plant}", PRODUCT): _nonneg(
                value, f"capacity at {plant} for {product}"
            )
            for product, value in entries.items()
        }

    splits: dict[frozenset[str], dict[str, dict[str, int]]] = {}
    for i, spec in enumerate(production_spec.get("splits", [])):
        pair = tuple(
            node_ref(p, f"production.splits[{i}]") for p in _require(spec, "plants", "splits")
        )
        if len(pair) != 2 or pair[0] == pair[1]:
            raise ScenarioError(f"production.splits[{i}]: plants must be two distinct nodes")
        for plant in pair:
            if plant not in sites.plants:
                raise ScenarioError(f"production.splits[{i}]: {plant!r} is not a plant candidate")
        output = {}
        for plant, entries in _require(spec, "output", f"production.splits[{i}]").items():
            node_ref(plant, f"production.splits[{i}].output")
            output[plant] = {}
            for product, units in entries.items():
                commodity_ref(product, f"split output at {plant}", PRODUCT)
                units = int(units)
                if units < 0:
                    raise ScenarioError(f"split output at {plant} for {product} must be >= 0")
                output[plant][product] = units
        if set(output) != set(pair):
            raise ScenarioError(f"production.splits[{i}]: output must cover exactly both plants")
        splits[frozenset(pair)] = output

    production = ProductionParams(
        factors=factors, exponents=exponents, capacity=capacity, splits=splits
    )

    limits_spec = data.get("limits", {}) or {}
    bounds = []
    for i, spec in enumerate(limits_spec.get("max_distances", [])):
        pair = _require(spec, "between", f"limits.max_distances[{i}]")
        if len(pair) != 2:
            raise ScenarioError(f"limits.max_distances[{i}]: 'between' needs two node ids")
        bounds.append(
            DistanceBound(
                node_ref(pair[0], f"limits.max_distances[{i}]"),
                node_ref(pair[1], f"limits.max_distances[{i}]"),
                _nonneg(_require(spec, "max", f"limits.max_distances[{i}]"), "max distance"),
            )
        )
    limits = GlobalLimits(
        total_raw=(
            _nonneg(limits_spec["total_raw"], "limits.total_raw")
            if limits_spec.get("total_raw") is not None
            else None
        ),
        total_product=(
            _nonneg(limits_spec["total_product"], "limits.total_product")
            if limits_spec.get("total_product") is not None
            else None
        ),
        max_distances=tuple(bounds),
    )

    handling_rate = _nonneg(data.get("handling_rate", DEFAULT_HANDLING_RATE), "handling_rate")
    notes = tuple(str(n) for n in data.get("notes", []))

    if digest is None:
        digest = hashlib.sha256(
            json.dumps(data, sort_keys=True, separators=(",", ":")).encode()
        ).hexdigest()

    return Scenario(
        name=name,
        node_labels=node_labels,
        network=network,
        commodities=commodities,
        recipes=recipes,
        sites=sites,
        demand=store_demand,
        retail_prices=retail_prices,
        production=production,
        limits=limits,
        handling_rate=handling_rate,
        notes=notes,
        digest=digest,
        source=data,
    )


def validate_feasibility(scenario: Scenario, situation) -> list[Violation]:
    """Check a placement against distance bounds and edge capacities.

    Returns one Violation per broken constraint (empty list means feasible).
    Capacity accounting attributes each shipment leg to the direct edge
    joining its two waypoints, when such an edge exists; multi-hop paths are
    not reconstructed.
    """
    violations: list[Violation] = []

    for bound in scenario.limits.max_distances:
        actual = euclidean_distance(scenario.node(bound.node_a), scenario.node(bound.node_b))
        if actual > bound.max_distance + 1e-12:
            violations.append(
                Violation(
                    kind="distance",
                    subject=f"{bound.node_a}-{bound.node_b}",
                    message=(
                        f"distance between {bound.node_a} and {bound.node_b} is "
                        f"{actual:.6g}, above the configured bound {bound.max_distance:.6g}"
                    ),
                )
            )

    loads: dict[tuple[str, str, str], float] = {}

    def add_load(tail: str, head: str, commodity: str, units: float) -> None:
        key = (tail, head, commodity)
        loads[key] = loads.get(key, 0.0) + units

    for (product, store), shipments in situation.flow.shipments.items():
        for shipment in shipments:
            add_load(shipment.plant, shipment.warehouse, product, shipment.units)
            add_load(shipment.warehouse, store, product, shipment.units)
    for plant, requirement in situation.plant_raw_requirements.items():
        warehouse = situation.raw_warehouses[plant]
        for rid, units in requirement.items():
            add_load(scenario.sites.extraction[rid], warehouse, rid, units)
            add_load(warehouse, plant, rid, units)

    for edge in scenario.network.edges:
        for commodity, cap in edge.capacity.items():
            tail = scenario.node_labels[edge.tail]
            head = scenario.node_labels[edge.head]
            used = loads.get((tail, head, commodity), 0.0)
            if used > cap + 1e-9:
                violations.append(
                    Violation(
                        kind="capacity",
                        subject=f"{tail}->{head}",
                        message=(
                            f"edge {tail}->{head} carries {used:g} units of {commodity}, "
                            f"above its capacity {cap:g}"
                        ),
                    )
                )
    return violations
