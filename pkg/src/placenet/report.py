"""Report assembly and rendering (fixed-width tables or JSON).

The table form prints money at 2 decimals; the JSON payload keeps full
precision.  Both carry exactly the same numbers and neither embeds run
timestamps, so repeated runs on the same inputs are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .agents import Situation, agent1_components
from .compromise import CompromiseResult, PayoffMatrix
from .scenario import Scenario


@dataclass(frozen=True)
class Report:
    scenario_name: str
    digest: str
    situations: tuple[str, ...]
    agents: tuple[str, ...]
    payoffs: tuple[tuple[float, ...], ...]
    ideal: tuple[float, ...]
    residuals: tuple[tuple[float, ...], ...]
    sorted_residuals: tuple[tuple[float, ...], ...]
    selected: tuple[str, ...]
    deciding_value: float
    trace: tuple[dict[str, Any], ...]
    notes: tuple[str, ...]
    skipped: tuple[dict[str, str], ...] = ()
    details: tuple[dict[str, Any], ...] = ()

    def to_dict(self) -> dict[str, Any]:
        payload = {
            "scenario": self.scenario_name,
            "digest": self.digest,
            "situations": list(self.situations),
            "agents": list(self.agents),
            "payoffs": [list(row) for row in self.payoffs],
            "ideal": list(self.ideal),
            "residuals": [list(row) for row in self.residuals],
            "sorted_residuals": [list(row) for row in self.sorted_residuals],
            "selection": {
                "situations": list(self.selected),
                "deciding_value": self.deciding_value,
                "trace": [dict(step) for step in self.trace],
            },
            "notes": list(self.notes),
            "skipped": [dict(s) for s in self.skipped],
        }
        if self.details:
            payload["details"] = [dict(d) for d in self.details]
        return payload


def build_report(
    scenario: Scenario,
    situations: list[Situation],
    matrix: PayoffMatrix,
    result: CompromiseResult,
    skipped: list[tuple[tuple[str, str], str]] | None = None,
    include_details: bool = False,
) -> Report:
    details: list[dict[str, Any]] = []
    if include_details:
        for situation in situations:
            components = agent1_components(scenario, situation)
            details.append(
                {
                    "situation": situation.label,
                    "raw_warehouses": dict(situation.raw_warehouses),
                    "product_warehouses": list(situation.product_warehouses),
                    "outputs": {p: dict(v) for p, v in situation.outputs.items()},
                    "flow_cost": situation.flow.total_cost,
                    "shipments": [
                        {
                            "product": product,
                            "store": store,
                            "plant": s.plant,
                            "units": s.units,
                            "warehouse": s.warehouse,
                            "unit_cost": s.unit_cost,
                        }
                        for (product, store), entries in sorted(situation.flow.shipments.items())
                        for s in entries
                    ],
                    "plant_economics": [
                        {
                            "plant": econ.plant,
                            "product": econ.product,
                            "quantity": econ.quantity,
                            "total_value": econ.total_value,
                            "unit_value": econ.unit_value,
                            "net_profit": econ.net_profit,
                        }
                        for econ in situation.economics.values()
                    ],
                    "agent1_components": components,
                }
            )
    return Report(
        scenario_name=scenario.name,
        digest=scenario.digest,
        situations=matrix.situations,
        agents=matrix.agents,
        payoffs=tuple(tuple(float(v) for v in row) for row in matrix.values),
        ideal=tuple(float(v) for v in result.ideal),
        residuals=tuple(tuple(float(v) for v in row) for row in result.residuals),
        sorted_residuals=tuple(
            tuple(float(v) for v in row) for row in result.sorted_residuals
        ),
        selected=result.selected_labels,
        deciding_value=float(result.deciding_value),
        trace=tuple(
            {
                "depth": step.depth,
                "value": float(step.value),
                "survivors": [matrix.situations[i] for i in step.survivors],
            }
            for step in result.trace
        ),
        notes=scenario.notes,
        skipped=tuple(
            {"plants": ",".join(pair), "reason": reason} for pair, reason in (skipped or [])
        ),
        details=tuple(details),
    )


def _format_table(title: str, row_labels, col_labels, rows) -> list[str]:
    header = [""] + list(col_labels)
    body = [[label] + [f"{v:.2f}" for v in row] for label, row in zip(row_labels, rows)]
    widths = [max(len(str(line[k])) for line in [header] + body) for k in range(len(header))]
    lines = [title]
    for line in [header] + body:
        lines.append("  ".join(str(cell).rjust(w) for cell, w in zip(line, widths)))
    return lines


def render_table(report: Report, header: bool = True) -> str:
    lines: list[str] = []
    if header:
        lines.append(
            f"# placenet solve scenario={report.scenario_name} digest=sha256:{report.digest}"
        )
    lines += _format_table("payoff matrix", report.agents, report.situations, report.payoffs)
    lines.append("")
    lines += _format_table("ideal vector", report.agents, ("ideal",), [[v] for v in report.ideal])
    lines.append("")
    lines += _format_table("residuals", report.agents, report.situations, report.residuals)
    lines.append("")
    lines += _format_table(
        "sorted residuals (ascending per situation)",
        [f"rank{i + 1}" for i in range(len(report.sorted_residuals))],
        report.situations,
        report.sorted_residuals,
    )
    lines.append("")
    lines.append(
        f"compromise: {'; '.join(report.selected)}  (deciding residual {report.deciding_value:.2f})"
    )
    for step in report.trace:
        lines.append(
            f"  depth {step['depth']}: value {step['value']:.2f}, "
            f"survivors {', '.join(step['survivors'])}"
        )
    for skip in report.skipped:
        lines.append(f"skipped {skip['plants']}: {skip['reason']}")
    for note in report.notes:
        lines.append(f"note: {note}")
    for detail in report.details:
        lines.append("")
        lines.append(f"-- situation {detail['situation']} --")
        lines.append(f"raw warehouses: {detail['raw_warehouses']}")
        lines.append(f"product warehouses: {', '.join(detail['product_warehouses'])}")
        lines.append(f"outputs: {detail['outputs']}")
        lines.append(f"flow cost: {detail['flow_cost']:.2f}")
        for s in detail["shipments"]:
            lines.append(
                f"  {s['product']} {s['plant']} -> {s['store']} via {s['warehouse']}: "
                f"{s['units']} @ {s['unit_cost']:.2f}"
            )
        for row in detail["plant_economics"]:
            lines.append(
                f"  {row['plant']} {row['product']}: qty {row['quantity']}, value "
                f"{row['total_value']:.2f}, unit {row['unit_value']:.2f}, profit {row['net_profit']:.2f}"
            )
        c = detail["agent1_components"]
        lines.append(
            "  agent1 components: raw {raw_income:.2f} - {raw_cost:.2f}, product "
            "{product_income:.2f} - {product_cost:.2f}, flow {flow_cost:.2f}".format(**c)
        )
    return "\n".join(lines) + "\n"


def render_json(payload: dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
