"""Reproduction table: achieved rates of every built-in protocol against every bound.

Each number is a :class:`Cell` tagged with how it was obtained. Exact and
closed-form cells are compared at 1e-9, best-found (searched) cells at 5e-3.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .bounds import (BoundReport, asymptotic_bounds, asymptotic_protocol_rates, improved_bounds,
                     prelim_bounds, randomness_bounds)
from .builtins import (build_and, build_controlled_erasure, build_group_add, build_remote_ot, build_sum,
                       cyclic_group, field_addition_problem, symmetric_group, erasure_problem)
from .cmss import build_and_cmss, cmss_bounds
from .optimize import OptimizerConfig
from .prob import Problem
from .protocol import Protocol, rate_quadruple, transcript_distribution

EXACT_TOL = 1e-9
SEARCH_TOL = 5e-3
GAP_TOL = 5e-3
COLUMNS = ("r12", "r23", "r31", "rho")


@dataclass(frozen=True)
class Cell:
    value: float
    method: str  # "exact", "closed-form" or "best-found"
    supremum: bool = False

    @property
    def tolerance(self) -> float:
        return SEARCH_TOL if self.method == "best-found" else EXACT_TOL

    def to_dict(self) -> dict:
        d = {"value": round(self.value, 12), "method": self.method, "tolerance": self.tolerance}
        if self.supremum:
            d["supremum"] = True
        return d


@dataclass
class Row:
    section: str
    label: str
    cells: dict[str, Cell]
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"section": self.section, "label": self.label,
                "cells": {k: self.cells[k].to_dict() for k in self.cells}, "notes": list(self.notes)}


@dataclass
class GoldenTable:
    config: OptimizerConfig
    rows: list[Row]

    def to_dict(self) -> dict:
        return {"format": "secomp-golden", "version": 1,
                "config": {"seed": self.config.seed, "restarts": self.config.restarts,
                           "floors": list(self.config.floors)},
                "rows": [r.to_dict() for r in self.rows]}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False, sort_keys=False)

    def flat(self) -> dict[str, Cell]:
        return {f"{r.section}/{r.label}/{k}": c for r in self.rows for k, c in r.cells.items()}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "label", "column", "value", "method", "supremum", "notes"])
        for r in self.rows:
            for k, c in r.cells.items():
                w.writerow([r.section, r.label, k, f"{c.value:.9f}", c.method, int(c.supremum), "; ".join(r.notes)])
        return buf.getvalue()

    def to_markdown(self) -> str:
        out, current = [], None
        for r in self.rows:
            if r.section != current:
                current = r.section
                out += ["", f"### {current}", ""]
            body = ", ".join(f"{k}={_fmt(c)}" for k, c in r.cells.items())
            note = f" ({'; '.join(r.notes)})" if r.notes else ""
            out.append(f"- **{r.label}**: {body}{note}")
        return "\n".join(out).lstrip() + "\n"


def _fmt(c: Cell) -> str:
    mark = "*" if c.method == "best-found" else ""
    sup = "↑" if c.supremum else ""
    return f"{c.value:.4f}{mark}{sup}"


def compare_to_fixture(table: GoldenTable | Mapping, fixture: Mapping) -> list[str]:
    """Cells that disagree with a stored fixture beyond the fixture's per-cell tolerance."""
    doc = table.to_dict() if isinstance(table, GoldenTable) else table
    have = {f"{r['section']}/{r['label']}/{k}": c for r in doc["rows"] for k, c in r["cells"].items()}
    want = {f"{r['section']}/{r['label']}/{k}": c for r in fixture["rows"] for k, c in r["cells"].items()}
    problems = [f"missing cell {k}" for k in sorted(set(want) - set(have))]
    problems += [f"unexpected cell {k}" for k in sorted(set(have) - set(want))]
    for k in sorted(set(want) & set(have)):
        a, b = have[k], want[k]
        if a["method"] != b["method"]:
            problems.append(f"{k}: method {a['method']} != {b['method']}")
        elif abs(a["value"] - b["value"]) > b["tolerance"]:
            problems.append(f"{k}: {a['value']} vs fixture {b['value']} (tol {b['tolerance']})")
    return problems


# building blocks

def _achieved(problem: Problem, protocol: Protocol, n: int = 1) -> dict[str, Cell]:
    rq = rate_quadruple(transcript_distribution(protocol, problem.p_xy), n)
    return {q: Cell(getattr(rq, q), "exact") for q in COLUMNS}


def _bound_cells(reports: Iterable[BoundReport]) -> dict[str, Cell]:
    terms = [t for rep in reports for t in rep.terms]
    out = {}
    for q in COLUMNS:
        cands = [t for t in terms if t.quantity == q]
        if not cands:
            continue
        top = max(t.value for t in cands)
        best = next(t for t in cands if t.value >= top - 1e-9)
        method = "best-found" if best.method == "best-found" else "closed-form"
        out[q] = Cell(top, method, best.supremum)
    return out


def all_bounds(problem: Problem, config: OptimizerConfig) -> list[BoundReport]:
    """Preliminary, switched (with conditions) and randomness reports."""
    return [prelim_bounds(problem), randomness_bounds(problem, config)]


def _status(achieved: Mapping[str, Cell], bound: Mapping[str, Cell]) -> list[str]:
    gaps = [q for q in COLUMNS if q in bound and achieved[q].value - bound[q].value > GAP_TOL]
    return [f"gap on {', '.join(gaps)}"] if gaps else ["tight on all links and randomness"]


def instances() -> list[tuple[str, Callable[[], tuple[Problem, Protocol]], int | None]]:
    """(label, constructor, group order for symbol units)."""
    q = Fraction
    return [
        ("remote-ot(2,1)", lambda: build_remote_ot(2, 1), None),
        ("remote-ot(4,1)", lambda: build_remote_ot(4, 1), None),
        ("remote-ot(2,2)", lambda: build_remote_ot(2, 2), None),
        ("group-add(Z2)", lambda: build_group_add(cyclic_group(2)), 2),
        ("group-add(Z3)", lambda: build_group_add(cyclic_group(3)), 3),
        ("group-add(S3)", lambda: build_group_add(symmetric_group(3)), 6),
        ("sum", build_sum, None),
        ("and", build_and, None),
        ("erasure(1/2,1/2)", lambda: build_controlled_erasure(1, p=q(1, 2), q=q(1, 2)), None),
        ("erasure(1/4,1/3)", lambda: build_controlled_erasure(1, p=q(1, 4), q=q(1, 3)), None),
    ]


def _instance_rows(config: OptimizerConfig) -> list[Row]:
    rows = []
    for label, build, order in instances():
        problem, protocol = build()
        achieved = _achieved(problem, protocol)
        bound = _bound_cells(all_bounds(problem, config))
        rows.append(Row("instances", f"{label} achieved", achieved))
        bound_row = Row("instances", f"{label} bound", bound, _status(achieved, bound))
        if order:
            bound_row.notes.append(f"{bound['r12'].value / math.log2(order):.4f} {order}-ary symbols per link")
        rows.append(bound_row)
    return rows


def _and_progression(config: OptimizerConfig) -> list[Row]:
    problem = build_and()[0]
    stages = [("preliminary", prelim_bounds(problem)),
              ("switched", improved_bounds(problem, config, use_conditions=False)),
              ("switched + conditions", improved_bounds(problem, config, use_conditions=True))]
    rows = []
    for name, rep in stages:
        cells = _bound_cells([rep])
        rows.append(Row("and-progression", name, {q: cells[q] for q in ("r31", "r23", "r12")}))
    return rows


def _h2(p: Fraction) -> float:
    return -sum(float(v) * math.log2(float(v)) for v in (p, 1 - p) if v)


def _erasure_lengths() -> list[Row]:
    rows = []
    for p, q in ((Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 4), Fraction(1, 3))):
        for n in (1, 2, 4):
            problem, protocol = build_controlled_erasure(n, p=p, q=q)
            td = transcript_distribution(protocol, problem.p_xy)
            rq = rate_quadruple(td, n)
            length = td.expected_length("31") / n
            target = _h2(p) + float(p) + 1 / n
            rows.append(Row("erasure-lengths", f"({p},{q}) n={n}", {
                "E[L31]/n": Cell(length, "exact"),
                "H2(p)+p+1/n": Cell(target, "closed-form"),
                "r31": Cell(rq.r31, "exact"), "r12": Cell(rq.r12, "exact"), "r23": Cell(rq.r23, "exact"),
            }, ["within slack" if length < target else "slack exceeded"]))
    return rows


def _asymptotic_rows(config: OptimizerConfig) -> list[Row]:
    h = Fraction
    rows = []
    cases = [
        ("F2 uniform", field_addition_problem(2), "korner-marton"),
        ("F3 uniform", field_addition_problem(3), "korner-marton"),
        ("F2 Bern(0.3)xBern(0.3)", field_addition_problem(2, {"0": h(7, 10), "1": h(3, 10)},
                                                          {"0": h(7, 10), "1": h(3, 10)}), "korner-marton"),
        ("erasure(1/2,1/2)", erasure_problem(h(1, 2), h(1, 2)), "slepian-wolf-erasure"),
        ("erasure(1/4,1/2)", erasure_problem(h(1, 4), h(1, 2)), "slepian-wolf-erasure"),
    ]
    for label, problem, scheme in cases:
        rep = asymptotic_bounds(problem)
        rates = asymptotic_protocol_rates(scheme, problem)
        bound = {q: Cell(rep.value(q), "best-found") for q in COLUMNS}
        rows.append(Row("asymptotic", f"{label} bound", bound))
        rows.append(Row("asymptotic", f"{label} rates", {q: Cell(getattr(rates, q), "closed-form") for q in COLUMNS},
                        [f"{scheme}, vanishing slack omitted"]))
        if scheme == "korner-marton":
            perfect = _bound_cells([improved_bounds(problem, config)])
            sep = perfect["r12"].value - rep.value("r12")
            rows.append(Row("asymptotic", f"{label} perfect-security bound", perfect,
                            [f"perfect minus asymptotic on r12: {sep:.4f} bits"
                             + (" (separated)" if sep > GAP_TOL else " (no separation)")]))
    return rows


def _cmss_rows(config: OptimizerConfig) -> list[Row]:
    problem = build_and()[0]
    protocol_bound = _bound_cells([improved_bounds(problem, config)])
    scheme = build_and_cmss()
    shares = scheme.share_entropies()
    share_bound = _bound_cells([cmss_bounds(scheme.secrets, config)])
    sep = protocol_bound["r12"].value - shares["M12"]
    return [
        Row("cmss", "and protocol bound", {"r12": protocol_bound["r12"]}),
        Row("cmss", "and sharing scheme", {"r12": Cell(shares["M12"], "exact"), "r23": Cell(shares["M23"], "exact"),
                                           "r31": Cell(shares["M31"], "exact")}),
        Row("cmss", "and sharing bound", {q: share_bound[q] for q in ("r12", "r23", "r31")},
            [f"protocol r12 bound exceeds the optimal share by {sep:.4f} bits"
             + (" (separated)" if sep > GAP_TOL else " (no separation)")]),
    ]


def golden_table(config: OptimizerConfig | None = None) -> GoldenTable:
    """Build the whole table; deterministic for a fixed config."""
    config = config or OptimizerConfig()
    rows = (_instance_rows(config) + _and_progression(config) + _erasure_lengths()
            + _asymptotic_rows(config) + _cmss_rows(config))
    return GoldenTable(config, rows)
