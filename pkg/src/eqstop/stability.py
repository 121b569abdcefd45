"""Experiments over converging sequences of rewards and kernels.

A sequence holds one model per index n on a shared state set plus a limit
model. The runner solves every member, sweeps the relaxed values over an
eps grid without ever exchanging the two limits (tables are indexed by
(eps, n) and tail statistics are always taken in n first), and reports
finite-grid surrogates for the set liminf/limsup together with
total-variation diagnostics.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .chain import kernel_tv_gap
from .equilibrium import (
    EXACT,
    PSEUDO,
    exact,
    pseudo,
    RegionSweep,
    relaxed_value_cascade,
    relaxed_values_from_sweep,
    smallest_equilibrium,
)
from .errors import EnumerationTooLarge, EqstopError
from .model import MarkovModel
from .value import j_values

SCHEMA_VERSION = 1
CSV_HEADER = ("n", "eps", "x", "quantity", "lo", "hi", "region")


@dataclass(frozen=True)
class ModelSequence:
    """Indexed family of models over one state set, with a limit member."""

    name: str
    members: dict  # int index or math.inf -> MarkovModel
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if math.inf not in self.members:
            raise EqstopError("a sequence needs a limit member (index inf)")
        labels = {m.labels for m in self.members.values()}
        if len(labels) != 1:
            raise EqstopError("all members must share the state set")

    @property
    def labels(self):
        return self.limit.labels

    @property
    def limit(self) -> MarkovModel:
        return self.members[math.inf]

    def grid(self):
        return sorted(k for k in self.members if k != math.inf)

    def member(self, n) -> MarkovModel:
        return self.members[n]


def set_liminf(sets) -> frozenset:
    """Finite-grid surrogate of eventual membership.

    Policy: a state qualifies when it belongs to every set in the last
    half (ceil(L/2)) of the grid, i.e. membership has stabilized.
    """
    sets = [frozenset(s) for s in sets]
    if not sets:
        raise EqstopError("need at least one set")
    tail = sets[len(sets) // 2 :]
    out = tail[0]
    for s in tail[1:]:
        out &= s
    return out


def set_limsup(sets) -> frozenset:
    """Finite-grid surrogate of membership infinitely often.

    Policy: the liminf surrogate united with states that appear at least
    once in the last half of the grid and at least min(2, L) times overall.
    """
    sets = [frozenset(s) for s in sets]
    if not sets:
        raise EqstopError("need at least one set")
    tail = sets[len(sets) // 2 :]
    need = min(2, len(sets))
    recurrent = set()
    for x in frozenset().union(*sets):
        if sum(x in s for s in tail) >= 1 and sum(x in s for s in sets) >= need:
            recurrent.add(x)
    return set_liminf(sets) | recurrent


@dataclass
class StabilityReport:
    sequence: str
    metadata: dict
    x_grid: tuple
    n_grid: tuple
    eps_grid: tuple
    cells: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    set_summary: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "sequence": self.sequence,
            "metadata": self.metadata,
            "x_grid": list(self.x_grid),
            "n_grid": [_n_str(n) for n in self.n_grid],
            "eps_grid": list(self.eps_grid),
            "cells": self.cells,
            "verdicts": self.verdicts,
            "diagnostics": self.diagnostics,
            "set_summary": self.set_summary,
        }

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(CSV_HEADER)
        for cell in self.cells:
            writer.writerow(
                [
                    cell.get("n", ""),
                    cell.get("eps", ""),
                    cell.get("x", ""),
                    cell.get("quantity", ""),
                    cell.get("lo", ""),
                    cell.get("hi", ""),
                    ";".join(cell.get("region", ()) or ()),
                ]
            )
        return buf.getvalue()


def _n_str(n):
    return "inf" if n == math.inf else int(n)


def _interval_cell(n, eps, x, quantity, interval, region=None, note=None):
    cell = {
        "n": _n_str(n),
        "eps": eps,
        "x": x,
        "quantity": quantity,
        "lo": interval.lo if interval is not None else None,
        "hi": interval.hi if interval is not None else None,
        "region": tuple(region) if region is not None else None,
    }
    if note:
        cell["note"] = note
    return cell


def convergence_diagnostics(seq: ModelSequence, subset=None):
    """Per-n sup-norm reward gaps and kernel TV gaps against the limit.

    TV numbers are on the L1 scale (disjoint rows are at distance 2);
    halved values are included for the [0,1]-test-function convention.
    """
    limit = seq.limit
    sub_idx = sorted(limit.region(subset)) if subset else None
    rows = []
    for n in seq.grid():
        m = seq.member(n)
        f_gap = float(np.abs(m.reward - limit.reward).max())
        tv_global = kernel_tv_gap(m.kernel, limit.kernel)
        row = {
            "n": _n_str(n),
            "f_gap_global": f_gap,
            "tv_gap_global": tv_global,
            "tv_gap_global_halved": tv_global / 2.0,
        }
        if sub_idx is not None:
            row["f_gap_subset"] = float(
                np.abs(m.reward[sub_idx] - limit.reward[sub_idx]).max()
            )
            tv_sub = kernel_tv_gap(m.kernel, limit.kernel, states=sub_idx)
            row["tv_gap_subset"] = tv_sub
            row["tv_gap_subset_halved"] = tv_sub / 2.0
        rows.append(row)
    return rows


def _classify_convergence(rows, key):
    gaps = [r[key] for r in rows if key in r]
    if not gaps:
        return "no-data"
    if max(gaps) == 0.0:
        return "constant"
    nonincreasing = all(b <= a + 1e-15 for a, b in zip(gaps, gaps[1:]))
    vanishing = gaps[-1] <= 0.5 * max(gaps[0], 1e-300) or gaps[-1] == 0.0
    if nonincreasing and vanishing:
        return "vanishing-evidence"
    if nonincreasing:
        return "nonincreasing"
    return "no-trend"


def _relaxed_at(model, x_labels, eps_val):
    """Relaxed values per state: enumeration when feasible, else cascade."""
    out = {}
    try:
        sweep = RegionSweep(model)
    except EnumerationTooLarge:
        sweep = None
    if sweep is not None:
        rel = relaxed_values_from_sweep(sweep, eps_val)
        for x in x_labels:
            out[x] = {
                "V": (rel.v_eps[x], rel.v_argmax[x], "enumeration"),
                "W": (rel.w_eps[x], rel.w_argmax[x], "enumeration"),
            }
        return out
    for x in x_labels:
        entry = {}
        for quantity, variant in (("V", EXACT), ("W", PSEUDO)):
            interval, info = relaxed_value_cascade(model, x, eps_val, variant)
            region = (
                model.region(info["witness"]) if info["witness"] is not None else None
            )
            entry[quantity] = (interval, region, info["method"])
        out[x] = entry
    return out


def run_sequence_experiment(
    seq: ModelSequence, x_grid, n_grid=None, eps_grid=(), subset=None
) -> StabilityReport:
    """Solve every member, fill the (n, eps, x) table, and emit verdicts.

    Verdicts cover: (i) the limit's smallest equilibrium sits inside the
    grid liminf of the per-n ones; (ii) the limit value dominates the
    n-tail of per-n values; (iii) per eps, the n-tail of the relaxed
    values against the limit value; (iv) which convergence mode the TV
    table evidences. Cell-level failures are recorded and skipped.
    """
    n_grid = tuple(n_grid) if n_grid is not None else tuple(seq.grid())
    eps_grid = tuple(eps_grid)
    x_grid = tuple(x_grid)
    tol = seq.limit.policy.tol
    report = StabilityReport(
        sequence=seq.name,
        metadata=dict(seq.metadata),
        x_grid=x_grid,
        n_grid=n_grid + (math.inf,),
        eps_grid=eps_grid,
    )

    regions = {}
    values = {}
    for n in n_grid + (math.inf,):
        model = seq.member(n)
        try:
            region, _ = smallest_equilibrium(model)
            regions[n] = region
            vals = j_values(model, region)
            values[n] = vals
            report.cells.append(
                _interval_cell(
                    n, None, None, "S_star", None, model.region_labels(region)
                )
            )
            for x in x_grid:
                report.cells.append(
                    _interval_cell(
                        n, None, x, "V", vals[x], model.region_labels(region)
                    )
                )
        except EqstopError as err:
            report.cells.append(
                {
                    "n": _n_str(n),
                    "eps": None,
                    "x": None,
                    "quantity": "S_star",
                    "lo": None,
                    "hi": None,
                    "region": None,
                    "note": f"failed: {err}",
                }
            )

    relaxed = {}
    for eps_val in eps_grid:
        for n in n_grid:
            model = seq.member(n)
            try:
                cells = _relaxed_at(model, x_grid, eps_val)
            except EqstopError as err:
                report.cells.append(
                    {
                        "n": _n_str(n),
                        "eps": eps_val,
                        "x": None,
                        "quantity": "V_eps",
                        "lo": None,
                        "hi": None,
                        "region": None,
                        "note": f"failed: {err}",
                    }
                )
                continue
            for x, entry in cells.items():
                for quantity in ("V", "W"):
                    interval, region, method = entry[quantity]
                    relaxed[(eps_val, n, x, quantity)] = interval
                    report.cells.append(
                        _interval_cell(
                            n,
                            eps_val,
                            x,
                            f"{quantity}_eps",
                            interval,
                            seq.limit.region_labels(region)
                            if region is not None
                            else None,
                            note=method
                            if interval is not None
                            else f"{method}: not certified",
                        )
                    )

    # verdict (i): set semicontinuity on the grid
    if math.inf in regions and all(n in regions for n in n_grid):
        per_n = [regions[n] for n in n_grid]
        liminf = set_liminf(per_n)
        limsup = set_limsup(per_n)
        limit_model = seq.limit
        report.set_summary = {
            "per_n": {
                _n_str(n): list(seq.member(n).region_labels(regions[n]))
                for n in n_grid
            },
            "liminf": list(limit_model.region_labels(liminf)),
            "limsup": list(limit_model.region_labels(limsup)),
            "limit": list(limit_model.region_labels(regions[math.inf])),
        }
        report.verdicts.append(
            {
                "name": "limit-region-within-grid-liminf",
                "holds": bool(regions[math.inf] <= liminf),
                "detail": report.set_summary,
            }
        )

    # verdict (ii): the limit value dominates the n-tail values
    tail = n_grid[len(n_grid) // 2 :]
    for x in x_grid:
        if math.inf not in values or any(n not in values for n in tail):
            continue
        tail_best = max(values[n][x].hi for n in tail)
        lim = values[math.inf][x]
        report.verdicts.append(
            {
                "name": "limit-value-dominates-tail",
                "x": x,
                "holds": bool(lim.lo >= tail_best - tol),
                "strict": bool(lim.lo > tail_best + tol),
                "limit_lo": lim.lo,
                "tail_max_hi": tail_best,
            }
        )

    # verdict (iii): relaxed tail values against the limit value, eps by eps
    for x in x_grid:
        if math.inf not in values:
            continue
        lim_mid = values[math.inf][x].midpoint
        trend = []
        for eps_val in sorted(eps_grid, reverse=True):
            for quantity in ("V", "W"):
                iv = relaxed.get((eps_val, n_grid[-1], x, quantity))
                if iv is not None:
                    trend.append(
                        {
                            "eps": eps_val,
                            "quantity": f"{quantity}_eps",
                            "tail_value": iv.midpoint,
                            "gap_to_limit": iv.midpoint - lim_mid,
                        }
                    )
        if trend:
            report.verdicts.append(
                {
                    "name": "relaxed-tail-vs-limit",
                    "x": x,
                    "limit_value": lim_mid,
                    "trend": trend,
                }
            )

    # verdict (iv): convergence-mode evidence from the TV/f tables
    report.diagnostics = convergence_diagnostics(seq, subset=subset)
    report.verdicts.append(
        {
            "name": "convergence-evidence",
            "reward_global": _classify_convergence(report.diagnostics, "f_gap_global"),
            "kernel_global": _classify_convergence(
                report.diagnostics, "tv_gap_global"
            ),
            "reward_subset": _classify_convergence(report.diagnostics, "f_gap_subset"),
            "kernel_subset": _classify_convergence(
                report.diagnostics, "tv_gap_subset"
            ),
        }
    )
    return report
