"""Command-line interface.

Exit codes: 0 success, 1 input/validation error, 2 indeterminate
numerics, 3 a checked condition fails.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .equilibrium import (
    EXACT,
    PSEUDO,
    EquilibriumKind,
    check_region,
    enumerate_regions,
    relaxed_values_from_sweep,
    RegionSweep,
    smallest_equilibrium,
)
from .errors import (
    EqstopError,
    IndeterminateCatalog,
    IndeterminateMembership,
    ModelValidationError,
)
from .modelfile import load_model, load_sequence
from .repro import EXAMPLE_IDS, build_example, run_scenario_checks
from .stability import run_sequence_experiment
from .value import j_values

OK, INPUT_ERROR, INDETERMINATE_EXIT, FAILS_EXIT = 0, 1, 2, 3


def _interval_dict(iv):
    if iv is None:
        return None
    return {"lo": iv.lo, "hi": iv.hi, "horizon": iv.horizon_used}


def _print_json(payload):
    print(json.dumps(payload, indent=2, sort_keys=True))


def _load(path):
    return load_model(path).to_model()


def _parse_states(arg, model):
    if arg is None or arg == "all":
        return list(model.labels)
    return [s.strip() for s in arg.split(",") if s.strip()]


def _parse_eps_list(arg):
    return [float(e) for e in arg.split(",") if e.strip()]


def _kind_from_args(args) -> EquilibriumKind:
    variant = EXACT if args.kind == "exact" else PSEUDO
    return EquilibriumKind(variant, args.eps)


def cmd_solve(args):
    model = _load(args.model)
    try:
        region, trace = smallest_equilibrium(model)
    except IndeterminateMembership as err:
        _print_json(
            {
                "schema": 1,
                "status": "indeterminate",
                "state": err.state_label,
                "interval": {"lo": err.interval.lo, "hi": err.interval.hi},
            }
        )
        return INDETERMINATE_EXIT
    values = j_values(model, region)
    wanted = _parse_states(args.x, model)
    for x in wanted:
        model.index(x)  # validate labels before printing
    _print_json(
        {
            "schema": 1,
            "smallest_equilibrium": list(model.region_labels(region)),
            "iteration": [
                {
                    "barrier": list(r.barrier),
                    "added": list(r.added),
                    "deviation_bounds": {
                        k: {"lo": v[0], "hi": v[1]} for k, v in sorted(r.bounds.items())
                    },
                }
                for r in trace.rounds
            ],
            "values": {x: _interval_dict(values[x]) for x in wanted},
        }
    )
    return OK


def cmd_check(args):
    model = _load(args.model)
    region = model.region([s.strip() for s in args.region.split(",") if s.strip()])
    verdict = check_region(model, region, _kind_from_args(args))
    _print_json(
        {
            "schema": 1,
            "region": list(model.region_labels(region)),
            "kind": args.kind,
            "eps": args.eps,
            "status": verdict.status,
            "witnesses": [
                {
                    "state": w.state,
                    "side": w.side,
                    "margin": {"lo": w.margin.lo, "hi": w.margin.hi},
                }
                for w in verdict.witnesses
            ],
        }
    )
    if verdict.status == "holds":
        return OK
    if verdict.status == "fails":
        return FAILS_EXIT
    return INDETERMINATE_EXIT


def cmd_enumerate(args):
    model = _load(args.model)
    catalog = enumerate_regions(model, _kind_from_args(args))
    _print_json(
        {
            "schema": 1,
            "kind": args.kind,
            "eps": args.eps,
            "regions": [list(model.region_labels(r)) for r in catalog.regions],
            "indeterminate": [
                list(model.region_labels(r)) for r in catalog.indeterminate
            ],
        }
    )
    return INDETERMINATE_EXIT if catalog.indeterminate else OK


def cmd_relaxed(args):
    model = _load(args.model)
    sweep = RegionSweep(model)
    payload = {"schema": 1, "eps": []}
    status = OK
    for eps in _parse_eps_list(args.eps):
        rel = relaxed_values_from_sweep(sweep, eps)
        payload["eps"].append(
            {
                "eps": eps,
                "V": {x: _interval_dict(v) for x, v in rel.v_eps.items()},
                "W": {x: _interval_dict(v) for x, v in rel.w_eps.items()},
                "V_argmax": {
                    x: list(model.region_labels(r)) if r is not None else None
                    for x, r in rel.v_argmax.items()
                },
                "W_argmax": {
                    x: list(model.region_labels(r)) if r is not None else None
                    for x, r in rel.w_argmax.items()
                },
                "undecided_regions": rel.v_undecided + rel.w_undecided,
            }
        )
        if rel.v_undecided or rel.w_undecided:
            status = INDETERMINATE_EXIT
    _print_json(payload)
    return status


def _load_sequence_arg(arg):
    if arg in EXAMPLE_IDS:
        return build_example(arg)
    return load_sequence(arg)


def cmd_stability(args):
    seq = _load_sequence_arg(args.sequence)
    n_grid = None
    if args.n:
        n_grid = [math.inf if s == "inf" else int(s) for s in args.n.split(",")]
        missing = [n for n in n_grid if n not in seq.members]
        if missing:
            raise ModelValidationError(
                f"sequence has no members for n={missing}; available: "
                f"{sorted(k for k in seq.members if k != math.inf)}"
            )
        n_grid = [n for n in n_grid if n != math.inf]
    eps_grid = _parse_eps_list(args.eps) if args.eps else []
    x_grid = _parse_states(args.x, seq.limit)
    subset = (
        [s.strip() for s in args.subset.split(",") if s.strip()]
        if args.subset
        else None
    )
    report = run_sequence_experiment(
        seq, x_grid, n_grid=n_grid, eps_grid=eps_grid, subset=subset
    )
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    return OK


def cmd_repro(args):
    overrides = {}
    if args.n:
        overrides["n_grid"] = tuple(int(s) for s in args.n.split(","))
    if args.trunc is not None:
        overrides["N"] = args.trunc
    if args.beta is not None:
        overrides["beta"] = args.beta
    if args.eps is not None:
        overrides["eps"] = args.eps
    if args.example == "ex-4.10" and "eps" in overrides:
        pass
    elif "eps" in overrides and args.example != "ex-4.10":
        del overrides["eps"]
    seq = build_example(args.example, **overrides)
    checks = run_scenario_checks(seq)
    for c in checks:
        flag = "PASS" if c.passed else "FAIL"
        print(f"{flag} {seq.name} {c.name}: computed={c.computed!r} expected={c.expected!r}")
    payload = {
        "schema": 1,
        "example": seq.name,
        "metadata": seq.metadata,
        "checks": [
            {
                "name": c.name,
                "status": "pass" if c.passed else "fail",
                "computed": repr(c.computed),
                "expected": repr(c.expected),
            }
            for c in checks
        ],
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return OK if all(c.passed for c in checks) else FAILS_EXIT


def build_parser():
    parser = argparse.ArgumentParser(
        prog="eqstop",
        description=(
            "Equilibrium solver for time-inconsistent stopping on finite "
            "Markov chains"
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="smallest equilibrium and its values")
    p.add_argument("model")
    p.add_argument("--x", default="all", help="comma-separated labels or 'all'")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="test one region against the conditions")
    p.add_argument("model")
    p.add_argument("--region", required=True)
    p.add_argument("--kind", choices=["exact", "pseudo"], default="exact")
    p.add_argument("--eps", type=float, default=0.0)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("enumerate", help="classify every subset of states")
    p.add_argument("model")
    p.add_argument("--kind", choices=["exact", "pseudo"], default="exact")
    p.add_argument("--eps", type=float, default=0.0)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("relaxed", help="relaxed optimal values over an eps list")
    p.add_argument("model")
    p.add_argument("--eps", required=True)
    p.set_defaults(func=cmd_relaxed)

    p = sub.add_parser("stability", help="run a sequence experiment")
    p.add_argument("sequence", help="built-in id (ex-3.3, ...) or sequence file")
    p.add_argument("--n", help="comma-separated finite indices")
    p.add_argument("--eps", help="comma-separated eps grid")
    p.add_argument("--x", default="all")
    p.add_argument("--subset", help="states for the local diagnostics")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--csv", help="write the flat CSV table here")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("repro", help="rebuild a scenario and grade its checks")
    p.add_argument("example", choices=list(EXAMPLE_IDS))
    p.add_argument("--n", help="override the finite index grid")
    p.add_argument("--trunc", type=int, help="override the truncation depth")
    p.add_argument("--beta", type=float, help="override the discount parameter")
    p.add_argument("--eps", type=float, help="override the relaxed-value eps")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelValidationError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return INPUT_ERROR
    except IndeterminateMembership as err:
        print(f"indeterminate: {err}", file=sys.stderr)
        return INDETERMINATE_EXIT
    except IndeterminateCatalog as err:
        print(f"indeterminate: {err}", file=sys.stderr)
        return INDETERMINATE_EXIT
    except EqstopError as err:
        print(f"error: {err}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
