"""Command-line front end.

Subcommands: estimate (counts -> P, R, Q, indexes, parameters), identify
(matrix -> parameters), simulate (parameters -> synthetic counts),
bootstrap (resampling standard errors), premia (income ratios). Every
subcommand is deterministic given its flags and seed; reports embed the
seed and tool version and never a timestamp, so identical invocations
produce identical bytes.

Exit codes: 0 success, 1 computation failure, 2 usage or input/output
problem.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .dataio import (
    DEFAULT_COHORTS,
    aggregate_counts,
    parse_cohorts,
    parse_income_csv,
    parse_micro_csv,
    read_matrix_csv,
    read_report,
    write_micro_counts,
    write_report,
)
from .errors import DataError, MobilityError, NotStochasticError
from .estimation import ESTIMATE_KEYS, bootstrap, decompose, estimate_p, income_premia
from .model import (
    ModelParams,
    Primitives,
    identify_params,
    mobility_indexes,
    thresholds_from_primitives,
    build_true_matrix,
)
from .simulate import SimConfig, params_from_primitives, simulate_cohort

DEFAULT_SEED = 12345
_CLASS_CODES = "WMU"
_INDEX_KEYS = ESTIMATE_KEYS[:5]
_PARAM_KEYS = ESTIMATE_KEYS[5:]


def _meta(command: str, seed=None) -> dict:
    return {"tool": "occmob", "version": __version__, "command": command,
            "seed": seed, "cohorts": []}


def _fmt_matrix(m, decimals: int = 4) -> str:
    m = np.asarray(m)
    width = decimals + 4
    lines = ["   " + "".join(f"{c:>{width}}" for c in _CLASS_CODES)]
    for i in range(3):
        cells = "".join(f"{m[i, j]:>{width}.{decimals}f}" for j in range(3))
        lines.append(f"{_CLASS_CODES[i]}  {cells}")
    return "\n".join(lines)


def _print_dict(d: dict, decimals: int) -> None:
    print("  " + "  ".join(f"{k}={v:.{decimals}f}" for k, v in d.items()))


def _report_rejections(report) -> None:
    if report.n_rejected:
        print(f"note: {report.n_rejected} of {report.n_rows} rows rejected "
              f"in {report.path}", file=sys.stderr)
        for line in report.rejected[:5]:
            print(f"  {line}", file=sys.stderr)


def _load_cohorts(args):
    if getattr(args, "cohorts", None):
        return parse_cohorts(args.cohorts)
    return list(DEFAULT_COHORTS)


def _cohort_subsets(records, specs):
    """Pair each cohort with its records, skipping empty cohorts aloud."""
    out = []
    for spec in specs:
        subset = [rec for rec in records if spec.contains(rec.birth_year)]
        if not subset:
            print(f"note: cohort {spec.label} ({spec.birth_from}-{spec.birth_to}) "
                  f"has no records, skipped", file=sys.stderr)
            continue
        out.append((spec, subset))
    if not out:
        raise DataError("no record falls inside any cohort")
    return out


def _cohort_entry(spec, counts) -> dict:
    dec = decompose(counts)
    params = identify_params(dec.q)
    idx = mobility_indexes(dec.p, dec.q, params)
    entry = {
        "label": spec.label,
        "birth_from": spec.birth_from,
        "birth_to": spec.birth_to,
        "observations": counts.total,
    }
    entry.update(dec.to_document())
    entry["indexes"] = idx.as_dict()
    entry["params"] = params.as_dict()
    entry["diagnostics"]["param_violations"] = params.violations()
    return entry


def cmd_estimate(args) -> int:
    records, report = parse_micro_csv(args.input)
    _report_rejections(report)
    doc = _meta("estimate")
    doc["input"] = {"rows": report.n_rows, "rejected": report.n_rejected}
    for spec, subset in _cohort_subsets(records, _load_cohorts(args)):
        counts = aggregate_counts(subset, spec, use_weights=args.weights)
        entry = _cohort_entry(spec, counts)
        doc["cohorts"].append(entry)
        print(f"cohort {spec.label} ({spec.birth_from}-{spec.birth_to}), "
              f"{entry['observations']:g} observations")
        for name in ("P", "R", "Q"):
            print(f"matrix {name}")
            print(_fmt_matrix(entry["matrices"][name]))
        _print_dict(entry["indexes"], 3)
        _print_dict(entry["params"], 4)
        diag = entry["diagnostics"]
        print(f"  amended={str(diag['amended']).lower()}  "
              f"qr_residual={diag['qr_residual']:.2e}")
        print()
    if args.out:
        write_report(doc, args.out, args.format)
    return 0


def cmd_identify(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        head = fh.read(64).lstrip()
    doc = _meta("identify")
    if head.startswith("{"):
        source = read_report(args.input)
        pairs = [(c["label"], np.array(c["matrices"]["Q"]))
                 for c in source.get("cohorts", [])
                 if "matrices" in c and "Q" in c["matrices"]]
        if not pairs:
            raise DataError(f"{args.input}: document holds no Q matrices")
    else:
        pairs = [("input", read_matrix_csv(args.input))]
    for label, q in pairs:
        params = identify_params(q)
        violations = params.violations()
        doc["cohorts"].append({
            "label": label,
            "matrices": {"Q": np.asarray(q, dtype=float).tolist()},
            "params": params.as_dict(),
            "diagnostics": {"param_violations": violations},
        })
        print(f"cohort {label}")
        _print_dict(params.as_dict(), 4)
        if violations:
            print("  invalid: " + "; ".join(violations))
        else:
            print("  valid: all well-definedness inequalities hold")
    if args.out:
        write_report(doc, args.out, args.format)
    return 0


def _load_sim_params(path):
    """Read a ModelParams or Primitives JSON file.

    Primitives files (detected by a mu_w key) may carry the four support
    bounds alongside the deep parameters; missing supports default to the
    full unit interval.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise DataError(f"{path}: expected a JSON object")
    try:
        if "mu_w" in raw:
            prim_fields = ("mu_w", "mu_m", "mu_u", "sigma2_w", "sigma2_m",
                           "sigma2_u", "c_m_e", "c_u_e", "delta")
            prim = Primitives(**{k: float(raw[k]) for k in prim_fields},
                              kappa=float(raw.get("kappa", 0.0)))
            supports = {k: float(raw[k]) for k in
                        ("theta_max", "theta_min", "theta_m_min", "theta_m_max")
                        if k in raw}
            th = thresholds_from_primitives(prim)
            print(f"thresholds from primitives: lambda_m={th.lambda_m:.4f} "
                  f"lambda_u={th.lambda_u:.4f} lambda_wu={th.lambda_wu:.4f} "
                  f"ordering_valid={str(th.valid).lower()}")
            return params_from_primitives(prim, **supports)
        return ModelParams(**{k: float(raw[k]) for k in
                              ("lambda_m", "lambda_u", "theta_max", "theta_min",
                               "theta_m_min", "theta_m_max")})
    except KeyError as exc:
        raise DataError(f"{path}: missing parameter {exc.args[0]}") from None
    except (TypeError, ValueError) as exc:
        raise DataError(f"{path}: {exc}") from None


def cmd_simulate(args) -> int:
    if args.population < 1:
        print("error: --population must be >= 1", file=sys.stderr)
        return 2
    params = _load_sim_params(args.input)
    try:
        fathers = [float(x) for x in args.fathers.split(",")]
    except ValueError:
        raise DataError(f"--fathers must be three comma-separated numbers, "
                        f"got {args.fathers!r}") from None
    cfg = SimConfig(params, fathers, args.population, args.seed)
    counts = simulate_cohort(cfg)
    print(f"simulated {args.population} agents (seed {args.seed})")
    try:
        q = build_true_matrix(params)
    except MobilityError as exc:
        q = None
        print(f"closed-form matrix unavailable: {exc}")
    counts_arr = np.asarray(counts)
    if np.all(counts_arr.sum(axis=1) > 0):
        p_emp = estimate_p(counts)
        print("empirical P")
        print(_fmt_matrix(p_emp))
        if q is not None:
            print("theoretical Q")
            print(_fmt_matrix(q))
            dev = float(np.max(np.abs(p_emp - q)))
            print(f"max |empirical - theoretical| = {dev:.5f}")
    else:
        print("raw counts (some father classes unpopulated)")
        print(_fmt_matrix(counts_arr, decimals=0))
    if args.out:
        write_micro_counts(counts, args.out, birth_year=args.birth_year)
        print(f"counts written to {args.out}")
    return 0


def cmd_bootstrap(args) -> int:
    records, report = parse_micro_csv(args.input)
    _report_rejections(report)
    doc = _meta("bootstrap", seed=args.seed)
    doc["replications_requested"] = args.replications
    for spec, subset in _cohort_subsets(records, _load_cohorts(args)):
        bs = bootstrap(subset, spec, replications=args.replications,
                       seed=args.seed, use_weights=args.weights)
        entry = {
            "label": spec.label,
            "birth_from": spec.birth_from,
            "birth_to": spec.birth_to,
            "indexes": {k: bs.point[k] for k in _INDEX_KEYS},
            "params": {k: bs.point[k] for k in _PARAM_KEYS},
            "se": dict(bs.se),
            "diagnostics": {
                "bootstrap_replications": bs.replications,
                "bootstrap_failures": bs.failures,
                "flags": list(bs.flags),
            },
        }
        doc["cohorts"].append(entry)
        print(f"cohort {spec.label}: {bs.replications} replications "
              f"({bs.failures} dropped)" +
              (f" flags: {', '.join(bs.flags)}" if bs.flags else ""))
        for k in ESTIMATE_KEYS:
            print(f"  {k:>12} = {bs.point[k]:8.4f}  (se {bs.se[k]:.4f})")
    if args.out:
        write_report(doc, args.out, args.format)
    return 0


def cmd_premia(args) -> int:
    records, report = parse_income_csv(args.input)
    _report_rejections(report)
    doc = _meta("premia")
    for spec, subset in _cohort_subsets(records, _load_cohorts(args)):
        rep = income_premia(subset, spec)
        entry = {"label": spec.label, "birth_from": spec.birth_from,
                 "birth_to": spec.birth_to}
        entry.update(rep.to_document())
        doc["cohorts"].append(entry)
        print(f"cohort {spec.label} ({int(rep.class_counts.sum())} incomes, "
              f"{rep.rejected} rejected, {len(rep.waves)} waves)")
        _print_dict(rep.ratios, 3)
        if rep.flags:
            print("  flags: " + ", ".join(rep.flags))
    if args.out:
        write_report(doc, args.out, args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="occmob",
        description="Occupational mobility decomposition: observed, structural "
                    "and incentive-driven transition matrices with indexes, "
                    "identified parameters, bootstrap errors and premia.",
    )
    parser.add_argument("--version", action="version", version=f"occmob {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, fmt=True):
        p.add_argument("--out", help="write the report to this path")
        if fmt:
            p.add_argument("--format", choices=("document", "delimited"),
                           default="document",
                           help="report format (default: document JSON)")

    def add_cohorts(p):
        p.add_argument("--cohorts",
                       help="cohort file with label,birth_from,birth_to lines "
                            "(default: built-in I 1940-1951, II 1952-1965, III 1966-1977)")

    p = sub.add_parser("estimate", help="decompose observed mobility per cohort")
    p.add_argument("--input", required=True, help="micro CSV: birth_year,father_class,child_class[,weight]")
    add_cohorts(p)
    p.add_argument("--weights", action="store_true",
                   help="use the weight column (default: every record counts 1)")
    add_io(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("identify", help="recover model parameters from a true-mobility matrix")
    p.add_argument("--input", required=True,
                   help="bare 3x3 matrix CSV, or a document report whose Q matrices are identified")
    add_io(p)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("simulate", help="simulate one generation and write ingestible counts")
    p.add_argument("--input", required=True,
                   help="JSON with lambda/theta parameters, or deep primitives (mu_*, sigma2_*, c_*_e, delta, kappa)")
    p.add_argument("--fathers", default="0.333333,0.333333,0.333334",
                   help="father class shares W,M,U (default: equal)")
    p.add_argument("--population", type=int, required=True, help="number of agents")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--birth-year", type=int, default=1950,
                   help="birth year stamped on the written counts (default 1950)")
    p.add_argument("--out", help="write counts as weighted micro CSV to this path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bootstrap", help="bootstrap standard errors per cohort")
    p.add_argument("--input", required=True, help="micro CSV as for estimate")
    add_cohorts(p)
    p.add_argument("--replications", type=int, default=1000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--weights", action="store_true",
                   help="use the weight column in resampling")
    add_io(p)
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("premia", help="income premium ratios per cohort")
    p.add_argument("--input", required=True, help="income CSV: wave_year,birth_year,occ_class,income")
    add_cohorts(p)
    add_io(p)
    p.set_defaults(func=cmd_premia)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DataError, NotStochasticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MobilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
