"""Command-line interface.

Four subcommands: ``uniform`` (closed-form variance tables for the
equicorrelated model), ``analyze`` (group-effect table for a CSV dataset),
``simulate`` (the Monte Carlo cases), and ``clr`` (constrained local
regression). Output is CSV or JSON with floats rendered to 8 significant
digits; all randomness flows from ``--seed`` (default 0), so identical
invocations produce byte-identical output.

Exit status: 0 on success, 1 on data/runtime errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import clr as clr_mod
from . import sim as sim_mod
from .effects import WeightVector, apc_arrangement, estimate_effect, variability_weights
from .exceptions import DimensionMismatchError, GroupFxError, UsageError
from .linmod import Dataset, correlation, fit_ols, load_csv
from .uniform import TABLE1_R_VALUES, table1

SCHEMA_VERSION = 1


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.8g}"
    return str(x)


def _round8(obj):
    """Recursively round floats to 8 significant digits for stable output."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, float):
        return float(f"{obj:.8g}")
    if isinstance(obj, (np.floating,)):
        return float(f"{float(obj):.8g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_round8(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {k: _round8(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round8(v) for v in obj]
    return obj


def _csv_lines(header, rows) -> list[str]:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue().splitlines()


@dataclass
class RunConfig:
    """Validated invocation: one subcommand plus its settings."""

    subcommand: str
    input_path: str | None = None
    response: str | None = None
    groups: list[list[int]] = field(default_factory=list)
    anchor: int | None = None
    seed: int = 0
    format: str = "csv"
    out: str | None = None
    options: dict = field(default_factory=dict)


_DEFAULTS = {
    "uniform": {"p": 8, "r": None, "r_list": None, "sigma2": 1.0, "format": "csv"},
    "analyze": {"csv": None, "response": None, "group": [], "anchor": None,
                "format": "csv"},
    "simulate": {"case": None, "paper_suite": False, "w1": None, "w2": None,
                 "replicates": 1000, "n": 15, "seed": 0, "format": "csv"},
    "clr": {"csv": None, "response": None, "group": [], "anchor": None,
            "c_offset": 3.0, "select": "min-rss", "folds": 5, "seed": 0,
            "format": "json"},
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupfx",
        description="Estimable group effects for strongly correlated predictors.",
    )
    sub = parser.add_subparsers(dest="subcommand")

    def common(sp):
        sp.add_argument("--config", help="JSON config file; explicit flags win")
        sp.add_argument("--format", choices=("csv", "json"), default=None)
        sp.add_argument("--out", help="output path (default: stdout)")

    sp = sub.add_parser("uniform", help="closed-form uniform-model variances")
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--r", type=float, default=None)
    sp.add_argument("--r-list", dest="r_list", default=None,
                    help="comma-separated correlation levels")
    sp.add_argument("--sigma2", type=float, default=None)
    common(sp)

    sp = sub.add_parser("analyze", help="group-effect table for a CSV dataset")
    sp.add_argument("--csv", dest="csv", default=None)
    sp.add_argument("--response", default=None)
    sp.add_argument("--group", action="append", default=None,
                    help="comma-separated predictor names or 1-based positions; repeatable")
    sp.add_argument("--anchor", default=None,
                    help="anchor variable (name or 1-based position)")
    common(sp)

    sp = sub.add_parser("simulate", help="Monte Carlo simulation cases")
    sp.add_argument("--case", type=int, default=None, choices=(1, 2, 3, 4, 5))
    sp.add_argument("--paper-suite", dest="paper_suite", action="store_true",
                    default=None, help="run all five cases plus invariant checks")
    sp.add_argument("--w1", type=float, default=None)
    sp.add_argument("--w2", type=float, default=None)
    sp.add_argument("--replicates", type=int, default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    common(sp)

    sp = sub.add_parser("clr", help="constrained local regression")
    sp.add_argument("--csv", dest="csv", default=None)
    sp.add_argument("--response", default=None)
    sp.add_argument("--group", action="append", default=None)
    sp.add_argument("--anchor", default=None)
    sp.add_argument("--c-offset", dest="c_offset", default=None,
                    help="squared-radius offset; a comma-separated list "
                         "triggers a grid search")
    sp.add_argument("--select", choices=("min-rss", "kfold"), default=None)
    sp.add_argument("--folds", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    common(sp)

    return parser


def _merge(ns: argparse.Namespace, subcommand: str) -> dict:
    """Resolve options as: explicit flag > config file > built-in default."""
    cfg = {}
    if getattr(ns, "config", None):
        try:
            with open(ns.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"--config: cannot read {ns.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("--config: file must contain a JSON object")

    merged = {}
    for key, default in _DEFAULTS[subcommand].items():
        flag = getattr(ns, key, None)
        if flag is not None and flag != []:
            merged[key] = flag
        elif key in cfg:
            merged[key] = cfg[key]
        else:
            merged[key] = default
    for key in ("format", "out"):
        flag = getattr(ns, key, None)
        merged[key] = flag if flag is not None else cfg.get(key, merged.get(key))
    if merged.get("format") is None:
        merged["format"] = _DEFAULTS[subcommand].get("format", "csv")
    if merged["format"] not in ("csv", "json"):
        raise UsageError(f"--format: must be csv or json, got {merged['format']!r}")
    return merged


def _parse_r_list(raw) -> list[float]:
    if isinstance(raw, (list, tuple)):
        vals = [float(v) for v in raw]
    else:
        try:
            vals = [float(tok) for tok in str(raw).split(",") if tok.strip() != ""]
        except ValueError as exc:
            raise UsageError(f"--r-list: non-numeric entry in {raw!r}") from exc
    if not vals:
        raise UsageError("--r-list: no values given")
    return vals


def _parse_offsets(raw) -> list[float]:
    if isinstance(raw, (int, float)):
        offsets = [float(raw)]
    elif isinstance(raw, (list, tuple)):
        offsets = [float(o) for o in raw]
    else:
        try:
            offsets = [float(tok) for tok in str(raw).split(",") if tok.strip() != ""]
        except ValueError as exc:
            raise UsageError(f"--c-offset: non-numeric entry in {raw!r}") from exc
    if not offsets:
        raise UsageError("--c-offset: no values given")
    if any(o < 0.0 for o in offsets):
        raise UsageError("--c-offset: must be nonnegative")
    return offsets


def _parse_groups(raw_groups) -> list[list[str]]:
    # Empty groups pass through; they fail downstream as a data error
    # (exit 1) rather than a usage error.
    if isinstance(raw_groups, str):
        raw_groups = [raw_groups]
    groups = []
    for raw in raw_groups:
        if isinstance(raw, (list, tuple)):
            tokens = [str(t) for t in raw]
        else:
            tokens = [t.strip() for t in str(raw).split(",") if t.strip() != ""]
        groups.append(tokens)
    return groups


def parse_args(argv=None) -> RunConfig:
    """Parse and validate the command line into a :class:`RunConfig`.

    Raises :class:`UsageError` (exit status 2) on semantic problems;
    argparse itself exits with status 2 on malformed flags.
    """
    parser = _build_parser()
    ns = parser.parse_args(argv)
    if ns.subcommand is None:
        raise UsageError("a subcommand is required: uniform, analyze, simulate or clr")

    merged = _merge(ns, ns.subcommand)
    config = RunConfig(subcommand=ns.subcommand, format=merged["format"],
                       out=merged.get("out"))

    if ns.subcommand == "uniform":
        if merged["p"] is None or merged["p"] < 2:
            raise UsageError("--p: an integer >= 2 is required")
        if merged["r"] is not None and merged["r_list"] is not None:
            raise UsageError("--r and --r-list are mutually exclusive")
        if merged["r"] is not None:
            r_values = [float(merged["r"])]
        elif merged["r_list"] is not None:
            r_values = _parse_r_list(merged["r_list"])
        else:
            r_values = list(TABLE1_R_VALUES)
        config.options = {"p": int(merged["p"]), "r_values": r_values,
                          "sigma2": float(merged["sigma2"])}

    elif ns.subcommand == "analyze":
        if not merged["csv"]:
            raise UsageError("--csv: an input file is required")
        if not merged["response"]:
            raise UsageError("--response: a response column name is required")
        config.input_path = merged["csv"]
        config.response = merged["response"]
        config.options = {
            "group_tokens": _parse_groups(merged["group"] or []),
            "anchor_token": merged["anchor"],
        }

    elif ns.subcommand == "simulate":
        if merged["case"] is None and not merged["paper_suite"]:
            if merged["w1"] is None or merged["w2"] is None:
                raise UsageError("--case: choose a case 1..5, --paper-suite, "
                                 "or give both --w1 and --w2")
        if merged["paper_suite"] and merged["case"] is not None:
            raise UsageError("--case and --paper-suite are mutually exclusive")
        if merged["replicates"] < 1:
            raise UsageError("--replicates: must be >= 1")
        config.seed = int(merged["seed"])
        config.options = {
            "case": merged["case"],
            "paper_suite": bool(merged["paper_suite"]),
            "w1": merged["w1"],
            "w2": merged["w2"],
            "replicates": int(merged["replicates"]),
            "n": int(merged["n"]),
        }

    elif ns.subcommand == "clr":
        if not merged["csv"]:
            raise UsageError("--csv: an input file is required")
        if not merged["response"]:
            raise UsageError("--response: a response column name is required")
        groups = _parse_groups(merged["group"] or [])
        if len(groups) != 1:
            raise UsageError("--group: exactly one group is required")
        offsets = _parse_offsets(merged["c_offset"])
        config.input_path = merged["csv"]
        config.response = merged["response"]
        config.seed = int(merged["seed"])
        config.options = {
            "group_tokens": groups,
            "anchor_token": merged["anchor"],
            "c_offsets": offsets,
            "select": merged["select"],
            "folds": int(merged["folds"]),
        }

    return config


def _resolve_columns(data: Dataset, tokens, flag: str) -> list[int]:
    """Map predictor names or 1-based positions to X column indices. With
    the explicit intercept at column 0, 1-based predictor k is column k."""
    if not tokens:
        raise DimensionMismatchError(f"{flag}: empty group")
    indices = []
    for tok in tokens:
        if tok in data.names:
            j = data.names.index(tok)
        else:
            try:
                pos = int(tok)
            except ValueError:
                raise UsageError(
                    f"{flag}: {tok!r} is neither a column name nor an index"
                ) from None
            j = pos if data.has_intercept else pos - 1
            if not (0 <= j < data.q) or pos < 1:
                raise UsageError(f"{flag}: predictor index {pos} out of range")
        if j == 0 and data.has_intercept:
            raise UsageError(f"{flag}: the intercept cannot be a group member")
        indices.append(j)
    if len(set(indices)) != len(indices):
        raise UsageError(f"{flag}: indices must be distinct")
    return indices


@dataclass
class UniformResult:
    p: int
    rows: list


@dataclass
class AnalyzeResult:
    rows: list  # (effect, estimate, std_error, t, p)
    diagnostics: dict


@dataclass
class SimulateResult:
    reports: list
    checks: list


@dataclass
class ClrResult:
    solution: object
    names: tuple


def run_uniform(config: RunConfig) -> UniformResult:
    opts = config.options
    rows = table1(opts["p"], opts["r_values"], sigma2=opts["sigma2"])
    return UniformResult(p=opts["p"], rows=rows)


def run_analyze(config: RunConfig) -> AnalyzeResult:
    data = load_csv(config.input_path, config.response)
    fit = fit_ols(data)
    rows = []
    for j in range(data.q):
        est = estimate_effect(fit, [j], WeightVector.basis(1, 0))
        rows.append((data.names[j], est.value, est.std_error, est.t_stat, est.p_value))

    diagnostics = {"n": data.n, "q": data.q, "dof": fit.dof,
                   "sigma2_hat": fit.sigma2_hat, "groups": []}
    anchor_token = config.options.get("anchor_token")
    for tokens in config.options["group_tokens"]:
        idx = _resolve_columns(data, tokens, "--group")
        corr = correlation(data, idx)
        anchor = None
        if anchor_token is not None:
            a_col = _resolve_columns(data, [anchor_token], "--anchor")[0]
            if a_col not in idx:
                raise UsageError("--anchor: anchor must belong to the group")
            anchor = idx.index(a_col)
        signs = apc_arrangement(corr, anchor)
        w_w = variability_weights(corr)
        w_a = WeightVector.average(len(idx))
        member_names = ",".join(data.names[j] for j in idx)
        for label, w in ((f"tau_a({member_names})", w_a), (f"tau_w({member_names})", w_w)):
            est = estimate_effect(fit, idx, w, signs)
            rows.append((label, est.value, est.std_error, est.t_stat, est.p_value))
        diagnostics["groups"].append({
            "members": [data.names[j] for j in idx],
            "anchor": data.names[idx[signs.anchor]],
            "signs": signs.signs.tolist(),
            "apc_condition_met": signs.condition_met,
            "weights": w_w.weights.tolist(),
            "column_sds": corr.column_sds.tolist(),
        })
    return AnalyzeResult(rows=rows, diagnostics=diagnostics)


def run_simulate(config: RunConfig) -> SimulateResult:
    opts = config.options
    if opts["paper_suite"]:
        suite = sim_mod.run_paper_suite(seed=config.seed,
                                        replicates=opts["replicates"], n=opts["n"])
        return SimulateResult(reports=list(suite.reports), checks=list(suite.checks))
    if opts["case"] is not None:
        case_config = sim_mod.paper_case_config(
            opts["case"], seed=config.seed, replicates=opts["replicates"], n=opts["n"]
        )
        if opts["w1"] is not None or opts["w2"] is not None:
            case_config = sim_mod.SimCaseConfig(
                w1=opts["w1"] if opts["w1"] is not None else case_config.w1,
                w2=opts["w2"] if opts["w2"] is not None else case_config.w2,
                n=case_config.n, replicates=case_config.replicates,
                seed=case_config.seed, transforms=case_config.transforms,
                label=case_config.label,
            )
    else:
        case_config = sim_mod.SimCaseConfig(
            w1=opts["w1"], w2=opts["w2"], n=opts["n"],
            replicates=opts["replicates"], seed=config.seed, label="custom",
        )
    return SimulateResult(reports=[sim_mod.run_case(case_config)], checks=[])


def run_clr(config: RunConfig) -> ClrResult:
    data = load_csv(config.input_path, config.response)
    idx = _resolve_columns(data, config.options["group_tokens"][0], "--group")
    anchor_token = config.options.get("anchor_token")
    anchor = None
    if anchor_token is not None:
        a_col = _resolve_columns(data, [anchor_token], "--anchor")[0]
        if a_col not in idx:
            raise UsageError("--anchor: anchor must belong to the group")
        anchor = idx.index(a_col)
    offsets = config.options["c_offsets"]
    if len(offsets) == 1:
        solution = clr_mod.solve_clr(
            data, idx,
            c_offset=offsets[0],
            selection=config.options["select"],
            n_folds=config.options["folds"],
            seed=config.seed,
            anchor=anchor,
        )
    else:
        solution = clr_mod.solve_clr_best_offset(
            data, idx, offsets,
            selection=config.options["select"],
            n_folds=config.options["folds"],
            seed=config.seed,
            anchor=anchor,
        )
    return ClrResult(solution=solution, names=data.names)


def render_report(result, fmt: str) -> bytes:
    """Serialize a subcommand result to CSV or JSON bytes; floats carry 8
    significant digits so repeated runs are byte-identical."""
    if fmt == "csv":
        text = "\n".join(_render_csv(result)) + "\n"
    else:
        text = json.dumps(_round8(_render_json(result)), indent=2) + "\n"
    return text.encode("utf-8")


def _render_csv(result) -> list[str]:
    if isinstance(result, UniformResult):
        return _csv_lines(("r", "var_avg", "var_indiv"), result.rows)
    if isinstance(result, AnalyzeResult):
        return _csv_lines(("effect", "estimate", "std_error", "t", "p"), result.rows)
    if isinstance(result, SimulateResult):
        rows = [
            (rep.label, eff.label, eff.mean, eff.variance)
            for rep in result.reports for eff in rep.effects
        ]
        lines = _csv_lines(("case", "effect", "mean", "variance"), rows)
        if result.checks:
            lines.append("")
            lines.extend(_csv_lines(
                ("check", "passed", "detail"),
                [(c.name, c.passed, c.detail) for c in result.checks],
            ))
        return lines
    if isinstance(result, ClrResult):
        sol = result.solution
        rows = [("tau_hat", "", sol.problem.tau_hat),
                ("min_norm_sq", "", sol.min_norm_sq),
                ("c", "", sol.c)]
        for label, vec in (("beta_star", sol.beta_star),
                           ("candidate_1", sol.candidates[0]),
                           ("candidate_2", sol.candidates[1]),
                           ("chosen", sol.chosen)):
            rows.extend((label, result.names[j], v)
                        for j, v in zip(sol.group, vec))
        rows.extend(("full_beta", name, v)
                    for name, v in zip(result.names, sol.full_beta))
        return _csv_lines(("quantity", "component", "value"), rows)
    raise TypeError(f"cannot render {type(result).__name__}")


def _report_dict(rep) -> dict:
    return {
        "label": rep.label,
        "replicates": rep.replicates,
        "seed": rep.seed,
        "effects": [
            {"effect": e.label, "mean": e.mean, "variance": e.variance,
             "true_value": e.true_value}
            for e in rep.effects
        ],
        "corr_ranges": {k: list(v) for k, v in rep.corr_ranges.items()},
    }


def _render_json(result) -> dict:
    if isinstance(result, UniformResult):
        return {
            "schema_version": SCHEMA_VERSION,
            "p": result.p,
            "table": [
                {"r": r, "var_avg": a, "var_indiv": i} for r, a, i in result.rows
            ],
        }
    if isinstance(result, AnalyzeResult):
        return {
            "schema_version": SCHEMA_VERSION,
            "effects": [
                {"effect": e, "estimate": v, "std_error": s, "t": t, "p": p}
                for e, v, s, t, p in result.rows
            ],
            "diagnostics": result.diagnostics,
        }
    if isinstance(result, SimulateResult):
        return {
            "schema_version": SCHEMA_VERSION,
            "cases": [_report_dict(rep) for rep in result.reports],
            "checks": [
                {"check": c.name, "passed": c.passed, "detail": c.detail}
                for c in result.checks
            ],
        }
    if isinstance(result, ClrResult):
        sol = result.solution
        return {
            "schema_version": SCHEMA_VERSION,
            "group": [result.names[j] for j in sol.group],
            "weights": sol.problem.w.weights.tolist(),
            "signs": sol.signs.signs.tolist(),
            "tau_hat": sol.problem.tau_hat,
            "beta_star": sol.beta_star.tolist(),
            "min_norm_sq": sol.min_norm_sq,
            "c": sol.c,
            "candidates": [c.tolist() for c in sol.candidates],
            "chosen": sol.chosen.tolist(),
            "selection": sol.selection,
            "full_beta": {n: float(b) for n, b in zip(result.names, sol.full_beta)},
            "diagnostics": sol.diagnostics,
        }
    raise TypeError(f"cannot render {type(result).__name__}")


_RUNNERS = {
    "uniform": run_uniform,
    "analyze": run_analyze,
    "simulate": run_simulate,
    "clr": run_clr,
}


def main(argv=None) -> int:
    try:
        config = parse_args(argv)
    except UsageError as exc:
        print(f"groupfx: {exc}", file=sys.stderr)
        return 2

    try:
        result = _RUNNERS[config.subcommand](config)
        payload = render_report(result, config.format)
        if config.out:
            with open(config.out, "wb") as fh:
                fh.write(payload)
        else:
            sys.stdout.buffer.write(payload)
            sys.stdout.buffer.flush()
    except UsageError as exc:
        print(f"groupfx: {exc}", file=sys.stderr)
        return 2
    except GroupFxError as exc:
        err = {"schema_version": SCHEMA_VERSION, "error": type(exc).__name__,
               "message": str(exc)}
        print(json.dumps(err), file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"groupfx: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
