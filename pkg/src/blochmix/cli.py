"""Command-line interface: problem files, fixtures, sweeps, reports.

Problems are single JSON documents:

    {"target": {"a": 0.5, "k": 0.2, "phi": "1.3580pi"},   # or {"bloch": [x, y, z]}
     "states": [{"bloch": [0, 0, 1], "label": "up"}, ...],
     "options": {"oracle_check": true, "tolerances": {...}}}

Phases accept plain radians or a "pi" suffix multiplier.  Sweep output is
CSV with the fixed header ``param,D_analytic,D_oracle,support,branch`` (or
the JSON equivalent); floats print with 17 significant digits so rows
round-trip losslessly.

Exit codes: 0 success, 2 parse/validation error, 3 solver contract error,
4 oracle non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .bloch import (
    ContractError,
    StateSet,
    TargetParams,
    ValidationError,
    as_bloch,
    bloch_from_params,
)
from .caratheodory import Decomposition, reduce as reduce_support
from .fixtures import fixture, fixture_names
from .oracle import OracleConfig, OracleError, oracle_solve
from .solver import ApproximationResult, decomposition_matrix, matrix_rank, solve

CSV_HEADER = "param,D_analytic,D_oracle,support,branch"

_PARAM_RANGES = {"a": (0.0, 1.0), "k": (0.0, 1.0), "phi": None}


def parse_phi_value(value) -> float:
    """Parse a phase given in radians or with a 'pi' multiplier suffix."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        text = value.strip().lower()
        mult = 1.0
        if text.endswith("pi"):
            text = text[:-2].strip() or "1"
            mult = np.pi
        try:
            return float(text) * mult
        except ValueError:
            pass
    raise ValidationError(f"cannot parse phase value {value!r}")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass
class Problem:
    target: np.ndarray
    params: TargetParams | None
    states: StateSet
    options: dict = field(default_factory=dict)


def _parse_target(spec) -> tuple[np.ndarray, TargetParams | None]:
    if not isinstance(spec, dict):
        raise ValidationError("'target' must be an object")
    if "bloch" in spec:
        return as_bloch(spec["bloch"]), None
    if {"a", "k", "phi"} <= spec.keys():
        params = TargetParams(float(spec["a"]), float(spec["k"]),
                              parse_phi_value(spec["phi"]))
        return bloch_from_params(params), params
    raise ValidationError("'target' needs either 'bloch' or all of 'a', 'k', 'phi'")


def parse_problem(text: str, allow_invalid: bool = False) -> Problem:
    """Parse and validate a JSON problem document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(
            f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(doc, dict):
        raise ValidationError("problem document must be a JSON object")
    if "target" not in doc or "states" not in doc:
        raise ValidationError("problem document needs 'target' and 'states'")
    target, params = _parse_target(doc["target"])

    raw_states = doc["states"]
    if not isinstance(raw_states, list) or not raw_states:
        raise ValidationError("'states' must be a non-empty list")
    rows, labels = [], []
    for i, entry in enumerate(raw_states):
        if not isinstance(entry, dict) or "bloch" not in entry:
            raise ValidationError(f"states[{i}] must be an object with a 'bloch' field")
        label = str(entry.get("label", f"r{i + 1}"))
        try:
            r = np.asarray(entry["bloch"], dtype=float)
        except (TypeError, ValueError) as e:
            raise ValidationError(f"states[{i}] ({label}): {e}") from e
        if r.shape != (3,) or not np.all(np.isfinite(r)):
            raise ValidationError(f"states[{i}] ({label}): 'bloch' must be 3 finite reals")
        n = float(np.linalg.norm(r))
        if n * n > 1.0 + 1e-9:
            if not allow_invalid:
                raise ValidationError(
                    f"states[{i}] ({label}) has Bloch norm {n:.4f} > 1"
                )
            print(f"warning: renormalizing states[{i}] ({label}), norm {n:.4f} > 1",
                  file=sys.stderr)
            r = r / n
        rows.append(r)
        labels.append(label)

    options = doc.get("options", {})
    if not isinstance(options, dict):
        raise ValidationError("'options' must be an object")
    return Problem(target, params, StateSet(rows, labels=labels), options)


def emit_problem(problem: Problem) -> str:
    """Serialize a problem back to JSON (semantically lossless round trip)."""
    if problem.params is not None:
        target = {"a": problem.params.a, "k": problem.params.k, "phi": problem.params.phi}
    else:
        target = {"bloch": list(problem.target)}
    states = []
    for i, r in enumerate(problem.states):
        entry = {"bloch": list(r)}
        if problem.states.labels is not None:
            entry["label"] = problem.states.labels[i]
        states.append(entry)
    return json.dumps({"target": target, "states": states, "options": problem.options},
                      indent=2)


def _oracle_config(options: dict) -> OracleConfig:
    tol = options.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ValidationError("'options.tolerances' must be an object")
    kwargs = {}
    if "oracle_tol" in tol:
        kwargs["convergence_tol"] = float(tol["oracle_tol"])
    if "oracle_max_iterations" in tol:
        kwargs["max_iterations"] = int(tol["oracle_max_iterations"])
    if "grid_resolution" in tol:
        kwargs["grid_resolution"] = int(tol["grid_resolution"])
    try:
        return OracleConfig(**kwargs)
    except ValueError as e:
        raise ValidationError(str(e)) from e


def _support_str(support) -> str:
    return "+".join(str(i) for i in support) if support else "-"


def _result_payload(res: ApproximationResult, oracle_res=None) -> dict:
    diag = res.diagnostics
    payload = {
        "distance": res.distance,
        "weights": list(res.weights),
        "support": list(res.support),
        "branch": res.branch.value,
        "pseudo_probabilities": (
            None if res.pseudo_probabilities is None else list(res.pseudo_probabilities)
        ),
        "diagnostics": {
            "lambda": diag.lam,
            "lambda_i": list(diag.lam_i),
            "stationarity_residual": diag.stationarity_residual,
            "complementarity_residual": diag.complementarity_residual,
            "degenerate_optimum": diag.degenerate_optimum,
        },
        "oracle_distance": None,
        "oracle_gap": None,
    }
    if oracle_res is not None:
        payload["oracle_distance"] = oracle_res.distance
        payload["oracle_gap"] = abs(res.distance - oracle_res.distance)
    return payload


# --- sweeps ------------------------------------------------------------------


@dataclass
class SweepSpec:
    states: StateSet
    param: str
    start: float
    stop: float
    step: float
    fixed: dict
    oracle: bool = False

    def __post_init__(self):
        if self.param not in _PARAM_RANGES:
            raise ValidationError(f"sweep parameter must be a, k, or phi, not {self.param!r}")
        if not (np.isfinite(self.step) and self.step > 0.0):
            raise ValidationError(f"sweep step must be positive, got {self.step!r}")
        if self.stop < self.start:
            raise ValidationError("sweep stop must be >= start")
        bounds = _PARAM_RANGES[self.param]
        if bounds is not None:
            lo, hi = bounds
            if self.start < lo - 1e-12 or self.stop > hi + 1e-12:
                raise ValidationError(
                    f"sweep range [{self.start}, {self.stop}] leaves the {self.param} domain"
                )
        missing = {"a", "k", "phi"} - {self.param} - set(self.fixed)
        if missing:
            raise ValidationError(
                f"missing fixed value(s) for {', '.join(sorted(missing))}"
            )


def sweep_grid(start: float, stop: float, step: float) -> np.ndarray:
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def run_sweep(spec: SweepSpec, cfg: OracleConfig | None = None) -> list[dict]:
    """One row per grid point: param value, distances, support, branch."""
    cfg = cfg or OracleConfig()
    rows = []
    for value in sweep_grid(spec.start, spec.stop, spec.step):
        kwargs = dict(spec.fixed)
        kwargs[spec.param] = float(value)
        try:
            target = bloch_from_params(TargetParams(**kwargs))
            res = solve(target, spec.states)
            d_oracle = oracle_solve(target, spec.states, cfg).distance if spec.oracle else None
        except OracleError as e:
            raise OracleError(f"at {spec.param}={value:.6g}: {e}") from e
        except ContractError as e:
            raise ContractError(f"at {spec.param}={value:.6g}: {e}") from e
        rows.append({
            "param": float(value),
            "D_analytic": res.distance,
            "D_oracle": d_oracle,
            "support": res.support,
            "branch": res.branch.value,
        })
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        oracle = "" if row["D_oracle"] is None else _fmt(row["D_oracle"])
        lines.append(",".join([
            _fmt(row["param"]),
            _fmt(row["D_analytic"]),
            oracle,
            _support_str(row["support"]),
            row["branch"],
        ]))
    return "\n".join(lines) + "\n"


def rows_to_json(rows: list[dict]) -> str:
    payload = [dict(row, support=list(row["support"])) for row in rows]
    return json.dumps(payload, indent=2)


# --- commands ----------------------------------------------------------------


def _read_problem(args) -> Problem:
    with open(args.problem, "r", encoding="utf-8") as fh:
        return parse_problem(fh.read(), allow_invalid=args.allow_invalid_states)


def _write_out(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_approximate(args) -> int:
    problem = _read_problem(args)
    res = solve(problem.target, problem.states)
    oracle_res = None
    if args.oracle or problem.options.get("oracle_check"):
        oracle_res = oracle_solve(problem.target, problem.states,
                                  _oracle_config(problem.options))
    payload = _result_payload(res, oracle_res)
    if args.format == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        oracle = "" if payload["oracle_distance"] is None else _fmt(payload["oracle_distance"])
        text = ("D_analytic,D_oracle,support,branch\n"
                + ",".join([_fmt(res.distance), oracle,
                            _support_str(res.support), res.branch.value]) + "\n")
    _write_out(text, args.out)
    return 0


def _cmd_sweep(args) -> int:
    if args.fixture:
        states = fixture(args.fixture, allow_invalid=args.allow_invalid_states)
        options = {}
        params = None
    else:
        problem = _read_problem(args)
        states = problem.states
        options = problem.options
        params = problem.params
    fixed = {}
    if params is not None:
        fixed = {"a": params.a, "k": params.k, "phi": params.phi}
    for name in ("a", "k", "phi"):
        value = getattr(args, name)
        if value is not None:
            fixed[name] = parse_phi_value(value) if name == "phi" else float(value)
    fixed.pop(args.param, None)

    parts = args.range.split(":")
    if len(parts) != 3:
        raise ValidationError("--range must look like start:stop:step")
    start, stop, step = (parse_phi_value(p) for p in parts)
    spec = SweepSpec(states, args.param, start, stop, step, fixed,
                     oracle=args.oracle or bool(options.get("oracle_check")))
    rows = run_sweep(spec, _oracle_config(options))
    text = rows_to_json(rows) + "\n" if args.format == "json" else rows_to_csv(rows)
    _write_out(text, args.out)
    return 0


def _cmd_reduce(args) -> int:
    problem = _read_problem(args)
    try:
        weights = np.array([float(w) for w in args.weights.split(",")])
    except ValueError as e:
        raise ValidationError(f"cannot parse --weights: {e}") from e
    decomp = Decomposition.from_weights(problem.states, weights)
    reduced = reduce_support(decomp)
    residual = float(np.linalg.norm(reduced.mixed_bloch - decomp.mixed_bloch))
    rank = matrix_rank(decomposition_matrix(problem.states))
    payload = {
        "n_states": len(problem.states),
        "rank": rank,
        "no_reduction": list(reduced.support) == list(decomp.support),
        "original": {"support": list(decomp.support), "weights": list(decomp.weights)},
        "reduced": {"support": list(reduced.support), "weights": list(reduced.weights)},
        "mixture_residual": residual,
    }
    _write_out(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _cmd_rank(args) -> int:
    problem = _read_problem(args)
    payload = {
        "n_states": len(problem.states),
        "rank": matrix_rank(decomposition_matrix(problem.states)),
    }
    _write_out(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blochmix",
        description="Closest convex mixture of a qubit state set to a target state.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_problem=True):
        if needs_problem:
            p.add_argument("--problem", required=True, help="JSON problem file")
        p.add_argument("--allow-invalid-states", action="store_true",
                       help="renormalize states with Bloch norm > 1 instead of failing")
        p.add_argument("--out", help="write output to this file instead of stdout")

    p = sub.add_parser("approximate", help="solve a single problem")
    common(p)
    p.add_argument("--oracle", action="store_true",
                   help="also run the numerical oracle and report its distance")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_approximate)

    p = sub.add_parser("sweep", help="sweep one target parameter over a range")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--fixture", choices=fixture_names(), help="built-in state set")
    group.add_argument("--problem", help="JSON problem file")
    p.add_argument("--allow-invalid-states", action="store_true",
                   help="renormalize states with Bloch norm > 1 instead of failing")
    p.add_argument("--out", help="write output to this file instead of stdout")
    p.add_argument("--param", required=True, choices=("a", "k", "phi"))
    p.add_argument("--range", required=True,
                   help="start:stop:step (each part may carry a 'pi' suffix)")
    p.add_argument("--a", help="fixed a value")
    p.add_argument("--k", help="fixed k value")
    p.add_argument("--phi", help="fixed phi value (radians or 'pi' suffix)")
    p.add_argument("--oracle", action="store_true",
                   help="fill the D_oracle column at every grid point")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("reduce", help="reduce a decomposition's support")
    common(p)
    p.add_argument("--weights", required=True,
                   help="comma-separated mixture weights, one per state")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("rank", help="rank of the decomposition matrix")
    common(p)
    p.set_defaults(func=_cmd_rank)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ContractError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except OracleError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
