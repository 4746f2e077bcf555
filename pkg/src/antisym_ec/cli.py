"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a bound is violated (or the
optimizer gap exceeds its tolerance), 2 for usage and input errors.
"""

import argparse
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from ._validation import ValidationError
from .antisym import (
    coefficient_matrix,
    random_amplitude_tensor,
    read_state,
    state_vector,
    write_state,
)
from .bounds import antisym_entropy_check, entropy_purity_bound, purity_bound_check
from .campaigns import (
    BOUNDS,
    FURUTA_TOL,
    MAX_ORACLE_N,
    furuta_grid,
    run_sampling_campaign,
)
from .eof import (
    MAX_COPIES,
    MixedState,
    OptimizerConfig,
    ec_estimate,
    eof_sandwich,
    tensor_mixed,
)
from .reporting import dumps, render
from .spectra import reduced_density, summarize

OUTPUT_DIR_ENV = "ANTISYM_EC_OUTPUT_DIR"


class UsageError(Exception):
    pass


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _timestamp():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def resolve_output(path):
    """Relative output paths land in ``$ANTISYM_EC_OUTPUT_DIR`` when it is set."""
    if path is None or path == "-":
        return None
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _emit(text, out):
    target = resolve_output(out)
    if target is None:
        sys.stdout.write(text)
    else:
        with open(target, "w") as fh:
            fh.write(text)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})")


def _copies_of(dim):
    k, size = 0, 1
    while size < dim:
        size *= 3
        k += 1
    return k if size == dim and k >= 1 else None


def load_mixed_state(path):
    """Read a pure-state file, a density file, or a mixture of state files.

    Density files hold ``{"dim_a", "dim_b", "entries"}`` with row-major
    ``[re, im]`` pairs; mixtures hold ``{"weights", "states"}`` where
    ``states`` are paths of pure-state files.  States on ``3**n x 3**n`` are
    tagged as n-copy antisymmetric and their support is verified.
    """
    data = _load_json(path)
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: expected a JSON object")
    if "amplitudes" in data:
        a = read_state(path)
        d = 3**a.n
        return MixedState.from_pure(state_vector(a), d, d, a.n)
    if "weights" in data and "states" in data:
        weights = np.asarray(data["weights"], dtype=np.float64)
        paths = data["states"]
        if len(weights) != len(paths) or np.any(weights < 0):
            raise ValidationError(f"{path}: weights and states must match, weights >= 0")
        base = os.path.dirname(path)
        vecs, n = [], None
        for p in paths:
            a = read_state(p if os.path.isabs(p) else os.path.join(base, p))
            if n is not None and a.n != n:
                raise ValidationError(f"{path}: mixture states have different copy counts")
            n = a.n
            vecs.append(state_vector(a))
        rho = sum(w * np.outer(v, v.conj()) for w, v in zip(weights / weights.sum(), vecs))
        return MixedState(3**n, 3**n, rho, n)
    try:
        dim_a, dim_b = int(data["dim_a"]), int(data["dim_b"])
        entries = np.asarray(data["entries"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: malformed density file ({exc})")
    d = dim_a * dim_b
    if entries.shape != (d * d, 2):
        raise ValidationError(f"{path}: expected {d * d} [re, im] entries")
    rho = (entries[:, 0] + 1j * entries[:, 1]).reshape(d, d)
    tag = data.get("support_n")
    if tag is None and dim_a == dim_b:
        tag = _copies_of(dim_a)
    return MixedState(dim_a, dim_b, rho, tag)


def density_to_dict(state):
    flat = state.rho.reshape(-1)
    out = {"dim_a": state.dim_a, "dim_b": state.dim_b,
           "entries": [[float(z.real), float(z.imag)] for z in flat]}
    if state.support_n is not None:
        out["support_n"] = state.support_n
    return out


def cmd_sample_state(args):
    a = random_amplitude_tensor(args.n, args.seed)
    target = resolve_output(args.out)
    try:
        write_state(a, target)
    except OSError as exc:
        raise UsageError(f"cannot write {target}: {exc.strerror}")
    print(f"n={a.n} norm={np.linalg.norm(a.entries):.17g} -> {target}")
    return 0


def cmd_analyze(args):
    a = read_state(args.state)
    rho = reduced_density(coefficient_matrix(a))
    summary = summarize(rho)
    reports = [purity_bound_check(a), antisym_entropy_check(a), entropy_purity_bound(rho)]
    payload = {"n": a.n, "spectrum": summary.to_dict(),
               "bounds": [r.to_dict() for r in reports]}
    _emit(dumps(payload) + "\n", args.out)
    return 0 if all(r.satisfied for r in reports) else 1


def cmd_verify(args):
    if args.bound == "furuta":
        tol = FURUTA_TOL if args.tol is None else args.tol
        records, summary = furuta_grid(form=args.form, tol=tol)
    else:
        if args.n is None:
            raise UsageError(f"verify {args.bound} needs --n")
        if args.bound == "oracle" and args.n > MAX_ORACLE_N:
            raise UsageError(f"verify oracle is limited to --n <= {MAX_ORACLE_N}")
        records, summary = run_sampling_campaign(args.bound, args.n, args.samples, args.seed,
                                                 args.tol, args.workers)
    summary["timestamp"] = _timestamp()
    _emit(render(records, summary, args.format), args.out)
    print(f"verify {args.bound}: {summary['violations']} violations, "
          f"min slack {summary['min_slack']:.17g}", file=sys.stderr)
    return 0 if summary["violations"] == 0 else 1


def _optimizer_config(args):
    return OptimizerConfig(ensemble_size=args.ensemble_size, restarts=args.restarts,
                           max_iterations=args.iters, seed=args.seed)


def _tagged_power(state, copies):
    if state.support_n is None:
        raise ValidationError("input is not supported in an antisymmetric subspace")
    if state.support_n * copies > MAX_COPIES:
        raise UsageError(f"total copy count {state.support_n * copies} exceeds {MAX_COPIES}")
    power = state
    for _ in range(copies - 1):
        power = tensor_mixed(power, state)
    return power


def cmd_eof(args):
    state = _tagged_power(load_mixed_state(args.input), args.copies)
    report = eof_sandwich(state, _optimizer_config(args))
    payload = report.to_dict()
    payload["gap_tolerance"] = args.gap_tol
    payload["timestamp"] = _timestamp()
    _emit(dumps(payload) + "\n", args.out)
    if args.trace:
        trace_path = resolve_output(args.trace)
        with open(trace_path, "w") as fh:
            for rec in report.result.trace:
                fh.write(dumps(rec) + "\n")
    ok = report.consistent and report.gap <= args.gap_tol
    return 0 if ok else 1


def cmd_ec_estimate(args):
    state = load_mixed_state(args.input)
    if state.support_n != 1:
        raise UsageError("ec-estimate needs a single-copy antisymmetric state (3 x 3)")
    if args.n_max > MAX_COPIES:
        raise UsageError(f"--n-max is limited to {MAX_COPIES}")
    rows = ec_estimate(state, args.n_max, _optimizer_config(args))
    records = [{"n": n, "upper_ratio": up, "lower_ratio": lo,
                "brackets_one": lo <= 1.0 + 1e-12 and up >= 1.0 - 1e-9,
                "within_tolerance": up - 1.0 <= args.gap_tol}
               for n, up, lo in rows]
    payload = {"rows": records, "gap_tolerance": args.gap_tol, "timestamp": _timestamp()}
    _emit(dumps(payload) + "\n", args.out)
    ok = all(r["brackets_one"] and r["within_tolerance"] for r in records)
    return 0 if ok else 1


def _add_optimizer_flags(p):
    p.add_argument("--ensemble-size", type=_positive_int, default=None,
                   help="decomposition size (default: rank + 2)")
    p.add_argument("--restarts", type=_positive_int, default=8)
    p.add_argument("--iters", type=_positive_int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gap-tol", type=float, default=5e-3)
    p.add_argument("--out", default=None)


def build_parser():
    parser = argparse.ArgumentParser(prog="antisym-ec",
                                     description="Entanglement checks for antisymmetric qutrit states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-state", help="write a Haar-random amplitude tensor")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample_state)

    p = sub.add_parser("analyze", help="spectrum and bound reports for a state file")
    p.add_argument("state")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="Monte-Carlo or grid campaign for one bound")
    p.add_argument("bound", choices=BOUNDS)
    p.add_argument("--n", type=_positive_int, default=None)
    p.add_argument("--samples", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--form", choices=("stated", "natural"), default="stated",
                   help="Furuta right-hand side: base-2 as stated, or natural-log form")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--format", choices=("json", "jsonl", "csv"), default="jsonl")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eof", help="bracket the entanglement of formation")
    p.add_argument("input", help="pure-state, density or mixture file")
    p.add_argument("--copies", type=_positive_int, default=1,
                   help="analyze the tensor power of the input")
    p.add_argument("--trace", default=None, help="write the optimizer trace as JSON lines")
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_eof)

    p = sub.add_parser("ec-estimate", help="finite-copy E_f ratios for rho^(x)n")
    p.add_argument("input")
    p.add_argument("--n-max", type=_positive_int, default=2)
    _add_optimizer_flags(p)
    p.set_defaults(func=cmd_ec_estimate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValidationError, ValueError, OSError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
