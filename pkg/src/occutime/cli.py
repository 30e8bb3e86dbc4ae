"""Batch command-line interface.

Subcommands: validate, transform, markov, sample. Output is deterministic
given (input file, flags, seed): floats print with 12 significant digits and
all simulation is keyed by (seed, batch, path), so --threads cannot change a
single output byte.

Exit codes: 0 success (for markov: "is Markov"), 1 not Markov, 2 invalid
input, 3 malformed JSON or unreadable file, 4 singular matrix.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys

import numpy as np

from . import gaussian, markov, simulate, transforms
from .errors import NonPositiveDeterminant, SingularMatrix, ValidationError
from .generators import find_violation_index, load_generator

EXIT_OK = 0
EXIT_NOT_MARKOV = 1
EXIT_INVALID = 2
EXIT_BAD_INPUT = 3
EXIT_SINGULAR = 4


def _fmt(x: float) -> float:
    """Round a float to 12 significant digits for reproducible output."""
    return float(f"{float(x):.12g}")


def _rounded(obj):
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return bool(obj) if obj is not None else None
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    return obj


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(report: dict, output: str | None) -> None:
    _emit(json.dumps(_rounded(report), indent=2) + "\n", output)


def _parse_d(text: str | None, n: int) -> np.ndarray:
    """Killing vector from an inline comma list or a file of numbers."""
    if text is None:
        return np.zeros(n)
    raw = text.strip()
    if raw.startswith("@"):
        raw = _read_numbers(raw[1:])
    else:
        try:
            values = [float(tok) for tok in raw.split(",") if tok.strip()]
        except ValueError:
            raw = _read_numbers(raw)
        else:
            return transforms.validate_killing(values, n)
    values = [float(tok) for tok in raw.replace(",", " ").split()]
    return transforms.validate_killing(values, n)


def _read_numbers(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        content = fh.read()
    try:
        loaded = json.loads(content)
    except json.JSONDecodeError:
        return content
    return " ".join(str(v) for v in np.asarray(loaded, dtype=float).reshape(-1))


def _get_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("OCCUTIME_SEED")
    if env is not None:
        return int(env)
    raise ValidationError("a seed is required (--seed or OCCUTIME_SEED)")


def cmd_validate(args) -> int:
    try:
        g = load_generator(args.input)
    except ValidationError as exc:
        _emit_json({"valid": False, "error": str(exc)}, args.output)
        return EXIT_INVALID
    report = {
        "valid": True,
        "n": g.n,
        "kind": g.kind.value,
        "skip_free": g.skip_free,
        "tridiagonal": g.tridiagonal,
        "strictly_skip_free": g.strictly_skip_free,
        "exit": g.exit.tolist(),
    }
    i0 = find_violation_index(g)
    if i0 is not None:
        report["i0"] = i0
    _emit_json(report, args.output)
    return EXIT_OK


def cmd_transform(args) -> int:
    g = load_generator(args.input)
    d = _parse_d(args.d, g.n)
    start = args.start
    gm = transforms.green(g)  # raises SingularMatrix (exit 4) before anything else
    if g.skip_free and start == 0:
        exact = transforms.joint_lt_skipfree(g, d)
        formula = "skip_free"
    else:
        exact = transforms.joint_lt_general(g, start, d)
        formula = "general"
    report = {
        "exact": exact,
        "formula": formula,
        "start": start,
        "d": d.tolist(),
        "green_diag": np.diag(gm).tolist(),
    }
    if g.skip_free:
        report["marginal_rates"] = [transforms.marginal_rate(g, i) for i in range(g.n)]
    if args.verify:
        seed = _get_seed(args)
        est = simulate.mc_transform(g, start, d, args.paths, seed,
                                    method=args.method, threads=args.threads)
        gap = abs(exact - est.mean)
        if est.std_error > 0.0:
            ratio = gap / est.std_error
        else:
            ratio = 0.0 if gap == 0.0 else float("inf")
        report["verify"] = {
            "method": simulate.Method(args.method).value,
            "paths": est.num_paths,
            "seed": est.seed,
            "estimate": est.mean,
            "std_error": est.std_error,
            "abs_error_over_se": ratio,
        }
    _emit_json(report, args.output)
    return EXIT_OK


def cmd_markov(args) -> int:
    g = load_generator(args.input)
    verdict = markov.markov_verdict(g)
    _emit_json(markov.verdict_to_json(verdict), args.output)
    return EXIT_OK if verdict.is_markov else EXIT_NOT_MARKOV


def cmd_sample(args) -> int:
    g = load_generator(args.input)
    seed = _get_seed(args)
    buf = io.StringIO()
    if args.mode == "paths":
        d = _parse_d(args.d, g.n)
        simulate.write_paths_csv(buf, g, args.start, args.paths, seed, d,
                                 threads=args.threads)
    else:
        spec = gaussian.gaussian_spec(g)  # NotTridiagonal -> exit 2
        rows = gaussian.sample_occupation_gaussian_batch(spec, args.paths, seed)
        buf.write(",".join(["sample_id"] + [f"l_{i}" for i in range(g.n)]) + "\n")
        for s in range(args.paths):
            buf.write(",".join([str(s)] + [f"{x:.12g}" for x in rows[s]]) + "\n")
    if args.format == "json":
        lines = buf.getvalue().strip().split("\n")
        header = lines[0].split(",")
        cells = [line.split(",") for line in lines[1:]]
        _emit_json({"header": header, "rows": cells}, args.output)
    else:
        _emit(buf.getvalue(), args.output)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="occutime",
        description="Occupation times of skip-free Markov chains: exact "
                    "determinant transforms, Monte Carlo verification, "
                    "Markov-property verdicts, Gaussian sampling.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=False):
        p.add_argument("--input", required=True, help="generator JSON file "
                       '({"n": int, "q": [[...]], "kind": "sub"|"full"})')
        p.add_argument("--output", default=None, help="write output here instead of stdout")
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help="RNG seed (falls back to OCCUTIME_SEED)")
            p.add_argument("--threads", type=int, default=1,
                           help="worker threads for simulation; never changes results")

    p = sub.add_parser("validate", help="validate and classify a generator")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("transform", help="exact transform, Green diagonal, marginal rates")
    common(p, seed=True)
    p.add_argument("--d", default=None, help='killing vector: "v1,v2,..." or @file')
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--verify", action="store_true",
                   help="cross-check against the Monte Carlo estimator")
    p.add_argument("--method", default="expweight",
                   choices=[m.value for m in simulate.Method])
    p.add_argument("--paths", type=int, default=100_000)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("markov", help="decide the Markov property of the occupation times")
    common(p)
    p.set_defaults(func=cmd_markov)

    p = sub.add_parser("sample", help="dump per-path occupation vectors or Gaussian samples")
    common(p, seed=True)
    p.add_argument("--mode", default="paths", choices=["paths", "gaussian"])
    p.add_argument("--d", default=None, help="weight column argument (paths mode)")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--paths", type=int, default=10)
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    p.set_defaults(func=cmd_sample)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (SingularMatrix, NonPositiveDeterminant) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except ValueError as exc:  # ValidationError and friends subclass ValueError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
