"""Command-line entry point: ``magicpowers <subcommand> [flags]``.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 budget exhausted.  JSON output is sorted and carries no wall-clock
fields unless ``--timing`` is given, so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from magicpowers.errors import BudgetExceeded, CertificationError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _count(text: str) -> int:
    """Accept '10000000' or '1e7'."""
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v < 1 or v != int(v):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(v)


def _emit(report: dict, out: str) -> str:
    if out == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    lines = []
    for key in sorted(report):
        val = report[key]
        if isinstance(val, (dict, list)):
            val = json.dumps(val, sort_keys=True)
        lines.append(f"{key}: {val}")
    return "\n".join(lines)


def _need(args, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.cmd} requires {', '.join(missing)}")


def _sigma(args):
    from magicpowers.core_matrix import Sigma

    if args.sigma is None:
        return None
    try:
        s = Sigma.parse(args.sigma)
        s.validate(args.n)
    except ValueError as exc:
        raise UsageError(f"--sigma: {exc}") from None
    return s


def cmd_matrix(args) -> tuple[dict | str, int]:
    from magicpowers.core_matrix import (
        build_magic_matrix,
        contract_sigma,
        matrix_to_json,
        matrix_to_text,
    )

    _need(args, "n")
    sigma = _sigma(args)
    m0 = build_magic_matrix(args.n)
    entries = contract_sigma(m0, sigma) if sigma else m0.entries
    if args.out == "text":
        return matrix_to_text(entries).rstrip("\n"), EXIT_OK
    return matrix_to_json(entries, args.n), EXIT_OK


def cmd_partition(args):
    from magicpowers.construction import assemble_partition, verify_partition
    from magicpowers.core_matrix import build_magic_matrix

    _need(args, "n")
    if args.n < 8:
        return {
            "n": args.n,
            "applicable": False,
            "note": "explicit partition inapplicable for n < 8",
        }, EXIT_OK
    m0 = build_magic_matrix(args.n)
    try:
        part = assemble_partition(args.n, m0)
    except CertificationError as exc:
        return {"n": args.n, "certified": False, "error": str(exc), "report": exc.payload}, EXIT_FAIL
    out = part.to_json()
    out["applicable"] = True
    out["report"] = verify_partition(m0, part).to_json()
    return out, EXIT_OK


def cmd_psi(args):
    from magicpowers.core_matrix import build_magic_matrix
    from magicpowers.psi_oracle import psi_exact, psi_greedy

    _need(args, "n")
    m0 = build_magic_matrix(args.n)
    if args.method == "greedy":
        res = psi_greedy(m0, rng_seed=args.seed)
        return res.to_json(args.timing), EXIT_OK
    res = psi_exact(m0, budget_nodes=args.budget or 10**7)
    return res.to_json(args.timing), EXIT_OK if res.exact is not None else EXIT_BUDGET


def cmd_contract(args):
    from magicpowers.core_matrix import Sigma
    from magicpowers.psi_oracle import contracted_bound_report

    _need(args, "n")
    if args.n < 8:
        raise UsageError("contract needs --n >= 8")
    sigma = _sigma(args)
    if sigma is not None:
        return contracted_bound_report(args.n, sigma), None
    # no sigma given: a seeded sample of distinct cell pairs
    rng = random.Random(args.seed)
    cells = [(i, j) for i in range(1, args.n + 1) for j in range(1, args.n + 1)]
    reports = []
    for _ in range(args.samples or 50):
        a, b = rng.sample(cells, 2)
        rep = contracted_bound_report(args.n, Sigma(*a, *b), greedy=False)
        reports.append({k: rep[k] for k in ("sigma", "dropped", "survivors_certified", "ok")})
    out = {
        "n": args.n,
        "seed": args.seed,
        "required": args.n // 4 - 3,
        "samples": reports,
        "min_survivors": min(r["survivors_certified"] for r in reports),
        "ok": all(r["ok"] for r in reports),
    }
    return out, None


def cmd_analytic(args):
    from magicpowers import analytic as an

    kind = args.kind
    if kind == "integral":
        _need(args, "d", "beta")
        val = an.singular_integral_1d(args.beta, args.d)
        return {"kind": kind, "params": {"d": args.d, "beta": args.beta},
                "value": [val.real, val.imag]}, EXIT_OK
    if kind == "gauss":
        _need(args, "d", "q", "a")
        val = an.gauss_sum(args.q, args.a, args.d)
        return {"kind": kind, "params": {"q": args.q, "a": args.a, "d": args.d},
                "value": [val.real, val.imag]}, EXIT_OK
    _need(args, "n", "d")
    if args.p0 is not None:
        params = an.AnalyticParams.specialized(args.n, args.d, args.p0)
    else:
        _need(args, "mu")
        params = an.AnalyticParams(args.n, args.d, args.mu)
    base = {"n": params.n, "d": params.d, "mu": params.mu, "p0": params.p0}
    budget = args.budget or an.DEFAULT_BUDGET
    if kind == "aq":
        _need(args, "q")
        res = an.a_q(params, args.q, budget, detail=True)
        return {"kind": kind, "params": {**base, "q": args.q}, "value": res.value,
                "imag_residual": res.imag_residual, "budget": {"tuples": res.tuples}}, EXIT_OK
    if kind == "chi":
        _need(args, "p", "K")
        res = an.chi_p_partial(params, args.p, args.K, budget)
        return {"kind": kind, "params": {**base, "p": args.p, "K": args.K}, "value": res.value,
                "terms": res.terms, "last_term": res.last_term}, EXIT_OK
    if kind == "nu":
        _need(args, "p", "m")
        val = an.nu_count(params, args.p, args.m, budget)
        return {"kind": kind, "params": {**base, "p": args.p, "m": args.m}, "value": val}, EXIT_OK
    # phi
    _need(args, "L", "samples")
    est = an.singular_integral_phi_estimate(params, args.L, args.samples, X=args.X or 1.0, seed=args.seed)
    return {"kind": kind, "params": {**base, "L": args.L, "X": args.X or 1.0, "seed": args.seed},
            "value": est.value, "stderr": est.stderr, "approximate": True,
            "budget": {"samples": est.samples}}, EXIT_OK


def _read_grid(path: str):
    from magicpowers.squares import FIXTURES, parse_grid

    p = Path(path)
    if not p.exists() and (FIXTURES / path).exists():
        p = FIXTURES / path
    try:
        text = p.read_text()
    except OSError as exc:
        raise UsageError(f"--grid: {exc}") from None
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise UsageError(f"--grid {path}: {exc}") from None


def cmd_verify(args):
    from magicpowers.squares import verify_square

    _need(args, "grid")
    grid = _read_grid(args.grid)
    res = verify_square(grid)
    out = {"n": grid.n, "d": grid.d, **res.to_json()}
    return out, EXIT_OK if res.ok else EXIT_FAIL


def cmd_count(args):
    from magicpowers.squares import count_breakdown

    _need(args, "n", "d", "X", "mu")
    res = count_breakdown(args.n, args.d, args.X, args.mu, args.budget or 10**7)
    out = res.to_json()
    out["count"] = res.distinct if args.distinct else res.total
    out["distinct"] = args.distinct
    return out, EXIT_OK if res.consistent else EXIT_FAIL


COMMANDS = {
    "matrix": cmd_matrix,
    "partition": cmd_partition,
    "psi": cmd_psi,
    "contract": cmd_contract,
    "analytic": cmd_analytic,
    "verify": cmd_verify,
    "count": cmd_count,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--d", type=int)
    common.add_argument("--mu", type=int)
    common.add_argument("--q", type=int)
    common.add_argument("--out", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=_count)
    common.add_argument("--timing", action="store_true", help="include wall-clock fields")

    parser = argparse.ArgumentParser(prog="magicpowers", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("matrix", parents=[common], help="coefficient matrix, optionally contracted")
    p.add_argument("--sigma", help="i1,j1,i2,j2: identify x_{i2,j2} with x_{i1,j1}")

    sub.add_parser("partition", parents=[common], help="certified explicit disjoint independent sets")

    p = sub.add_parser("psi", parents=[common], help="maximum number of disjoint bases")
    p.add_argument("--method", choices=("exact", "greedy"), default="exact")

    p = sub.add_parser("contract", parents=[common], help="partition bound after a contraction")
    p.add_argument("--sigma")
    p.add_argument("--samples", type=_count, help="random sigmas to test when --sigma is absent")

    p = sub.add_parser("analytic", parents=[common], help="local densities and integrals")
    p.add_argument("kind", choices=("aq", "chi", "nu", "gauss", "integral", "phi"))
    p.add_argument("--p0", type=int, help="set mu = n * p0^d")
    p.add_argument("--p", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--L", type=float)
    p.add_argument("--X", type=float)
    p.add_argument("--samples", type=_count)

    p = sub.add_parser("verify", parents=[common], help="check a grid file")
    p.add_argument("--grid", help="grid file, or the name of a bundled fixture")

    p = sub.add_parser("count", parents=[common], help="exhaustive toy-scale solution count")
    p.add_argument("--X", type=int)
    p.add_argument("--distinct", action="store_true")
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = COMMANDS[args.cmd](args)
    except UsageError as exc:
        parser.error(str(exc))
    except BudgetExceeded as exc:
        print(_emit({"cmd": args.cmd, "budget_exhausted": True, "error": str(exc)}, args.out))
        return EXIT_BUDGET
    except CertificationError as exc:
        print(_emit({"cmd": args.cmd, "certified": False, "error": str(exc)}, args.out))
        return EXIT_FAIL
    except ValueError as exc:
        parser.error(str(exc))
    if code is None:
        code = EXIT_OK if report.get("ok") else EXIT_FAIL
    print(report if isinstance(report, str) else _emit(report, args.out))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
