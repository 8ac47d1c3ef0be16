"""Batch command-line front end.

Subcommands: arith (function tables and oracle diffs), group (subgroup and
coset listings), chars (character sums with Polya-Vinogradov slack), equidist
(error sweeps and overlap checks), experiment (Monte Carlo driver from a JSON
config), verify (invariant suite).

Exit codes: 0 ok, 1 usage, 2 validation error, 3 invariant failure.  All
logs are natural logarithms.  Exact quantities are printed as integer or
num/den strings; floats carry 12 significant digits.  Identical invocations
with identical seeds produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import verify as verify_mod
from .arith import euler_phi, factor, growth_scan, omega, r_d, s_d, tau, u_d
from .arith import brute_r_d, brute_u_d
from .characters import all_characters, character_matrix, pv_bound
from .equidist import interval_system, overlap_excess_sweep, psi_estimate
from .experiment import ExperimentConfig, check_conditions, exact_str, monte_carlo_measure
from .residue_group import (
    coset,
    dth_power_subgroup,
    full_subgroup,
    index,
    subgroup_from_generators,
    unit_group,
)

SCHEMA_VERSION = 1


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int, Fraction)):
        return str(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _emit_rows(columns: list[str], rows: list[list], fmt: str, out: str | None) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
    else:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "columns": columns,
            "rows": [[_fmt(v) for v in row] for row in rows],
        }
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_gens(spec: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in spec.split(",") if t.strip())
    except ValueError:
        raise ValueError(f"bad generator list {spec!r}; expected comma-separated integers")


def _subgroup_for(g, mode: str, d: int, gens: tuple[int, ...]):
    if mode == "full":
        return full_subgroup(g)
    if mode == "dth-powers":
        return dth_power_subgroup(g, d)
    return subgroup_from_generators(g, gens)


# ---------------------------------------------------------------------------
# Subcommands.
# ---------------------------------------------------------------------------


def _cmd_arith(args) -> int:
    if args.growth:
        rows = []
        for r in growth_scan(args.n_max, d=args.d):
            rows.append(
                [r.block_lo, r.block_hi, r.eps, r.base, r.tau_max, r.tau_argmax, r.pow_max, r.pow_argmax]
            )
        _emit_rows(
            ["block_lo", "block_hi", "eps", "base", "tau_max", "tau_argmax", "pow_omega_max", "pow_omega_argmax"],
            rows,
            args.format,
            args.out,
        )
        return 0
    columns = ["n", "phi", "tau", "omega", f"u_{args.d}", f"r_{args.d}", f"s_{args.d}"]
    if args.oracle:
        columns += ["brute_u", "brute_r", "u_mismatch", "r_mismatch"]
    rows = []
    mismatches = 0
    for n in range(1, args.n_max + 1):
        f = factor(n)
        u, r = u_d(f, args.d), r_d(f, args.d)
        row = [n, euler_phi(f), tau(f), omega(f), u, r, s_d(n, args.d)]
        if args.oracle:
            bu, br = brute_u_d(n, args.d), brute_r_d(n, args.d)
            row += [bu, br, int(u != bu), int(r != br)]
            mismatches += int(u != bu) + int(r != br)
        rows.append(row)
    _emit_rows(columns, rows, args.format, args.out)
    if args.oracle and mismatches:
        print(f"oracle mismatches: {mismatches}", file=sys.stderr)
        return 3
    return 0


def _cmd_group(args) -> int:
    g = unit_group(args.n)
    G = _subgroup_for(g, args.mode, args.d, _parse_gens(args.generators))
    c = coset(args.a, G)
    rows = [[
        g.n,
        g.phi,
        ";".join(f"{gen}^{order}" for gen, order in g.cyclic_factors),
        G.order,
        index(G),
        ";".join(map(str, G.elements)),
        c.representative,
        ";".join(map(str, c.elements)),
    ]]
    _emit_rows(
        ["n", "phi", "cyclic_factors", "subgroup_order", "subgroup_index",
         "subgroup_elements", "coset_rep", "coset_elements"],
        rows,
        args.format,
        args.out,
    )
    return 0


def _cmd_chars(args) -> int:
    import numpy as np

    rows = []
    for n in range(3, args.n_max + 1):
        g = unit_group(n)
        chars = all_characters(g)
        if len(chars) <= 1:
            continue
        V = character_matrix(g, chars)
        prefix = np.cumsum(V[:, 1:], axis=1)
        bound = pv_bound(n)
        for i, chi in enumerate(chars):
            if chi.is_principal:
                continue
            for h in range(1, n + 1):
                v = prefix[i, min(h, n - 1) - 1]
                rows.append(
                    [n, ";".join(map(str, chi.exponents)), h,
                     float(v.real), float(v.imag), bound, bound - abs(v)]
                )
    _emit_rows(
        ["modulus", "exponents", "h", "sum_re", "sum_im", "pv_bound", "slack"],
        rows,
        args.format,
        args.out,
    )
    return 0


def _cmd_equidist(args) -> int:
    if args.overlap_q:
        qs = [int(t) for t in args.overlap_q.split(",") if t.strip()]
        A = [(Fraction(1, 10), Fraction(1, 5)), (Fraction(1, 2), Fraction(3, 5)),
             (Fraction(4, 5), Fraction(9, 10))]
        systems = []
        for q in qs:
            g = unit_group(q)
            G = _subgroup_for(g, args.mode, args.d, _parse_gens(args.generators))
            systems.append(interval_system(1, q, args.d, Fraction(1, 5), args.a, G))
        rep = overlap_excess_sweep(A, systems, epsilon=args.epsilon)
        rows = [[q, d, x] for q, d, x in rep.rows]
        _emit_rows(["q", "d", "abs_excess"], rows, args.format, args.out)
        print(
            f"slope {_fmt(rep.slope) if rep.slope is not None else 'n/a'} "
            f"(reference exponent {_fmt(rep.reference_exponent)}), "
            f"decays: {rep.decays}",
            file=sys.stderr,
        )
        return 0
    rows = []
    violations = 0
    for n in range(2, args.n_max + 1):
        g = unit_group(n)
        G = _subgroup_for(g, args.mode, args.d, _parse_gens(args.generators))
        if math.gcd(args.a, n) != 1:
            continue
        c = coset(args.a, G)
        for j in range(1, args.mu_grid):
            mu = Fraction(j, args.mu_grid)
            try:
                est = psi_estimate(mu, c)
            except ArithmeticError:
                violations += 1
                continue
            rows.append(
                [n, G.order, index(G), mu, est.exact_count, est.main_term,
                 est.abs_error, est.bound, est.normalized_error]
            )
    _emit_rows(
        ["n", "order", "index", "mu", "exact", "main", "abs_error", "bound", "normalized_error"],
        rows,
        args.format,
        args.out,
    )
    if violations:
        print(f"bound violations: {violations}", file=sys.stderr)
        return 3
    return 0


def _cmd_experiment(args) -> int:
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"malformed config at line {exc.lineno}, column {exc.colno}: {exc.msg}",
              file=sys.stderr)
        return 2
    if args.seed is not None:
        raw["seed"] = args.seed
    cfg = ExperimentConfig.from_dict(raw)
    conditions = check_conditions(cfg, epsilon=args.epsilon)
    result = monte_carlo_measure(cfg, threads=args.threads)
    summary = result.summary_dict()
    summary["conditions"] = {
        "epsilon": conditions.epsilon,
        "n_final": cfg.K,
        "partial_sum_alpha": exact_str(conditions.partial_sum_alpha[-1]),
        "weighted_sum": exact_str(conditions.weighted_sum[-1]),
        "c_ratio_final": {
            "exact": exact_str(conditions.c_ratio_final),
            "value": float(conditions.c_ratio_final),
        },
        "c_ratio_min": {
            "exact": exact_str(conditions.c_ratio_min),
            "value": float(conditions.c_ratio_min),
        },
        "cond_c_first_decile_mean": conditions.cond_c_first_decile_mean,
        "cond_c_last_decile_mean": conditions.cond_c_last_decile_mean,
        "cond_c_decreasing": conditions.cond_c_decreasing,
    }
    text = json.dumps(summary, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.hits_csv:
        with open(args.hits_csv, "w") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sample_index", "k", "q", "p", "error_num", "error_den"])
            for i, hits in enumerate(result.per_sample_hits):
                for h in hits:
                    w.writerow([i, h.k, h.q, h.p, h.error.numerator, h.error.denominator])
    return 0


def _cmd_verify(args) -> int:
    results = verify_mod.run_suite(quick=args.quick)
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        tag = "PASS" if r.ok else "FAIL"
        if not r.ok:
            failed += 1
        print(f"{tag}  {r.name.ljust(width)}  [{r.seconds:7.2f}s]  {r.detail}")
    scale = "quick" if args.quick else "full"
    print(f"{len(results) - failed}/{len(results)} checks passed ({scale} scale)")
    return 0 if failed == 0 else 3


# ---------------------------------------------------------------------------
# Parser wiring.
# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="cosetapprox",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        return p

    p = common(sub.add_parser("arith", help="arithmetic function tables"))
    p.add_argument("--n-max", type=int, default=100)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--oracle", action="store_true", help="add brute-force oracle columns")
    p.add_argument("--growth", action="store_true", help="emit the growth-scan table instead")
    p.set_defaults(fn=_cmd_arith)

    p = common(sub.add_parser("group", help="subgroup and coset listing"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("full", "dth-powers", "generators"), default="dth-powers")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--generators", default="", help="comma-separated residues")
    p.add_argument("--a", type=int, default=1)
    p.set_defaults(fn=_cmd_group)

    p = common(sub.add_parser("chars", help="character sums and Polya-Vinogradov slack"))
    p.add_argument("--n-max", type=int, default=30)
    p.set_defaults(fn=_cmd_chars)

    p = common(sub.add_parser("equidist", help="equidistribution error sweeps"))
    p.add_argument("--n-max", type=int, default=200)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--mode", choices=("full", "dth-powers", "generators"), default="dth-powers")
    p.add_argument("--generators", default="")
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--mu-grid", type=int, default=10, help="mu runs over j/mu_grid")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--overlap-q", default="", help="comma-separated q values: run the overlap sweep")
    p.set_defaults(fn=_cmd_equidist)

    p = sub.add_parser("experiment", help="Monte Carlo experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--hits-csv", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--epsilon", type=float, default=0.05)
    p.set_defaults(fn=_cmd_experiment)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--quick", action="store_true", help="small-n suites only")
    p.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.fn(args)
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
