"""Command-line entry point: ``clusterbound <subcommand> ...``.

Exit status is 0 on success, 2 on bad arguments and 3 when a verification
identity fails. JSON and CSV floats use Python's round-trip ``repr``.
"""
import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__, bounds, cluster, graphs, mayer, streams
from .potentials import Kind, parse_potential, stability_constant, temperedness_in_box

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 3

IDENTITY_TOL = 1e-9
FACTORIZATION_TOL = 1e-6
STEP1_K = (1.01, 1.1462, 1.5, 2.0, 3.0)
FREE_CASE_K = (1.0, 1.1, 1.1462, 1.2, 1.3, 1.4, 1.5)

# knobs that change how a result is computed but never the result itself
_EXECUTION_ONLY = {"func", "shards", "out"}


class VerificationFailed(Exception):
    pass


def _emit(text, out=None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _envelope(args, payload):
    config = {k: v for k, v in sorted(vars(args).items()) if k not in _EXECUTION_ONLY}
    report = {"tool_version": __version__, "resolved_config": config, "seed": args.seed}
    report.update(payload)
    return json.dumps(report, indent=2) + "\n"


def _identity(name, lhs, rhs, residual, tol):
    return {"name": name, "lhs": lhs, "rhs": rhs, "residual": residual,
            "tolerance": tol, "pass": bool(residual <= tol)}


def _truncate4(x):
    return f"{math.floor(x * 1e4) / 1e4:.4f}"


# ------------------------------------------------------------------ commands


def cmd_radius(args):
    if args.K == "auto":
        report = bounds.optimize_K(args.beta, args.stab, args.cbeta, K_max=args.k_max)
    else:
        report = bounds.bounds_report(args.beta, args.stab, args.cbeta, float(args.K))
    payload = {
        "beta": report.beta, "stab": report.B, "c_beta": report.C_beta, "K": report.K,
        "u": report.u, "F": report.F_u, "a_star": report.a_star,
        "g_a_star": report.g_of_a_star, "feasible": report.feasible,
        "rho_star": report.rho_star, "rho_star_1": report.rho_star_1, "ratio": report.ratio,
    }
    _emit(_envelope(args, payload), args.out)


def cmd_kstar(args):
    _emit(_truncate4(bounds.find_K_star(args.tol)) + "\n")


def cmd_curves(args):
    if not 0 < args.u_min < args.u_max:
        raise ValueError("need 0 < u-min < u-max")
    if args.points < 2:
        raise ValueError("need at least 2 points")
    space = np.geomspace if args.spacing == "log" else np.linspace
    rows = bounds.emit_curves(space(args.u_min, args.u_max, args.points))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["u", "F", "a_star", "g_a_star"])
    for row in rows:
        writer.writerow([repr(float(v)) for v in row])
    _emit(buf.getvalue(), args.out)


def cmd_graphs_count(args):
    _emit(f"{graphs.count_graphs(args.n, args.cls)}\n")


def cmd_mayer(args):
    p = parse_potential(args.potential)
    if args.box is None:
        est = mayer.beta_m_monte_carlo(p, args.beta, args.m, args.samples, args.seed,
                                       shards=args.shards)
    else:
        est = mayer.w_star_finite_volume(p, args.beta, args.m, args.box, args.samples,
                                         args.seed, shards=args.shards)
    _emit(_envelope(args, est.as_dict()), args.out)


def cmd_free_energy(args):
    p = parse_potential(args.potential)
    is_rod = p.kind is Kind.HARD_ROD
    payload = {"rho": args.rho}
    if args.coefficients == "exact":
        if not is_rod:
            raise ValueError("exact coefficients are only known for hardrod")
        coeffs = [mayer.beta_m_exact_hardrod(m, p.sigma) for m in range(1, args.order + 1)]
    else:
        if args.order > mayer.MAX_ORDER:
            raise ValueError(f"Monte Carlo coefficients stop at order {mayer.MAX_ORDER}")
        estimates = [
            mayer.beta_m_monte_carlo(p, args.beta, m, args.samples, args.seed, shards=args.shards)
            for m in range(1, args.order + 1)
        ]
        coeffs = [e.mean for e in estimates]
        payload["std_errors"] = [e.std_error for e in estimates]
    payload["f_series"] = mayer.free_energy_series(args.rho, args.beta, coeffs, args.order)
    payload["f_ideal"] = mayer.ideal_free_energy(args.rho, args.beta)
    payload["coefficients"] = coeffs
    if is_rod:
        oracle = mayer.tonks_free_energy(args.rho, args.beta, p.sigma)
        payload["oracle"] = oracle
        payload["abs_diff"] = abs(payload["f_series"] - oracle)
        payload["tail_bound"] = mayer.tonks_tail(args.rho, p.sigma, args.order) / args.beta
    _emit(_envelope(args, payload), args.out)


def polymer_identities(p, beta, L, K, N, n_max, grid):
    """The identity suite behind ``verify-polymer``."""
    table = cluster.zeta_from_potential(p, beta, L, K, N, grid)
    coarse = cluster.zeta_from_potential(p, beta, L, K, N, grid // 2)
    out = []
    z_coll, scale = cluster.partition_by_collections(table)
    z_part, _ = cluster.partition_by_set_partitions(table)
    out.append(_identity("partition_forms", z_coll, z_part,
                         abs(z_coll - z_part) / max(scale, 1.0), 1e-12))

    terms = cluster.cluster_log_terms(table, n_max)
    errors = [abs(math.exp(math.fsum(terms[:n])) - z_coll) for n in range(1, n_max + 1)]
    ratios = [b / a for a, b in zip(errors, errors[1:]) if a > 0]
    out.append({"name": "cluster_log_convergence", "lhs": math.exp(math.fsum(terms)),
                "rhs": z_coll, "residual": errors[-1], "errors": errors, "ratios": ratios,
                "pass": all(r < 1 for r in ratios) if ratios else errors[-1] <= IDENTITY_TOL})

    fac = cluster.check_factorization(p, beta, L, K, N, grid)
    out.append(_identity("factorization", fac.z_per, fac.z_free * fac.z_int,
                         fac.residual, FACTORIZATION_TOL))

    C = temperedness_in_box(p, beta, L)
    B = stability_constant(p)
    a = bounds.maximize_F(math.exp(-beta * B) * K).a_star
    radius = bounds.rho_star(beta, B, C, K)
    kp = cluster.kp_check(cluster.tree_bounds(p, beta, L, N, K, a), a, K=K)
    covered = N / L <= radius and bounds.feasibility(K, beta, B)[0]
    out.append({"name": "kp_implied_by_radius", "density": N / L, "rho_star": radius,
                "kp_check": kp, "pass": kp or not covered})

    delta = max(abs(x - y) for x, y in zip(table.by_size(), coarse.by_size()))
    return out, {"activities": table.by_size(), "quadrature_delta": delta}


def cmd_verify_polymer(args):
    p = parse_potential(args.potential)
    identities, extra = polymer_identities(p, args.beta, args.L, args.K, args.N, args.nmax,
                                           args.grid)
    _emit(_envelope(args, {"identities": identities, **extra}), args.out)
    if not all(i["pass"] for i in identities):
        raise VerificationFailed


def combinatorial_identities():
    """Penrose tree identity, single-polymer resummation and free-case log."""
    out = []
    for n in range(2, 7):
        lhs = graphs.penrose_value(np.ones((n, n), dtype=bool))
        rhs = graphs.penrose_tree_identity(n)
        out.append(_identity(f"penrose_n{n}", lhs, rhs, abs(lhs - rhs), IDENTITY_TOL))
    for n in range(0, 7):
        for K in STEP1_K:
            lhs, rhs = cluster.step1_identity(n, K)
            out.append(_identity(f"step1_n{n}_K{K}", lhs, rhs, abs(lhs - rhs) / rhs,
                                 IDENTITY_TOL))
    for K in FREE_CASE_K:
        lhs = cluster.free_case_log(K)
        out.append(_identity(f"free_case_K{K}", lhs, -math.log(K), abs(lhs + math.log(K)),
                             IDENTITY_TOL))
    return out


def cmd_verify_identities(args):
    identities = combinatorial_identities()
    _emit(_envelope(args, {"identities": identities}), args.out)
    if not all(i["pass"] for i in identities):
        raise VerificationFailed


def cmd_verify(args):
    """Every identity check: the combinatorial suite plus the polymer suite for
    1-D hard rods at each K and N = 1..4."""
    p = parse_potential(args.potential)
    sections = {"combinatorial": combinatorial_identities(), "polymer": []}
    for K in args.K:
        for N in range(1, cluster.MAX_QUADRATURE_N + 1):
            identities, _ = polymer_identities(p, args.beta, args.L, K, N, args.nmax, args.grid)
            sections["polymer"].append({"K": K, "N": N, "identities": identities})
    checks = sections["combinatorial"] + [i for run in sections["polymer"] for i in run["identities"]]
    passed = all(i["pass"] for i in checks)
    _emit(_envelope(args, {"all_pass": passed, **sections}), args.out)
    if not passed:
        raise VerificationFailed


# ------------------------------------------------------------------ parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _k_value(text):
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("K must be 'auto' or a number") from None


def build_parser():
    parser = _Parser(prog="clusterbound", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(func=func)
        sp.add_argument("--seed", type=int, default=streams.DEFAULT_SEED,
                        help="64-bit seed (default 0x5EED)")
        sp.add_argument("--out", help="write the report here instead of stdout")
        return sp

    sp = add("radius", cmd_radius, help="convergence radius report (JSON)")
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--stab", type=float, default=0.0, help="stability constant B")
    sp.add_argument("--cbeta", type=float, required=True, help="temperedness integral C(beta)")
    sp.add_argument("--K", type=_k_value, default="auto", help="'auto' or a value >= 1")
    sp.add_argument("--k-max", type=float, default=4.0)

    sp = add("kstar", cmd_kstar, help="the universal constant K*")
    sp.add_argument("--tol", type=float, default=1e-4)

    sp = add("curves", cmd_curves, help="CSV of u, F(u), a*(u), g(a*(u))")
    sp.add_argument("--u-min", type=float, default=0.01)
    sp.add_argument("--u-max", type=float, default=1.3)
    sp.add_argument("--points", type=int, default=200)
    sp.add_argument("--spacing", choices=("linear", "log"), default="linear")

    sp = sub.add_parser("graphs", help="labeled graph counts")
    gsub = sp.add_subparsers(dest="graphs_command", required=True, parser_class=_Parser)
    sp = gsub.add_parser("count")
    sp.set_defaults(func=cmd_graphs_count)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--class", dest="cls", choices=("connected", "biconnected"),
                    default="connected")

    sp = add("mayer", cmd_mayer, help="Monte Carlo irreducible Mayer coefficient (JSON)")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--samples", type=int, default=10**6)
    sp.add_argument("--box", type=float, help="periodic box side; estimates w* instead")
    sp.add_argument("--shards", type=int, default=1)

    sp = add("free-energy", cmd_free_energy, help="truncated free-energy series (JSON)")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--order", type=int, default=3)
    sp.add_argument("--samples", type=int, default=10**6)
    sp.add_argument("--coefficients", choices=("mc", "exact"), default="mc")
    sp.add_argument("--shards", type=int, default=1)

    sp = add("verify-polymer", cmd_verify_polymer, help="polymer-gas identity checks (JSON)")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--L", type=float, default=10.0)
    sp.add_argument("--K", type=float, default=1.0)
    sp.add_argument("--N", type=int, default=3)
    sp.add_argument("--nmax", type=int, default=6)
    sp.add_argument("--grid", type=int, default=256)

    add("verify-identities", cmd_verify_identities, help="combinatorial identity suite")

    sp = add("verify", cmd_verify, help="all identity suites (JSON)")
    sp.add_argument("--potential", default="hardrod:sigma=1")
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--L", type=float, default=10.0)
    sp.add_argument("--K", type=float, nargs="+", default=[1.0, 1.1462])
    sp.add_argument("--nmax", type=int, default=6)
    sp.add_argument("--grid", type=int, default=2048)
    return parser


def run(args):
    try:
        args.func(args)
    except VerificationFailed:
        return EXIT_VERIFY
    except cluster.IdentityError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    if not hasattr(args, "seed"):
        args.seed = streams.DEFAULT_SEED
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
