"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also collected in the "acceptance criteria" terminal summary.
"""
import csv
import io
import json
import math
import subprocess
import sys

import numpy as np

from clusterbound import bounds, cli, cluster, graphs, mayer
from clusterbound.potentials import hard_core, hard_rod, temperedness_in_box
from oracles import classify, richardson_hardrod

BALL3 = 4 * math.pi / 3
K_STAR = 1.1462


def test_c01_F_at_one(criterion):
    with criterion(1, "F(1) = 0.1448 +/- 5e-4", 1.0) as c:
        v = bounds.F(1.0)
        c.check(abs(v - 0.1448) <= 5e-4, f"F(1)={v:.6f}")


def test_c02_F_large_u(criterion):
    with criterion(2, "F(1e6) within 2% of 1/e", 1.0) as c:
        v = bounds.F(1e6)
        rel = abs(v - math.exp(-1)) / math.exp(-1)
        c.check(rel <= 0.02, f"F(1e6)={v:.6f} rel={rel:.2e}")


def test_c03_K_star(criterion):
    with criterion(3, "K* = 1.1462 +/- 1e-3", 5.0) as c:
        K = bounds.find_K_star(1e-4)
        c.check(abs(K - K_STAR) <= 1e-3, f"K*={K:.5f}")


def test_c04_g_value(criterion):
    with criterion(4, "g(0.4421) = 1.1463 +/- 5e-4", 1.0) as c:
        v = bounds.g_function(0.4421)
        c.check(abs(v - 1.1463) <= 5e-4, f"g={v:.5f}")


def test_c05_hard_core_radii(criterion):
    with criterion(5, "hard-core radii 0.1794 and 0.1448", 1.0) as c:
        C = temperedness_in_box(hard_core(1.0), 1.0, 10.0)
        c.check(abs(C - BALL3) <= 1e-12, f"C={C:.6f}")
        r = bounds.rho_star(1.0, 0.0, C, K_STAR) * BALL3
        r1 = bounds.rho_star_known(1.0, 0.0, C) * BALL3
        c.check(abs(r - 0.1794) <= 1e-3, f"rho*|B|={r:.5f}")
        c.check(abs(r1 - 0.1448) <= 5e-4, f"rho*_1|B|={r1:.5f}")


def test_c06_K_1_3_boundary(criterion):
    with criterion(6, "K = 1.3 feasibility boundary", 5.0) as c:
        c.check(not bounds.feasibility(1.3, 1.0, 0.0)[0], "infeasible at beta B = 0")
        c.check(bounds.feasibility(1.3, 1.0, 2.476)[0], "feasible at beta B = 2.476")
        u = bounds.threshold_u(1.3)
        c.check(abs(u - 0.1099) <= 2e-3, f"threshold u={u:.5f}")


def _max_feasible_K(beta_B, hi=4.0):
    lo = 1.0
    if bounds.feasibility(hi, 1.0, beta_B)[0]:
        return hi
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if bounds.feasibility(mid, 1.0, beta_B)[0] else (lo, mid)
    return lo


def test_c07_rho_star_dominates(criterion):
    with criterion(7, "rho* >= rho*_1 on a 20x20 grid", 10.0) as c:
        worst = math.inf
        count = 0
        for beta_B in np.linspace(0.0, 5.0, 20):
            for K in np.linspace(1.0, _max_feasible_K(beta_B), 20):
                assert bounds.feasibility(K, 1.0, beta_B)[0]
                gap = bounds.rho_star(1.0, beta_B, 1.0, K) - bounds.rho_star_known(1.0, beta_B, 1.0)
                worst = min(worst, gap)
                count += 1
        c.check(count == 400 and worst >= 0, f"{count} points, min gap {worst:.3e}")


def test_c08_graph_counts(criterion):
    expected = {2: (1, 1), 3: (4, 1), 4: (38, 10), 5: (728, 238)}
    with criterion(8, "graph counts vs brute-force classifier", 60.0) as c:
        for n, (n_con, n_bic) in expected.items():
            con = {g.mask for g in graphs.enumerate_connected(n)}
            bic = {g.mask for g in graphs.enumerate_biconnected(n)}
            ref_con, ref_bic = set(), set()
            for mask in range(1 << graphs.n_edges(n)):
                is_con, is_bic = classify(n, mask)
                if is_con:
                    ref_con.add(mask)
                if is_bic:
                    ref_bic.add(mask)
            c.check(len(con) == n_con and con == ref_con, f"n={n} connected {len(con)}")
            c.check(len(bic) == n_bic and bic == ref_bic, f"biconnected {len(bic)}")


def test_c09_penrose(criterion):
    with criterion(9, "Penrose identity n = 2..6", 60.0) as c:
        for n in range(2, 7):
            v = graphs.penrose_value(np.ones((n, n), dtype=bool))
            c.check(v == (-1) ** (n - 1) * math.factorial(n - 1), f"n={n}: {v}")


def test_c10_step1(criterion):
    with criterion(10, "single-polymer resummation = K^(n+1)", 5.0) as c:
        worst = 0.0
        for n in range(7):
            for K in (1.01, K_STAR, 1.5, 2.0, 3.0):
                lhs, rhs = cluster.step1_identity(n, K)
                worst = max(worst, abs(lhs - rhs) / rhs)
        c.check(worst < 1e-9, f"max rel residual {worst:.2e}")


def test_c11_mayer_hardrod(criterion):
    rod = hard_rod(1.0)
    with criterion(11, "hard-rod beta_1..3 by Monte Carlo at 1e6 samples", 120.0) as c:
        for m, exact in ((1, -2.0), (2, -1.5), (3, -4 / 3)):
            oracle = richardson_hardrod(m, 400 if m < 3 else 120)
            c.check(abs(oracle - exact) <= 5e-3, f"grid oracle beta_{m}={oracle:.4f}")
            est = mayer.beta_m_monte_carlo(rod, 1.0, m, 10**6)
            dev = abs(est.mean - exact)
            ratio = abs(exact) / est.std_error if est.std_error > 0 else math.inf
            c.check(dev <= 3 * est.std_error and ratio > 10,
                    f"beta_{m}={est.mean:.5f}+/-{est.std_error:.1e}")


def test_c12_tonks_free_energy(criterion):
    rho, M = 0.05, 6
    coeffs = [mayer.beta_m_exact_hardrod(m) for m in range(1, M + 1)]
    with criterion(12, "series(M=6) vs Tonks within the tail bound", 1.0) as c:
        series = mayer.free_energy_series(rho, 1.0, coeffs, M)
        exact = mayer.tonks_free_energy(rho, 1.0)
        tail = mayer.tonks_tail(rho, 1.0, M)
        diff = abs(series - exact)
        c.check(diff <= tail, f"|diff|={diff:.6e} tail={tail:.6e}")


def test_c13_polymer_identities(criterion):
    rod, L = hard_rod(1.0), 10.0
    with criterion(13, "polymer identities, hard rods, N <= 4", 120.0) as c:
        for K in (1.0, K_STAR):
            for N in range(1, 5):
                table = cluster.zeta_from_potential(rod, 1.0, L, K, N, 2048)
                z_coll, scale = cluster.partition_by_collections(table)
                z_part, _ = cluster.partition_by_set_partitions(table)
                c.check(abs(z_coll - z_part) < 1e-12 * max(scale, 1.0),
                        f"K={K} N={N} forms {abs(z_coll - z_part):.1e}")
                terms = cluster.cluster_log_terms(table, 6)
                errs = [abs(math.exp(math.fsum(terms[:n])) - z_coll) for n in range(1, 7)]
                ratios = [b / a for a, b in zip(errs, errs[1:]) if a > 1e-15]
                exact = errs[0] <= 1e-15  # no multi-particle polymers to expand
                c.check(exact or (all(r < 1 for r in ratios) and max(ratios) < 0.9),
                        f"log errs {errs[0]:.1e}->{errs[-1]:.1e}")
                fac = cluster.check_factorization(rod, 1.0, L, K, N, 2048)
                c.check(fac.residual < 1e-6, f"factorization {fac.residual:.1e}")


def test_c14_shard_determinism(criterion):
    args = [sys.executable, "-m", "clusterbound", "mayer", "--potential", "hardrod:sigma=1",
            "--beta", "1", "--m", "3", "--samples", "200000", "--seed", "2024"]
    with criterion(14, "mayer JSON byte-identical across shard counts", 60.0) as c:
        outs = [subprocess.run(args + ["--shards", str(s)], capture_output=True, check=True).stdout
                for s in (1, 2, 4, 1)]
        c.check(all(o == outs[0] for o in outs), f"{len(outs)} runs, {len(outs[0])} bytes")
        c.check(json.loads(outs[0])["seed"] == 2024, "seed echoed")


def test_c15_curve_crossings(criterion, capsys):
    with criterion(15, "curve CSV crosses K* and 1.3 at the expected u", 10.0) as c:
        cli.main(["curves", "--u-min", "0.01", "--u-max", "1.3", "--points", "400"])
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        u = np.array([float(r["u"]) for r in rows])
        g = np.array([float(r["g_a_star"]) for r in rows])
        # g(a*(u)) decreases in u; linear interpolation of each single crossing
        d = g - u  # K* is the fixed point g(a*(u)) = u, i.e. the beta B = 0 case
        i = int(np.flatnonzero(d >= 0)[-1])
        fixed = u[i] + d[i] * (u[i + 1] - u[i]) / (d[i] - d[i + 1])
        c.check(abs(fixed - K_STAR) <= 1e-3, f"g==u at u={fixed:.4f}")
        i = int(np.flatnonzero(g >= 1.3)[-1])
        cross = u[i] + (1.3 - g[i]) * (u[i + 1] - u[i]) / (g[i + 1] - g[i])
        c.check(abs(cross - 0.1099) <= 2e-3, f"g==1.3 at u={cross:.4f}")
