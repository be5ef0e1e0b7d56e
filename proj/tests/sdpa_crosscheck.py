"""Solve exported SDPA files with an external solver and compare.

Usage: sdpa_crosscheck.py <path to nspcert binary>. Exits 77 (skip) when
cvxpy is not installed.
"""
import json
import subprocess
import sys
import warnings

warnings.filterwarnings("ignore")

try:
    import cvxpy as cp
    import numpy as np
except ImportError:
    print("cvxpy not available, skipping")
    sys.exit(77)

CLI = sys.argv[1]
TIGHT = dict(tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10, max_iter=500)
# Interior-point answers on the A-space form carry roughly this much error.
REF_TOL = 2e-4


def read_sdpa(path):
    with open(path) as f:
        lines = [l.strip() for l in f if l.strip() and l[0] not in "*\""]
    m = int(lines[0].split()[0])
    nblock = int(lines[1].split()[0])
    sizes = [int(s) for s in lines[2].replace(",", " ").split()[:nblock]]
    c = np.array([float(v) for v in lines[3].replace(",", " ").split()[:m]])
    mats = [[np.zeros((abs(s), abs(s))) for s in sizes] for _ in range(m + 1)]
    for line in lines[4:]:
        mat, blk, i, j, v = line.split()
        a = mats[int(mat)][int(blk) - 1]
        i, j, v = int(i) - 1, int(j) - 1, float(v)
        a[i, j] = v
        a[j, i] = v
    return c, sizes, mats


def solve_sdpa(path):
    """min c^T x  s.t.  sum_i F_i x_i - F_0 >= 0 blockwise."""
    c, sizes, mats = read_sdpa(path)
    x = cp.Variable(len(c))
    cons = []
    for b, s in enumerate(sizes):
        expr = -mats[0][b] + sum(x[i] * mats[i + 1][b] for i in range(len(c))
                                 if np.any(mats[i + 1][b]))
        if s > 0:
            cons.append((expr + expr.T) / 2 >> 0)
        else:
            cons.append(cp.diag(expr) >= 0)
    prob = cp.Problem(cp.Minimize(c @ x), cons)
    prob.solve(solver=cp.CLARABEL, **TIGHT)
    return prob.value


def primal(a, k, columnwise):
    m, n = a.shape
    g = cp.Variable((2 * n, 2 * n), symmetric=True)
    x, z, y = g[:n, :n], g[n:, :n], g[n:, n:]
    cons = [g >> 0, a @ x @ a.T == 0, cp.sum(cp.abs(x)) <= 1]
    if columnwise:
        t = cp.Variable(n, nonneg=True)
        r = cp.Variable(n, nonneg=True)
        cons += [cp.sum(cp.abs(y), axis=0) <= k * t, cp.abs(y) <= np.ones((n, 1)) @ t[None, :],
                 cp.sum(t) <= k, t <= 1,
                 cp.sum(cp.abs(z), axis=0) <= k * r, cp.abs(z) <= np.ones((n, 1)) @ r[None, :],
                 cp.sum(r) <= 1]
    else:
        cons += [cp.abs(y) <= 1, cp.sum(cp.abs(y)) <= k * k, cp.sum(cp.abs(z)) <= k]
    prob = cp.Problem(cp.Maximize(cp.trace(z)), cons)
    prob.solve(solver=cp.CLARABEL, **TIGHT)
    return prob.value


def write_matrix(path, a):
    m, n = a.shape
    with open(path, "w") as f:
        f.write(json.dumps({"m": m, "n": n, "ensemble": "file", "seed": 0}) + "\n")
        for row in a:
            f.write(" ".join("%.17g" % v for v in row) + "\n")


def run(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


failures = []


def check(name, ok, detail):
    print(("ok   " if ok else "FAIL ") + name + ": " + detail)
    if not ok:
        failures.append(name)


# Zero-sum row, k = 1: the relaxation is tight at 1/2.
write_matrix("row111.txt", np.ones((1, 3)))
run("export", "--matrix", "row111.txt", "--k", "1", "--form", "primal_basic",
    "--out", "row111.dat-s").check_returncode()
v = solve_sdpa("row111.dat-s")
check("row111 basic optimum", abs(v - 0.5) <= 1e-5, "%.8f" % v)

rng = np.random.default_rng(7)
for seed in range(3):
    a = rng.normal(size=(4, 8)) / 4 ** 0.25
    write_matrix("g%d.txt" % seed, a)
    for k in (1, 2):
        run("export", "--matrix", "g%d.txt" % seed, "--k", str(k), "--form",
            "primal_basic", "--out", "g.dat-s").check_returncode()
        kernel = solve_sdpa("g.dat-s")
        basic = primal(a, k, columnwise=False)
        col = primal(a, k, columnwise=True)
        check("seed %d k %d export matches A-space relaxation" % (seed, k),
              abs(kernel - basic) <= REF_TOL, "%.7f vs %.7f" % (kernel, basic))
        check("seed %d k %d columnwise <= basic" % (seed, k), col <= basic + REF_TOL,
              "%.7f <= %.7f" % (col, basic))
        ex = json.loads(run("exact", "--matrix", "g%d.txt" % seed, "--k", str(k)).stdout)
        check("seed %d k %d exact <= relaxation" % (seed, k),
              ex["alpha_exact"] <= kernel + 1e-6, "%.7f <= %.7f" % (ex["alpha_exact"], kernel))
        rep = json.loads(run("bound", "--matrix", "g%d.txt" % seed, "--k", str(k)).stdout)
        ub = rep["alpha_upper"]
        # Reported bounds are capped at 1.
        target = min(kernel, 1.0)
        check("seed %d k %d solver bound brackets relaxation" % (seed, k),
              target - 1e-6 <= ub <= target + 2e-2, "%.7f in [%.7f, +0.02]" % (ub, target))

# Decision form: the optimal level value is positive above the relaxation
# value and negative below it.
for level, sign in ((0.9, 1), (0.3, -1)):
    run("export", "--matrix", "row111.txt", "--k", "1", "--form", "decision",
        "--alpha-bar", str(level), "--out", "dec.dat-s").check_returncode()
    lam = -solve_sdpa("dec.dat-s")
    check("decision level %.1f sign" % level, sign * lam > 0, "lambda* = %.6f" % lam)

sys.exit(1 if failures else 0)
