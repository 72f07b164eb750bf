"""Acceptance checks, one printed pass/fail line per criterion.

Run with pytest (lines appear in the terminal summary) or directly:
``python3 tests/test_acceptance.py``.
"""

import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from acceptance_log import RESULTS, record  # noqa: E402

from liexp.algebra import decompose, lorenz_basis, sl_basis, so_basis  # noqa: E402
from liexp.cli import random_algebra_matrix, banded  # noqa: E402
from liexp.compose import evaluate, plan_skc  # noqa: E402
from liexp.coords import (  # noqa: E402
    order_coeffs_generic,
    order_coeffs_sln_fast,
    order_coeffs_son_fast,
    skc_alphas,
)
from liexp.flops import FlopCounter  # noqa: E402
from liexp.integrator import integrate, kdv_ode  # noqa: E402
from liexp.oracle import convergence_study, fit_slope, group_defect, logm_ref, t_grid  # noqa: E402
from liexp.sparse import TridiagSL, TridiagSO, skc2_tridiag_sln, skc2_tridiag_son  # noqa: E402
from liexp.splitting import (  # noqa: E402
    basis_split,
    q2_generic,
    q2_son_fast,
    strang,
    strang_plan,
    symmetric_skc4,
    yoshida4,
    yoshida4_plan,
)

ALGEBRAS = [("so", 5), ("sl", 4), ("lorenz", 4)]


def _basis(kind, n):
    return {"so": so_basis, "sl": sl_basis}[kind](n) if kind != "lorenz" else lorenz_basis()


# 1 -------------------------------------------------------------------------


def check_orders(seeds=range(5)):
    worst = []
    ok = True
    ts = t_grid(1, 5)
    for kind, n in ALGEBRAS:
        basis = _basis(kind, n)
        for seed in seeds:
            B = random_algebra_matrix(kind, n, np.random.default_rng(seed))
            x = decompose(B, basis)
            for p in range(1, 5):
                plan = plan_skc(skc_alphas(x, p))
                s = convergence_study(lambda B, t: evaluate(plan, t), B, ts).slope
                good = p + 0.6 <= s <= p + 1.6
                ok &= good
                worst.append((abs(s - (p + 1)), kind, p, s))
    d, kind, p, s = max(worst)
    return ok, f"{len(worst)} fits in [p+0.6, p+1.6]; largest deviation {kind} p={p} slope {s:.3f}"


def test_c1_order_of_accuracy():
    ok, detail = check_orders()
    assert record("1", "SKC order p=1..4 on so(5), sl(4), so(3,1)", ok, detail), detail


# 2 -------------------------------------------------------------------------


def _approximant(method, x, t):
    if method.startswith("skc"):
        return evaluate(plan_skc(skc_alphas(x, int(method[3:]))), t)
    if method == "strang":
        return evaluate(strang_plan(x), t)
    if method == "yoshida4":
        return evaluate(yoshida4_plan(x), t)
    if method == "sym4":
        return evaluate(symmetric_skc4(x), t)
    raise ValueError(method)


METHODS = ["skc1", "skc2", "skc3", "skc4", "strang", "yoshida4", "sym4"]
LIMITS = {"so": 1e-12, "sl": 1e-10, "lorenz": 1e-12}


def check_group(ntriples=50, seed=2024):
    rng = np.random.default_rng(seed)
    worst = {k: 0.0 for k in LIMITS}
    ok = True
    for _ in range(ntriples):
        kind = ["so", "sl", "lorenz"][rng.integers(3)]
        n = 4 if kind == "lorenz" else int(rng.integers(3, 11))
        B = random_algebra_matrix(kind, n, rng) * rng.uniform(0.5, 3.0)
        method = METHODS[rng.integers(len(METHODS))]
        t = float(rng.uniform(-1.0, 1.0))
        F = _approximant(method, decompose(B, _basis(kind, n)), t)
        dfc = group_defect(F, kind)
        worst[kind] = max(worst[kind], dfc)
        ok &= dfc <= LIMITS[kind]
    detail = ", ".join(f"{k} max defect {v:.2e} (limit {LIMITS[k]:.0e})" for k, v in worst.items())
    return ok, detail


def test_c2_group_preservation():
    ok, detail = check_group()
    assert record("2", "group membership of 50 random approximants", ok, detail), detail


# 3 -------------------------------------------------------------------------


def check_time_symmetry(ninst=20, seed=77):
    rng = np.random.default_rng(seed)
    worst = {"strang": 0.0, "yoshida4": 0.0, "sym4": 0.0}
    for _ in range(ninst):
        kind, n = ALGEBRAS[rng.integers(3)]
        B = random_algebra_matrix(kind, n, rng)
        x = decompose(B, _basis(kind, n))
        t = float(rng.uniform(0.05, 1.0))
        split = basis_split(x)
        pairs = {
            "strang": (strang(split, t), strang(split, -t)),
            "yoshida4": (yoshida4(split, t), yoshida4(split, -t)),
        }
        plan = symmetric_skc4(x)
        pairs["sym4"] = (evaluate(plan, t), evaluate(plan, -t))
        for name, (Fp, Fm) in pairs.items():
            worst[name] = max(worst[name], float(np.linalg.norm(Fp @ Fm - np.eye(B.shape[0]))))
    ok = all(v <= 1e-12 for v in worst.values())
    return ok, ", ".join(f"{k} max ||F(t)F(-t)-I|| {v:.2e}" for k, v in worst.items())


def test_c3_time_symmetry():
    ok, detail = check_time_symmetry()
    assert record("3", "time symmetry of Strang, Yoshida-4, symmetric SKC4", ok, detail), detail


# 4 -------------------------------------------------------------------------


def check_lemma(ninst=10, seed=11):
    rng = np.random.default_rng(seed)
    worst_rel, worst_slope = 0.0, np.inf
    for k in range(ninst):
        kind, n = (("so", 4), ("sl", 3))[k % 2]
        B = random_algebra_matrix(kind, n, rng)
        split = basis_split(decompose(B, _basis(kind, n)))
        split = [split[i] for i in rng.permutation(len(split))]
        Q = q2_generic(split)
        # q2_generic lists the split innermost first; strang lists it outermost first
        logs = {}
        for j in range(3, 8):
            t = 2.0 ** -j
            logs[j] = logm_ref(strang(split[::-1], t))
        t6 = 2.0 ** -6
        est = 12.0 / t6 ** 3 * (logs[6] - t6 * B)
        worst_rel = max(worst_rel, float(np.linalg.norm(est - Q) / np.linalg.norm(Q)))
        ts = 2.0 ** -np.arange(3, 8)
        res = [np.linalg.norm(logs[j] - t * B - t ** 3 / 12.0 * Q) for j, t in zip(range(3, 8), ts)]
        worst_slope = min(worst_slope, fit_slope(ts, res))
    ok = worst_rel <= 0.05 and worst_slope >= 4.5
    return ok, f"max relative error at t=2^-6 {worst_rel:.2e}, min residual exponent {worst_slope:.3f}"


def test_c4_lemma_q2():
    ok, detail = check_lemma()
    assert record("4", "leading Strang error equals (t^3/12) Q2", ok, detail), detail


# 5 -------------------------------------------------------------------------


def check_fast_paths(seeds=range(20)):
    q2_worst = 0.0
    for seed in seeds:
        rng = np.random.default_rng(seed)
        for n in range(4, 9):
            B = random_algebra_matrix("so", n, rng)
            fast = q2_son_fast(B)
            gen = q2_generic(basis_split(decompose(B, so_basis(n))))
            q2_worst = max(q2_worst, float(np.linalg.norm(fast - gen) / np.linalg.norm(B) ** 3))
    coef_worst = 0.0
    for seed in seeds:
        rng = np.random.default_rng(1000 + seed)
        n = 3 + seed % 4
        B = random_algebra_matrix("so", n, rng)
        g = order_coeffs_generic(decompose(B, so_basis(n)), 2).g
        coef_worst = max(coef_worst, float(np.abs(order_coeffs_son_fast(B, 2).g - g).max()))
        B = random_algebra_matrix("sl", n, rng)
        g = order_coeffs_generic(decompose(B, sl_basis(n)), 2).g
        coef_worst = max(coef_worst, float(np.abs(order_coeffs_sln_fast(B, 2).g - g).max()))
    ok = q2_worst <= 1e-12 and coef_worst <= 1e-13
    return ok, f"Q2 fast/generic max rel diff {q2_worst:.2e}; order-2 fast/generic max diff {coef_worst:.2e}"


def test_c5_fast_path_equivalence():
    ok, detail = check_fast_paths()
    assert record("5", "fast paths equal generic paths", ok, detail), detail


# 6 -------------------------------------------------------------------------

# quadratic coefficients of the printed order-2 Lorenz polynomials:
# {(a, b): c} means c * beta_a * beta_b * t^2 (1-based)
PRINTED_LORENZ = {
    1: {(2, 3): Fraction(1, 2), (4, 5): Fraction(-1, 2)},
    2: {(1, 3): Fraction(-1, 2), (4, 6): Fraction(-1, 2)},
    3: {(1, 2): Fraction(1, 2), (5, 6): Fraction(-1, 2)},
    4: {(1, 5): Fraction(-1, 2), (2, 6): Fraction(-1, 2)},
    5: {(1, 4): Fraction(1, 2), (3, 6): Fraction(-1, 2)},
    6: {(3, 5): Fraction(1, 2), (2, 4): Fraction(-1, 2)},
}


def lorenz_quadratic_forms():
    """Exact rational bilinear coefficients of each computed alpha_k t^2 term."""
    basis = lorenz_basis()
    E = np.eye(6)

    def quad(beta):
        return skc_alphas(basis.element(beta), 2).coeffs[:, 2]

    out = {k: {} for k in range(1, 7)}
    linear_ok = True
    for a in range(6):
        al = skc_alphas(basis.element(E[a]), 2).coeffs
        linear_ok &= bool(np.array_equal(al[:, 1], E[a])) and not al[:, 2].any()
        for b in range(a + 1, 6):
            v = quad(E[a] + E[b]) - quad(E[a]) - quad(E[b])
            for k in range(6):
                if v[k] != 0.0:
                    out[k + 1][(a + 1, b + 1)] = Fraction(v[k])
    return out, linear_ok


def check_golden():
    got, linear_ok = lorenz_quadratic_forms()
    per = {k: got[k] == PRINTED_LORENZ[k] for k in range(1, 7)}
    return per, linear_ok, got


def test_c6_golden_lorenz_alpha1_to_alpha5():
    per, linear_ok, got = check_golden()
    ok = linear_ok and all(per[k] for k in range(1, 6))
    record("6a", "order-2 Lorenz alpha_1..alpha_5 equal the printed polynomials",
           ok, "linear terms beta_k t; quadratic terms " + ("all equal" if ok else str(got)))
    assert ok


@pytest.mark.xfail(strict=True, reason="printed alpha_6 disagrees with the printed commutator table; "
                   "see the decisions ledger and test_printed_alpha6_is_first_order")
def test_c6_golden_lorenz_alpha6():
    per, _, got = check_golden()
    detail = (f"computed {dict(sorted(got[6].items()))}, printed {dict(sorted(PRINTED_LORENZ[6].items()))}; "
              "[V2,V4] = -V6 and [V3,V5] = -V6 force equal signs")
    assert record("6b", "order-2 Lorenz alpha_6 equals the printed polynomial", per[6], detail), detail


def test_printed_alpha6_is_first_order():
    """Substituting the printed alpha_6 loses second order, so it cannot be the intended one."""
    basis = lorenz_basis()
    B = random_algebra_matrix("lorenz", 4, np.random.default_rng(5))
    x = decompose(B, basis)
    a = skc_alphas(x, 2)
    b = x.beta
    bad = a.coeffs.copy()
    bad[5, 2] = 0.5 * (b[2] * b[4] - b[1] * b[3])
    from liexp.coords import AlphaPolynomials
    ts = t_grid(1, 5)
    good = convergence_study(lambda B, t: evaluate(plan_skc(a), t), B, ts).slope
    wrong = convergence_study(lambda B, t: evaluate(plan_skc(AlphaPolynomials(basis, bad)), t), B, ts).slope
    assert 2.6 <= good <= 3.6
    assert wrong < 2.4


# 7 -------------------------------------------------------------------------


def check_complexity(seed=42):
    rng = np.random.default_rng(seed)
    n = 50
    fl = FlopCounter()
    q2_son_fast(random_algebra_matrix("so", n, rng), fl)
    full = fl.total / n ** 3
    fl = FlopCounter()
    q2_son_fast(banded(random_algebra_matrix("so", n, rng), 5), fl)
    band = fl.total / n ** 3
    ratios = {}
    for kind in ("so", "sl"):
        costs = []
        for m in (100, 200, 400, 800):
            fl = FlopCounter()
            if kind == "so":
                skc2_tridiag_son(TridiagSO(rng.uniform(size=m - 1)), fl)
            else:
                g = rng.uniform(size=m)
                skc2_tridiag_sln(TridiagSL(g - g.mean(), rng.uniform(size=m - 1), rng.uniform(size=m - 1)), fl)
            costs.append(fl.total)
        ratios[kind] = [b / a for a, b in zip(costs, costs[1:])]
    lin = all(1.8 <= r <= 2.2 for rs in ratios.values() for r in rs)
    ok = full <= 12 and band <= 2 and lin
    rtxt = "; ".join(f"{k} " + ",".join(f"{r:.3f}" for r in rs) for k, rs in ratios.items())
    return ok, f"Q2 full so(50) {full:.3f} n^3, bandwidth-5 {band:.3f} n^3; tridiagonal build ratios {rtxt}"


def test_c7_complexity():
    ok, detail = check_complexity()
    assert record("7", "operation counts", ok, detail), detail


# 8 -------------------------------------------------------------------------

_KDV = {}


def kdv_study():
    if not _KDV:
        ode = kdv_ode()
        ref = integrate(ode, 2.0 ** -10, 5.0, "oracle").final
        hs = 2.0 ** -np.arange(1, 6)
        ends = {m: [integrate(ode, h, 5.0, m).final for h in hs] for m in ("oracle", "skc4_symmetric")}
        errs = {m: [float(np.linalg.norm(y - ref)) for y in v] for m, v in ends.items()}
        diff = [float(np.linalg.norm(a - b)) for a, b in zip(ends["oracle"], ends["skc4_symmetric"])]
        _KDV.update(hs=hs, errs=errs, diff=diff,
                    slopes={m: fit_slope(hs, e) for m, e in errs.items()})
    return _KDV


def test_c8_kdv_mode_difference():
    st = kdv_study()
    ratios = [d / e for d, e in zip(st["diff"], st["errs"]["oracle"])]
    ok = all(r <= 10.0 for r in ratios)
    detail = "diff/oracle-error per h: " + ", ".join(f"{r:.3f}" for r in ratios)
    assert record("8a", "KdV mode-vs-mode difference <= 10x oracle-mode error", ok, detail), detail


def test_c8_kdv_slope_skc4():
    s = kdv_study()["slopes"]["skc4_symmetric"]
    ok = 3.6 <= s <= 4.6
    assert record("8b", "KdV order-4 slope, symmetric SKC4 exponential", ok,
                  f"fitted slope {s:.3f} over h=2^-1..2^-5"), s


@pytest.mark.xfail(strict=True, reason="h=2^-1 and 2^-2 are pre-asymptotic for this unstable ODE; "
                   "see the decisions ledger")
def test_c8_kdv_slope_oracle():
    st = kdv_study()
    s = st["slopes"]["oracle"]
    e = st["errs"]["oracle"]
    local = ", ".join(f"{np.log2(a / b):.2f}" for a, b in zip(e, e[1:]))
    ok = 3.6 <= s <= 4.6
    assert record("8c", "KdV order-4 slope, reference exponential", ok,
                  f"fitted slope {s:.3f} over h=2^-1..2^-5 (per-halving rates {local})"), s


def test_kdv_oracle_mode_is_order_four_past_the_transient():
    """Supporting evidence for 8c: the method itself converges at order 4."""
    ode = kdv_ode()
    ref = integrate(ode, 2.0 ** -10, 5.0, "oracle").final
    hs = 2.0 ** -np.arange(3, 8)
    errs = [np.linalg.norm(integrate(ode, h, 5.0, "oracle").final - ref) for h in hs]
    s = fit_slope(hs, errs)
    record("8*", "supplementary: reference-exponential slope over h=2^-3..2^-7", None, f"{s:.3f}")
    assert 3.8 <= s <= 4.3


# 9 -------------------------------------------------------------------------


def test_c9_figures_not_reproduced():
    record("9", "figure curve values", None,
           "not reproducible from the source; criteria 1 and 8 use slope-based acceptance instead")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
