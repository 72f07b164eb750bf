"""Command line benchmarks: convergence orders, Q2 cost, banded cost, KdV."""

from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import AlgebraKind, decompose, make_basis, project, sl_basis, so_basis
from .compose import evaluate, evaluate_action, plan_skc
from .coords import alphas_from_coeffs, order_coeffs_son_fast, skc_alphas
from .flops import FlopCounter
from .integrator import fit_soliton, integrate, kdv_exact, kdv_ode
from .oracle import error_frob, fit_slope, group_defect, t_grid
from .sparse import TridiagSL, TridiagSO, skc2_tridiag_sln, skc2_tridiag_son
from .splitting import q2_son_fast, strang_plan, symmetric_skc4, yoshida4_plan

DEFAULT_SEED = 42
METHODS = ("skc", "strang", "yoshida4", "skc4sym")
# explicit order conditions loop over the structure table per pair; past this
# dimension the series recursion is much faster
_EXPLICIT_MAX_D = 64


@dataclass
class RunConfig:
    command: str
    algebra: str = "so"
    n: int = 5
    orders: list[int] = field(default_factory=lambda: [1, 2, 3, 4])
    methods: list[str] = field(default_factory=lambda: ["skc"])
    kmin: int = 1
    kmax: int = 5
    seed: int = DEFAULT_SEED
    band: int | None = None
    out: str | None = None
    figure: bool = True
    extra: dict = field(default_factory=dict)

    def echo(self) -> str:
        parts = [f"command={self.command}", f"algebra={self.algebra}", f"n={self.n}",
                 f"order={','.join(map(str, self.orders))}", f"method={','.join(self.methods)}",
                 f"kmin={self.kmin}", f"kmax={self.kmax}", f"seed={self.seed}"]
        if self.band is not None:
            parts.append(f"band={self.band}")
        parts += [f"{k}={v}" for k, v in self.extra.items()]
        return " ".join(parts)


class Table:
    """Rows for one CSV file, plus a plain-text rendering."""

    def __init__(self, columns):
        self.columns = list(columns)
        self.rows = []

    def add(self, *row):
        self.rows.append(row)

    @staticmethod
    def _fmt(v) -> str:
        if isinstance(v, (bool, np.bool_)):
            return "true" if v else "false"
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return "nan" if math.isnan(v) else f"{float(v):.16e}"
        return str(v)

    def csv(self, cfg: RunConfig) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(self._fmt(v) for v in row) + "\n")
        buf.write(f"# config: {cfg.echo()}\n")
        return buf.getvalue()

    def pretty(self) -> str:
        def short(v):
            if isinstance(v, (float, np.floating)):
                return f"{float(v):.4g}"
            return self._fmt(v)
        cells = [self.columns] + [[short(v) for v in r] for r in self.rows]
        widths = [max(len(r[c]) for r in cells) for c in range(len(self.columns))]
        lines = ["  ".join(s.rjust(w) for s, w in zip(r, widths)) for r in cells]
        return "\n".join(lines)


def random_algebra_matrix(kind: str, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform(0,1) entries projected into the algebra, scaled to unit Frobenius norm."""
    kind = AlgebraKind(kind)
    if kind is AlgebraKind.LORENZ:
        n = 4
    B = project(rng.uniform(size=(n, n)), kind)
    return B / np.linalg.norm(B)


def banded(B: np.ndarray, w: int) -> np.ndarray:
    """B with entries farther than w from the diagonal removed, renormalised."""
    n = B.shape[0]
    mask = np.abs(np.subtract.outer(np.arange(n), np.arange(n))) <= w
    out = np.where(mask, B, 0.0)
    return out / np.linalg.norm(out)


# ---------------------------------------------------------------------------


def _plan_for(method: str, p: int, x, flops: FlopCounter):
    basis = x.basis
    if method == "skc":
        if p <= 2 and basis.kind is AlgebraKind.SO and basis.ordering == "lex":
            return plan_skc(alphas_from_coeffs(order_coeffs_son_fast(x.materialize(), p, flops)))
        how = "explicit" if basis.d <= _EXPLICIT_MAX_D else "recursive"
        return plan_skc(skc_alphas(x, p, how))
    if method == "strang":
        return strang_plan(x)
    if method == "yoshida4":
        return yoshida4_plan(x)
    if method == "skc4sym":
        center = "first" if basis.kind is AlgebraKind.SO else "last"
        return symmetric_skc4(x, center, flops)
    raise ValueError(f"unknown method {method!r}")


def _nominal_order(method: str, p: int) -> int:
    return {"skc": p, "strang": 2, "yoshida4": 4, "skc4sym": 4}[method]


def cmd_bench_orders(cfg: RunConfig) -> tuple[Table, dict]:
    rng = np.random.default_rng(cfg.seed)
    B = random_algebra_matrix(cfg.algebra, cfg.n, rng)
    basis = make_basis(cfg.algebra, B.shape[0])
    x = decompose(B, basis)
    ts = t_grid(cfg.kmin, cfg.kmax)
    table = Table(["method", "order", "t", "error", "group_defect", "build_flops", "eval_flops", "slope"])
    fits = {}
    for method in cfg.methods:
        for p in (cfg.orders if method == "skc" else [_nominal_order(method, 0)]):
            build = FlopCounter()
            plan = _plan_for(method, p, x, build)
            rows = []
            for t in ts:
                ev = FlopCounter()
                F = evaluate(plan, t, ev)
                rows.append((t, error_frob(B, t, F), group_defect(F, basis.kind), ev.total))
            slope = fit_slope(ts, [r[1] for r in rows])
            label = f"{method}{p}" if method == "skc" else method
            fits[label] = (slope, _nominal_order(method, p))
            for t, err, gd, evf in rows:
                table.add(label, _nominal_order(method, p), t, err, gd, build.total, evf, slope)
    return table, {"fits": fits}


def cmd_bench_q2(cfg: RunConfig) -> tuple[Table, dict]:
    rng = np.random.default_rng(cfg.seed)
    w = cfg.band if cfg.band is not None else 5
    n = cfg.n
    table = Table(["input", "n", "bandwidth", "flops", "flops_per_n3"])
    B = random_algebra_matrix("so", n, rng)
    fl = FlopCounter()
    q2_son_fast(B, fl)
    full = fl.total
    table.add("full", n, n - 1, full, full / n ** 3)
    scaling = []
    for m in (n, 2 * n, 4 * n):
        Bm = banded(random_algebra_matrix("so", m, rng), w)
        fl = FlopCounter()
        q2_son_fast(Bm, fl)
        scaling.append(fl.total)
        table.add("banded", m, w, fl.total, fl.total / m ** 3)
    info = {
        "full_per_n3": full / n ** 3,
        "banded_per_n3": scaling[0] / n ** 3,
        "banded_ratios": [b / a for a, b in zip(scaling, scaling[1:])],
        "banded_le_full_over_5": scaling[0] <= full / 5,
    }
    return table, info


def cmd_bench_sparse(cfg: RunConfig, sizes=(100, 200, 400, 800)) -> tuple[Table, dict]:
    rng = np.random.default_rng(cfg.seed)
    table = Table(["algebra", "n", "factors", "build_flops", "action_flops", "build_ratio", "max_band"])
    info = {}
    for kind in ("so", "sl"):
        prev = None
        builds, totals = [], []
        for n in sizes:
            if kind == "so":
                x = TridiagSO(rng.uniform(size=n - 1))
                fl = FlopCounter()
                plan = skc2_tridiag_son(x, fl)
            else:
                g = rng.uniform(size=n)
                x = TridiagSL(g - g.mean(), rng.uniform(size=n - 1), rng.uniform(size=n - 1))
                fl = FlopCounter()
                plan = skc2_tridiag_sln(x, fl)
            act = FlopCounter()
            evaluate_action(plan, 0.5, np.ones(n), act)
            band = max(abs(f.element.j - f.element.i) if f.element.kind != "D" else 0 for f in plan.factors)
            ratio = fl.total / prev if prev else float("nan")
            prev = fl.total
            builds.append(fl.total)
            totals.append(fl.total + act.total)
            table.add(kind, n, len(plan), fl.total, act.total, ratio, band)
        exponent = float(np.polyfit(np.log(sizes), np.log(totals), 1)[0])
        info[kind] = {"ratios": [b / a for a, b in zip(builds, builds[1:])], "exponent": exponent}
    # correctness of the banded paths against the generic order-2 product
    n = 8
    B = TridiagSO(rng.uniform(size=n - 1))
    dense = plan_skc(skc_alphas(decompose(B.dense(), so_basis(n, "row_reversed")), 2))
    info["so_check"] = float(np.linalg.norm(evaluate(skc2_tridiag_son(B), 0.5) - evaluate(dense, 0.5)))
    g = rng.uniform(size=n)
    S = TridiagSL(g - g.mean(), rng.uniform(size=n - 1), rng.uniform(size=n - 1))
    dense = plan_skc(skc_alphas(decompose(S.dense(), sl_basis(n)), 2))
    info["sl_check"] = float(np.linalg.norm(evaluate(skc2_tridiag_sln(S), 0.5) - evaluate(dense, 0.5)))
    return table, info


def cmd_kdv(cfg: RunConfig, modes=("oracle", "skc4_symmetric"), ref_k: int = 10) -> tuple[Table, dict]:
    ode = kdv_ode()
    T = 5.0
    reference = integrate(ode, 2.0 ** -ref_k, T, "oracle")
    ref = reference.final
    hs = 2.0 ** -np.arange(cfg.kmin, cfg.kmax + 1)
    errs = {m: [] for m in modes}
    ends = {m: [] for m in modes}
    for h in hs:
        for m in modes:
            y = integrate(ode, h, T, m).final
            ends[m].append(y)
            errs[m].append(float(np.linalg.norm(y - ref)))
    diff = [float(np.linalg.norm(a - b)) for a, b in zip(ends[modes[0]], ends[modes[1]])]
    slopes = {m: fit_slope(hs, errs[m]) for m in modes}
    cols = ["h"] + [f"err_{m}" for m in modes] + ["mode_diff", "diff_over_err"] + [f"slope_{m}" for m in modes]
    table = Table(cols)
    for k, h in enumerate(hs):
        table.add(h, *[errs[m][k] for m in modes], diff[k], diff[k] / errs[modes[0]][k],
                  *[slopes[m] for m in modes])
    beta, rms = fit_soliton(reference.times, reference.states[:, 0], 2)
    info = {
        "slopes": slopes,
        "errors": errs,
        "diff": diff,
        "hs": hs,
        "soliton_beta": beta,
        "soliton_rms": rms,
        "exact_gap": float(abs(ref[0] - kdv_exact(T))),
        "reference": reference,
    }
    return table, info


# ---------------------------------------------------------------------------


def _int_list(s: str) -> list[int]:
    return [int(v) for v in s.split(",") if v]


def _str_list(s: str) -> list[str]:
    return [v for v in s.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="liexp", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, n=5, kmax=5):
        p.add_argument("--algebra", choices=[k.value for k in AlgebraKind], default="so")
        p.add_argument("--n", type=int, default=n)
        p.add_argument("--order", type=_int_list, default=[1, 2, 3, 4],
                       help="comma-separated SKC orders (1..4)")
        p.add_argument("--method", type=_str_list, default=["skc"],
                       help=f"comma-separated methods from {','.join(METHODS)}")
        p.add_argument("--kmin", type=int, default=1)
        p.add_argument("--kmax", type=int, default=kmax)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--band", type=int, default=None)
        p.add_argument("--out", default=None, help="CSV path (stdout when omitted)")
        p.add_argument("--figure", action=argparse.BooleanOptionalAction, default=True,
                       help="also write a PNG next to the CSV")

    common(sub.add_parser("bench-orders", help="error versus t for each method"))
    common(sub.add_parser("bench-q2", help="operation count of the fast Q2"), n=50)
    common(sub.add_parser("bench-sparse", help="cost of the tridiagonal order-2 products"))
    p = sub.add_parser("kdv", help="RK-MK4 on the KdV soliton, error versus h")
    common(p)
    p.add_argument("--trajectory", default=None, help="CSV path for the reference trajectory")
    return ap


def _config(args) -> RunConfig:
    cfg = RunConfig(args.command, args.algebra, args.n, args.order, args.method,
                    args.kmin, args.kmax, args.seed, args.band, args.out, args.figure)
    for p in cfg.orders:
        if not 1 <= p <= 4:
            raise ValueError(f"order {p} outside 1..4")
    for m in cfg.methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {','.join(METHODS)}")
    if cfg.n < 2:
        raise ValueError("--n must be at least 2")
    if not 1 <= cfg.kmin <= cfg.kmax:
        raise ValueError("need 1 <= kmin <= kmax")
    return cfg


def _summary(cfg: RunConfig, info: dict) -> list[str]:
    lines = []
    if cfg.command == "bench-orders":
        for label, (slope, p) in info["fits"].items():
            lines.append(f"{label}: fitted error exponent {slope:.3f} (order {p}, expected {p + 1})")
    elif cfg.command == "bench-q2":
        lines.append(f"full: {info['full_per_n3']:.3f} n^3, banded: {info['banded_per_n3']:.3f} n^3")
        lines.append("banded cost ratios on doubling n: " + ", ".join(f"{r:.3f}" for r in info["banded_ratios"]))
        lines.append(f"banded <= full/5: {info['banded_le_full_over_5']}")
    elif cfg.command == "bench-sparse":
        for kind in ("so", "sl"):
            r = info[kind]
            lines.append(f"{kind}: build ratios " + ", ".join(f"{v:.3f}" for v in r["ratios"])
                         + f"; fitted exponent {r['exponent']:.3f}")
        lines.append(f"n=8 check against the generic product: so {info['so_check']:.2e}, sl {info['sl_check']:.2e}")
    elif cfg.command == "kdv":
        for m, s in info["slopes"].items():
            lines.append(f"{m}: fitted order {s:.3f}")
        lines.append(f"fitted y1 = sech^2(beta t): beta = {info['soliton_beta']:.6f}, rms {info['soliton_rms']:.2e}")
    return lines


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
    except ValueError as exc:
        parser.error(str(exc))
    runner = {
        "bench-orders": cmd_bench_orders,
        "bench-q2": cmd_bench_q2,
        "bench-sparse": cmd_bench_sparse,
        "kdv": cmd_kdv,
    }[cfg.command]
    table, info = runner(cfg)
    text = table.csv(cfg)
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        out = Path(cfg.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        print(table.pretty())
        if cfg.figure:
            from .plotting import render
            png = render(cfg, table, info, out.with_suffix(".png"))
            if png is not None:
                print(f"figure: {png}")
    if cfg.command == "kdv" and getattr(args, "trajectory", None):
        info["reference"].to_csv(args.trajectory)
    for line in _summary(cfg, info):
        print(line, file=sys.stderr)
    if cfg.command == "bench-q2" and not info["banded_le_full_over_5"]:
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
